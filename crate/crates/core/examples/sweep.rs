//! I against slot width and against period count at γ* = 10⁴γ.

use slotbragg::photonics::CavityGeometry;
use slotbragg::pipeline::{resolve_jobs, run_sweep, sweep_csv, RunConfig, SweepArgs, SweepParam};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let jobs = resolve_jobs(None)?;
    let slot = RunConfig { geometry: CavityGeometry::baseline_801(20.0, 10), ..Default::default() };
    let args = SweepArgs { param: SweepParam::SlotWidthNm, from: 10.0, to: 50.0, steps: 9 };
    print!("{}", sweep_csv(args.param, &run_sweep(&slot, &args, jobs)?, &[]));

    let periods = RunConfig { geometry: CavityGeometry::baseline_801(15.0, 10), ..Default::default() };
    let args = SweepArgs { param: SweepParam::Periods, from: 10.0, to: 100.0, steps: 10 };
    print!("{}", sweep_csv(args.param, &run_sweep(&periods, &args, jobs)?, &[]));
    Ok(())
}
