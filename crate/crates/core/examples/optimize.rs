//! The surrogate loop end to end: physics dataset, surrogate, GA on the
//! surrogate, physics re-verification of the best designs.

use slotbragg::evolve::optimize_and_verify;
use slotbragg::pipeline::{generate_dataset, run_train, DatasetOpts, RunConfig};
use slotbragg::surrogate::{Dataset, DatasetMeta};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(1000), |a| a.parse())?;
    let cfg = RunConfig::default();
    let generated = generate_dataset(&cfg, &DatasetOpts { n: Some(n), seed: Some(1), ..Default::default() })?;
    let data = Dataset::from_rows(&generated.rows, DatasetMeta::default())?;
    let (net, history) = run_train(&cfg, &data)?;
    println!("surrogate holdout RMSE {:.4}", history.holdout_rmse().unwrap_or(f64::NAN));

    let emitter = cfg.emitter_spec()?;
    let report = optimize_and_verify(&cfg.ga, &net, &cfg.geometry, &emitter, &generated.model, cfg.top_k, cfg.qed_tol)?;
    let winner = &report.candidates[report.winner];
    println!("baseline I = {:.4}", report.baseline.as_ref().map_or(f64::NAN, |b| b.indist));
    println!("winner  I = {:.4} (surrogate said {:.4})", report.winner_figures.indist, winner.surrogate_indist);
    println!("widths: {:?}", winner.omega.iter().map(|w| (w * 10.0).round() / 10.0).collect::<Vec<_>>());
    println!("resonance shift {:+.2} nm", report.resonance_shift_nm);
    println!(
        "{} surrogate evaluations, {} physics evaluations ({:.0}x fewer)",
        report.surrogate_evaluations,
        report.physics_evaluations,
        report.physics_reduction()
    );
    Ok(())
}
