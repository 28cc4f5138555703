//! Physics dataset of random corrugation vectors, as CSV on stdout.
//!
//! cargo run --release --example dataset -- [n seed] > data.csv

use slotbragg::pipeline::{generate_dataset, DatasetOpts, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(200), |a| a.parse())?;
    let seed: u64 = args.next().map_or(Ok(7), |a| a.parse())?;
    let start = std::time::Instant::now();
    let data = generate_dataset(&RunConfig::default(), &DatasetOpts { n: Some(n), seed: Some(seed), ..Default::default() })?;
    for w in &data.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("{n} rows, {} failed, {:.2?}", data.failures.len(), start.elapsed());
    print!("{}", data.csv);
    Ok(())
}
