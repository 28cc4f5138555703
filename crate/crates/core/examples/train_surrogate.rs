//! Trains the MLP surrogate on a freshly generated dataset, checks its
//! gradients and round-trips it through the JSON model file.

use slotbragg::pipeline::{generate_dataset, run_train, DatasetOpts, RunConfig};
use slotbragg::surrogate::{gradient_check, load, save, Dataset, DatasetMeta};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map_or(Ok(1000), |a| a.parse())?;
    let cfg = RunConfig::default();
    let generated = generate_dataset(&cfg, &DatasetOpts { n: Some(n), seed: Some(1), ..Default::default() })?;
    let data = Dataset::from_rows(&generated.rows, DatasetMeta::default())?;

    let start = std::time::Instant::now();
    let (net, history) = run_train(&cfg, &data)?;
    println!(
        "{} rows, {} epochs in {:.2?}: train RMSE {:.4}, holdout RMSE {:.4} (best epoch {})",
        data.len(),
        history.train_loss.len() - 1,
        start.elapsed(),
        history.train_rmse(),
        history.holdout_rmse().unwrap_or(f64::NAN),
        history.best_epoch
    );
    println!("gradient check: max relative error {:.2e}", gradient_check(&net, &data.inputs[0], data.targets[0])?);

    let path = std::env::temp_dir().join("slotbragg-example-model.json");
    save(&net, &path)?;
    let back = load(&path)?;
    let same = data.inputs.iter().all(|x| net.predict(x).unwrap().to_bits() == back.predict(x).unwrap().to_bits());
    println!("saved to {}; reload bit-exact: {same}", path.display());
    Ok(())
}
