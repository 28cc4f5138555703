//! The genetic algorithm on its own, minimising a shifted sphere inside a box.

use slotbragg::evolve::{run_ga, GAConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let centre: Vec<f64> = (0..20).map(|i| 30.0 + 2.0 * i as f64).collect();
    let fitness = |w: &[f64]| -w.iter().zip(&centre).map(|(a, c)| (a - c).powi(2)).sum::<f64>();
    let cfg = GAConfig { generations: 400, ..Default::default() };
    let r = run_ga(fitness, centre.len(), &cfg)?;
    let rms = (-r.best_fitness / centre.len() as f64).sqrt();
    println!("{} evaluations, best fitness {:.4}, rms gene error {rms:.3} nm", r.evaluation_count, r.best_fitness);
    print!("{}", r.history_csv().lines().step_by(50).map(|l| format!("{l}\n")).collect::<String>());
    Ok(())
}
