//! Fits the effective-index model to the Q and mode-volume anchors, then
//! shows the exponential growth of Q with the period count.

use slotbragg::photonics::evaluate::search_window;
use slotbragg::photonics::resonance::find_resonance;
use slotbragg::photonics::stack::build_stack;
use slotbragg::photonics::{calibrate_index_model, CalibrationTargets, CavityGeometry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let targets = CalibrationTargets::default();
    let model = calibrate_index_model(&targets)?;
    println!("{}", serde_json::to_string_pretty(&model)?);
    let lossless = model.lossless();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    println!("periods,lambda0_nm,q");
    for p in (10..=60).step_by(10) {
        let g = CavityGeometry::baseline_801(20.0, p);
        let res = find_resonance(&build_stack(&g, &lossless)?, search_window(&g, &lossless))?;
        println!("{p},{:.3},{:.4e}", res.lambda0_nm, res.q);
        xs.push(p as f64);
        ys.push(res.q.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    println!("ln Q slope {:.4} per period, R² = {:.5}", sxy / sxx, sxy * sxy / (sxx * syy));
    Ok(())
}
