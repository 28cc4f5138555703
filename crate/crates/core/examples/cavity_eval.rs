//! Full physics chain for the baseline cavity and every emitter preset:
//! resonance, mode volume, g, κ, Purcell factor and I.

use slotbragg::photonics::{calibrate_index_model, evaluate_geometry, CalibrationTargets, CavityGeometry, EmitterSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = calibrate_index_model(&CalibrationTargets::default())?;
    let geometry = CavityGeometry::baseline_801(20.0, 20);
    println!("emitter,lambda0_nm,q_total,veff_norm,g_over_gamma,kappa_over_gamma,purcell,beta,indist");
    let mut emitters: Vec<EmitterSpec> =
        EmitterSpec::preset_names().iter().filter_map(|n| EmitterSpec::preset(n)).collect();
    emitters.push(EmitterSpec::molecule(0.1));
    for e in &emitters {
        let f = evaluate_geometry(&geometry, e, &model, 1e-6)?;
        println!(
            "{},{:.3},{:.2},{:.4e},{:.4e},{:.4e},{:.4e},{:.4},{:.4}",
            e.name, f.lambda0_nm, f.q_total, f.veff_norm, f.g_over_gamma, f.kappa_over_gamma, f.purcell, f.beta, f.indist
        );
    }
    Ok(())
}
