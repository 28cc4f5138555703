//! Transmission spectrum of the uniform slot-Bragg cavity and its resonance.
//! The spectrum goes to stdout as CSV.

use slotbragg::photonics::evaluate::search_window;
use slotbragg::photonics::resonance::find_resonance;
use slotbragg::photonics::stack::build_stack;
use slotbragg::photonics::tmm::transmission_spectrum;
use slotbragg::photonics::{calibrate_index_model, CalibrationTargets, CavityGeometry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = calibrate_index_model(&CalibrationTargets::default())?.lossless();
    let geometry = CavityGeometry::baseline_801(20.0, 10);
    let stack = build_stack(&geometry, &model)?;
    let window = search_window(&geometry, &model);
    let res = find_resonance(&stack, window)?;
    eprintln!(
        "resonance {:.3} nm, FWHM {:.3} nm, Q = {:.2}, T_peak = {:.4}",
        res.lambda0_nm, res.fwhm_nm, res.q, res.peak_transmission
    );
    let spec = transmission_spectrum(&stack, (700.0, 900.0), 801);
    println!("wavelength_nm,transmission,reflection");
    for i in 0..spec.wavelengths_nm.len() {
        println!("{},{},{}", spec.wavelengths_nm[i], spec.transmission[i], spec.reflection[i]);
    }
    Ok(())
}
