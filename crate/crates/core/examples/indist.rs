//! Indistinguishability of one rate set by both integration routes.
//!
//! cargo run --release --example indist -- [g kappa gammastar]

use slotbragg::qed::{coupling_regime, indistinguishability, photon_transfer_rate, Method, RateSet, DEFAULT_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (g, kappa, gstar) = match args.as_slice() {
        [g, k, s] => (*g, *k, *s),
        [] => (1e4, 3e4, 1e4),
        _ => return Err("expected: g kappa gammastar (units of γ)".into()),
    };
    let rates = RateSet::new(g, kappa, gstar)?;
    println!("g = {g}γ, κ = {kappa}γ, γ* = {gstar}γ");
    println!("regime: {:?}, R = 4g²/κ = {:.4e}γ", coupling_regime(&rates), photon_transfer_rate(&rates));
    for method in [Method::Eigen, Method::Quadrature] {
        let r = indistinguishability(&rates, method, DEFAULT_TOL)?;
        println!("{method:?}: I = {:.6} (t_max = {:.3e}/γ, {} panels)", r.indist, r.t_max, r.panels);
    }
    let r = photon_transfer_rate(&rates);
    println!("bad-cavity estimate (1+R)/(1+R+2γ*) = {:.6}", (1.0 + r) / (1.0 + r + 2.0 * gstar));
    Ok(())
}
