//! I over a log (g, κ) grid and the region where I > 0.9.
//!
//! cargo run --release --example indist_map -- [gammastar n] > map.csv

use slotbragg::qed::{indist_map, iso_region, DEFAULT_TOL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let gstar: f64 = args.next().map_or(Ok(1e4), |a| a.parse())?;
    let n: usize = args.next().map_or(Ok(40), |a| a.parse())?;
    let start = std::time::Instant::now();
    let map = indist_map(gstar, (gstar * 1e-2, gstar * 1e3), (gstar * 1e-2, gstar * 1e4), n, DEFAULT_TOL)?;
    let region = iso_region(&map, 0.9)?;
    eprintln!("{n}x{n} map at γ* = {gstar}γ in {:.2?}", start.elapsed());
    match (region.min_g, region.min_kappa) {
        (Some(g), Some(k)) => eprintln!("I > 0.9 on {} cells; min g = {g:.3e}γ, min κ = {k:.3e}γ", region.cells.len()),
        _ => eprintln!("region: empty"),
    }
    println!("g_over_gamma,kappa_over_gamma,indist");
    for (i, g) in map.g_axis.iter().enumerate() {
        for (j, k) in map.kappa_axis.iter().enumerate() {
            println!("{g},{k},{}", map.get(i, j).unwrap_or(f64::NAN));
        }
    }
    Ok(())
}
