//! Emitter and cavity populations after an excitation at t = 0, in the
//! coherent and incoherent regimes. Prints CSV.

use slotbragg::qed::{coupling_regime, single_excitation_trajectory, RateSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("case,t,p_e,p_c,p_g");
    for (name, g, kappa, gstar) in [("strong", 50.0, 10.0, 1.0), ("weak", 5.0, 200.0, 10.0)] {
        let rates = RateSet::new(g, kappa, gstar)?;
        eprintln!("{name}: {:?}", coupling_regime(&rates));
        let traj = single_excitation_trajectory(&rates, 1.0, 200)?;
        for i in 0..traj.times.len() {
            println!("{name},{},{},{},{}", traj.times[i], traj.p_e[i], traj.p_c[i], traj.p_g[i]);
        }
    }
    Ok(())
}
