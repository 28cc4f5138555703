//! Smallest g giving I > 0.9 for several dephasing rates, κ optimised at each g.

use slotbragg::qed::{min_coupling_threshold, QedError, SearchBounds};

fn main() -> Result<(), QedError> {
    println!("gammastar,g_min,kappa_best,indist,g_min_over_gammastar");
    for gstar in [1e1, 1e2, 1e3, 1e4] {
        let bounds = SearchBounds { g: (1.0, 1e3 * gstar), kappa: (1.0, 1e4 * gstar) };
        match min_coupling_threshold(gstar, 0.9, bounds) {
            Ok(r) => println!("{gstar},{},{},{},{:.3}", r.g_min, r.kappa_best, r.indist, r.g_min / gstar),
            Err(QedError::UnreachableTarget { best, .. }) => println!("{gstar},nan,nan,{best},nan"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
