//! Functional principal components of simulated log-price curves: how many
//! components reach the variance target, their shares, and a CSV export.

use curvecast::data::{level_slope_spec, simulate_panel};
use curvecast::fpca::{fit_fpca, reconstruct};

fn main() -> curvecast::Result<()> {
    let curves = simulate_panel(&level_slope_spec(), 500, 1)?;
    let model = fit_fpca(&curves, 0.99)?;
    println!("K = {} components explain {:.5}", model.k, model.explained_variance_ratio());
    for (k, share) in model.variance_ratios().iter().take(4).enumerate() {
        println!("  component {}: {:.6}", k + 1, share);
    }

    let fitted = reconstruct(&model, &model.scores, model.k)?;
    let worst = (fitted - curves.values()).abs().max();
    println!("max reconstruction error with K components: {worst:.2e}");

    let out = std::env::temp_dir().join("curvecast_fpca_example");
    for path in curvecast::fpca::export_decomposition(&model, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
