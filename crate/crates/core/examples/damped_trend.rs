//! Fit a damped-trend exponential smoothing model to a trending series and
//! forecast ahead.

use curvecast::ets::{ets_fit, ets_forecast};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> curvecast::Result<()> {
    // generate from xi = 0.95, delta = 0.6, gamma = 0.1
    let (xi, delta, gamma) = (0.95, 0.6, 0.1);
    let (mut level, mut growth) = (10.0, 0.4);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut series = Vec::with_capacity(300);
    for _ in 0..300 {
        let e = noise.sample(&mut rng);
        let trend = xi * growth;
        series.push(level + trend + e);
        level += trend + delta * e;
        growth = trend + gamma * e;
    }

    let fit = ets_fit(&series)?;
    let p = fit.params;
    println!("xi {:.3}  delta {:.3}  gamma {:.3}  sse {:.4}", p.xi, p.delta, p.gamma, fit.sse);
    let path = ets_forecast(&fit, 5)?;
    println!("last observation {:.3}", series[299]);
    for (h, v) in path.iter().enumerate() {
        println!("  h={} {:.3}", h + 1, v);
    }
    Ok(())
}
