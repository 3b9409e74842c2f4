//! Simulate a curve panel from a text spec: a flat level factor plus a
//! fixed, deterministic slope path.

use curvecast::data::{parse_kl_spec, simulate_panel};

const SPEC: &str = "
scale = log_price
mean = 4.40,4.41,4.42,4.43,4.44,4.45,4.46,4.47,4.48,4.50,4.53
noise_sd = 0.0005
component.1.eigenfunction = 0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297,0.24253562503633297
component.1.xi = 0.9
component.1.delta = 1.0
component.1.gamma = 0.1
component.1.l0 = 0.0
component.1.b0 = 0.0
component.1.sd = 0.05
";

fn main() -> curvecast::Result<()> {
    let spec = parse_kl_spec(SPEC)?;
    let panel = simulate_panel(&spec, 120, 5)?;
    let again = simulate_panel(&spec, 120, 5)?;
    assert_eq!(panel, again, "same seed, same panel");

    let prices = panel.to_prices()?;
    for t in [0, 60, 119] {
        let row = prices.row(t);
        println!("{}  CL1 {:7.3}  CL18 {:7.3}", prices.dates()[t], row[0], row[10]);
    }
    Ok(())
}
