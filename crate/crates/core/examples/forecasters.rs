//! One-step return forecasts from all four models on the same training data.

use curvecast::data::{align_panels, level_slope_spec, simulate_factors, simulate_panel};
use curvecast::forecast::{fts_forecast, fundamental_forecast, pc_forecast, rw_forecast_panel};

fn main() -> curvecast::Result<()> {
    let log_prices = simulate_panel(&level_slope_spec(), 301, 21)?;
    let prices = log_prices.to_prices()?;
    let factors = simulate_factors(prices.dates(), 22)?;
    let (prices, factors) = align_panels(&prices, &factors)?;

    // train on days 0..300, forecast the return on day 300
    let n = 300;
    let train_prices = prices.slice(0, n);
    let returns = train_prices.to_log_returns()?;
    let aligned_prices = train_prices.slice(1, n);
    let factor_changes = factors.slice(0, n).to_log_changes()?;

    let fts = fts_forecast(&train_prices.to_log_prices()?, 0.99)?;
    let pc = pc_forecast(&returns, &aligned_prices)?;
    let fund = fundamental_forecast(&returns, &factor_changes)?;
    let rw = rw_forecast_panel(&returns)?;
    let realized = prices.to_log_returns()?.row(n - 1);

    println!("FTS uses K = {} components", fts.k);
    println!("{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "", "FTS", "PC", "Fund", "RW", "realized");
    for (j, t) in prices.tenors().iter().enumerate() {
        println!(
            "{:>5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            t.label, fts.values[j], pc.values[j], fund[j], rw[j], realized[j]
        );
    }
    Ok(())
}
