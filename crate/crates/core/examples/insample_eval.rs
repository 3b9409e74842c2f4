//! In-sample fit of each model over a training window, scored with the
//! in-sample loss table.

use curvecast::backtest::run_insample_eval;
use curvecast::config::RunConfig;
use curvecast::data::{level_slope_spec, simulate_factors, simulate_panel};

fn main() -> curvecast::Result<()> {
    let prices = simulate_panel(&level_slope_spec(), 300, 8)?.to_prices()?;
    let factors = simulate_factors(prices.dates(), 9)?;
    let mut config = RunConfig::default();
    config.set("oos-len", "50")?;
    config.set("models", "PC,FTS,Fund,RW")?;

    let report = run_insample_eval(&config, &prices, Some(&factors))?;
    report.write_csv(std::io::stdout())?;
    Ok(())
}
