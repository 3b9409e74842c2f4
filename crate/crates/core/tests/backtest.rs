use curvecast::backtest::run_expanding_backtest;
use curvecast::config::RunConfig;
use curvecast::data::{level_slope_spec, simulate_factors, simulate_panel, FactorPanel, FuturesPanel};
use curvecast::forecast::{fts_forecast, rw_forecast_panel, ModelKind};

fn inputs(days: usize) -> (FuturesPanel, FactorPanel) {
    let prices = simulate_panel(&level_slope_spec(), days, 31).unwrap().to_prices().unwrap();
    let factors = simulate_factors(prices.dates(), 32).unwrap();
    (prices, factors)
}

fn config(oos_len: usize) -> RunConfig {
    RunConfig {
        oos_len,
        models: ModelKind::ALL.to_vec(),
        bootstrap_reps: 50,
        ..RunConfig::default()
    }
}

#[test]
fn truncating_the_panel_keeps_earlier_forecasts() {
    let (prices, factors) = inputs(90);
    let full = run_expanding_backtest(&config(30), &prices, Some(&factors)).unwrap();
    let cut = 12;
    let short = run_expanding_backtest(
        &config(30 - cut),
        &prices.slice(0, 90 - cut),
        Some(&factors.slice(0, 90 - cut)),
    )
    .unwrap();
    assert_eq!(short.records.len(), full.records.len() - cut * ModelKind::ALL.len());
    for rec in &short.records {
        let twin = full
            .records
            .iter()
            .find(|r| r.model == rec.model && r.target_date == rec.target_date)
            .unwrap();
        assert_eq!(twin, rec);
    }
}

#[test]
fn each_window_sees_exactly_the_past() {
    let (prices, factors) = inputs(80);
    let run = run_expanding_backtest(&config(20), &prices, Some(&factors)).unwrap();
    let log_prices = prices.to_log_prices().unwrap();
    let returns = prices.to_log_returns().unwrap();
    for d in 60..80 {
        let date = prices.dates()[d];
        let pick = |m| run.records.iter().find(|r| r.model == m && r.target_date == date).unwrap();

        let fts = fts_forecast(&log_prices.slice(0, d), 0.99).unwrap();
        assert_eq!(pick(ModelKind::Fts).forecast, fts.values);

        let rw = rw_forecast_panel(&returns.slice(0, d - 1)).unwrap();
        assert_eq!(pick(ModelKind::RandomWalk).forecast, rw);
        assert_eq!(pick(ModelKind::RandomWalk).realized, returns.row(d - 1));
    }
}

#[test]
fn same_seed_same_run() {
    let (prices, factors) = inputs(70);
    let a = run_expanding_backtest(&config(15), &prices, Some(&factors)).unwrap();
    let b = run_expanding_backtest(&config(15), &prices, Some(&factors)).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.mcs, b.mcs);
}
