//! Load a futures panel and a factor panel from CSV, align them on shared
//! dates and print descriptive statistics.
//!
//! Writes a small simulated pair of files first so the example runs
//! anywhere: `cargo run --example ingest_panel`.

use curvecast::data::{
    align_panels, descriptive_stats, level_slope_spec, load_factors, load_panel, save_factors, save_panel,
    simulate_factors, simulate_panel, MissingPolicy, PanelSchema,
};

fn main() -> curvecast::Result<()> {
    let dir = std::env::temp_dir().join("curvecast_ingest_example");
    std::fs::create_dir_all(&dir).map_err(|e| curvecast::Error::io(&dir, e))?;

    let prices = simulate_panel(&level_slope_spec(), 260, 11)?.to_prices()?;
    save_panel(&prices, dir.join("futures.csv"))?;
    save_factors(&simulate_factors(&prices.dates()[5..], 12)?, dir.join("factors.csv"))?;

    let futures = load_panel(dir.join("futures.csv"), &PanelSchema::default())?;
    let factors = load_factors(dir.join("factors.csv"), MissingPolicy::Reject)?;
    let (futures, factors) = align_panels(&futures, &factors)?;
    println!("{} aligned days, first {}", futures.n_days(), futures.dates()[0]);
    assert_eq!(factors.n_days(), futures.n_days());

    println!("{:>5} {:>9} {:>8} {:>8}", "", "mean", "sd", "skew");
    for s in descriptive_stats(&futures)? {
        println!(
            "{:>5} {:>9.3} {:>8.3} {:>8.3}",
            s.name,
            s.mean,
            s.std_dev,
            s.skewness.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
