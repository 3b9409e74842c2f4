//! Model confidence set on three loss series where one model is clearly
//! worse, plus pairwise Diebold-Mariano tests.

use chrono::{Days, NaiveDate};
use curvecast::evaluation::LossMatrix;
use curvecast::mcs::{dm_test, mcs_run, modified_dm_test, BootstrapPlan, McsStatistic};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> curvecast::Result<()> {
    let t = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut losses = DMatrix::zeros(t, 3);
    for s in 0..t {
        let base = 1.0 + noise.sample(&mut rng);
        losses[(s, 0)] = base;
        losses[(s, 1)] = base + noise.sample(&mut rng) * 0.1;
        losses[(s, 2)] = base + 1.0 + noise.sample(&mut rng);
    }
    let start = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();
    let dates = (0..t).map(|s| start + Days::new(s as u64)).collect();
    let matrix = LossMatrix::new(dates, vec!["A".into(), "B".into(), "C".into()], losses)?;

    let plan = BootstrapPlan::auto(&matrix, 5000, 7)?;
    println!("block length {}", plan.block_len);
    for kind in [McsStatistic::Range, McsStatistic::Max] {
        let result = mcs_run(&matrix, 0.10, kind, &plan)?;
        for e in &result.sequence {
            println!("  {kind}: step {} drops {} (p = {:.3})", e.step, e.model, e.p_value);
        }
        println!("{kind} superior set at 90%: {:?}", result.surviving);
        println!("{kind} superior set at 75%: {:?}", result.at_level(0.25)?.surviving);
    }

    let (a, c) = (matrix.column(0), matrix.column(2));
    let dm = dm_test(&a, &c)?;
    let mdm = modified_dm_test(&a, &c, 1)?;
    println!("DM A vs C: {:.2} (p {:.2e}); modified {:.2} (p {:.2e})", dm.statistic, dm.p_value, mdm.statistic, mdm.p_value);
    Ok(())
}
