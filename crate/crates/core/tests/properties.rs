use chrono::{Days, NaiveDate};
use nalgebra::DMatrix;
use proptest::prelude::*;

use curvecast::evaluation::{mae, mcpdc, me, mme, LossMatrix, MmeMode, SignTieRule};
use curvecast::mcs::{mcs_run, BootstrapPlan, McsStatistic};

fn panel(max_rows: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..max_rows, 1..6usize).prop_flat_map(|(t, p)| {
        prop::collection::vec(-1.0f64..1.0, t * p).prop_map(move |v| DMatrix::from_vec(t, p, v))
    })
}

fn matrix(cols: Vec<Vec<f64>>, names: &[String]) -> LossMatrix {
    let t = cols[0].len();
    let start = NaiveDate::from_ymd_opt(2015, 3, 2).unwrap();
    LossMatrix::new(
        (0..t).map(|i| start + Days::new(i as u64)).collect(),
        names.to_vec(),
        DMatrix::from_fn(t, cols.len(), |s, j| cols[j][s]),
    )
    .unwrap()
}

// multiples of 1/64 so shifting by an integer is exact
fn dyadic_losses() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..5usize).prop_flat_map(|m| {
        prop::collection::vec(prop::collection::vec((0i32..256).prop_map(|x| x as f64 / 64.0), 60), m)
    })
}

fn names(m: usize) -> Vec<String> {
    ["PC", "FTS", "Fund", "RW", "X"][..m].iter().map(|s| s.to_string()).collect()
}

proptest! {
    #[test]
    fn overall_is_mean_of_tenors(e in panel(30)) {
        for s in [mae(&e).unwrap(), me(&e).unwrap(), mme(&e, MmeMode::Under).unwrap()] {
            let mean = s.per_tenor.iter().sum::<f64>() / s.per_tenor.len() as f64;
            prop_assert!((s.overall - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_flip_swaps_mme_and_negates_me(e in panel(30)) {
        let neg = -e.clone();
        prop_assert_eq!(mme(&e, MmeMode::Under).unwrap(), mme(&neg, MmeMode::Over).unwrap());
        prop_assert_eq!(me(&e).unwrap().overall, -me(&neg).unwrap().overall);
        prop_assert_eq!(mae(&e).unwrap(), mae(&neg).unwrap());
    }

    #[test]
    fn direction_ignores_positive_scale(f in panel(30), c in 0.01f64..100.0) {
        let r = f.map(|x| (x * 7.3).sin());
        for rule in [SignTieRule::ZeroMatchesZero, SignTieRule::ZeroNeverMatches] {
            prop_assert_eq!(mcpdc(&f, &r, rule).unwrap(), mcpdc(&(&f * c), &(&r * c), rule).unwrap());
        }
    }

    #[test]
    fn mcs_ignores_common_shift(cols in dyadic_losses(), shift in 1i32..50, seed in 0u64..1000) {
        let names = names(cols.len());
        let shifted: Vec<Vec<f64>> = cols.iter().map(|c| c.iter().map(|x| x + shift as f64).collect()).collect();
        let plan = BootstrapPlan::new(3, 200, seed).unwrap();
        for kind in [McsStatistic::Range, McsStatistic::Max] {
            let a = mcs_run(&matrix(cols.clone(), &names), 0.1, kind, &plan).unwrap();
            let b = mcs_run(&matrix(shifted.clone(), &names), 0.1, kind, &plan).unwrap();
            prop_assert_eq!(&a.surviving, &b.surviving);
            prop_assert_eq!(a.sequence.len(), b.sequence.len());
            for (x, y) in a.sequence.iter().zip(&b.sequence) {
                prop_assert_eq!(&x.model, &y.model);
                prop_assert_eq!(x.p_value, y.p_value);
                prop_assert!((x.statistic - y.statistic).abs() <= 1e-12 * x.statistic.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mcs_ignores_column_order(cols in dyadic_losses(), seed in 0u64..1000) {
        let names = names(cols.len());
        let mut rev_cols = cols.clone();
        rev_cols.reverse();
        let mut rev_names = names.clone();
        rev_names.reverse();
        let plan = BootstrapPlan::new(2, 200, seed).unwrap();
        for kind in [McsStatistic::Range, McsStatistic::Max] {
            let a = mcs_run(&matrix(cols.clone(), &names), 0.25, kind, &plan).unwrap();
            let b = mcs_run(&matrix(rev_cols.clone(), &rev_names), 0.25, kind, &plan).unwrap();
            let mut sa = a.surviving.clone();
            let mut sb = b.surviving.clone();
            sa.sort();
            sb.sort();
            prop_assert_eq!(sa, sb);
            for n in &names {
                prop_assert_eq!(a.mcs_p_value(n), b.mcs_p_value(n));
            }
        }
    }
}
