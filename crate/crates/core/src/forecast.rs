//! One-step-ahead forecasters.
//!
//! Every model emits next-day log-return forecasts per tenor so that losses
//! compare like with like:
//!
//! * **FTS**: FPCA of the log-price curves, damped-trend smoothing of each
//!   retained score series, forecast curve minus today's log-price curve.
//! * **Fundamental**: per-tenor regression of returns on the previous day's
//!   log changes in S&P 500, VIX, USD and EcPol.
//! * **PC**: per-tenor regression of returns on the previous day's scores on
//!   the three leading discrete principal components of the price panel.
//! * **RW**: random walk without drift on the return series, so tomorrow's
//!   return forecast is today's return.
//!
//! Windows passed to the regression models are *aligned*: returns, prices
//! and factor changes share the same dates, and row `t` of the regressors
//! explains row `t + 1` of the returns.

use std::fmt;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::data::{FactorPanel, FuturesPanel, ScaleMarker};
use crate::error::{Error, Result};
use crate::ets::{ets_fit, ets_forecast, DampedTrendParams};
use crate::fpca::{self, fit_fpca, FunctionGrid};
use crate::ols::{ols, OlsFit};

/// Minimum training length for the FTS model.
pub const FTS_MIN_WINDOW: usize = 30;
/// Fundamental regressions need more than this many days.
pub const FUNDAMENTAL_MIN_WINDOW: usize = 6;
/// PC regressions need more than this many days.
pub const PC_MIN_WINDOW: usize = 5;
pub const PC_COMPONENTS: usize = 3;
/// Principal components whose eigenvalue is below this fraction of the
/// leading one are dropped from the PC regression.
pub const PC_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Pc,
    Fts,
    Fundamental,
    RandomWalk,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Pc,
        ModelKind::Fts,
        ModelKind::Fundamental,
        ModelKind::RandomWalk,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ModelKind::Pc => "PC",
            ModelKind::Fts => "FTS",
            ModelKind::Fundamental => "Fund",
            ModelKind::RandomWalk => "RW",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pc" => Some(ModelKind::Pc),
            "fts" => Some(ModelKind::Fts),
            "fund" | "fundamental" => Some(ModelKind::Fundamental),
            "rw" | "random_walk" | "randomwalk" => Some(ModelKind::RandomWalk),
            _ => None,
        }
    }

    pub fn needs_factors(self) -> bool {
        self == ModelKind::Fundamental
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One model's forecast for one target date.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRecord {
    pub model: ModelKind,
    pub target_date: NaiveDate,
    pub forecast: Vec<f64>,
    pub realized: Vec<f64>,
}

impl ForecastRecord {
    /// `realized - forecast` per tenor.
    pub fn errors(&self) -> Vec<f64> {
        self.realized
            .iter()
            .zip(&self.forecast)
            .map(|(r, f)| r - f)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FtsForecast {
    pub values: Vec<f64>,
    /// Number of functional components used (0 for a constant window).
    pub k: usize,
    pub explained_variance: f64,
    pub params: Vec<DampedTrendParams>,
}

fn expect_scale(panel_scale: ScaleMarker, expected: ScaleMarker) -> Result<()> {
    if panel_scale != expected {
        return Err(Error::WrongScale {
            expected,
            found: panel_scale,
        });
    }
    Ok(())
}

fn need(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InsufficientData { needed: min, got: n });
    }
    Ok(())
}

/// FTS one-step forecast of tomorrow's log return at each tenor.
pub fn fts_forecast(log_price_window: &FuturesPanel, p1: f64) -> Result<FtsForecast> {
    expect_scale(log_price_window.scale(), ScaleMarker::LogPrice)?;
    let n = log_price_window.n_days();
    need(n, FTS_MIN_WINDOW)?;
    let last = log_price_window.row(n - 1);
    let model = match fit_fpca(log_price_window, p1) {
        Ok(m) => m,
        Err(Error::AllZeroEigenvalues) => {
            // every curve equals the mean: no movement to forecast
            return Ok(FtsForecast {
                values: vec![0.0; last.len()],
                k: 0,
                explained_variance: 1.0,
                params: Vec::new(),
            });
        }
        Err(e) => return Err(e),
    };
    let mut next_scores = Vec::with_capacity(model.k);
    let mut params = Vec::with_capacity(model.k);
    for k in 0..model.k {
        let series: Vec<f64> = model.scores.column(k).iter().copied().collect();
        let fit = ets_fit(&series)?;
        next_scores.push(ets_forecast(&fit, 1)?[0]);
        params.push(fit.params);
    }
    let curve = model.curve(&next_scores);
    Ok(FtsForecast {
        values: curve.iter().zip(&last).map(|(f, l)| f - l).collect(),
        k: model.k,
        explained_variance: model.explained_variance_ratio(),
        params,
    })
}

/// FTS in-sample one-step predictions of the returns on rows `1..n` of the
/// window, `(n - 1) x p`.
pub fn fts_insample(log_price_window: &FuturesPanel, p1: f64) -> Result<DMatrix<f64>> {
    expect_scale(log_price_window.scale(), ScaleMarker::LogPrice)?;
    let n = log_price_window.n_days();
    need(n, FTS_MIN_WINDOW)?;
    let x = log_price_window.values();
    let p = x.ncols();
    let model = match fit_fpca(log_price_window, p1) {
        Ok(m) => m,
        Err(Error::AllZeroEigenvalues) => return Ok(DMatrix::zeros(n - 1, p)),
        Err(e) => return Err(e),
    };
    let mut fitted_scores = DMatrix::zeros(n, model.k);
    for k in 0..model.k {
        let series: Vec<f64> = model.scores.column(k).iter().copied().collect();
        let fit = ets_fit(&series)?;
        for (t, v) in fit.fitted().into_iter().enumerate() {
            fitted_scores[(t, k)] = v;
        }
    }
    Ok(DMatrix::from_fn(n - 1, p, |t, i| {
        let row = t + 1;
        let curve = model.mean[i]
            + (0..model.k)
                .map(|k| fitted_scores[(row, k)] * model.eigenfunctions[(i, k)])
                .sum::<f64>();
        curve - x[(row - 1, i)]
    }))
}

fn check_aligned(a: &[NaiveDate], b: &[NaiveDate]) -> Result<()> {
    if a != b {
        return Err(Error::CoverageMismatch(
            "regression windows must share identical dates".into(),
        ));
    }
    Ok(())
}

/// Per-tenor regressions of `returns[t+1]` on `regressors[t]`.
fn lagged_regressions(
    returns: &DMatrix<f64>,
    regressors: &DMatrix<f64>,
    names: &[String],
) -> Result<Vec<OlsFit>> {
    let n = returns.nrows();
    let x = regressors.rows(0, n - 1).into_owned();
    (0..returns.ncols())
        .map(|j| {
            let y: Vec<f64> = (1..n).map(|t| returns[(t, j)]).collect();
            ols(&y, &x, names.to_vec())
        })
        .collect()
}

fn predict_rows(fits: &[OlsFit], regressors: &DMatrix<f64>, rows: std::ops::Range<usize>) -> DMatrix<f64> {
    let rows: Vec<usize> = rows.collect();
    DMatrix::from_fn(rows.len(), fits.len(), |r, j| {
        let x: Vec<f64> = regressors.row(rows[r]).iter().copied().collect();
        fits[j].predict(&x)
    })
}

/// Fundamental-factor forecast of tomorrow's return at each tenor.
///
/// `factor_changes` holds log changes of the factors on the same dates as
/// `return_window`.
pub fn fundamental_forecast(
    return_window: &FuturesPanel,
    factor_changes: &FactorPanel,
) -> Result<Vec<f64>> {
    let (fits, regs) = fundamental_fits(return_window, factor_changes)?;
    let n = regs.nrows();
    Ok(predict_rows(&fits, &regs, n - 1..n).row(0).iter().copied().collect())
}

/// In-sample fitted returns for rows `1..n`, `(n - 1) x p`.
pub fn fundamental_insample(
    return_window: &FuturesPanel,
    factor_changes: &FactorPanel,
) -> Result<DMatrix<f64>> {
    let (fits, regs) = fundamental_fits(return_window, factor_changes)?;
    let n = regs.nrows();
    Ok(predict_rows(&fits, &regs, 0..n - 1))
}

fn fundamental_fits(
    return_window: &FuturesPanel,
    factor_changes: &FactorPanel,
) -> Result<(Vec<OlsFit>, DMatrix<f64>)> {
    expect_scale(return_window.scale(), ScaleMarker::LogReturn)?;
    expect_scale(factor_changes.scale(), ScaleMarker::LogReturn)?;
    check_aligned(return_window.dates(), factor_changes.dates())?;
    need(return_window.n_days(), FUNDAMENTAL_MIN_WINDOW + 1)?;
    let regs = factor_changes.values().clone();
    let fits = lagged_regressions(return_window.values(), &regs, factor_changes.columns())?;
    Ok((fits, regs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcForecast {
    pub values: Vec<f64>,
    /// Principal components actually used (fewer than three when the price
    /// panel is rank deficient).
    pub components: usize,
}

/// Scores of the price curves on their leading discrete principal
/// components, `n x c` with `c <= PC_COMPONENTS`.
pub fn price_pc_scores(price_window: &FuturesPanel) -> Result<DMatrix<f64>> {
    let x = price_window.values();
    let mean = fpca::estimate_mean(x)?;
    let cov = fpca::estimate_covariance(x, &mean)?;
    let grid = FunctionGrid::euclidean(price_window.tenor_positions())?;
    let spectrum = fpca::eigendecompose(&cov, &grid)?;
    let lead = spectrum.eigenvalues[0];
    let keep = spectrum
        .eigenvalues
        .iter()
        .take(PC_COMPONENTS)
        .take_while(|&&l| lead > 0.0 && l > PC_RANK_TOL * lead)
        .count();
    let p = x.ncols();
    Ok(DMatrix::from_fn(x.nrows(), keep, |t, c| {
        (0..p)
            .map(|i| (x[(t, i)] - mean[i]) * spectrum.eigenfunctions[(i, c)])
            .sum()
    }))
}

fn pc_fits(
    return_window: &FuturesPanel,
    price_window: &FuturesPanel,
) -> Result<(Vec<OlsFit>, DMatrix<f64>)> {
    expect_scale(return_window.scale(), ScaleMarker::LogReturn)?;
    expect_scale(price_window.scale(), ScaleMarker::Price)?;
    check_aligned(return_window.dates(), price_window.dates())?;
    need(return_window.n_days(), PC_MIN_WINDOW + 1)?;
    let scores = price_pc_scores(price_window)?;
    let names: Vec<String> = (1..=scores.ncols()).map(|c| format!("f{c}")).collect();
    let fits = lagged_regressions(return_window.values(), &scores, &names)?;
    Ok((fits, scores))
}

/// PC-factor forecast of tomorrow's return at each tenor.
pub fn pc_forecast(return_window: &FuturesPanel, price_window: &FuturesPanel) -> Result<PcForecast> {
    let (fits, scores) = pc_fits(return_window, price_window)?;
    let n = scores.nrows();
    Ok(PcForecast {
        values: predict_rows(&fits, &scores, n - 1..n).row(0).iter().copied().collect(),
        components: scores.ncols(),
    })
}

pub fn pc_insample(return_window: &FuturesPanel, price_window: &FuturesPanel) -> Result<DMatrix<f64>> {
    let (fits, scores) = pc_fits(return_window, price_window)?;
    let n = scores.nrows();
    Ok(predict_rows(&fits, &scores, 0..n - 1))
}

/// Random walk without drift: the last observed value.
pub fn rw_forecast(series_window: &[f64]) -> Result<f64> {
    series_window
        .last()
        .copied()
        .ok_or(Error::InsufficientData { needed: 1, got: 0 })
}

/// Random-walk forecast of tomorrow's return at each tenor.
pub fn rw_forecast_panel(return_window: &FuturesPanel) -> Result<Vec<f64>> {
    expect_scale(return_window.scale(), ScaleMarker::LogReturn)?;
    need(return_window.n_days(), 1)?;
    Ok(return_window.row(return_window.n_days() - 1))
}

/// Random-walk in-sample predictions for rows `1..n`.
pub fn rw_insample(return_window: &FuturesPanel) -> Result<DMatrix<f64>> {
    expect_scale(return_window.scale(), ScaleMarker::LogReturn)?;
    let n = return_window.n_days();
    need(n, 2)?;
    Ok(return_window.values().rows(0, n - 1).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{canonical_tenors, simulate_panel, weekday_dates, KlSpec, ScoreProcess, FACTOR_COLUMNS};
    use crate::ets::DampedTrendParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dates(n: usize) -> Vec<NaiveDate> {
        weekday_dates(NaiveDate::from_ymd_opt(2012, 1, 2).unwrap(), n)
    }

    fn returns_panel(values: DMatrix<f64>) -> FuturesPanel {
        let n = values.nrows();
        FuturesPanel::new(dates(n), canonical_tenors(), values, ScaleMarker::LogReturn).unwrap()
    }

    fn price_panel(values: DMatrix<f64>) -> FuturesPanel {
        let n = values.nrows();
        FuturesPanel::new(dates(n), canonical_tenors(), values, ScaleMarker::Price).unwrap()
    }

    fn factor_changes(values: DMatrix<f64>) -> FactorPanel {
        let n = values.nrows();
        FactorPanel::new(
            dates(n),
            FACTOR_COLUMNS.iter().map(|s| s.to_string()).collect(),
            values,
            ScaleMarker::LogReturn,
        )
        .unwrap()
    }

    fn random(n: usize, p: usize, scale: f64, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, p, |_, _| scale * rng.random_range(-1.0..1.0))
    }

    #[test]
    fn rw_examples() {
        assert_eq!(rw_forecast(&[0.1, -0.2, 0.004]).unwrap(), 0.004);
        assert_eq!(rw_forecast(&[0.7]).unwrap(), 0.7);
        assert!(rw_forecast(&[]).is_err());
        assert_eq!(rw_forecast(&[9.0, 9.0, 0.004]).unwrap(), 0.004);
    }

    #[test]
    fn fundamental_constant_target() {
        let f = factor_changes(random(40, 4, 0.02, 1));
        let r = returns_panel(DMatrix::from_element(40, 11, 0.01));
        let fc = fundamental_forecast(&r, &f).unwrap();
        assert!(fc.iter().all(|v| (v - 0.01).abs() < 1e-12));
    }

    #[test]
    fn fundamental_planted_model() {
        let fx = random(60, 4, 0.02, 2);
        let beta = [0.3, -0.1, 0.5, 0.05];
        let mut r = DMatrix::zeros(60, 11);
        for t in 1..60 {
            for j in 0..11 {
                let s = 0.001 * j as f64
                    + (0..4).map(|c| beta[c] * (1.0 + 0.1 * j as f64) * fx[(t - 1, c)]).sum::<f64>();
                r[(t, j)] = s;
            }
        }
        let fc = fundamental_forecast(&returns_panel(r), &factor_changes(fx.clone())).unwrap();
        for j in 0..11 {
            let truth = 0.001 * j as f64
                + (0..4).map(|c| beta[c] * (1.0 + 0.1 * j as f64) * fx[(59, c)]).sum::<f64>();
            assert!((fc[j] - truth).abs() <= 1e-10);
        }
    }

    #[test]
    fn fundamental_duplicate_factor_is_singular() {
        let mut fx = random(30, 4, 0.02, 3);
        for t in 0..30 {
            fx[(t, 3)] = fx[(t, 0)];
        }
        let r = returns_panel(random(30, 11, 0.01, 4));
        assert!(matches!(
            fundamental_forecast(&r, &factor_changes(fx)),
            Err(Error::SingularDesign { .. })
        ));
    }

    #[test]
    fn fundamental_shift_invariance() {
        let fx = random(50, 4, 0.02, 5);
        let r = returns_panel(random(50, 11, 0.01, 6));
        let a = fundamental_forecast(&r, &factor_changes(fx.clone())).unwrap();
        let b = fundamental_forecast(&r, &factor_changes(fx.add_scalar(0.3))).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn window_length_floors() {
        let r = returns_panel(random(6, 11, 0.01, 7));
        let f = factor_changes(random(6, 4, 0.01, 8));
        assert!(matches!(
            fundamental_forecast(&r, &f),
            Err(Error::InsufficientData { .. })
        ));
        let r5 = returns_panel(random(5, 11, 0.01, 7));
        let p5 = price_panel(random(5, 11, 1.0, 9).add_scalar(50.0));
        assert!(pc_forecast(&r5, &p5).is_err());
    }

    /// Independent PC1 via power iteration on the covariance.
    fn pc1_scores_oracle(prices: &DMatrix<f64>) -> Vec<f64> {
        let (n, p) = prices.shape();
        let mean: Vec<f64> = (0..p).map(|j| prices.column(j).sum() / n as f64).collect();
        let c = DMatrix::from_fn(n, p, |t, j| prices[(t, j)] - mean[j]);
        let cov = c.transpose() * &c / n as f64;
        let mut v = nalgebra::DVector::from_element(p, 1.0);
        for _ in 0..5000 {
            v = &cov * &v;
            v /= v.norm();
        }
        (0..n).map(|t| (0..p).map(|j| c[(t, j)] * v[j]).sum()).collect()
    }

    #[test]
    fn pc_planted_on_first_component() {
        let n = 80;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        // a dominant level factor plus weaker random structure
        let prices = DMatrix::from_fn(n, 11, |t, j| {
            60.0 + 10.0 * ((t as f64) * 0.13).sin() + 0.3 * j as f64 * ((t as f64) * 0.05).cos()
                + 0.05 * rng.random_range(-1.0..1.0)
        });
        let f1 = pc1_scores_oracle(&prices);
        let mut r = DMatrix::zeros(n, 11);
        for t in 1..n {
            for j in 0..11 {
                r[(t, j)] = 0.002 - 0.0004 * (j as f64 + 1.0) * f1[t - 1];
            }
        }
        let fc = pc_forecast(&returns_panel(r), &price_panel(prices)).unwrap();
        assert_eq!(fc.components, 3);
        for j in 0..11 {
            let truth = 0.002 - 0.0004 * (j as f64 + 1.0) * f1[n - 1];
            assert!((fc.values[j] - truth).abs() <= 1e-8, "{} vs {truth}", fc.values[j]);
        }
    }

    #[test]
    fn pc_constant_returns() {
        let prices = random(40, 11, 2.0, 11).add_scalar(70.0);
        let r = returns_panel(DMatrix::from_element(40, 11, -0.003));
        let fc = pc_forecast(&r, &price_panel(prices)).unwrap();
        assert!(fc.values.iter().all(|v| (v + 0.003).abs() < 1e-12));
    }

    #[test]
    fn pc_rank_two_prices_drop_third_component() {
        let n = 50;
        let prices = DMatrix::from_fn(n, 11, |t, j| {
            70.0 + ((t as f64) * 0.3).sin() * 3.0 + (j as f64) * ((t as f64) * 0.11).cos()
        });
        let r = returns_panel(random(n, 11, 0.01, 12));
        let fc = pc_forecast(&r, &price_panel(prices)).unwrap();
        assert_eq!(fc.components, 2);
    }

    #[test]
    fn pc_shift_invariance() {
        let prices = random(60, 11, 3.0, 13).add_scalar(70.0);
        let r = returns_panel(random(60, 11, 0.01, 14));
        let a = pc_forecast(&r, &price_panel(prices.clone())).unwrap();
        let b = pc_forecast(&r, &price_panel(prices.add_scalar(5.0))).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    fn log_price_panel(values: DMatrix<f64>) -> FuturesPanel {
        let n = values.nrows();
        FuturesPanel::new(dates(n), canonical_tenors(), values, ScaleMarker::LogPrice).unwrap()
    }

    #[test]
    fn fts_constant_panel_forecasts_zero() {
        let x = DMatrix::from_fn(40, 11, |_, j| 4.0 + 0.01 * j as f64);
        let fc = fts_forecast(&log_price_panel(x), 0.99).unwrap();
        assert_eq!(fc.k, 0);
        assert!(fc.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fts_requires_log_prices_and_thirty_days() {
        let x = DMatrix::from_fn(29, 11, |t, j| 4.0 + 0.01 * (t * j) as f64);
        assert!(matches!(
            fts_forecast(&log_price_panel(x.clone()), 0.99),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            fts_forecast(&returns_panel(x), 0.99),
            Err(Error::WrongScale { .. })
        ));
    }

    fn noiseless_damped_spec() -> KlSpec {
        let grid = FunctionGrid::trapezoidal(canonical_tenors().iter().map(|t| t.months).collect()).unwrap();
        let basis = grid.orthonormalize(&[
            vec![1.0; 11],
            canonical_tenors().iter().map(|t| t.months).collect(),
        ]);
        let mean: Vec<f64> = (0..11).map(|i| 4.3 + 0.005 * i as f64).collect();
        let trend = |l0: f64, b0: f64| ScoreProcess::DampedTrend {
            params: DampedTrendParams {
                xi: 0.95,
                delta: 0.5,
                gamma: 0.1,
                l0,
                b0,
            },
            innovation_sd: 0.0,
        };
        KlSpec::new(mean, ScaleMarker::LogPrice)
            .with_component(basis[0].clone(), trend(0.0, 0.05))
            .with_component(basis[1].clone(), trend(0.1, -0.02))
    }

    #[test]
    fn fts_tracks_exact_damped_trends() {
        let spec = noiseless_damped_spec();
        let full = simulate_panel(&spec, 61, 0).unwrap();
        let window = full.slice(0, 60);
        let fc = fts_forecast(&window, 0.99).unwrap();
        let truth: Vec<f64> = full
            .row(60)
            .iter()
            .zip(full.row(59))
            .map(|(a, b)| a - b)
            .collect();
        for (f, t) in fc.values.iter().zip(&truth) {
            assert!((f - t).abs() < 1e-3, "{f} vs {t}");
        }
    }

    #[test]
    fn fts_is_pure_and_shift_invariant() {
        let spec = crate::data::level_slope_spec();
        let panel = simulate_panel(&spec, 80, 3).unwrap();
        let a = fts_forecast(&panel, 0.99).unwrap();
        let b = fts_forecast(&panel.clone(), 0.99).unwrap();
        assert_eq!(a, b);
        let shifted = log_price_panel(panel.values().add_scalar(0.7));
        let c = fts_forecast(&shifted, 0.99).unwrap();
        for (x, y) in a.values.iter().zip(&c.values) {
            assert!((x - y).abs() < 1e-7, "{x} vs {y}");
        }
    }

    #[test]
    fn insample_shapes() {
        let spec = crate::data::level_slope_spec();
        let logp = simulate_panel(&spec, 60, 4).unwrap();
        let prices = logp.to_prices().unwrap();
        let rets = prices.to_log_returns().unwrap();
        let p_al = prices.slice(1, 60);
        let fx = factor_changes(random(59, 4, 0.01, 15));
        let fx = FactorPanel::new(rets.dates().to_vec(), fx.columns().to_vec(), fx.values().clone(), ScaleMarker::LogReturn).unwrap();
        assert_eq!(fts_insample(&logp.slice(1, 60), 0.99).unwrap().shape(), (58, 11));
        assert_eq!(pc_insample(&rets, &p_al).unwrap().shape(), (58, 11));
        assert_eq!(fundamental_insample(&rets, &fx).unwrap().shape(), (58, 11));
        let rw = rw_insample(&rets).unwrap();
        assert_eq!(rw.shape(), (58, 11));
        assert_eq!(rw[(0, 0)], rets.values()[(0, 0)]);
    }
}
