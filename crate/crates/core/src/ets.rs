//! Damped-trend exponential smoothing for univariate score series.
//!
//! Single source of error state space form:
//!
//! ```text
//! y_t = l_{t-1} + xi * b_{t-1} + e_t
//! l_t = l_{t-1} + xi * b_{t-1} + delta * e_t
//! b_t = xi * b_{t-1} + gamma * e_t
//! ```
//!
//! `xi` damps the growth term so long-horizon forecasts flatten out at
//! `l_n + xi / (1 - xi) * b_n`.

use crate::error::{Error, Result};
use crate::optim::NelderMead;

/// Upper end of the damping range searched by [`ets_fit`].
pub const XI_MAX: f64 = 0.998;
/// Lower end of the level smoothing range searched by [`ets_fit`].
pub const DELTA_MIN: f64 = 1e-4;
const GRID_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedTrendParams {
    /// Damping, `0 <= xi < 1`.
    pub xi: f64,
    /// Level smoothing, `0 < delta <= 1`.
    pub delta: f64,
    /// Growth smoothing, `0 <= gamma <= delta`.
    pub gamma: f64,
    pub l0: f64,
    pub b0: f64,
}

impl DampedTrendParams {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..1.0).contains(&self.xi)
            && self.delta > 0.0
            && self.delta <= 1.0
            && self.gamma >= 0.0
            && self.gamma <= self.delta
            && self.l0.is_finite()
            && self.b0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InadmissibleParams(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtsFit {
    pub params: DampedTrendParams,
    /// `l_1..l_n`
    pub levels: Vec<f64>,
    /// `b_1..b_n`
    pub growths: Vec<f64>,
    /// `e_1..e_n`
    pub residuals: Vec<f64>,
    pub sse: f64,
}

impl EtsFit {
    pub fn last_level(&self) -> f64 {
        *self.levels.last().expect("fit has at least one state")
    }

    pub fn last_growth(&self) -> f64 {
        *self.growths.last().expect("fit has at least one state")
    }

    /// In-sample one-step predictions `l_{t-1} + xi * b_{t-1}`, t = 1..n.
    pub fn fitted(&self) -> Vec<f64> {
        let p = &self.params;
        std::iter::once((p.l0, p.b0))
            .chain(self.levels.iter().copied().zip(self.growths.iter().copied()))
            .take(self.levels.len())
            .map(|(l, b)| l + p.xi * b)
            .collect()
    }
}

/// Runs the recursions over `series`, storing every state.
pub fn ets_filter(series: &[f64], params: DampedTrendParams) -> Result<EtsFit> {
    if series.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: series.len(),
        });
    }
    params.validate()?;
    let n = series.len();
    let mut levels = Vec::with_capacity(n);
    let mut growths = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let (mut level, mut growth) = (params.l0, params.b0);
    let mut sse = 0.0;
    for &y in series {
        let trend = params.xi * growth;
        let e = y - (level + trend);
        level = params.delta * y + (1.0 - params.delta) * (level + trend);
        growth = trend + params.gamma * e;
        levels.push(level);
        growths.push(growth);
        residuals.push(e);
        sse += e * e;
    }
    Ok(EtsFit {
        params,
        levels,
        growths,
        residuals,
        sse,
    })
}

/// The `h`-step path obtained by running the recursions with zero errors.
pub fn ets_forecast(fit: &EtsFit, h: usize) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(Error::InvalidConfig("forecast horizon must be >= 1".into()));
    }
    let xi = fit.params.xi;
    let (mut level, mut growth) = (fit.last_level(), fit.last_growth());
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        growth *= xi;
        level += growth;
        out.push(level);
    }
    Ok(out)
}

fn sse_only(series: &[f64], xi: f64, delta: f64, gamma: f64, l0: f64, b0: f64) -> f64 {
    let (mut level, mut growth) = (l0, b0);
    let mut sse = 0.0;
    for &y in series {
        let trend = xi * growth;
        let e = y - (level + trend);
        level = delta * y + (1.0 - delta) * (level + trend);
        growth = trend + gamma * e;
        sse += e * e;
    }
    sse
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Fits `(xi, delta, gamma, l0, b0)` by minimising the one-step SSE.
///
/// A fixed 8x8x8 grid over `(xi, delta, gamma/delta)` with the initial
/// states held at their heuristic values picks a start; Nelder-Mead then
/// refines all five parameters inside the box
/// `0 <= xi <= XI_MAX, DELTA_MIN <= delta <= 1, 0 <= gamma <= delta`.
/// There is no randomness, so identical input gives identical output.
pub fn ets_fit(series: &[f64]) -> Result<EtsFit> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite value in series".into()));
    }
    let first = series[0];
    let (lo, hi) = series
        .iter()
        .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= 1e-12 * first.abs().max(1.0) {
        return ets_filter(
            series,
            DampedTrendParams {
                xi: 0.0,
                delta: DELTA_MIN,
                gamma: 0.0,
                l0: first,
                b0: 0.0,
            },
        );
    }

    let n_diffs = (n - 1).min(4);
    let b0_init = (series[n_diffs] - series[0]) / n_diffs as f64;
    let l0_init = first;

    let mut best = (f64::INFINITY, [0.0, 1.0, 0.0]);
    for xi in linspace(0.0, 0.98, GRID_POINTS) {
        for delta in linspace(DELTA_MIN, 1.0, GRID_POINTS) {
            for g in linspace(0.0, 1.0, GRID_POINTS) {
                let sse = sse_only(series, xi, delta, g * delta, l0_init, b0_init);
                if sse < best.0 {
                    best = (sse, [xi, delta, g]);
                }
            }
        }
    }

    let spread = (hi - lo).max(f64::MIN_POSITIVE);
    let start = [best.1[0], best.1[1], best.1[2], l0_init, b0_init];
    let steps = [
        0.05,
        0.05,
        0.1,
        0.05 * spread,
        0.05 * spread / n as f64 + 0.1 * b0_init.abs(),
    ];
    let objective = |x: &[f64]| sse_only(series, x[0], x[1], x[2] * x[1], x[3], x[4]);
    let project = |x: &mut [f64]| {
        x[0] = x[0].clamp(0.0, XI_MAX);
        x[1] = x[1].clamp(DELTA_MIN, 1.0);
        x[2] = x[2].clamp(0.0, 1.0);
    };
    let nm = NelderMead::default();
    let (mut x, mut f) = nm.minimize(objective, project, &start, &steps);
    // restart once from the optimum; Nelder-Mead can stall on a collapsed simplex
    let (x2, f2) = nm.minimize(objective, project, &x, &steps);
    if f2 < f {
        x = x2;
        f = f2;
    }
    let params = if f <= best.0 {
        DampedTrendParams {
            xi: x[0],
            delta: x[1],
            gamma: x[2] * x[1],
            l0: x[3],
            b0: x[4],
        }
    } else {
        DampedTrendParams {
            xi: best.1[0],
            delta: best.1[1],
            gamma: best.1[2] * best.1[1],
            l0: l0_init,
            b0: b0_init,
        }
    };
    ets_filter(series, params)
}
