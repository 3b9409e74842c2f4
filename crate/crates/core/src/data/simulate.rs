//! Synthetic curve panels drawn from a truncated Karhunen-Loeve expansion.
//!
//! Each simulated day is `mean + sum_k score[t,k] * eigenfunction_k + noise`,
//! evaluated at the tenor nodes. Scores either follow a damped-trend
//! exponential smoothing process driven by Gaussian innovations or are given
//! explicitly.
//!
//! # Spec file grammar
//!
//! Plain text, one `key = value` per line; `#` starts a comment; lists are
//! comma separated.
//!
//! ```text
//! scale       = log_price            # or `price`
//! tenors      = CL1,CL2,...,CL18      # optional, defaults to the 11 WTI tenors
//! mean        = 4.38,4.39,...        # one value per tenor
//! noise_sd    = 0.002
//! start_date  = 2009-01-02           # optional
//! seed        = 7                    # optional
//! days        = 1300                 # optional
//!
//! component.1.eigenfunction = 0.24,0.24,...
//! component.1.xi    = 0.9            # damped-trend score process
//! component.1.delta = 0.8
//! component.1.gamma = 0.05
//! component.1.l0    = 0.0
//! component.1.b0    = 0.0
//! component.1.sd    = 0.08
//!
//! component.2.eigenfunction = ...
//! component.2.scores = 1,2,3,...     # explicit scores instead of a process
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::panel::{
    canonical_tenors, FactorPanel, FuturesPanel, ScaleMarker, Tenor, FACTOR_COLUMNS,
};
use crate::ets::DampedTrendParams;
use crate::error::{Error, Result};
use crate::fpca::FunctionGrid;

/// Tolerance applied when validating eigenfunction orthonormality.
pub const ORTHONORMAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreProcess {
    DampedTrend {
        params: DampedTrendParams,
        innovation_sd: f64,
    },
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlComponent {
    pub eigenfunction: Vec<f64>,
    pub process: ScoreProcess,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlSpec {
    pub tenors: Vec<Tenor>,
    pub mean: Vec<f64>,
    pub components: Vec<KlComponent>,
    pub noise_sd: f64,
    pub scale: ScaleMarker,
    pub start_date: NaiveDate,
    pub seed: Option<u64>,
    pub days: Option<usize>,
}

impl KlSpec {
    pub fn new(mean: Vec<f64>, scale: ScaleMarker) -> Self {
        Self {
            tenors: canonical_tenors(),
            mean,
            components: Vec::new(),
            noise_sd: 0.0,
            scale,
            start_date: default_start(),
            seed: None,
            days: None,
        }
    }

    pub fn with_component(mut self, eigenfunction: Vec<f64>, process: ScoreProcess) -> Self {
        self.components.push(KlComponent {
            eigenfunction,
            process,
        });
        self
    }

    pub fn with_noise(mut self, noise_sd: f64) -> Self {
        self.noise_sd = noise_sd;
        self
    }

    pub fn grid(&self) -> Result<FunctionGrid> {
        FunctionGrid::trapezoidal(self.tenors.iter().map(|t| t.months).collect())
    }

    /// Checks shapes and that the eigenfunctions are orthonormal on the grid.
    pub fn validate(&self) -> Result<()> {
        let p = self.tenors.len();
        if self.mean.len() != p {
            return Err(Error::InvalidSpec(format!(
                "mean has {} values for {p} tenors",
                self.mean.len()
            )));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(Error::InvalidSpec("noise_sd must be non-negative".into()));
        }
        if !matches!(self.scale, ScaleMarker::Price | ScaleMarker::LogPrice) {
            return Err(Error::InvalidSpec(
                "scale must be price or log_price".into(),
            ));
        }
        let grid = self.grid()?;
        for (k, c) in self.components.iter().enumerate() {
            if c.eigenfunction.len() != p {
                return Err(Error::InvalidSpec(format!(
                    "component {} eigenfunction has {} values for {p} tenors",
                    k + 1,
                    c.eigenfunction.len()
                )));
            }
            if let ScoreProcess::DampedTrend {
                params,
                innovation_sd,
            } = &c.process
            {
                params.validate()?;
                if !(*innovation_sd >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "component {} sd must be non-negative",
                        k + 1
                    )));
                }
            }
        }
        for i in 0..self.components.len() {
            for j in 0..=i {
                let ip = grid.inner(
                    &self.components[i].eigenfunction,
                    &self.components[j].eigenfunction,
                );
                let target = if i == j { 1.0 } else { 0.0 };
                let deviation = (ip - target).abs();
                if deviation > ORTHONORMAL_TOL {
                    return Err(Error::NonOrthonormalSpec {
                        i: i + 1,
                        j: j + 1,
                        deviation,
                    });
                }
            }
        }
        Ok(())
    }
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 1, 2).expect("valid date")
}

/// `n` consecutive weekdays starting at (or after) `start`.
pub fn weekday_dates(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

/// Draws the score paths, `n_days x K`.
fn simulate_scores(spec: &KlSpec, n_days: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>> {
    let mut scores = DMatrix::zeros(n_days, spec.components.len());
    for (k, c) in spec.components.iter().enumerate() {
        match &c.process {
            ScoreProcess::Fixed(values) => {
                if values.len() < n_days {
                    return Err(Error::InvalidSpec(format!(
                        "component {} lists {} scores for {n_days} days",
                        k + 1,
                        values.len()
                    )));
                }
                for t in 0..n_days {
                    scores[(t, k)] = values[t];
                }
            }
            ScoreProcess::DampedTrend {
                params,
                innovation_sd,
            } => {
                let (mut level, mut growth) = (params.l0, params.b0);
                for t in 0..n_days {
                    let z: f64 = StandardNormal.sample(rng);
                    let eps = innovation_sd * z;
                    let trend = params.xi * growth;
                    scores[(t, k)] = level + trend + eps;
                    level += trend + params.delta * eps;
                    growth = trend + params.gamma * eps;
                }
            }
        }
    }
    Ok(scores)
}

/// Simulates a panel; identical `(spec, n_days, seed)` give identical output.
pub fn simulate_panel(spec: &KlSpec, n_days: usize, seed: u64) -> Result<FuturesPanel> {
    spec.validate()?;
    if n_days < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n_days,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores = simulate_scores(spec, n_days, &mut rng)?;
    let p = spec.tenors.len();
    let mut values = DMatrix::zeros(n_days, p);
    for t in 0..n_days {
        for i in 0..p {
            let mut v = spec.mean[i];
            for (k, c) in spec.components.iter().enumerate() {
                v += scores[(t, k)] * c.eigenfunction[i];
            }
            values[(t, i)] = v;
        }
    }
    if spec.noise_sd > 0.0 {
        for t in 0..n_days {
            for i in 0..p {
                let z: f64 = StandardNormal.sample(&mut rng);
                values[(t, i)] += spec.noise_sd * z;
            }
        }
    }
    FuturesPanel::new(
        weekday_dates(spec.start_date, n_days),
        spec.tenors.clone(),
        values,
        spec.scale,
    )
}

/// Geometric random-walk factor levels on the given dates, for exercising the
/// fundamental-factor model without external data.
pub fn simulate_factors(dates: &[NaiveDate], seed: u64) -> Result<FactorPanel> {
    let start = [1000.0, 20.0, 80.0, 100.0];
    let vol = [0.01, 0.06, 0.004, 0.25];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = dates.len();
    let mut values = DMatrix::zeros(n, 4);
    let mut level = start;
    for t in 0..n {
        for j in 0..4 {
            if t > 0 {
                let z: f64 = StandardNormal.sample(&mut rng);
                level[j] *= (vol[j] * z).exp();
            }
            values[(t, j)] = level[j];
        }
    }
    FactorPanel::new(
        dates.to_vec(),
        FACTOR_COLUMNS.iter().map(|s| s.to_string()).collect(),
        values,
        ScaleMarker::Price,
    )
}

pub fn load_kl_spec(path: impl AsRef<Path>) -> Result<KlSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_kl_spec(&text)
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("{key}: bad number `{}`", s.trim())))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidSpec(format!("{key}: bad value `{value}`")))
}

pub fn parse_kl_spec(text: &str) -> Result<KlSpec> {
    let mut top: BTreeMap<String, String> = BTreeMap::new();
    let mut comps: BTreeMap<usize, BTreeMap<String, String>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidSpec(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        if let Some(rest) = key.strip_prefix("component.") {
            let (idx, field) = rest.split_once('.').ok_or_else(|| {
                Error::InvalidSpec(format!("line {}: bad component key `{key}`", lineno + 1))
            })?;
            let idx: usize = parse_num(key, idx)?;
            if idx == 0 {
                return Err(Error::InvalidSpec("components are numbered from 1".into()));
            }
            comps
                .entry(idx)
                .or_default()
                .insert(field.trim().to_string(), value);
        } else {
            top.insert(key.to_string(), value);
        }
    }

    let scale = match top.get("scale") {
        Some(s) => ScaleMarker::parse(s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown scale `{s}`")))?,
        None => ScaleMarker::LogPrice,
    };
    let tenors = match top.get("tenors") {
        Some(s) => s
            .split(',')
            .map(|l| {
                Tenor::from_label(l.trim())
                    .ok_or_else(|| Error::InvalidSpec(format!("bad tenor label `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?,
        None => canonical_tenors(),
    };
    let mean = parse_list(
        "mean",
        top.get("mean")
            .ok_or_else(|| Error::InvalidSpec("missing `mean`".into()))?,
    )?;
    let noise_sd = top
        .get("noise_sd")
        .map(|v| parse_num("noise_sd", v))
        .transpose()?
        .unwrap_or(0.0);
    let start_date = match top.get("start_date") {
        Some(s) => NaiveDate::parse_from_str(s, "%Y-%m-%d")
            .map_err(|e| Error::InvalidSpec(format!("start_date: {e}")))?,
        None => default_start(),
    };
    let seed = top.get("seed").map(|v| parse_num("seed", v)).transpose()?;
    let days = top.get("days").map(|v| parse_num("days", v)).transpose()?;

    let mut components = Vec::new();
    for (expected, (idx, fields)) in comps.into_iter().enumerate() {
        if idx != expected + 1 {
            return Err(Error::InvalidSpec(format!(
                "component {} missing",
                expected + 1
            )));
        }
        let key = |f: &str| format!("component.{idx}.{f}");
        let eigenfunction = parse_list(
            &key("eigenfunction"),
            fields
                .get("eigenfunction")
                .ok_or_else(|| Error::InvalidSpec(format!("missing {}", key("eigenfunction"))))?,
        )?;
        let process = if let Some(s) = fields.get("scores") {
            ScoreProcess::Fixed(parse_list(&key("scores"), s)?)
        } else {
            let get = |f: &str, default: Option<f64>| -> Result<f64> {
                match fields.get(f) {
                    Some(v) => parse_num(&key(f), v),
                    None => default
                        .ok_or_else(|| Error::InvalidSpec(format!("missing {}", key(f)))),
                }
            };
            ScoreProcess::DampedTrend {
                params: DampedTrendParams {
                    xi: get("xi", None)?,
                    delta: get("delta", None)?,
                    gamma: get("gamma", None)?,
                    l0: get("l0", Some(0.0))?,
                    b0: get("b0", Some(0.0))?,
                },
                innovation_sd: get("sd", None)?,
            }
        };
        components.push(KlComponent {
            eigenfunction,
            process,
        });
    }

    let spec = KlSpec {
        tenors,
        mean,
        components,
        noise_sd,
        scale,
        start_date,
        seed,
        days,
    };
    spec.validate()?;
    Ok(spec)
}

/// A two-component log-price curve: a flat level factor and an upward
/// sloping factor, both with damped-trend scores. Used by the examples and
/// the end-to-end tests.
pub fn level_slope_spec() -> KlSpec {
    let tenors = canonical_tenors();
    let grid = FunctionGrid::trapezoidal(tenors.iter().map(|t| t.months).collect())
        .expect("canonical grid");
    let basis = grid.orthonormalize(&[
        vec![1.0; tenors.len()],
        tenors.iter().map(|t| t.months).collect(),
    ]);
    let mean: Vec<f64> = tenors
        .iter()
        .map(|t| 80f64.ln() + 0.004 * (t.months - 1.0))
        .collect();
    KlSpec::new(mean, ScaleMarker::LogPrice)
        .with_component(
            basis[0].clone(),
            ScoreProcess::DampedTrend {
                params: DampedTrendParams {
                    xi: 0.9,
                    delta: 1.0,
                    gamma: 0.1,
                    l0: 0.0,
                    b0: 0.0,
                },
                innovation_sd: 0.06,
            },
        )
        .with_component(
            basis[1].clone(),
            ScoreProcess::DampedTrend {
                params: DampedTrendParams {
                    xi: 0.85,
                    delta: 0.9,
                    gamma: 0.2,
                    l0: 0.0,
                    b0: 0.0,
                },
                innovation_sd: 0.03,
            },
        )
        .with_noise(0.001)
}
