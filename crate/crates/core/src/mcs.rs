//! Model Confidence Set with a circular moving-block bootstrap, plus
//! Diebold-Mariano style pairwise tests.
//!
//! The elimination sequence is run to the end once per statistic. Each model
//! gets an MCS p-value (running maximum of the step p-values up to its
//! elimination), and the superior set at level `alpha` is every model whose
//! MCS p-value is at least `alpha`. Stopping at the first step with
//! `p >= alpha` gives the same set.

use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};
use crate::evaluation::LossMatrix;
use crate::ols::ols;

pub const DEFAULT_BOOTSTRAP_REPS: usize = 5000;
/// Coefficient t-statistic above which an AR lag counts as significant.
pub const AR_SIGNIFICANCE: f64 = 1.96;
pub const AR_MAX_LAG: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McsStatistic {
    /// `T_R = max |t_ij|`, eliminating `argmax_i max_j t_ij`.
    Range,
    /// `T_max = max t_i.`, eliminating `argmax_i t_i.`.
    Max,
}

impl McsStatistic {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "range" | "r" => Some(Self::Range),
            "max" => Some(Self::Max),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Range => "range",
            Self::Max => "max",
        }
    }
}

impl fmt::Display for McsStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `d_ij,t = l_i,t - l_j,t` and `d_i.,t = (1/(m-1)) sum_j d_ij,t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDifferentials {
    m: usize,
    t: usize,
    pairwise: Vec<f64>,
    /// `T x m`.
    pub relative: DMatrix<f64>,
}

impl LossDifferentials {
    pub fn n_models(&self) -> usize {
        self.m
    }

    pub fn n_days(&self) -> usize {
        self.t
    }

    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.m + j) * self.t;
        &self.pairwise[start..start + self.t]
    }
}

pub fn loss_differentials(matrix: &LossMatrix) -> Result<LossDifferentials> {
    let m = matrix.n_models();
    let t = matrix.n_days();
    if m < 2 {
        return Err(Error::InsufficientData { needed: 2, got: m });
    }
    let l = &matrix.losses;
    let mut pairwise = vec![0.0; m * m * t];
    for i in 0..m {
        for j in 0..m {
            let start = (i * m + j) * t;
            for s in 0..t {
                pairwise[start + s] = l[(s, i)] - l[(s, j)];
            }
        }
    }
    let relative = DMatrix::from_fn(t, m, |s, i| {
        (0..m).map(|j| pairwise[(i * m + j) * t + s]).sum::<f64>() / (m - 1) as f64
    });
    Ok(LossDifferentials {
        m,
        t,
        pairwise,
        relative,
    })
}

/// Coefficient t-statistic of the highest lag in an AR(q) least-squares fit,
/// or `None` when the lag design is singular.
fn last_lag_t(series: &[f64], q: usize) -> Option<f64> {
    let n = series.len();
    let y: Vec<f64> = series[q..].to_vec();
    let x = DMatrix::from_fn(n - q, q, |r, k| series[q + r - k - 1]);
    let fit = ols(&y, &x, Vec::new()).ok()?;
    let (b, se) = (fit.coefficients[q], fit.std_errors[q]);
    if se > 0.0 {
        Some(b / se)
    } else if b != 0.0 {
        Some(f64::INFINITY)
    } else {
        Some(0.0)
    }
}

/// Longest run of significant lags for one series: AR(1), AR(2), ... are fit
/// in turn and the order grows while the newest lag stays significant.
fn ar_order(series: &[f64], cap: usize) -> usize {
    let mut p = 0;
    for q in 1..=cap {
        match last_lag_t(series, q) {
            Some(t) if t.abs() > AR_SIGNIFICANCE => p = q,
            _ => break,
        }
    }
    p
}

/// Block length from AR fits to every pairwise differential series, lag cap
/// `min(10, T/5)`, floored at 1.
pub fn select_block_length(diffs: &LossDifferentials) -> Result<usize> {
    let t = diffs.n_days();
    if t < 10 {
        return Err(Error::InsufficientData { needed: 10, got: t });
    }
    let cap = AR_MAX_LAG.min(t / 5);
    let mut p = 0;
    for i in 0..diffs.n_models() {
        for j in i + 1..diffs.n_models() {
            p = p.max(ar_order(diffs.pair(i, j), cap));
        }
    }
    Ok(p.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapPlan {
    pub block_len: usize,
    pub reps: usize,
    pub seed: u64,
}

impl BootstrapPlan {
    pub fn new(block_len: usize, reps: usize, seed: u64) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidPlan("block length must be at least 1".into()));
        }
        if reps == 0 {
            return Err(Error::InvalidPlan("need at least one bootstrap replication".into()));
        }
        Ok(Self {
            block_len,
            reps,
            seed,
        })
    }

    /// Plan with the block length chosen from the data, capped at `T/2`.
    /// Series shorter than 10 days get blocks of length 1.
    pub fn auto(matrix: &LossMatrix, reps: usize, seed: u64) -> Result<Self> {
        let p = if matrix.n_models() < 2 || matrix.n_days() < 10 {
            1
        } else {
            let p = select_block_length(&loss_differentials(matrix)?)?;
            p.min((matrix.n_days() / 2).max(1))
        };
        Self::new(p, reps, seed)
    }

    pub fn check_len(&self, t: usize) -> Result<()> {
        if t == 0 || self.block_len > t {
            return Err(Error::InvalidPlan(format!(
                "block length {} does not fit {t} observations",
                self.block_len
            )));
        }
        Ok(())
    }
}

/// Circular moving-block resamples of `0..t`; the same index vectors are
/// meant to be applied to every model.
pub fn block_bootstrap(t: usize, plan: &BootstrapPlan) -> Result<Vec<Vec<usize>>> {
    plan.check_len(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let p = plan.block_len;
    Ok((0..plan.reps)
        .map(|_| {
            let mut idx = Vec::with_capacity(t);
            while idx.len() < t {
                let start = rng.random_range(0..t);
                idx.extend((0..p).map(|k| (start + k) % t).take(t - idx.len()));
            }
            idx
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub step: usize,
    pub model: String,
    pub statistic: f64,
    pub p_value: f64,
    /// Running maximum of step p-values up to this step.
    pub mcs_p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McsResult {
    pub models: Vec<String>,
    pub statistic: McsStatistic,
    pub alpha: f64,
    pub plan: BootstrapPlan,
    /// Models removed at level `alpha`, in elimination order.
    pub eliminated: Vec<Elimination>,
    /// The superior set, in input order.
    pub surviving: Vec<String>,
    /// Full elimination sequence, independent of `alpha`; the last model
    /// standing is not listed and has MCS p-value 1.
    pub sequence: Vec<Elimination>,
}

impl McsResult {
    pub fn contains(&self, model: &str) -> bool {
        self.surviving.iter().any(|m| m == model)
    }

    pub fn mcs_p_value(&self, model: &str) -> Option<f64> {
        if !self.models.iter().any(|m| m == model) {
            return None;
        }
        Some(
            self.sequence
                .iter()
                .find(|e| e.model == model)
                .map_or(1.0, |e| e.mcs_p_value),
        )
    }

    /// Superior set at another level, reusing the same elimination sequence.
    pub fn at_level(&self, alpha: f64) -> Result<McsResult> {
        check_alpha(alpha)?;
        Ok(Self::from_sequence(
            self.models.clone(),
            self.statistic,
            alpha,
            self.plan,
            self.sequence.clone(),
        ))
    }

    fn from_sequence(
        models: Vec<String>,
        statistic: McsStatistic,
        alpha: f64,
        plan: BootstrapPlan,
        sequence: Vec<Elimination>,
    ) -> Self {
        let eliminated: Vec<Elimination> = sequence
            .iter()
            .filter(|e| e.mcs_p_value < alpha)
            .cloned()
            .collect();
        let surviving = models
            .iter()
            .filter(|m| !eliminated.iter().any(|e| &e.model == *m))
            .cloned()
            .collect();
        Self {
            models,
            statistic,
            alpha,
            plan,
            eliminated,
            surviving,
            sequence,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(())
}

/// `value / sqrt(var)` with the zero-variance conventions: equal means give
/// 0, a nonzero mean with no spread is infinitely significant.
fn studentize(value: f64, var: f64) -> f64 {
    if var > 0.0 {
        value / var.sqrt()
    } else if value == 0.0 {
        0.0
    } else {
        value.signum() * f64::INFINITY
    }
}

fn centered_ratio(dev: f64, var: f64) -> f64 {
    if var > 0.0 {
        dev / var.sqrt()
    } else {
        0.0
    }
}

/// One elimination step on the active set (indices into the model columns).
/// Returns (statistic, p-value, index of the model to drop).
fn mcs_step(
    active: &[usize],
    means: &[f64],
    boot: &DMatrix<f64>,
    kind: McsStatistic,
) -> (f64, f64, usize) {
    let k = active.len();
    let reps = boot.nrows();
    let mut boot_stats = vec![f64::NEG_INFINITY; reps];
    let mut observed = f64::NEG_INFINITY;
    let mut worst = (f64::NEG_INFINITY, active[0]);
    match kind {
        McsStatistic::Range => {
            let mut row_max = vec![f64::NEG_INFINITY; k];
            for a in 0..k {
                for b in a + 1..k {
                    let (i, j) = (active[a], active[b]);
                    let d = means[i] - means[j];
                    let var = (0..reps)
                        .map(|r| (boot[(r, i)] - boot[(r, j)] - d).powi(2))
                        .sum::<f64>()
                        / reps as f64;
                    let t = studentize(d, var);
                    row_max[a] = row_max[a].max(t);
                    row_max[b] = row_max[b].max(-t);
                    observed = observed.max(t.abs());
                    for (r, s) in boot_stats.iter_mut().enumerate() {
                        let dev = boot[(r, i)] - boot[(r, j)] - d;
                        *s = s.max(centered_ratio(dev, var).abs());
                    }
                }
            }
            for a in 0..k {
                if row_max[a] > worst.0 {
                    worst = (row_max[a], active[a]);
                }
            }
        }
        McsStatistic::Max => {
            let scale = 1.0 / (k - 1) as f64;
            let rel = |row: &dyn Fn(usize) -> f64, i: usize| -> f64 {
                active.iter().map(|&j| row(i) - row(j)).sum::<f64>() * scale
            };
            for &i in active {
                let d = rel(&|j| means[j], i);
                let devs: Vec<f64> = (0..reps)
                    .map(|r| rel(&|j| boot[(r, j)], i) - d)
                    .collect();
                let var = devs.iter().map(|v| v * v).sum::<f64>() / reps as f64;
                let t = studentize(d, var);
                observed = observed.max(t);
                if t > worst.0 {
                    worst = (t, i);
                }
                for (s, dev) in boot_stats.iter_mut().zip(&devs) {
                    *s = s.max(centered_ratio(*dev, var));
                }
            }
        }
    }
    let p = if observed == f64::INFINITY {
        0.0
    } else {
        boot_stats.iter().filter(|&&s| s >= observed).count() as f64 / reps as f64
    };
    (observed, p, worst.1)
}

/// Runs the full elimination sequence and returns the superior set at
/// `alpha`.
pub fn mcs_run(matrix: &LossMatrix, alpha: f64, kind: McsStatistic, plan: &BootstrapPlan) -> Result<McsResult> {
    check_alpha(alpha)?;
    let m = matrix.n_models();
    if m == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let models = matrix.models.clone();
    if m == 1 {
        return Ok(McsResult::from_sequence(models, kind, alpha, *plan, Vec::new()));
    }
    let t = matrix.n_days();
    let samples = block_bootstrap(t, plan)?;
    // work in name order so that relabeling cannot change rounding
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| models[a].cmp(&models[b]));
    let l = &matrix.losses;
    // totals; the common 1/T cancels in every statistic
    let means: Vec<f64> = order.iter().map(|&c| l.column(c).iter().sum::<f64>()).collect();
    let boot = DMatrix::from_fn(samples.len(), m, |r, i| {
        samples[r].iter().map(|&s| l[(s, order[i])]).sum::<f64>()
    });

    let mut active: Vec<usize> = (0..m).collect();
    let mut sequence = Vec::with_capacity(m - 1);
    let mut running = 0.0_f64;
    while active.len() > 1 {
        let (stat, p, drop) = mcs_step(&active, &means, &boot, kind);
        running = running.max(p);
        sequence.push(Elimination {
            step: sequence.len() + 1,
            model: models[order[drop]].clone(),
            statistic: stat,
            p_value: p,
            mcs_p_value: running,
        });
        active.retain(|&a| a != drop);
    }
    Ok(McsResult::from_sequence(models, kind, alpha, *plan, sequence))
}

/// MCS outcome for one loss target (a tenor or the tenor average).
#[derive(Debug, Clone, PartialEq)]
pub struct McsTableEntry {
    pub target: String,
    pub result: McsResult,
}

/// `target,model,statistic,alpha,member,mcs_p_value`, one row per model.
pub fn write_membership<W: Write>(entries: &[McsTableEntry], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target", "model", "statistic", "alpha", "member", "mcs_p_value"])?;
    for e in entries {
        for model in &e.result.models {
            w.write_record([
                e.target.clone(),
                model.clone(),
                e.result.statistic.to_string(),
                e.result.alpha.to_string(),
                u8::from(e.result.contains(model)).to_string(),
                format!("{:.4}", e.result.mcs_p_value(model).unwrap_or(f64::NAN)),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<mcs membership>", e))?;
    Ok(())
}

/// Full elimination sequences:
/// `target,statistic,alpha,step,model,statistic_value,p_value,mcs_p_value,eliminated`.
pub fn write_eliminations<W: Write>(entries: &[McsTableEntry], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "target",
        "statistic",
        "alpha",
        "step",
        "model",
        "statistic_value",
        "p_value",
        "mcs_p_value",
        "eliminated",
    ])?;
    for e in entries {
        for s in &e.result.sequence {
            w.write_record([
                e.target.clone(),
                e.result.statistic.to_string(),
                e.result.alpha.to_string(),
                s.step.to_string(),
                s.model.clone(),
                format!("{:.6}", s.statistic),
                format!("{:.4}", s.p_value),
                format!("{:.4}", s.mcs_p_value),
                u8::from(s.mcs_p_value < e.result.alpha).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<mcs eliminations>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Largest integer `L` with `L^3 <= t`.
fn bartlett_lag(t: usize) -> usize {
    let mut l = 0;
    while (l + 1) * (l + 1) * (l + 1) <= t {
        l += 1;
    }
    l
}

fn long_run_variance(d: &[f64], mean: f64) -> f64 {
    let t = d.len();
    let lag = bartlett_lag(t);
    let gamma = |k: usize| -> f64 {
        (k..t).map(|s| (d[s] - mean) * (d[s - k] - mean)).sum::<f64>() / t as f64
    };
    let mut v = gamma(0);
    for k in 1..=lag {
        v += 2.0 * (1.0 - k as f64 / (lag + 1) as f64) * gamma(k);
    }
    v
}

fn dm_statistic(loss_a: &[f64], loss_b: &[f64]) -> Result<f64> {
    if loss_a.len() != loss_b.len() {
        return Err(Error::CoverageMismatch(format!(
            "loss series of length {} and {}",
            loss_a.len(),
            loss_b.len()
        )));
    }
    let t = loss_a.len();
    if t < 10 {
        return Err(Error::InsufficientData { needed: 10, got: t });
    }
    let d: Vec<f64> = loss_a.iter().zip(loss_b).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / t as f64;
    if d.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let lrv = long_run_variance(&d, mean);
    if lrv > 0.0 {
        Ok(mean / (lrv / t as f64).sqrt())
    } else if mean == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::ZeroVariance)
    }
}

/// Mean loss differential `a - b` studentized by a Bartlett long-run
/// variance with lag `floor(T^(1/3))`; two-sided normal p-value.
pub fn dm_test(loss_a: &[f64], loss_b: &[f64]) -> Result<DmResult> {
    let s = dm_statistic(loss_a, loss_b)?;
    let normal = Normal::standard();
    Ok(DmResult {
        statistic: s,
        p_value: (2.0 * (1.0 - normal.cdf(s.abs()))).min(1.0),
    })
}

/// Small-sample correction factor `sqrt((T + 1 - 2h + h(h-1)/T) / T)`.
pub fn small_sample_correction(t: usize, h: usize) -> f64 {
    let (t, h) = (t as f64, h as f64);
    ((t + 1.0 - 2.0 * h + h * (h - 1.0) / t) / t).sqrt()
}

/// DM statistic scaled by the small-sample correction, with a Student-t
/// reference on `T - 1` degrees of freedom.
pub fn modified_dm_test(loss_a: &[f64], loss_b: &[f64], h: usize) -> Result<DmResult> {
    if h == 0 {
        return Err(Error::InvalidConfig("forecast horizon must be at least 1".into()));
    }
    let t = loss_a.len();
    let s = dm_statistic(loss_a, loss_b)? * small_sample_correction(t, h);
    let dist = StudentsT::new(0.0, 1.0, (t - 1) as f64)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    Ok(DmResult {
        statistic: s,
        p_value: (2.0 * (1.0 - dist.cdf(s.abs()))).min(1.0),
    })
}
