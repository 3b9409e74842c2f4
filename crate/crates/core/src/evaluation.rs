//! Point-forecast loss functions, per tenor and averaged across tenors.
//!
//! All error matrices are `T x p` with `error = realized - forecast`, so a
//! positive error is an under-prediction.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::forecast::{ForecastRecord, ModelKind};

/// How MCPDC scores days where the forecast or realization is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignTieRule {
    /// Zero matches only zero; any other zero involvement is a miss.
    #[default]
    ZeroMatchesZero,
    /// Any zero is a miss.
    ZeroNeverMatches,
}

impl SignTieRule {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "zero-matches-zero" => Some(Self::ZeroMatchesZero),
            "zero-never-matches" => Some(Self::ZeroNeverMatches),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ZeroMatchesZero => "zero-matches-zero",
            Self::ZeroNeverMatches => "zero-never-matches",
        }
    }

    fn matches(self, forecast: f64, realized: f64) -> bool {
        match (forecast == 0.0, realized == 0.0) {
            (true, true) => self == Self::ZeroMatchesZero,
            (false, false) => (forecast > 0.0) == (realized > 0.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmeMode {
    /// Square root applied to under-predictions.
    Under,
    /// Square root applied to over-predictions.
    Over,
}

/// One measure across tenors.
#[derive(Debug, Clone, PartialEq)]
pub struct TenorSummary {
    pub per_tenor: Vec<f64>,
    /// Arithmetic mean of `per_tenor`.
    pub overall: f64,
}

impl TenorSummary {
    fn from_per_tenor(per_tenor: Vec<f64>) -> Self {
        let overall = per_tenor.iter().sum::<f64>() / per_tenor.len() as f64;
        Self { per_tenor, overall }
    }
}

fn nonempty(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::InsufficientData {
            needed: 1,
            got: m.nrows(),
        });
    }
    Ok(())
}

fn per_column(m: &DMatrix<f64>, f: impl Fn(&[f64]) -> f64) -> Result<TenorSummary> {
    nonempty(m)?;
    let cols = (0..m.ncols())
        .map(|j| {
            let c: Vec<f64> = m.column(j).iter().copied().collect();
            f(&c)
        })
        .collect();
    Ok(TenorSummary::from_per_tenor(cols))
}

pub fn mae(errors: &DMatrix<f64>) -> Result<TenorSummary> {
    per_column(errors, |c| c.iter().map(|e| e.abs()).sum::<f64>() / c.len() as f64)
}

pub fn me(errors: &DMatrix<f64>) -> Result<TenorSummary> {
    per_column(errors, |c| c.iter().sum::<f64>() / c.len() as f64)
}

/// Per-tenor mean absolute one-step change of the in-sample series.
pub fn mase_denominators(in_sample: &DMatrix<f64>, tenors: &[String]) -> Result<Vec<f64>> {
    let n = in_sample.nrows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    (0..in_sample.ncols())
        .map(|j| {
            let d = (1..n)
                .map(|t| (in_sample[(t, j)] - in_sample[(t - 1, j)]).abs())
                .sum::<f64>()
                / (n - 1) as f64;
            if d == 0.0 {
                Err(Error::ZeroDenominator {
                    tenor: tenors.get(j).cloned().unwrap_or_else(|| j.to_string()),
                })
            } else {
                Ok(d)
            }
        })
        .collect()
}

pub fn mase(errors: &DMatrix<f64>, denominators: &[f64]) -> Result<TenorSummary> {
    nonempty(errors)?;
    if denominators.len() != errors.ncols() {
        return Err(Error::GridMismatch {
            expected: errors.ncols(),
            found: denominators.len(),
        });
    }
    let t = errors.nrows() as f64;
    Ok(TenorSummary::from_per_tenor(
        (0..errors.ncols())
            .map(|j| errors.column(j).iter().map(|e| (e / denominators[j]).abs()).sum::<f64>() / t)
            .collect(),
    ))
}

pub fn mme(errors: &DMatrix<f64>, mode: MmeMode) -> Result<TenorSummary> {
    per_column(errors, |c| {
        let total: f64 = c
            .iter()
            .map(|&e| {
                let under = e > 0.0;
                let rooted = match mode {
                    MmeMode::Under => under,
                    MmeMode::Over => e < 0.0,
                };
                if e == 0.0 {
                    0.0
                } else if rooted {
                    e.abs().sqrt()
                } else {
                    e.abs()
                }
            })
            .sum();
        total / c.len() as f64
    })
}

pub fn mcpdc(forecasts: &DMatrix<f64>, realized: &DMatrix<f64>, rule: SignTieRule) -> Result<TenorSummary> {
    nonempty(forecasts)?;
    if forecasts.shape() != realized.shape() {
        return Err(Error::CoverageMismatch(format!(
            "forecasts {:?} vs realizations {:?}",
            forecasts.shape(),
            realized.shape()
        )));
    }
    let t = forecasts.nrows() as f64;
    Ok(TenorSummary::from_per_tenor(
        (0..forecasts.ncols())
            .map(|j| {
                (0..forecasts.nrows())
                    .filter(|&i| rule.matches(forecasts[(i, j)], realized[(i, j)]))
                    .count() as f64
                    / t
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Mae,
    Me,
    Mase,
    MmeUnder,
    MmeOver,
    Mcpdc,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Mae,
        Measure::Me,
        Measure::Mase,
        Measure::MmeUnder,
        Measure::MmeOver,
        Measure::Mcpdc,
    ];

    /// Column label; out-of-sample measures use the forecast-error names.
    pub fn label(self, sample: Sample) -> &'static str {
        match (self, sample) {
            (Measure::Mae, Sample::InSample) => "MAE",
            (Measure::Mae, Sample::OutOfSample) => "MAFE",
            (Measure::Me, Sample::InSample) => "ME",
            (Measure::Me, Sample::OutOfSample) => "MFE",
            (Measure::Mase, Sample::InSample) => "MASE",
            (Measure::Mase, Sample::OutOfSample) => "MASFE",
            (Measure::MmeUnder, _) => "MME(U)",
            (Measure::MmeOver, _) => "MME(O)",
            (Measure::Mcpdc, Sample::InSample) => "MCPDC",
            (Measure::Mcpdc, Sample::OutOfSample) => "MCFDC",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    InSample,
    OutOfSample,
}

/// Measures per model, laid out as tenor rows plus an `Overall` row.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub sample: Sample,
    pub tenors: Vec<String>,
    entries: BTreeMap<(Measure, ModelKind), TenorSummary>,
}

impl LossReport {
    pub fn new(sample: Sample, tenors: Vec<String>) -> Self {
        Self {
            sample,
            tenors,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, measure: Measure, model: ModelKind, summary: TenorSummary) {
        self.entries.insert((measure, model), summary);
    }

    pub fn get(&self, measure: Measure, model: ModelKind) -> Option<&TenorSummary> {
        self.entries.get(&(measure, model))
    }

    pub fn overall(&self, measure: Measure, model: ModelKind) -> Option<f64> {
        self.get(measure, model).map(|s| s.overall)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Computes `measures` for one model and adds them to the report.
    ///
    /// `mase_denominators` is required only when `Measure::Mase` is asked for.
    pub fn add_model(
        &mut self,
        model: ModelKind,
        forecasts: &DMatrix<f64>,
        realized: &DMatrix<f64>,
        measures: &[Measure],
        mase_denominators: Option<&[f64]>,
        tie_rule: SignTieRule,
    ) -> Result<()> {
        if forecasts.shape() != realized.shape() || forecasts.ncols() != self.tenors.len() {
            return Err(Error::CoverageMismatch(format!(
                "{model}: forecasts {:?}, realizations {:?}, {} tenors",
                forecasts.shape(),
                realized.shape(),
                self.tenors.len()
            )));
        }
        let errors = realized - forecasts;
        for &m in measures {
            let s = match m {
                Measure::Mae => mae(&errors)?,
                Measure::Me => me(&errors)?,
                Measure::Mase => {
                    let d = mase_denominators.ok_or_else(|| {
                        Error::InvalidConfig("MASE requested without in-sample denominators".into())
                    })?;
                    mase(&errors, d)?
                }
                Measure::MmeUnder => mme(&errors, MmeMode::Under)?,
                Measure::MmeOver => mme(&errors, MmeMode::Over)?,
                Measure::Mcpdc => mcpdc(forecasts, realized, tie_rule)?,
            };
            self.insert(m, model, s);
        }
        Ok(())
    }

    /// CSV with one row per tenor plus `Overall`, one column per
    /// (measure, model) pair, e.g. `MAFE:FTS`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let keys: Vec<&(Measure, ModelKind)> = self.entries.keys().collect();
        let mut header = vec!["tenor".to_string()];
        header.extend(keys.iter().map(|(m, k)| format!("{}:{}", m.label(self.sample), k)));
        w.write_record(&header)?;
        for (i, tenor) in self.tenors.iter().enumerate() {
            let mut rec = vec![tenor.clone()];
            rec.extend(keys.iter().map(|k| format!("{:.6}", self.entries[*k].per_tenor[i])));
            w.write_record(&rec)?;
        }
        let mut rec = vec!["Overall".to_string()];
        rec.extend(keys.iter().map(|k| format!("{:.6}", self.entries[*k].overall)));
        w.write_record(&rec)?;
        w.flush().map_err(|e| Error::io("<loss report>", e))?;
        Ok(())
    }
}

/// Per-day losses of competing models on common dates, `T x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    pub dates: Vec<NaiveDate>,
    pub models: Vec<String>,
    pub losses: DMatrix<f64>,
}

impl LossMatrix {
    pub fn new(dates: Vec<NaiveDate>, models: Vec<String>, losses: DMatrix<f64>) -> Result<Self> {
        if losses.nrows() != dates.len() || losses.ncols() != models.len() {
            return Err(Error::CoverageMismatch(format!(
                "loss matrix {:?} for {} dates and {} models",
                losses.shape(),
                dates.len(),
                models.len()
            )));
        }
        if losses.iter().any(|v| !v.is_finite()) {
            return Err(Error::CoverageMismatch("loss matrix has non-finite entries".into()));
        }
        Ok(Self {
            dates,
            models,
            losses,
        })
    }

    pub fn n_days(&self) -> usize {
        self.losses.nrows()
    }

    pub fn n_models(&self) -> usize {
        self.losses.ncols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.losses.column(j).iter().copied().collect()
    }

    /// Keeps only the named models, in the given order.
    pub fn select(&self, models: &[String]) -> Result<LossMatrix> {
        let idx = models
            .iter()
            .map(|m| {
                self.models
                    .iter()
                    .position(|x| x == m)
                    .ok_or_else(|| Error::InvalidConfig(format!("model {m} not in loss matrix")))
            })
            .collect::<Result<Vec<_>>>()?;
        LossMatrix::new(
            self.dates.clone(),
            models.to_vec(),
            DMatrix::from_fn(self.n_days(), idx.len(), |t, j| self.losses[(t, idx[j])]),
        )
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["date".to_string()];
        header.extend(self.models.iter().cloned());
        w.write_record(&header)?;
        for (t, d) in self.dates.iter().enumerate() {
            let mut rec = vec![d.format("%Y-%m-%d").to_string()];
            rec.extend((0..self.n_models()).map(|j| self.losses[(t, j)].to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<loss matrix>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("date") || header.len() < 2 {
            return Err(Error::HeaderMismatch {
                expected: "date,<model>,...".into(),
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }
        let models: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut dates = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|e| Error::UnparseableRow {
                line,
                reason: e.to_string(),
            })?;
            if rec.len() != models.len() + 1 {
                return Err(Error::UnparseableRow {
                    line,
                    reason: format!("expected {} fields, found {}", models.len() + 1, rec.len()),
                });
            }
            for (j, cell) in rec.iter().skip(1).enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::MissingCell {
                    date: date.to_string(),
                    column: models[j].clone(),
                })?;
                values.push(v);
            }
            dates.push(date);
        }
        let losses = DMatrix::from_row_slice(dates.len(), models.len(), &values);
        LossMatrix::new(dates, models, losses)
    }
}

/// Groups records by model in first-seen order and checks that every model
/// covers the same dates with the same number of tenors.
fn group_records(records: &[ForecastRecord]) -> Result<(Vec<ModelKind>, Vec<NaiveDate>, BTreeMap<ModelKind, BTreeMap<NaiveDate, &ForecastRecord>>)> {
    let mut order = Vec::new();
    let mut by_model: BTreeMap<ModelKind, BTreeMap<NaiveDate, &ForecastRecord>> = BTreeMap::new();
    let width = records.first().map(|r| r.forecast.len()).unwrap_or(0);
    for r in records {
        if r.forecast.len() != width || r.realized.len() != width {
            return Err(Error::CoverageMismatch(format!(
                "{} on {} has {} tenors, expected {width}",
                r.model,
                r.target_date,
                r.forecast.len()
            )));
        }
        let entry = by_model.entry(r.model).or_insert_with(|| {
            order.push(r.model);
            BTreeMap::new()
        });
        if entry.insert(r.target_date, r).is_some() {
            return Err(Error::CoverageMismatch(format!(
                "duplicate record for {} on {}",
                r.model, r.target_date
            )));
        }
    }
    let mut date_sets = by_model.values().map(|m| m.keys().copied().collect::<BTreeSet<_>>());
    let dates: Vec<NaiveDate> = match date_sets.next() {
        Some(first) => {
            if date_sets.any(|s| s != first) {
                return Err(Error::CoverageMismatch("models cover different dates".into()));
            }
            first.into_iter().collect()
        }
        None => Vec::new(),
    };
    Ok((order, dates, by_model))
}

fn loss_matrix_with(records: &[ForecastRecord], cell_loss: impl Fn(&ForecastRecord) -> f64) -> Result<LossMatrix> {
    let (order, dates, by_model) = group_records(records)?;
    let losses = DMatrix::from_fn(dates.len(), order.len(), |t, j| {
        cell_loss(by_model[&order[j]][&dates[t]])
    });
    LossMatrix::new(dates, order.iter().map(|m| m.id().to_string()).collect(), losses)
}

/// Tenor-averaged absolute error per model and day.
pub fn build_loss_matrix(records: &[ForecastRecord]) -> Result<LossMatrix> {
    loss_matrix_with(records, |r| {
        r.errors().iter().map(|e| e.abs()).sum::<f64>() / r.forecast.len() as f64
    })
}

/// Absolute error at a single tenor per model and day.
pub fn build_tenor_loss_matrix(records: &[ForecastRecord], tenor: usize) -> Result<LossMatrix> {
    if let Some(r) = records.first() {
        if tenor >= r.forecast.len() {
            return Err(Error::InvalidConfig(format!("tenor index {tenor} out of range")));
        }
    }
    loss_matrix_with(records, |r| (r.realized[tenor] - r.forecast[tenor]).abs())
}

/// Stacks one model's records into `(forecasts, realized)` matrices in date
/// order.
pub fn record_matrices(records: &[ForecastRecord], model: ModelKind) -> (Vec<NaiveDate>, DMatrix<f64>, DMatrix<f64>) {
    let mut own: Vec<&ForecastRecord> = records.iter().filter(|r| r.model == model).collect();
    own.sort_by_key(|r| r.target_date);
    let p = own.first().map(|r| r.forecast.len()).unwrap_or(0);
    let f = DMatrix::from_fn(own.len(), p, |t, j| own[t].forecast[j]);
    let r = DMatrix::from_fn(own.len(), p, |t, j| own[t].realized[j]);
    (own.iter().map(|r| r.target_date).collect(), f, r)
}
