use std::fmt;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Unit of the values held by a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScaleMarker {
    Price,
    LogPrice,
    LogReturn,
}

impl ScaleMarker {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleMarker::Price => "price",
            ScaleMarker::LogPrice => "log_price",
            ScaleMarker::LogReturn => "log_return",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "price" => Some(ScaleMarker::Price),
            "log_price" | "logprice" => Some(ScaleMarker::LogPrice),
            "log_return" | "logreturn" => Some(ScaleMarker::LogReturn),
            _ => None,
        }
    }
}

impl fmt::Display for ScaleMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contract expiry column: its label (`CL3`) and position on the expiry
/// axis in months.
#[derive(Debug, Clone, PartialEq)]
pub struct Tenor {
    pub label: String,
    pub months: f64,
}

impl Tenor {
    pub fn new(label: impl Into<String>, months: f64) -> Self {
        Self {
            label: label.into(),
            months,
        }
    }

    /// Parses a generic contract label such as `CL12` into a tenor at 12 months.
    pub fn from_label(label: &str) -> Option<Self> {
        let digits_at = label.find(|c: char| c.is_ascii_digit())?;
        let months: u32 = label[digits_at..].parse().ok()?;
        if digits_at == 0 || months == 0 {
            return None;
        }
        Some(Self::new(label, f64::from(months)))
    }
}

/// The eleven generic WTI contracts: CL1..CL9, CL12, CL18.
pub fn canonical_tenors() -> Vec<Tenor> {
    [1u32, 2, 3, 4, 5, 6, 7, 8, 9, 12, 18]
        .iter()
        .map(|&m| Tenor::new(format!("CL{m}"), f64::from(m)))
        .collect()
}

/// Date-indexed matrix of futures values, one column per tenor.
#[derive(Debug, Clone, PartialEq)]
pub struct FuturesPanel {
    dates: Vec<NaiveDate>,
    tenors: Vec<Tenor>,
    values: DMatrix<f64>,
    scale: ScaleMarker,
}

impl FuturesPanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        tenors: Vec<Tenor>,
        values: DMatrix<f64>,
        scale: ScaleMarker,
    ) -> Result<Self> {
        if values.nrows() != dates.len() || values.ncols() != tenors.len() {
            return Err(Error::InvalidConfig(format!(
                "panel shape {}x{} does not match {} dates and {} tenors",
                values.nrows(),
                values.ncols(),
                dates.len(),
                tenors.len()
            )));
        }
        check_dates(&dates)?;
        for w in tenors.windows(2) {
            if !(w[1].months > w[0].months) {
                return Err(Error::InvalidConfig(format!(
                    "tenor positions must increase: {} ({}) then {} ({})",
                    w[0].label, w[0].months, w[1].label, w[1].months
                )));
            }
        }
        for (i, date) in dates.iter().enumerate() {
            for (j, tenor) in tenors.iter().enumerate() {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(Error::MissingCell {
                        date: date.to_string(),
                        column: tenor.label.clone(),
                    });
                }
                if scale == ScaleMarker::Price && v <= 0.0 {
                    return Err(Error::NonPositivePrice {
                        date: date.to_string(),
                        column: tenor.label.clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            dates,
            tenors,
            values,
            scale,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tenors(&self) -> &[Tenor] {
        &self.tenors
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn scale(&self) -> ScaleMarker {
        self.scale
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tenors(&self) -> usize {
        self.tenors.len()
    }

    pub fn tenor_positions(&self) -> Vec<f64> {
        self.tenors.iter().map(|t| t.months).collect()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Rows `[start, end)` as a new panel.
    pub fn slice(&self, start: usize, end: usize) -> FuturesPanel {
        assert!(start <= end && end <= self.n_days());
        FuturesPanel {
            dates: self.dates[start..end].to_vec(),
            tenors: self.tenors.clone(),
            values: self.values.rows(start, end - start).into_owned(),
            scale: self.scale,
        }
    }

    fn expect_scale(&self, expected: ScaleMarker) -> Result<()> {
        if self.scale != expected {
            return Err(Error::WrongScale {
                expected,
                found: self.scale,
            });
        }
        Ok(())
    }

    fn map_values(&self, scale: ScaleMarker, f: impl Fn(f64) -> f64) -> FuturesPanel {
        FuturesPanel {
            dates: self.dates.clone(),
            tenors: self.tenors.clone(),
            values: self.values.map(f),
            scale,
        }
    }

    pub fn to_log_prices(&self) -> Result<FuturesPanel> {
        self.expect_scale(ScaleMarker::Price)?;
        Ok(self.map_values(ScaleMarker::LogPrice, f64::ln))
    }

    pub fn to_prices(&self) -> Result<FuturesPanel> {
        self.expect_scale(ScaleMarker::LogPrice)?;
        Ok(self.map_values(ScaleMarker::Price, f64::exp))
    }

    /// Daily log returns `ln(P_t / P_{t-1})`; the first date is dropped.
    pub fn to_log_returns(&self) -> Result<FuturesPanel> {
        self.expect_scale(ScaleMarker::Price)?;
        self.differences(|cur, prev| (cur / prev).ln())
    }

    /// First differences of a log-price panel, i.e. log returns.
    pub fn log_price_differences(&self) -> Result<FuturesPanel> {
        self.expect_scale(ScaleMarker::LogPrice)?;
        self.differences(|cur, prev| cur - prev)
    }

    fn differences(&self, f: impl Fn(f64, f64) -> f64) -> Result<FuturesPanel> {
        let n = self.n_days();
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let p = self.n_tenors();
        let values =
            DMatrix::from_fn(n - 1, p, |i, j| f(self.values[(i + 1, j)], self.values[(i, j)]));
        Ok(FuturesPanel {
            dates: self.dates[1..].to_vec(),
            tenors: self.tenors.clone(),
            values,
            scale: ScaleMarker::LogReturn,
        })
    }

    /// Rows whose date is in `keep` (which must be sorted).
    pub(crate) fn restrict_to(&self, keep: &[NaiveDate]) -> FuturesPanel {
        let rows = rows_in(&self.dates, keep);
        FuturesPanel {
            dates: rows.iter().map(|&i| self.dates[i]).collect(),
            tenors: self.tenors.clone(),
            values: self.values.select_rows(rows.iter()),
            scale: self.scale,
        }
    }
}

pub const FACTOR_COLUMNS: [&str; 4] = ["SP500", "VIX", "USD", "EcPol"];

/// Exogenous factor levels (or their log changes) on trading dates.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPanel {
    dates: Vec<NaiveDate>,
    columns: Vec<String>,
    values: DMatrix<f64>,
    scale: ScaleMarker,
}

impl FactorPanel {
    pub fn new(
        dates: Vec<NaiveDate>,
        columns: Vec<String>,
        values: DMatrix<f64>,
        scale: ScaleMarker,
    ) -> Result<Self> {
        if values.nrows() != dates.len() || values.ncols() != columns.len() {
            return Err(Error::InvalidConfig(format!(
                "factor panel shape {}x{} does not match {} dates and {} columns",
                values.nrows(),
                values.ncols(),
                dates.len(),
                columns.len()
            )));
        }
        check_dates(&dates)?;
        for (i, date) in dates.iter().enumerate() {
            for (j, col) in columns.iter().enumerate() {
                let v = values[(i, j)];
                if !v.is_finite() {
                    return Err(Error::MissingCell {
                        date: date.to_string(),
                        column: col.clone(),
                    });
                }
                if scale == ScaleMarker::Price && v <= 0.0 {
                    return Err(Error::NonPositivePrice {
                        date: date.to_string(),
                        column: col.clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(Self {
            dates,
            columns,
            values,
            scale,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn scale(&self) -> ScaleMarker {
        self.scale
    }

    pub fn n_days(&self) -> usize {
        self.dates.len()
    }

    pub fn slice(&self, start: usize, end: usize) -> FactorPanel {
        assert!(start <= end && end <= self.n_days());
        FactorPanel {
            dates: self.dates[start..end].to_vec(),
            columns: self.columns.clone(),
            values: self.values.rows(start, end - start).into_owned(),
            scale: self.scale,
        }
    }

    /// Log changes of every factor, all four treated alike (USD included).
    pub fn to_log_changes(&self) -> Result<FactorPanel> {
        if self.scale != ScaleMarker::Price {
            return Err(Error::WrongScale {
                expected: ScaleMarker::Price,
                found: self.scale,
            });
        }
        let n = self.n_days();
        if n < 2 {
            return Err(Error::InsufficientData { needed: 2, got: n });
        }
        let values = DMatrix::from_fn(n - 1, self.columns.len(), |i, j| {
            (self.values[(i + 1, j)] / self.values[(i, j)]).ln()
        });
        Ok(FactorPanel {
            dates: self.dates[1..].to_vec(),
            columns: self.columns.clone(),
            values,
            scale: ScaleMarker::LogReturn,
        })
    }

    pub(crate) fn restrict_to(&self, keep: &[NaiveDate]) -> FactorPanel {
        let rows = rows_in(&self.dates, keep);
        FactorPanel {
            dates: rows.iter().map(|&i| self.dates[i]).collect(),
            columns: self.columns.clone(),
            values: self.values.select_rows(rows.iter()),
            scale: self.scale,
        }
    }
}

/// Restricts both panels to the dates they share.
pub fn align_panels(
    futures: &FuturesPanel,
    factors: &FactorPanel,
) -> Result<(FuturesPanel, FactorPanel)> {
    let common = intersect_sorted(futures.dates(), factors.dates());
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok((futures.restrict_to(&common), factors.restrict_to(&common)))
}

fn check_dates(dates: &[NaiveDate]) -> Result<()> {
    for w in dates.windows(2) {
        if w[1] == w[0] {
            return Err(Error::DuplicateDate(w[0].to_string()));
        }
        if w[1] < w[0] {
            return Err(Error::UnorderedDates {
                previous: w[0].to_string(),
                next: w[1].to_string(),
            });
        }
    }
    Ok(())
}

fn intersect_sorted(a: &[NaiveDate], b: &[NaiveDate]) -> Vec<NaiveDate> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn rows_in(dates: &[NaiveDate], keep: &[NaiveDate]) -> Vec<usize> {
    let mut rows = Vec::with_capacity(keep.len());
    let mut k = 0;
    for (i, d) in dates.iter().enumerate() {
        while k < keep.len() && keep[k] < *d {
            k += 1;
        }
        if k < keep.len() && keep[k] == *d {
            rows.push(i);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day(i: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(u64::from(i))
    }

    fn price_panel(rows: &[&[f64]]) -> FuturesPanel {
        let p = rows[0].len();
        let tenors = canonical_tenors().into_iter().take(p).collect();
        let values = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        FuturesPanel::new(
            (0..rows.len() as u32).map(day).collect(),
            tenors,
            values,
            ScaleMarker::Price,
        )
        .unwrap()
    }

    fn factors(days: &[u32]) -> FactorPanel {
        FactorPanel::new(
            days.iter().map(|&d| day(d)).collect(),
            FACTOR_COLUMNS.iter().map(|s| s.to_string()).collect(),
            DMatrix::from_fn(days.len(), 4, |i, j| 10.0 + (i + j) as f64),
            ScaleMarker::Price,
        )
        .unwrap()
    }

    #[test]
    fn tenor_labels_parse() {
        assert_eq!(Tenor::from_label("CL18").unwrap().months, 18.0);
        assert!(Tenor::from_label("18").is_none());
        assert!(Tenor::from_label("CL").is_none());
        let labels: Vec<_> = canonical_tenors().into_iter().map(|t| t.label).collect();
        assert_eq!(labels.last().unwrap(), "CL18");
        assert_eq!(labels.len(), 11);
    }

    #[test]
    fn constant_prices_give_zero_returns() {
        let p = price_panel(&[&[100.0, 100.0], &[100.0, 100.0], &[100.0, 100.0]]);
        let r = p.to_log_returns().unwrap();
        assert_eq!(r.n_days(), 2);
        assert_eq!(r.scale(), ScaleMarker::LogReturn);
        assert!(r.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn return_inverts_exp() {
        let p = price_panel(&[&[100.0], &[100.0 * 0.01f64.exp()]]);
        let r = p.to_log_returns().unwrap();
        assert!((r.values()[(0, 0)] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn returns_require_price_scale() {
        let p = price_panel(&[&[100.0], &[101.0]]).to_log_prices().unwrap();
        assert!(matches!(p.to_log_returns(), Err(Error::WrongScale { .. })));
        let one = price_panel(&[&[100.0]]);
        assert!(matches!(
            one.to_log_returns(),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn rejects_bad_prices_and_dates() {
        let err = FuturesPanel::new(
            vec![day(0)],
            canonical_tenors().into_iter().take(1).collect(),
            DMatrix::from_element(1, 1, -1.0),
            ScaleMarker::Price,
        );
        assert!(matches!(err, Err(Error::NonPositivePrice { .. })));
        let err = FuturesPanel::new(
            vec![day(0), day(0)],
            canonical_tenors().into_iter().take(1).collect(),
            DMatrix::from_element(2, 1, 1.0),
            ScaleMarker::Price,
        );
        assert!(matches!(err, Err(Error::DuplicateDate(_))));
    }

    #[test]
    fn align_identical_dates_is_identity() {
        let fut = price_panel(&[&[1.0], &[2.0], &[3.0]]);
        let fac = factors(&[0, 1, 2]);
        let (a, b) = align_panels(&fut, &fac).unwrap();
        assert_eq!(a, fut);
        assert_eq!(b, fac);
    }

    #[test]
    fn align_drops_extra_leading_date() {
        let fut = price_panel(&[&[1.0], &[2.0], &[3.0]]);
        let fac = factors(&[1, 2]);
        let (a, b) = align_panels(&fut, &fac).unwrap();
        assert_eq!(a.dates(), &[day(1), day(2)]);
        assert_eq!(a.row(0), vec![2.0]);
        assert_eq!(b, fac);
        let (a2, b2) = align_panels(&a, &b).unwrap();
        assert_eq!((a2, b2), (a, b));
    }

    #[test]
    fn align_disjoint_fails() {
        let fut = price_panel(&[&[1.0], &[2.0]]);
        let fac = factors(&[5, 6]);
        assert!(matches!(
            align_panels(&fut, &fac),
            Err(Error::EmptyIntersection)
        ));
    }

    #[test]
    fn factor_log_changes() {
        let fac = factors(&[0, 1, 2]);
        let ch = fac.to_log_changes().unwrap();
        assert_eq!(ch.n_days(), 2);
        assert!((ch.values()[(0, 0)] - (11.0f64 / 10.0).ln()).abs() < 1e-15);
        assert!(ch.to_log_changes().is_err());
    }
}
