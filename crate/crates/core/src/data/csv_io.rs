//! Futures and factor CSV files.
//!
//! Futures: `date,CL1,...,CL9,CL12,CL18`. Factors: `date,SP500,VIX,USD,EcPol`.
//! Dates are ISO-8601 (`YYYY-MM-DD`); values use a decimal point and no
//! thousands separators. Values are written in the shortest representation
//! that parses back to the same `f64`, so a file in that form survives a
//! load/emit cycle byte for byte.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use super::panel::{canonical_tenors, FactorPanel, FuturesPanel, ScaleMarker, Tenor, FACTOR_COLUMNS};
use crate::error::{Error, Result};

/// How empty cells are treated on ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    Reject,
    /// Carry the previous trading day's value forward. A gap on the first
    /// row is still an error.
    ForwardFill,
}

impl MissingPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reject" => Some(MissingPolicy::Reject),
            "ffill" | "forward_fill" | "forward-fill" => Some(MissingPolicy::ForwardFill),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MissingPolicy::Reject => "reject",
            MissingPolicy::ForwardFill => "ffill",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PanelSchema {
    pub tenors: Vec<Tenor>,
    pub missing: MissingPolicy,
}

impl Default for PanelSchema {
    fn default() -> Self {
        Self {
            tenors: canonical_tenors(),
            missing: MissingPolicy::Reject,
        }
    }
}

impl PanelSchema {
    pub fn with_missing(mut self, missing: MissingPolicy) -> Self {
        self.missing = missing;
        self
    }
}

pub fn load_panel(path: impl AsRef<Path>, schema: &PanelSchema) -> Result<FuturesPanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_panel(file, schema)
}

pub fn read_panel<R: Read>(reader: R, schema: &PanelSchema) -> Result<FuturesPanel> {
    let columns: Vec<String> = schema.tenors.iter().map(|t| t.label.clone()).collect();
    let (dates, values) = read_table(reader, &columns, schema.missing)?;
    FuturesPanel::new(dates, schema.tenors.clone(), values, ScaleMarker::Price)
}

pub fn load_factors(path: impl AsRef<Path>, missing: MissingPolicy) -> Result<FactorPanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_factors(file, missing)
}

pub fn read_factors<R: Read>(reader: R, missing: MissingPolicy) -> Result<FactorPanel> {
    let columns: Vec<String> = FACTOR_COLUMNS.iter().map(|s| s.to_string()).collect();
    let (dates, values) = read_table(reader, &columns, missing)?;
    FactorPanel::new(dates, columns, values, ScaleMarker::Price)
}

fn read_table<R: Read>(
    reader: R,
    columns: &[String],
    missing: MissingPolicy,
) -> Result<(Vec<NaiveDate>, DMatrix<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    let expected = std::iter::once("date")
        .chain(columns.iter().map(String::as_str))
        .collect::<Vec<_>>();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::HeaderMismatch {
            expected: expected.join(","),
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let p = columns.len();
    let mut rows: Vec<(NaiveDate, Vec<Option<f64>>)> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2;
        let record = record?;
        if record.len() != p + 1 {
            return Err(Error::UnparseableRow {
                line,
                reason: format!("expected {} fields, found {}", p + 1, record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| {
            Error::UnparseableRow {
                line,
                reason: format!("bad date `{}`: {e}", &record[0]),
            }
        })?;
        let mut cells = Vec::with_capacity(p);
        for (j, field) in record.iter().skip(1).enumerate() {
            if field.is_empty() {
                cells.push(None);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::UnparseableRow {
                line,
                reason: format!("bad number `{field}` in column {}", columns[j]),
            })?;
            if !v.is_finite() {
                return Err(Error::UnparseableRow {
                    line,
                    reason: format!("non-finite value in column {}", columns[j]),
                });
            }
            cells.push(Some(v));
        }
        rows.push((date, cells));
    }

    rows.sort_by_key(|(d, _)| *d);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateDate(w[0].0.to_string()));
        }
    }

    let n = rows.len();
    let mut values = DMatrix::zeros(n, p);
    for (i, (date, cells)) in rows.iter().enumerate() {
        for (j, cell) in cells.iter().enumerate() {
            values[(i, j)] = match (cell, missing) {
                (Some(v), _) => *v,
                (None, MissingPolicy::ForwardFill) if i > 0 => values[(i - 1, j)],
                (None, _) => {
                    return Err(Error::MissingCell {
                        date: date.to_string(),
                        column: columns[j].clone(),
                    })
                }
            };
        }
    }
    Ok((rows.into_iter().map(|(d, _)| d).collect(), values))
}

pub fn write_panel<W: Write>(panel: &FuturesPanel, writer: W) -> Result<()> {
    let labels: Vec<&str> = panel.tenors().iter().map(|t| t.label.as_str()).collect();
    write_table(writer, &labels, panel.dates(), panel.values())
}

pub fn write_factors<W: Write>(panel: &FactorPanel, writer: W) -> Result<()> {
    let labels: Vec<&str> = panel.columns().iter().map(String::as_str).collect();
    write_table(writer, &labels, panel.dates(), panel.values())
}

pub fn save_panel(panel: &FuturesPanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_panel(panel, file)
}

pub fn save_factors(panel: &FactorPanel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_factors(panel, file)
}

fn write_table<W: Write>(
    writer: W,
    labels: &[&str],
    dates: &[NaiveDate],
    values: &DMatrix<f64>,
) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(std::iter::once("date").chain(labels.iter().copied()))?;
    for (i, date) in dates.iter().enumerate() {
        let mut record = Vec::with_capacity(labels.len() + 1);
        record.push(date.format("%Y-%m-%d").to_string());
        record.extend(values.row(i).iter().map(|v| v.to_string()));
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "date,CL1,CL2,CL3,CL4,CL5,CL6,CL7,CL8,CL9,CL12,CL18\n";

    fn row(date: &str, base: f64) -> String {
        let cells: Vec<String> = (0..11).map(|j| (base + j as f64 * 0.25).to_string()).collect();
        format!("{date},{}\n", cells.join(","))
    }

    #[test]
    fn loads_three_rows() {
        let text = format!(
            "{HEADER}{}{}{}",
            row("2015-01-02", 50.0),
            row("2015-01-05", 51.0),
            row("2015-01-06", 52.0)
        );
        let panel = read_panel(text.as_bytes(), &PanelSchema::default()).unwrap();
        assert_eq!((panel.n_days(), panel.n_tenors()), (3, 11));
        assert_eq!(panel.scale(), ScaleMarker::Price);
        assert_eq!(panel.values()[(2, 10)], 54.5);
    }

    #[test]
    fn sorts_rows_ascending() {
        let text = format!("{HEADER}{}{}", row("2015-01-05", 51.0), row("2015-01-02", 50.0));
        let panel = read_panel(text.as_bytes(), &PanelSchema::default()).unwrap();
        assert_eq!(panel.dates()[0].to_string(), "2015-01-02");
    }

    #[test]
    fn missing_cell_rejected_with_date() {
        let bad = "2015-01-05,51,51,51,51,,51,51,51,51,51,51\n";
        let text = format!("{HEADER}{}{bad}", row("2015-01-02", 50.0));
        match read_panel(text.as_bytes(), &PanelSchema::default()) {
            Err(Error::MissingCell { date, column }) => {
                assert_eq!(date, "2015-01-05");
                assert_eq!(column, "CL5");
            }
            other => panic!("expected MissingCell, got {other:?}"),
        }
    }

    #[test]
    fn forward_fill_copies_previous_day() {
        let bad = "2015-01-05,51,51,51,51,,51,51,51,51,51,51\n";
        let text = format!("{HEADER}{}{bad}", row("2015-01-02", 50.0));
        let schema = PanelSchema::default().with_missing(MissingPolicy::ForwardFill);
        let panel = read_panel(text.as_bytes(), &schema).unwrap();
        assert_eq!(panel.values()[(1, 4)], panel.values()[(0, 4)]);
        let first_missing = format!("{HEADER}{bad}").replace("2015-01-05,51,", "2015-01-05,,");
        assert!(matches!(
            read_panel(first_missing.as_bytes(), &schema),
            Err(Error::MissingCell { .. })
        ));
    }

    #[test]
    fn error_paths() {
        let schema = PanelSchema::default();
        let dup = format!("{HEADER}{}{}", row("2015-01-02", 50.0), row("2015-01-02", 51.0));
        assert!(matches!(
            read_panel(dup.as_bytes(), &schema),
            Err(Error::DuplicateDate(_))
        ));
        let neg = format!("{HEADER}{}", row("2015-01-02", -5.0));
        assert!(matches!(
            read_panel(neg.as_bytes(), &schema),
            Err(Error::NonPositivePrice { .. })
        ));
        let bad_date = format!("{HEADER}{}", row("02/01/2015", 50.0));
        assert!(matches!(
            read_panel(bad_date.as_bytes(), &schema),
            Err(Error::UnparseableRow { line: 2, .. })
        ));
        let bad_num = format!("{HEADER}{}", row("2015-01-02", 50.0).replace("50.5", "1,234"));
        assert!(read_panel(bad_num.as_bytes(), &schema).is_err());
        let bad_header = "date,CL1\n2015-01-02,5\n";
        assert!(matches!(
            read_panel(bad_header.as_bytes(), &schema),
            Err(Error::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn factors_round_trip() {
        let text = "date,SP500,VIX,USD,EcPol\n2015-01-02,2058.2,17.79,77.3,110.5\n2015-01-05,2020.58,19.92,77.6,95.25\n";
        let fac = read_factors(text.as_bytes(), MissingPolicy::Reject).unwrap();
        let mut out = Vec::new();
        write_factors(&fac, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
