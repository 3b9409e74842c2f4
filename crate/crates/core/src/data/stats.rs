//! Per-column descriptive statistics.
//!
//! Kurtosis is reported as *excess* kurtosis (normal = 0). Skewness and
//! kurtosis use population central moments; the standard deviation uses the
//! `n - 1` divisor. A column with zero dispersion has undefined skewness and
//! kurtosis, reported as `None` (`NA` in CSV output).

use std::io::Write;

use nalgebra::DMatrix;

use super::panel::{FactorPanel, FuturesPanel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    pub name: String,
    pub mean: f64,
    pub std_dev: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

pub fn column_stats(name: &str, column: &[f64]) -> Result<ColumnStats> {
    let n = column.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let nf = n as f64;
    let mean = column.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in column {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std_dev = (m2 / (nf - 1.0)).sqrt();
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
    } else {
        (None, None)
    };

    let mut sorted = column.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };

    Ok(ColumnStats {
        name: name.to_string(),
        mean,
        std_dev,
        median,
        min: sorted[0],
        max: sorted[n - 1],
        skewness,
        excess_kurtosis,
    })
}

fn matrix_stats<'a>(
    names: impl Iterator<Item = &'a str>,
    values: &DMatrix<f64>,
) -> Result<Vec<ColumnStats>> {
    names
        .enumerate()
        .map(|(j, name)| {
            let col: Vec<f64> = values.column(j).iter().copied().collect();
            column_stats(name, &col)
        })
        .collect()
}

pub fn descriptive_stats(panel: &FuturesPanel) -> Result<Vec<ColumnStats>> {
    matrix_stats(panel.tenors().iter().map(|t| t.label.as_str()), panel.values())
}

pub fn factor_stats(panel: &FactorPanel) -> Result<Vec<ColumnStats>> {
    matrix_stats(panel.columns().iter().map(String::as_str), panel.values())
}

pub fn write_stats<W: Write>(stats: &[ColumnStats], writer: W) -> Result<()> {
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "series", "mean", "std_dev", "median", "min", "max", "skewness", "kurtosis",
    ])?;
    for s in stats {
        wtr.write_record([
            s.name.clone(),
            s.mean.to_string(),
            s.std_dev.to_string(),
            s.median.to_string(),
            s.min.to_string(),
            s.max.to_string(),
            opt(s.skewness),
            opt(s.excess_kurtosis),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn two_values() {
        let s = column_stats("x", &[0.0, 2.0]).unwrap();
        assert_eq!((s.mean, s.median, s.min, s.max), (1.0, 1.0, 0.0, 2.0));
        assert!((s.std_dev - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constant_column_has_undefined_shape() {
        let s = column_stats("x", &[3.0; 5]).unwrap();
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.skewness, None);
        assert_eq!(s.excess_kurtosis, None);
    }

    #[test]
    fn too_short() {
        assert!(column_stats("x", &[1.0]).is_err());
    }

    #[test]
    fn gaussian_excess_kurtosis_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let xs: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = column_stats("z", &xs).unwrap();
        assert!(s.excess_kurtosis.unwrap().abs() < 0.5);
        assert!(s.skewness.unwrap().abs() < 0.3);
    }

    #[test]
    fn skew_of_known_sample() {
        // 1, 2, 3, 10: hand-evaluated population moments.
        let xs = [1.0, 2.0, 3.0, 10.0];
        let s = column_stats("x", &xs).unwrap();
        let mean = 4.0;
        let m2: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        let m3: f64 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / 4.0;
        assert!((s.skewness.unwrap() - m3 / m2.powf(1.5)).abs() < 1e-12);
        assert!(s.skewness.unwrap() > 0.0);
    }
}
