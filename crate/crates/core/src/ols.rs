//! Ordinary least squares with an intercept, solved through the SVD of the
//! design matrix (no normal equations).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Designs whose smallest/largest singular value ratio falls below this are
/// rejected as singular.
pub const RCOND_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Intercept first, then one slope per regressor.
    pub coefficients: Vec<f64>,
    pub residual_variance: f64,
    /// Conventional standard errors, same order as `coefficients`.
    pub std_errors: Vec<f64>,
    pub regressors: Vec<String>,
}

impl OlsFit {
    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.coefficients.len() - 1);
        self.intercept()
            + self
                .slopes()
                .iter()
                .zip(x)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    }
}

/// Regresses `y` on an intercept plus the columns of `x`.
pub fn ols(y: &[f64], x: &DMatrix<f64>, regressors: Vec<String>) -> Result<OlsFit> {
    let n = y.len();
    let q = x.ncols();
    if x.nrows() != n {
        return Err(Error::InvalidConfig(format!(
            "regression has {n} responses but {} regressor rows",
            x.nrows()
        )));
    }
    if n < q + 1 {
        return Err(Error::InsufficientData {
            needed: q + 1,
            got: n,
        });
    }
    let design = DMatrix::from_fn(n, q + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let svd = design.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let rcond = if s_max > 0.0 { s_min / s_max } else { 0.0 };
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::SingularDesign { rcond });
    }
    let rhs = DVector::from_column_slice(y);
    let beta = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::NumericalFailure(e.to_string()))?;
    let resid = &rhs - &design * &beta;
    let dof = n - q - 1;
    let residual_variance = if dof > 0 {
        resid.norm_squared() / dof as f64
    } else {
        0.0
    };
    // Var(beta) = s^2 V diag(1 / sigma^2) V'
    let v_t = svd.v_t.as_ref().expect("svd computed with V");
    let std_errors = (0..=q)
        .map(|k| {
            let diag: f64 = (0..svd.singular_values.len())
                .map(|r| (v_t[(r, k)] / svd.singular_values[r]).powi(2))
                .sum();
            (residual_variance * diag).sqrt()
        })
        .collect();
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        residual_variance,
        std_errors,
        regressors,
    })
}
