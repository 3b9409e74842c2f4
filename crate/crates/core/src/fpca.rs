//! Functional principal component analysis of daily curves.
//!
//! Curves are observed at the tenor nodes and integrated with trapezoidal
//! quadrature, so `<w, v> = sum_i w_i v_i q_i` approximates the L2 inner
//! product on the expiry axis. The covariance operator is diagonalised
//! through the symmetric matrix `Q^1/2 C Q^1/2`; mapping its eigenvectors
//! back by `Q^-1/2` gives eigenfunctions that are orthonormal under the
//! grid inner product.

use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::FuturesPanel;
use crate::error::{Error, Result};

/// Eigenvalues in `[-NEGATIVE_EIGEN_TOL, 0)` (relative to `max(1, lambda_1)`)
/// are rounding noise and clipped to zero; anything lower is an error.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;

/// Nodes on the expiry axis with their quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl FunctionGrid {
    /// Composite trapezoidal weights over strictly increasing nodes; the
    /// weights sum to the node span.
    pub fn trapezoidal(nodes: Vec<f64>) -> Result<Self> {
        let p = nodes.len();
        if p < 2 {
            return Err(Error::InvalidConfig(
                "a quadrature grid needs at least two nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig("grid nodes must increase".into()));
        }
        let weights = (0..p)
            .map(|i| {
                let left = if i == 0 { 0.0 } else { nodes[i] - nodes[i - 1] };
                let right = if i == p - 1 { 0.0 } else { nodes[i + 1] - nodes[i] };
                0.5 * (left + right)
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn with_weights(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidConfig(
                "grid needs one positive weight per node".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidConfig("grid weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// Unit weights: plain Euclidean geometry, i.e. discrete PCA.
    pub fn euclidean(nodes: Vec<f64>) -> Result<Self> {
        let p = nodes.len();
        Self::with_weights(nodes, vec![1.0; p])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.weights)
            .map(|((x, y), q)| x * y * q)
            .sum()
    }

    /// Gram-Schmidt under the grid inner product.
    pub fn orthonormalize(&self, vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let mut u = v.clone();
            // two passes keep the result orthogonal to machine precision
            for _ in 0..2 {
                for b in &basis {
                    let c = self.inner(&u, b);
                    u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let norm = self.inner(&u, &u).sqrt();
            u.iter_mut().for_each(|x| *x /= norm);
            basis.push(u);
        }
        basis
    }
}

/// Pointwise average of the curves (rows).
pub fn estimate_mean(curves: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = curves.nrows();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok((0..curves.ncols())
        .map(|j| curves.column(j).iter().sum::<f64>() / n as f64)
        .collect())
}

/// Sample covariance surface at the nodes, divisor `n`.
pub fn estimate_covariance(curves: &DMatrix<f64>, mean: &[f64]) -> Result<DMatrix<f64>> {
    let n = curves.nrows();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let p = curves.ncols();
    let centered = DMatrix::from_fn(n, p, |t, j| curves[(t, j)] - mean[j]);
    let mut cov = centered.tr_mul(&centered) / n as f64;
    symmetrize(&mut cov);
    Ok(cov)
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Eigen-pairs of a covariance operator on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted descending; may contain negatives for indefinite input.
    pub eigenvalues: Vec<f64>,
    /// One eigenfunction per column, orthonormal under the grid inner product.
    pub eigenfunctions: DMatrix<f64>,
}

/// Solves `C Q phi = lambda phi` with `<phi_j, phi_k> = delta_jk`.
///
/// Each eigenfunction is signed so that its largest-magnitude entry is
/// positive.
pub fn eigendecompose(cov: &DMatrix<f64>, grid: &FunctionGrid) -> Result<Spectrum> {
    let p = grid.len();
    if cov.nrows() != p || cov.ncols() != p {
        return Err(Error::GridMismatch {
            expected: p,
            found: cov.nrows(),
        });
    }
    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let mut a = DMatrix::from_fn(p, p, |i, j| sqrt_w[i] * cov[(i, j)] * sqrt_w[j]);
    symmetrize(&mut a);
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 10_000).ok_or_else(|| {
        Error::NumericalFailure("symmetric eigensolver did not converge".into())
    })?;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut eigenfunctions = DMatrix::zeros(p, p);
    let mut eigenvalues = Vec::with_capacity(p);
    for (col, &k) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[k]);
        let mut phi: Vec<f64> = (0..p).map(|i| eig.eigenvectors[(i, k)] / sqrt_w[i]).collect();
        fix_sign(&mut phi);
        for i in 0..p {
            eigenfunctions[(i, col)] = phi[i];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenfunctions,
    })
}

pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Smallest `K >= 1` whose leading eigenvalues explain at least `p1` of the
/// total positive variance.
pub fn select_k(eigenvalues: &[f64], p1: f64) -> Result<usize> {
    if !(p1 > 0.0 && p1 <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "variance proportion {p1} outside (0, 1]"
        )));
    }
    let total: f64 = eigenvalues.iter().filter(|&&l| l > 0.0).sum();
    if total <= 0.0 {
        return Err(Error::AllZeroEigenvalues);
    }
    let mut cum = 0.0;
    let mut last_positive = 1;
    for (k, &l) in eigenvalues.iter().enumerate() {
        if l <= 0.0 {
            continue;
        }
        last_positive = k + 1;
        cum += l;
        if cum / total >= p1 - 1e-12 {
            return Ok(k + 1);
        }
    }
    Ok(last_positive)
}

/// A fitted decomposition of a curve panel.
#[derive(Debug, Clone, PartialEq)]
pub struct FpcaModel {
    pub grid: FunctionGrid,
    pub tenor_labels: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub mean: Vec<f64>,
    /// Full spectrum, clipped at zero, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained eigenfunctions, `p x K`.
    pub eigenfunctions: DMatrix<f64>,
    /// Training-day scores, `n x K`.
    pub scores: DMatrix<f64>,
    pub k: usize,
    pub p1: f64,
}

impl FpcaModel {
    /// Share of total variance carried by each component.
    pub fn variance_ratios(&self) -> Vec<f64> {
        let total: f64 = self.eigenvalues.iter().filter(|&&l| l > 0.0).sum();
        self.eigenvalues.iter().map(|l| l / total).collect()
    }

    /// Cumulative share of the retained components.
    pub fn explained_variance_ratio(&self) -> f64 {
        self.variance_ratios().iter().take(self.k).sum()
    }

    pub fn eigenfunction(&self, k: usize) -> Vec<f64> {
        self.eigenfunctions.column(k).iter().copied().collect()
    }

    /// `mean + sum_k scores[k] * phi_k` for a single score vector.
    pub fn curve(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (k, s) in scores.iter().enumerate().take(self.k) {
            for (i, v) in out.iter_mut().enumerate() {
                *v += s * self.eigenfunctions[(i, k)];
            }
        }
        out
    }
}

/// Projects centred curves onto the retained eigenfunctions.
pub fn compute_scores(curves: &DMatrix<f64>, model: &FpcaModel) -> Result<DMatrix<f64>> {
    project(curves, &model.mean, &model.eigenfunctions, &model.grid)
}

fn project(
    curves: &DMatrix<f64>,
    mean: &[f64],
    eigenfunctions: &DMatrix<f64>,
    grid: &FunctionGrid,
) -> Result<DMatrix<f64>> {
    let p = grid.len();
    if curves.ncols() != p {
        return Err(Error::GridMismatch {
            expected: p,
            found: curves.ncols(),
        });
    }
    let k = eigenfunctions.ncols();
    let w = grid.weights();
    Ok(DMatrix::from_fn(curves.nrows(), k, |t, c| {
        (0..p)
            .map(|i| (curves[(t, i)] - mean[i]) * eigenfunctions[(i, c)] * w[i])
            .sum()
    }))
}

/// Curves rebuilt from the mean and the first `k` components.
pub fn reconstruct(model: &FpcaModel, scores: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    if k > model.k || k > scores.ncols() {
        return Err(Error::InvalidConfig(format!(
            "cannot reconstruct with {k} components (model keeps {}, scores have {})",
            model.k,
            scores.ncols()
        )));
    }
    let p = model.grid.len();
    Ok(DMatrix::from_fn(scores.nrows(), p, |t, i| {
        model.mean[i]
            + (0..k)
                .map(|c| scores[(t, c)] * model.eigenfunctions[(i, c)])
                .sum::<f64>()
    }))
}

/// Clips rounding-level negative eigenvalues to zero.
pub(crate) fn clip_eigenvalues(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let scale = eigenvalues.first().copied().unwrap_or(0.0).max(1.0);
    eigenvalues
        .iter()
        .map(|&l| {
            if l >= 0.0 {
                Ok(l)
            } else if l >= -NEGATIVE_EIGEN_TOL * scale {
                Ok(0.0)
            } else {
                Err(Error::NegativeEigenvalue(l))
            }
        })
        .collect()
}

/// Mean, covariance, spectrum, `K` and scores for a panel of curves.
pub fn fit_fpca(panel: &FuturesPanel, p1: f64) -> Result<FpcaModel> {
    let grid = FunctionGrid::trapezoidal(panel.tenor_positions())?;
    fit_fpca_on_grid(panel, grid, p1)
}

pub fn fit_fpca_on_grid(panel: &FuturesPanel, grid: FunctionGrid, p1: f64) -> Result<FpcaModel> {
    let curves = panel.values();
    if curves.nrows() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: curves.nrows(),
        });
    }
    let mean = estimate_mean(curves)?;
    let cov = estimate_covariance(curves, &mean)?;
    let spectrum = eigendecompose(&cov, &grid)?;
    // variance at the level of rounding noise in the mean counts as none
    let scale = curves.amax() * 1e3 * f64::EPSILON;
    let floor = scale * scale * grid.weights().iter().sum::<f64>();
    if spectrum.eigenvalues.first().is_none_or(|&l| l <= floor) {
        return Err(Error::AllZeroEigenvalues);
    }
    let eigenvalues = clip_eigenvalues(&spectrum.eigenvalues)?;
    let k = select_k(&eigenvalues, p1)?;
    let eigenfunctions = spectrum.eigenfunctions.columns(0, k).into_owned();
    let scores = project(curves, &mean, &eigenfunctions, &grid)?;
    Ok(FpcaModel {
        grid,
        tenor_labels: panel.tenors().iter().map(|t| t.label.clone()).collect(),
        dates: panel.dates().to_vec(),
        mean,
        eigenvalues,
        eigenfunctions,
        scores,
        k,
        p1,
    })
}

pub const DECOMPOSITION_FILES: [&str; 4] = [
    "fpca_mean.csv",
    "fpca_eigenfunctions.csv",
    "fpca_eigenvalues.csv",
    "fpca_scores.csv",
];

/// Writes the mean curve, retained eigenfunctions, spectrum and score paths
/// as plot-ready CSV files. Returns the paths written.
pub fn export_decomposition(model: &FpcaModel, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let open = |name: &str| -> Result<(PathBuf, csv::Writer<File>)> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok((path, csv::Writer::from_writer(file)))
    };
    let flush = |w: &mut csv::Writer<File>, path: &Path| -> Result<()> {
        w.flush().map_err(|e| Error::io(path, e))
    };
    let phi_headers: Vec<String> = (1..=model.k).map(|k| format!("phi{k}")).collect();
    let mut written = Vec::new();

    let (path, mut w) = open(DECOMPOSITION_FILES[0])?;
    w.write_record(["tenor", "months", "mean"])?;
    for (i, label) in model.tenor_labels.iter().enumerate() {
        w.write_record([
            label.clone(),
            model.grid.nodes()[i].to_string(),
            model.mean[i].to_string(),
        ])?;
    }
    flush(&mut w, &path)?;
    written.push(path);

    let (path, mut w) = open(DECOMPOSITION_FILES[1])?;
    let mut header = vec!["tenor".to_string(), "months".to_string()];
    header.extend(phi_headers.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in model.tenor_labels.iter().enumerate() {
        let mut rec = vec![label.clone(), model.grid.nodes()[i].to_string()];
        rec.extend((0..model.k).map(|k| model.eigenfunctions[(i, k)].to_string()));
        w.write_record(&rec)?;
    }
    flush(&mut w, &path)?;
    written.push(path);

    let (path, mut w) = open(DECOMPOSITION_FILES[2])?;
    w.write_record(["component", "eigenvalue", "ratio", "cumulative", "retained"])?;
    let mut cum = 0.0;
    for (k, (l, r)) in model
        .eigenvalues
        .iter()
        .zip(model.variance_ratios())
        .enumerate()
    {
        cum += r;
        w.write_record([
            (k + 1).to_string(),
            l.to_string(),
            r.to_string(),
            cum.to_string(),
            (k < model.k).to_string(),
        ])?;
    }
    flush(&mut w, &path)?;
    written.push(path);

    let (path, mut w) = open(DECOMPOSITION_FILES[3])?;
    let mut header = vec!["date".to_string()];
    header.extend((1..=model.k).map(|k| format!("beta{k}")));
    w.write_record(&header)?;
    for (t, date) in model.dates.iter().enumerate() {
        let mut rec = vec![date.to_string()];
        rec.extend((0..model.k).map(|k| model.scores[(t, k)].to_string()));
        w.write_record(&rec)?;
    }
    flush(&mut w, &path)?;
    written.push(path);

    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{canonical_tenors, ScaleMarker};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wti_grid() -> FunctionGrid {
        FunctionGrid::trapezoidal(canonical_tenors().iter().map(|t| t.months).collect()).unwrap()
    }

    fn random_matrix(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, p, |_, _| rng.random_range(-1.0..1.0))
    }

    fn panel_of(values: DMatrix<f64>) -> FuturesPanel {
        let n = values.nrows();
        FuturesPanel::new(
            crate::data::weekday_dates(NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(), n),
            canonical_tenors(),
            values,
            ScaleMarker::LogPrice,
        )
        .unwrap()
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let g = wti_grid();
        assert!((g.weights().iter().sum::<f64>() - 17.0).abs() < 1e-14);
        assert_eq!(g.weights()[0], 0.5);
        assert_eq!(g.weights()[9], 4.5);
        assert_eq!(g.weights()[10], 3.0);
        // <1, x> integrates x over [1, 18] exactly for linear functions
        let x = g.nodes().to_vec();
        assert!((g.inner(&vec![1.0; 11], &x) - (18.0f64.powi(2) - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn mean_of_identical_and_opposite_rows() {
        let c: Vec<f64> = (0..11).map(|i| i as f64 * 0.3 - 1.0).collect();
        let m = DMatrix::from_fn(4, 11, |_, j| c[j]);
        assert_eq!(estimate_mean(&m).unwrap(), c);
        let pm = DMatrix::from_fn(2, 11, |t, j| if t == 0 { c[j] } else { -c[j] });
        assert!(estimate_mean(&pm).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mean_matches_column_average() {
        let x = random_matrix(7, 11, 1);
        let mean = estimate_mean(&x).unwrap();
        for j in 0..11 {
            let mut s = 0.0;
            for t in 0..7 {
                s += x[(t, j)];
            }
            assert!((mean[j] - s / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_matches_double_loop() {
        let x = random_matrix(10, 11, 2);
        let mean = estimate_mean(&x).unwrap();
        let cov = estimate_covariance(&x, &mean).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                let mut s = 0.0;
                for t in 0..10 {
                    s += (x[(t, i)] - mean[i]) * (x[(t, j)] - mean[j]);
                }
                assert!((cov[(i, j)] - s / 10.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn covariance_of_identical_rows_is_zero() {
        let x = DMatrix::from_fn(5, 11, |_, j| j as f64);
        let mean = estimate_mean(&x).unwrap();
        let cov = estimate_covariance(&x, &mean).unwrap();
        assert!(cov.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rank_one_covariance_is_outer_product() {
        let phi: Vec<f64> = (0..11).map(|i| (i as f64 * 0.4).sin() + 0.2).collect();
        let s = [1.0, -2.0, 0.5, 3.0];
        let x = DMatrix::from_fn(4, 11, |t, j| 2.0 + s[t] * phi[j]);
        let mean = estimate_mean(&x).unwrap();
        let cov = estimate_covariance(&x, &mean).unwrap();
        let sm = s.iter().sum::<f64>() / 4.0;
        let var = s.iter().map(|v| (v - sm).powi(2)).sum::<f64>() / 4.0;
        for i in 0..11 {
            for j in 0..11 {
                assert!((cov[(i, j)] - var * phi[i] * phi[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_surface_with_uniform_weights() {
        let q = 0.5;
        let grid = FunctionGrid::with_weights((0..4).map(f64::from).collect(), vec![q; 4]).unwrap();
        let diag = [1.0, 4.0, 2.0, 3.0];
        let cov = DMatrix::from_fn(4, 4, |i, j| if i == j { diag[i] } else { 0.0 });
        let sp = eigendecompose(&cov, &grid).unwrap();
        let expect_order = [1, 3, 2, 0];
        for (col, &node) in expect_order.iter().enumerate() {
            assert!((sp.eigenvalues[col] - diag[node] * q).abs() < 1e-12);
            for i in 0..4 {
                let want = if i == node { 1.0 / q.sqrt() } else { 0.0 };
                assert!((sp.eigenfunctions[(i, col)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_one_surface_recovers_eigenfunction_with_positive_sign() {
        let g = wti_grid();
        let raw: Vec<f64> = g.nodes().iter().map(|m| -(1.0 + 0.1 * m)).collect();
        let phi = g.orthonormalize(&[raw])[0].clone();
        let lambda = 2.5;
        let cov = DMatrix::from_fn(11, 11, |i, j| lambda * phi[i] * phi[j]);
        let sp = eigendecompose(&cov, &g).unwrap();
        assert!((sp.eigenvalues[0] - lambda).abs() < 1e-10);
        // phi is all negative, so the sign convention flips it
        for i in 0..11 {
            assert!((sp.eigenfunctions[(i, 0)] + phi[i]).abs() < 1e-10);
        }
        assert!(sp.eigenvalues[1..].iter().all(|l| l.abs() < 1e-10));
    }

    #[test]
    fn spectral_reconstruction_of_random_symmetric_surface() {
        let g = wti_grid();
        let r = random_matrix(11, 11, 3);
        let cov = (&r + r.transpose()) * 0.5;
        let sp = eigendecompose(&cov, &g).unwrap();
        for w in sp.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for i in 0..11 {
            for j in 0..11 {
                let rec: f64 = (0..11)
                    .map(|k| sp.eigenvalues[k] * sp.eigenfunctions[(i, k)] * sp.eigenfunctions[(j, k)])
                    .sum();
                assert!((rec - cov[(i, j)]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(&[9.9, 0.1], 0.99).unwrap(), 1);
        assert_eq!(select_k(&[0.5, 0.3, 0.15, 0.05], 0.99).unwrap(), 4);
        assert_eq!(select_k(&[1.0, 0.0, 0.0], 0.99).unwrap(), 1);
        assert_eq!(select_k(&[1.0, 0.0, 0.0], 1.0).unwrap(), 1);
        assert!(matches!(
            select_k(&[0.0, 0.0], 0.99),
            Err(Error::AllZeroEigenvalues)
        ));
        assert!(select_k(&[1.0], 0.0).is_err());
        assert!(select_k(&[1.0], 1.5).is_err());
    }

    #[test]
    fn clipping_rules() {
        assert_eq!(clip_eigenvalues(&[2.0, -1e-12]).unwrap(), vec![2.0, 0.0]);
        assert!(matches!(
            clip_eigenvalues(&[2.0, -1e-3]),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn scores_of_planted_curves() {
        let x = random_matrix(30, 11, 4);
        let model = fit_fpca(&panel_of(x), 1.0).unwrap();
        let phi1 = model.eigenfunction(0);
        let curve: Vec<f64> = (0..11).map(|i| model.mean[i] + 2.0 * phi1[i]).collect();
        let rows = DMatrix::from_fn(2, 11, |t, i| if t == 0 { curve[i] } else { model.mean[i] });
        let s = compute_scores(&rows, &model).unwrap();
        assert!((s[(0, 0)] - 2.0).abs() < 1e-12);
        for k in 1..model.k {
            assert!(s[(0, k)].abs() < 1e-12);
        }
        assert!(s.row(1).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn scores_match_weighted_sum() {
        let x = random_matrix(20, 11, 5);
        let model = fit_fpca(&panel_of(x.clone()), 0.9).unwrap();
        let s = compute_scores(&x, &model).unwrap();
        let w = model.grid.weights();
        for t in 0..20 {
            for k in 0..model.k {
                let mut acc = 0.0;
                for i in 0..11 {
                    acc += (x[(t, i)] - model.mean[i]) * model.eigenfunctions[(i, k)] * w[i];
                }
                assert!((s[(t, k)] - acc).abs() < 1e-12);
            }
        }
        assert!(matches!(
            compute_scores(&DMatrix::zeros(2, 5), &model),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn reconstruct_k0_is_mean_and_full_round_trip() {
        let x = random_matrix(25, 11, 6);
        let model = fit_fpca(&panel_of(x.clone()), 1.0).unwrap();
        assert_eq!(model.k, 11);
        let r0 = reconstruct(&model, &model.scores, 0).unwrap();
        for t in 0..25 {
            assert_eq!(r0.row(t).iter().copied().collect::<Vec<_>>(), model.mean);
        }
        let full = reconstruct(&model, &model.scores, model.k).unwrap();
        assert!((full - x).abs().max() <= 1e-8);
        assert!(reconstruct(&model, &model.scores, 12).is_err());
    }

    #[test]
    fn constant_panel_has_no_variance() {
        let x = DMatrix::from_fn(10, 11, |_, j| 4.0 + j as f64 * 0.01);
        assert!(matches!(
            fit_fpca(&panel_of(x), 0.99),
            Err(Error::AllZeroEigenvalues)
        ));
    }

    #[test]
    fn refit_is_deterministic() {
        let x = random_matrix(40, 11, 8);
        let a = fit_fpca(&panel_of(x.clone()), 0.99).unwrap();
        let b = fit_fpca(&panel_of(x), 0.99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn export_writes_four_files() {
        let dir = tempfile::tempdir().unwrap();
        let model = fit_fpca(&panel_of(random_matrix(12, 11, 9)), 0.95).unwrap();
        let files = export_decomposition(&model, dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        let scores = std::fs::read_to_string(dir.path().join("fpca_scores.csv")).unwrap();
        assert_eq!(scores.lines().count(), 13);
    }
}
