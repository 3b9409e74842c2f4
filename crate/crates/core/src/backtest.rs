//! Expanding-window out-of-sample backtest, in-sample evaluation and report
//! files.
//!
//! Index conventions: with `n` price days `D_0..D_{n-1}`, the return panel
//! holds `D_1..D_{n-1}`. Forecasting the return on price day `d` uses log
//! prices `D_0..D_{d-1}` (FTS), returns and aligned prices or factor changes
//! on `D_1..D_{d-1}` (PC, Fund, RW). The last `oos_len` price days are the
//! targets.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::{BlockLength, RunConfig};
use crate::data::{align_panels, FactorPanel, FuturesPanel, ScaleMarker};
use crate::error::{Error, Result};
use crate::ets::DampedTrendParams;
use crate::evaluation::{
    build_loss_matrix, build_tenor_loss_matrix, mase_denominators, record_matrices, LossMatrix, LossReport, Measure,
    Sample,
};
use crate::forecast::{
    fts_forecast, fts_insample, fundamental_forecast, fundamental_insample, pc_forecast, pc_insample,
    rw_forecast_panel, rw_insample, ForecastRecord, ModelKind, FTS_MIN_WINDOW,
};
use crate::fpca::{export_decomposition, fit_fpca, FpcaModel};
use crate::mcs::{mcs_run, write_eliminations, write_membership, BootstrapPlan, McsTableEntry};

/// Smallest number of training returns before the first target.
pub const MIN_TRAINING: usize = FTS_MIN_WINDOW;

/// Prepared views of the input panels.
struct Inputs {
    log_prices: FuturesPanel,
    /// Price days `D_1..`.
    prices: FuturesPanel,
    returns: FuturesPanel,
    factor_changes: Option<FactorPanel>,
}

fn prepare(config: &RunConfig, futures: &FuturesPanel, factors: Option<&FactorPanel>) -> Result<Inputs> {
    if futures.scale() != ScaleMarker::Price {
        return Err(Error::WrongScale {
            expected: ScaleMarker::Price,
            found: futures.scale(),
        });
    }
    let needs_factors = config.models.iter().any(|m| m.needs_factors());
    let (futures, factors) = match (factors, needs_factors) {
        (Some(f), true) => {
            let (a, b) = align_panels(futures, f)?;
            (a, Some(b))
        }
        (None, true) => {
            return Err(Error::InvalidConfig(
                "the Fund model needs a factor panel".into(),
            ))
        }
        (_, false) => (futures.clone(), None),
    };
    let n = futures.n_days();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    Ok(Inputs {
        log_prices: futures.to_log_prices()?,
        prices: futures.slice(1, n),
        returns: futures.to_log_returns()?,
        factor_changes: factors.map(|f| f.to_log_changes()).transpose()?,
    })
}

/// FTS details of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct FtsWindowInfo {
    pub target_date: NaiveDate,
    pub k: usize,
    pub explained_variance: f64,
    pub params: Vec<DampedTrendParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestRun {
    pub config: RunConfig,
    /// Date-ordered, models in configured order within a date.
    pub records: Vec<ForecastRecord>,
    pub report: LossReport,
    /// `None` when no model was run.
    pub loss_matrix: Option<LossMatrix>,
    /// Per-tenor and `Overall` MCS results.
    pub mcs: Vec<McsTableEntry>,
    /// Decomposition of the initial training window.
    pub fpca: Option<FpcaModel>,
    pub fts_windows: Vec<FtsWindowInfo>,
    pub warnings: Vec<String>,
    pub elapsed: Duration,
}

struct WindowOutput {
    records: Vec<ForecastRecord>,
    fts: Option<FtsWindowInfo>,
    warning: Option<String>,
}

fn forecast_window(inputs: &Inputs, config: &RunConfig, d: usize) -> Result<WindowOutput> {
    let target = inputs.log_prices.dates()[d];
    let realized = inputs.returns.row(d - 1);
    let mut out = WindowOutput {
        records: Vec::with_capacity(config.models.len()),
        fts: None,
        warning: None,
    };
    for &model in &config.models {
        let fail = |e: Error| Error::WindowFailure {
            model: model.id().to_string(),
            date: target.to_string(),
            source: Box::new(e),
        };
        let returns = inputs.returns.slice(0, d - 1);
        let forecast = match model {
            ModelKind::Fts => {
                let f = fts_forecast(&inputs.log_prices.slice(0, d), config.p1).map_err(fail)?;
                out.fts = Some(FtsWindowInfo {
                    target_date: target,
                    k: f.k,
                    explained_variance: f.explained_variance,
                    params: f.params,
                });
                f.values
            }
            ModelKind::Fundamental => {
                let fc = inputs.factor_changes.as_ref().expect("factors checked in prepare");
                fundamental_forecast(&returns, &fc.slice(0, d - 1)).map_err(fail)?
            }
            ModelKind::Pc => {
                let f = pc_forecast(&returns, &inputs.prices.slice(0, d - 1)).map_err(fail)?;
                if f.components < crate::forecast::PC_COMPONENTS {
                    out.warning = Some(format!(
                        "PC for {target}: price panel rank deficient, {} of {} components used",
                        f.components,
                        crate::forecast::PC_COMPONENTS
                    ));
                }
                f.values
            }
            ModelKind::RandomWalk => rw_forecast_panel(&returns).map_err(fail)?,
        };
        out.records.push(ForecastRecord {
            model,
            target_date: target,
            forecast,
            realized: realized.clone(),
        });
    }
    Ok(out)
}

/// Targets are price-day indices `first..n`.
fn first_target(n: usize, oos_len: usize) -> Result<usize> {
    if oos_len == 0 {
        return Err(Error::InvalidConfig("out-of-sample length must be positive".into()));
    }
    // training returns before the first target: first - 1
    if n < oos_len + MIN_TRAINING + 1 {
        return Err(Error::InvalidConfig(format!(
            "{oos_len} out-of-sample days leave fewer than {MIN_TRAINING} training returns in {n} days"
        )));
    }
    Ok(n - oos_len)
}

fn bootstrap_plan(config: &RunConfig, matrix: &LossMatrix) -> Result<BootstrapPlan> {
    match config.block_len {
        BlockLength::Auto => BootstrapPlan::auto(matrix, config.bootstrap_reps, config.seed),
        BlockLength::Fixed(p) => BootstrapPlan::new(p, config.bootstrap_reps, config.seed),
    }
}

/// Runs MCS for the tenor-average loss and for every tenor separately.
pub fn mcs_tables(config: &RunConfig, records: &[ForecastRecord], tenors: &[String]) -> Result<Vec<McsTableEntry>> {
    let mut targets = vec![("Overall".to_string(), build_loss_matrix(records)?)];
    for (j, t) in tenors.iter().enumerate() {
        targets.push((t.clone(), build_tenor_loss_matrix(records, j)?));
    }
    let jobs: Vec<_> = targets
        .iter()
        .flat_map(|(name, m)| config.statistics.iter().map(move |&k| (name, m, k)))
        .collect();
    let results: Vec<Result<Vec<McsTableEntry>>> = jobs
        .par_iter()
        .map(|(name, matrix, kind)| {
            let plan = bootstrap_plan(config, matrix)?;
            let first = mcs_run(matrix, config.alphas[0], *kind, &plan)?;
            config
                .alphas
                .iter()
                .map(|&a| {
                    Ok(McsTableEntry {
                        target: (*name).clone(),
                        result: first.at_level(a)?,
                    })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Expanding-window backtest: every target day is forecast by every model
/// trained on all data strictly before it.
pub fn run_expanding_backtest(
    config: &RunConfig,
    futures: &FuturesPanel,
    factors: Option<&FactorPanel>,
) -> Result<BacktestRun> {
    let started = Instant::now();
    let inputs = prepare(config, futures, factors)?;
    let n = inputs.log_prices.n_days();
    let first = first_target(n, config.oos_len)?;
    let tenors: Vec<String> = futures.tenors().iter().map(|t| t.label.clone()).collect();

    let windows: Vec<Result<WindowOutput>> = (first..n)
        .into_par_iter()
        .map(|d| forecast_window(&inputs, config, d))
        .collect();
    let mut records = Vec::with_capacity(config.models.len() * config.oos_len);
    let mut fts_windows = Vec::new();
    let mut warnings = Vec::new();
    for w in windows {
        let w = w?;
        records.extend(w.records);
        fts_windows.extend(w.fts);
        warnings.extend(w.warning);
    }

    let mut report = LossReport::new(Sample::OutOfSample, tenors.clone());
    let mut loss_matrix = None;
    let mut mcs = Vec::new();
    let fpca = match fit_fpca(&inputs.log_prices.slice(0, first), config.p1) {
        Ok(m) => Some(m),
        Err(Error::AllZeroEigenvalues) => None,
        Err(e) => return Err(e),
    };
    if !config.models.is_empty() {
        let base = inputs.returns.slice(0, first - 1);
        let denominators = mase_denominators(base.values(), &tenors)?;
        for &model in &config.models {
            let (_, f, r) = record_matrices(&records, model);
            report.add_model(model, &f, &r, &Measure::ALL, Some(&denominators), config.tie_rule)?;
        }
        loss_matrix = Some(build_loss_matrix(&records)?);
        mcs = mcs_tables(config, &records, &tenors)?;
    }
    Ok(BacktestRun {
        config: config.clone(),
        records,
        report,
        loss_matrix,
        mcs,
        fpca,
        fts_windows,
        warnings,
        elapsed: started.elapsed(),
    })
}

/// Fits every model once on the training window (all but the last
/// `oos_len` days) and scores its one-step in-sample predictions.
///
/// RW gets MAE only; sign and asymmetric measures are not meaningful for it.
pub fn run_insample_eval(
    config: &RunConfig,
    futures: &FuturesPanel,
    factors: Option<&FactorPanel>,
) -> Result<LossReport> {
    let inputs = prepare(config, futures, factors)?;
    let n_total = inputs.log_prices.n_days();
    if config.oos_len >= n_total {
        return Err(Error::InvalidConfig("out-of-sample period covers the whole sample".into()));
    }
    let n = n_total - config.oos_len;
    if n < MIN_TRAINING {
        return Err(Error::InsufficientData {
            needed: MIN_TRAINING,
            got: n,
        });
    }
    let tenors: Vec<String> = futures.tenors().iter().map(|t| t.label.clone()).collect();
    let returns = inputs.returns.slice(0, n - 1);
    let realized = returns.values().rows(1, n - 2).into_owned();
    let mut report = LossReport::new(Sample::InSample, tenors);
    for &model in &config.models {
        let fitted: DMatrix<f64> = match model {
            ModelKind::Fts => {
                let all = fts_insample(&inputs.log_prices.slice(0, n), config.p1)?;
                all.rows(1, n - 2).into_owned()
            }
            ModelKind::Fundamental => {
                let fc = inputs.factor_changes.as_ref().expect("factors checked in prepare");
                fundamental_insample(&returns, &fc.slice(0, n - 1))?
            }
            ModelKind::Pc => pc_insample(&returns, &inputs.prices.slice(0, n - 1))?,
            ModelKind::RandomWalk => rw_insample(&returns)?,
        };
        let measures: &[Measure] = if model == ModelKind::RandomWalk {
            &[Measure::Mae]
        } else {
            &[Measure::Mae, Measure::Mcpdc, Measure::MmeUnder, Measure::MmeOver]
        };
        report.add_model(model, &fitted, &realized, measures, None, config.tie_rule)?;
    }
    Ok(report)
}

pub const MANIFEST: &str = "manifest.txt";
pub const FORECASTS: &str = "forecasts.csv";
pub const OOS_LOSSES: &str = "oos_losses.csv";
pub const INSAMPLE_LOSSES: &str = "insample_losses.csv";
pub const LOSS_MATRIX: &str = "loss_matrix.csv";
pub const MCS_MEMBERSHIP: &str = "mcs_membership.csv";
pub const MCS_ELIMINATIONS: &str = "mcs_eliminations.csv";
pub const FTS_PARAMS: &str = "fts_params.csv";
pub const WARNINGS: &str = "warnings.txt";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_file(dir: &Path, name: &str, written: &mut Vec<PathBuf>, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    f(&mut w)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

pub fn write_forecasts<W: Write>(records: &[ForecastRecord], tenors: &[String], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "target_date", "tenor", "forecast", "realized"])?;
    for r in records {
        for (j, t) in tenors.iter().enumerate() {
            w.write_record([
                r.model.id().to_string(),
                r.target_date.format("%Y-%m-%d").to_string(),
                t.clone(),
                r.forecast[j].to_string(),
                r.realized[j].to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<forecasts>", e))?;
    Ok(())
}

fn write_fts_params<W: Write>(windows: &[FtsWindowInfo], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_date", "k", "explained_variance", "component", "xi", "delta", "gamma", "l0", "b0"])?;
    for win in windows {
        for (c, p) in win.params.iter().enumerate() {
            w.write_record([
                win.target_date.format("%Y-%m-%d").to_string(),
                win.k.to_string(),
                win.explained_variance.to_string(),
                (c + 1).to_string(),
                p.xi.to_string(),
                p.delta.to_string(),
                p.gamma.to_string(),
                p.l0.to_string(),
                p.b0.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<fts params>", e))?;
    Ok(())
}

fn write_manifest(dir: &Path, config: &RunConfig, files: &[PathBuf], note: Option<&str>) -> Result<PathBuf> {
    let path = dir.join(MANIFEST);
    let mut w = create(&path)?;
    let mut text = format!("# curvecast {} run manifest\n", env!("CARGO_PKG_VERSION"));
    if let Some(note) = note {
        text.push_str(&format!("# note: {note}\n"));
    }
    text.push_str(&config.to_text());
    for f in files {
        let name = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        text.push_str(&format!("# file: {name}\n"));
    }
    w.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the run's report files into `out_dir` and returns their paths,
/// manifest last. The manifest doubles as a config file for rerunning.
pub fn emit_reports(run: &BacktestRun, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    if run.config.models.is_empty() {
        let m = write_manifest(dir, &run.config, &written, Some("empty model set, nothing was forecast"))?;
        written.push(m);
        return Ok(written);
    }
    let tenors = &run.report.tenors;
    write_file(dir, FORECASTS, &mut written, |w| write_forecasts(&run.records, tenors, w))?;
    write_file(dir, OOS_LOSSES, &mut written, |w| run.report.write_csv(w))?;
    if let Some(m) = &run.loss_matrix {
        write_file(dir, LOSS_MATRIX, &mut written, |w| m.write_csv(w))?;
    }
    write_file(dir, MCS_MEMBERSHIP, &mut written, |w| write_membership(&run.mcs, w))?;
    write_file(dir, MCS_ELIMINATIONS, &mut written, |w| write_eliminations(&run.mcs, w))?;
    if let Some(model) = &run.fpca {
        written.extend(export_decomposition(model, dir)?);
    }
    if run.config.models.contains(&ModelKind::Fts) {
        write_file(dir, FTS_PARAMS, &mut written, |w| write_fts_params(&run.fts_windows, w))?;
    }
    if !run.warnings.is_empty() {
        write_file(dir, WARNINGS, &mut written, |w| {
            for line in &run.warnings {
                writeln!(w, "{line}").map_err(|e| Error::io(WARNINGS, e))?;
            }
            Ok(())
        })?;
    }
    let m = write_manifest(dir, &run.config, &written, None)?;
    written.push(m);
    Ok(written)
}
