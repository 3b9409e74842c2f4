use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvecast::backtest::{emit_reports, run_expanding_backtest, run_insample_eval, INSAMPLE_LOSSES};
use curvecast::config::{BlockLength, RunConfig};
use curvecast::data::{
    descriptive_stats, factor_stats, level_slope_spec, load_factors, load_kl_spec, load_panel, save_factors,
    save_panel, simulate_factors, simulate_panel, write_stats, FactorPanel, FuturesPanel, PanelSchema, ScaleMarker,
};
use curvecast::evaluation::LossMatrix;
use curvecast::fpca::{export_decomposition, fit_fpca};
use curvecast::mcs::{mcs_run, write_eliminations, write_membership, BootstrapPlan, McsTableEntry};
use curvecast::{Error, Result};

#[derive(Parser)]
#[command(name = "curvecast", version, about = "Futures curve forecasting and forecast evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate input panels and write descriptive statistics.
    Ingest(Common),
    /// Fit each model once on the training window and score it in-sample.
    Insample(Common),
    /// Expanding-window out-of-sample backtest with full reports.
    Backtest(Common),
    /// Model confidence set on an existing loss matrix CSV.
    Mcs {
        /// `date,model1,model2,...` file, e.g. a backtest's loss_matrix.csv.
        #[arg(long)]
        losses: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate a futures panel (and factor levels) from a curve spec.
    Simulate {
        /// Spec file; the built-in level/slope spec when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        days: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Export the functional principal component decomposition.
    Decompose(Common),
}

/// Flags shared by every subcommand; each one mirrors a config-file key.
#[derive(Args)]
struct Common {
    /// `key = value` file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    futures: Option<String>,
    #[arg(long)]
    factors: Option<String>,
    /// 250, 500, 750 or any positive count.
    #[arg(long)]
    oos_len: Option<String>,
    #[arg(long)]
    p1: Option<String>,
    /// Comma list of PC, FTS, Fund, RW.
    #[arg(long)]
    models: Option<String>,
    /// Comma list of MCS levels.
    #[arg(long)]
    alpha: Option<String>,
    /// range, max, or both comma separated.
    #[arg(long)]
    statistic: Option<String>,
    #[arg(long)]
    bootstrap_reps: Option<String>,
    /// auto or a positive block length.
    #[arg(long)]
    block_len: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// zero-matches-zero or zero-never-matches.
    #[arg(long)]
    tie_rule: Option<String>,
    /// reject or ffill.
    #[arg(long)]
    missing: Option<String>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("futures", &self.futures),
            ("factors", &self.factors),
            ("oos-len", &self.oos_len),
            ("p1", &self.p1),
            ("models", &self.models),
            ("alpha", &self.alpha),
            ("statistic", &self.statistic),
            ("bootstrap-reps", &self.bootstrap_reps),
            ("block-len", &self.block_len),
            ("seed", &self.seed),
            ("out", &self.out),
            ("tie-rule", &self.tie_rule),
            ("missing", &self.missing),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        Ok(config)
    }
}

fn load_inputs(config: &RunConfig) -> Result<(FuturesPanel, Option<FactorPanel>)> {
    let path = config
        .futures
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("no futures panel given (--futures)".into()))?;
    let futures = load_panel(path, &PanelSchema::default().with_missing(config.missing))?;
    let factors = config
        .factors
        .as_ref()
        .map(|p| load_factors(p, config.missing))
        .transpose()?;
    Ok((futures, factors))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn out_dir(config: &RunConfig) -> Result<&Path> {
    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;
    Ok(&config.out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(common) => {
            let config = common.resolve()?;
            let (futures, factors) = load_inputs(&config)?;
            let dir = out_dir(&config)?;
            println!(
                "futures: {} days x {} tenors, {} to {}",
                futures.n_days(),
                futures.n_tenors(),
                futures.dates()[0],
                futures.dates()[futures.n_days() - 1]
            );
            write_stats(&descriptive_stats(&futures)?, create(&dir.join("futures_stats.csv"))?)?;
            if let Some(f) = factors {
                println!("factors: {} days", f.n_days());
                write_stats(&factor_stats(&f)?, create(&dir.join("factor_stats.csv"))?)?;
            }
            write_stats(&descriptive_stats(&futures)?, std::io::stdout())?;
        }
        Command::Insample(common) => {
            let config = common.resolve()?;
            let (futures, factors) = load_inputs(&config)?;
            let report = run_insample_eval(&config, &futures, factors.as_ref())?;
            report.write_csv(create(&out_dir(&config)?.join(INSAMPLE_LOSSES))?)?;
            report.write_csv(std::io::stdout())?;
        }
        Command::Backtest(common) => {
            let config = common.resolve()?;
            let (futures, factors) = load_inputs(&config)?;
            let run = run_expanding_backtest(&config, &futures, factors.as_ref())?;
            let files = emit_reports(&run, &config.out)?;
            run.report.write_csv(std::io::stdout())?;
            eprintln!("{} files written to {} in {:.1?}", files.len(), config.out.display(), run.elapsed);
        }
        Command::Mcs { losses, common } => {
            let config = common.resolve()?;
            let matrix = LossMatrix::read_csv(File::open(&losses).map_err(|e| Error::io(&losses, e))?)?;
            let plan = match config.block_len {
                BlockLength::Auto => BootstrapPlan::auto(&matrix, config.bootstrap_reps, config.seed)?,
                BlockLength::Fixed(p) => BootstrapPlan::new(p, config.bootstrap_reps, config.seed)?,
            };
            let mut entries = Vec::new();
            for &kind in &config.statistics {
                let first = mcs_run(&matrix, config.alphas[0], kind, &plan)?;
                for &a in &config.alphas {
                    let result = first.at_level(a)?;
                    println!("{kind} alpha={a}: {{{}}}", result.surviving.join(", "));
                    entries.push(McsTableEntry {
                        target: "Overall".into(),
                        result,
                    });
                }
            }
            let dir = out_dir(&config)?;
            write_membership(&entries, create(&dir.join("mcs_membership.csv"))?)?;
            write_eliminations(&entries, create(&dir.join("mcs_eliminations.csv"))?)?;
        }
        Command::Simulate { spec, days, common } => {
            let config = common.resolve()?;
            let spec = match spec {
                Some(p) => load_kl_spec(p)?,
                None => level_slope_spec(),
            };
            let n = days.or(spec.days).unwrap_or(1300);
            let seed = spec.seed.unwrap_or(config.seed);
            let mut panel = simulate_panel(&spec, n, seed)?;
            if panel.scale() == ScaleMarker::LogPrice {
                panel = panel.to_prices()?;
            }
            let dir = out_dir(&config)?;
            save_panel(&panel, dir.join("futures.csv"))?;
            save_factors(&simulate_factors(panel.dates(), seed.wrapping_add(1))?, dir.join("factors.csv"))?;
            println!("{n} days written to {}", dir.display());
        }
        Command::Decompose(common) => {
            let config = common.resolve()?;
            let (futures, _) = load_inputs(&config)?;
            let model = fit_fpca(&futures.to_log_prices()?, config.p1)?;
            let files = export_decomposition(&model, out_dir(&config)?)?;
            println!(
                "K = {} explaining {:.4} of variance; {} files written",
                model.k,
                model.explained_variance_ratio(),
                files.len()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
