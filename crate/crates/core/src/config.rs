//! Run configuration and its plain-text `key = value` file form.
//!
//! Keys match the command-line flags without the leading dashes, so any
//! flag can live in a file and a flag given on the command line replaces
//! the file's value. `#` starts a comment.
//!
//! ```text
//! # expanding backtest on the last 500 days
//! oos-len = 500
//! p1 = 0.99
//! models = PC,FTS,Fund
//! alpha = 0.25,0.10
//! statistic = range,max
//! bootstrap-reps = 5000
//! block-len = auto
//! seed = 7
//! out = reports
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use crate::data::MissingPolicy;
use crate::error::{Error, Result};
use crate::evaluation::SignTieRule;
use crate::forecast::ModelKind;
use crate::mcs::{McsStatistic, DEFAULT_BOOTSTRAP_REPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLength {
    Auto,
    Fixed(usize),
}

impl fmt::Display for BlockLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockLength::Auto => f.write_str("auto"),
            BlockLength::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Out-of-sample days; 0 means no holdout (in-sample runs only).
    pub oos_len: usize,
    pub p1: f64,
    pub models: Vec<ModelKind>,
    pub alphas: Vec<f64>,
    pub statistics: Vec<McsStatistic>,
    pub bootstrap_reps: usize,
    pub block_len: BlockLength,
    pub seed: u64,
    pub out: PathBuf,
    pub tie_rule: SignTieRule,
    pub missing: MissingPolicy,
    pub futures: Option<PathBuf>,
    pub factors: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            oos_len: 500,
            p1: 0.99,
            models: vec![ModelKind::Pc, ModelKind::Fts, ModelKind::Fundamental],
            alphas: vec![0.25, 0.10],
            statistics: vec![McsStatistic::Range, McsStatistic::Max],
            bootstrap_reps: DEFAULT_BOOTSTRAP_REPS,
            block_len: BlockLength::Auto,
            seed: 1,
            out: PathBuf::from("out"),
            tie_rule: SignTieRule::default(),
            missing: MissingPolicy::default(),
            futures: None,
            factors: None,
        }
    }
}

pub const CONFIG_KEYS: [&str; 13] = [
    "oos-len",
    "p1",
    "models",
    "alpha",
    "statistic",
    "bootstrap-reps",
    "block-len",
    "seed",
    "out",
    "tie-rule",
    "missing",
    "futures",
    "factors",
];

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidConfig(format!("bad value `{value}` for `{key}`"))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "oos-len" => self.oos_len = value.parse().map_err(|_| bad(key, value))?,
            "p1" => {
                let p: f64 = value.parse().map_err(|_| bad(key, value))?;
                if !(p > 0.0 && p <= 1.0) {
                    return Err(bad(key, value));
                }
                self.p1 = p;
            }
            "models" => {
                let mut models = Vec::new();
                for m in list(value) {
                    let kind = ModelKind::parse(m).ok_or_else(|| bad(key, m))?;
                    if !models.contains(&kind) {
                        models.push(kind);
                    }
                }
                self.models = models;
            }
            "alpha" => {
                let alphas = list(value)
                    .map(|a| match a.parse::<f64>() {
                        Ok(x) if x > 0.0 && x < 1.0 => Ok(x),
                        _ => Err(bad(key, a)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                if alphas.is_empty() {
                    return Err(bad(key, value));
                }
                self.alphas = alphas;
            }
            "statistic" => {
                let stats = list(value)
                    .map(|s| McsStatistic::parse(s).ok_or_else(|| bad(key, s)))
                    .collect::<Result<Vec<_>>>()?;
                if stats.is_empty() {
                    return Err(bad(key, value));
                }
                self.statistics = stats;
            }
            "bootstrap-reps" => match value.parse::<usize>() {
                Ok(b) if b > 0 => self.bootstrap_reps = b,
                _ => return Err(bad(key, value)),
            },
            "block-len" => {
                self.block_len = if value.eq_ignore_ascii_case("auto") {
                    BlockLength::Auto
                } else {
                    match value.parse::<usize>() {
                        Ok(n) if n > 0 => BlockLength::Fixed(n),
                        _ => return Err(bad(key, value)),
                    }
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "out" => self.out = PathBuf::from(value),
            "tie-rule" => self.tie_rule = SignTieRule::parse(value).ok_or_else(|| bad(key, value))?,
            "missing" => self.missing = MissingPolicy::parse(value).ok_or_else(|| bad(key, value))?,
            "futures" => self.futures = Some(PathBuf::from(value)),
            "factors" => self.factors = Some(PathBuf::from(value)),
            _ => return Err(Error::InvalidConfig(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::UnparseableRow {
                line: i + 1,
                reason: format!("expected `key = value`, found `{line}`"),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Every key with its current value, in `CONFIG_KEYS` order; unset
    /// paths are left out.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mut pairs = vec![
            ("oos-len", self.oos_len.to_string()),
            ("p1", self.p1.to_string()),
            ("models", join(self.models.iter().map(|m| m.id().to_string()).collect())),
            ("alpha", join(self.alphas.iter().map(|a| a.to_string()).collect())),
            ("statistic", join(self.statistics.iter().map(|s| s.to_string()).collect())),
            ("bootstrap-reps", self.bootstrap_reps.to_string()),
            ("block-len", self.block_len.to_string()),
            ("seed", self.seed.to_string()),
            ("out", self.out.display().to_string()),
            ("tie-rule", self.tie_rule.as_str().to_string()),
            ("missing", self.missing.as_str().to_string()),
        ];
        if let Some(p) = &self.futures {
            pairs.push(("futures", p.display().to_string()));
        }
        if let Some(p) = &self.factors {
            pairs.push(("factors", p.display().to_string()));
        }
        pairs
    }

    pub fn to_text(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
