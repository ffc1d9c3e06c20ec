//! Run options shared by flags and config files, and their resolution into
//! a [`RunSpec`].

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use esr_core::canon::mix64;
use esr_core::data::{generate, load_csv, Dataset, SplitSpec};
use esr_core::search::SearchConfig;

use crate::CliError;

const SPLIT_STREAM: u64 = 0x5eed_c5f1;

/// Options for one search. Every field is optional so a config file and
/// the command line can be layered; config-file keys use the flag names.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// TOML file with any of these options; flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Catalog benchmark id (see `esr catalog`).
    #[arg(long)]
    pub benchmark: Option<String>,
    /// Headed numeric CSV file; every column but the target is a feature.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Target column of the CSV file.
    #[arg(long)]
    pub target: Option<String>,
    /// Share of CSV rows used for training after a seeded shuffle.
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Maximum variable references per sentence.
    #[arg(long)]
    pub max_var_refs: Option<usize>,
    /// Maximum number of fitted sentences.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Length weight of the priority.
    #[arg(long)]
    pub weight_w: Option<f64>,
    /// Levenberg-Marquardt iterations per restart.
    #[arg(long)]
    pub lm_iterations: Option<usize>,
    /// Levenberg-Marquardt restarts per fit.
    #[arg(long)]
    pub lm_restarts: Option<usize>,
    /// Seed for restarts, benchmark sampling and the CSV split.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long, value_name = "SECS")]
    pub time_limit: Option<f64>,
    /// Stop once the best train NMSE is below this value.
    #[arg(long)]
    pub stop_nmse: Option<f64>,
    /// Cap on open phrases; the worst are dropped.
    #[arg(long)]
    pub max_open: Option<usize>,
    /// Fit on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    /// Directory for report files.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl Options {
    /// Reads the config file, if any, and lays these options over it.
    pub fn layered(&self) -> Result<Options, CliError> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let base = read_config(path)?;
        Ok(Options {
            config: self.config.clone(),
            benchmark: self.benchmark.clone().or(base.benchmark),
            csv: self.csv.clone().or(base.csv),
            target: self.target.clone().or(base.target),
            train_fraction: self.train_fraction.or(base.train_fraction),
            max_var_refs: self.max_var_refs.or(base.max_var_refs),
            budget: self.budget.or(base.budget),
            weight_w: self.weight_w.or(base.weight_w),
            lm_iterations: self.lm_iterations.or(base.lm_iterations),
            lm_restarts: self.lm_restarts.or(base.lm_restarts),
            seed: self.seed.or(base.seed),
            time_limit: self.time_limit.or(base.time_limit),
            stop_nmse: self.stop_nmse.or(base.stop_nmse),
            max_open: self.max_open.or(base.max_open),
            sequential: self.sequential || base.sequential,
            out: self.out.clone().or(base.out),
        })
    }

    /// Search configuration: defaults overridden by the given options.
    pub fn search_config(&self) -> Result<SearchConfig, CliError> {
        let mut cfg = SearchConfig::default();
        if let Some(v) = self.max_var_refs {
            cfg.max_variable_refs = v;
        }
        if let Some(v) = self.budget {
            cfg.max_evaluated_sentences = v;
        }
        if let Some(v) = self.weight_w {
            cfg.w = v;
        }
        if let Some(v) = self.lm_iterations {
            cfg.fit.max_iterations = v;
        }
        if let Some(v) = self.lm_restarts {
            cfg.fit.restarts = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.time_limit_secs = self.time_limit;
        cfg.stop_nmse = self.stop_nmse;
        cfg.max_open = self.max_open;
        cfg.parallel = !self.sequential;
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Resolves a single-run specification.
    pub fn resolve(&self) -> Result<RunSpec, CliError> {
        let o = self.layered()?;
        let search = o.search_config()?;
        let source = match (&o.benchmark, &o.csv) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either --benchmark or --csv, not both".into())),
            (None, None) => return Err(CliError::Config("one of --benchmark or --csv is required".into())),
            (Some(id), None) => {
                if o.target.is_some() || o.train_fraction.is_some() {
                    return Err(CliError::Config(
                        "--target and --train-fraction apply to --csv only".into(),
                    ));
                }
                Source::Benchmark {
                    id: id.clone(),
                    seed: search.seed,
                }
            }
            (None, Some(path)) => {
                let target = o
                    .target
                    .clone()
                    .ok_or_else(|| CliError::Config("--csv needs --target".into()))?;
                let train_fraction = o.train_fraction.unwrap_or(0.8);
                if !(train_fraction > 0.0 && train_fraction < 1.0) {
                    return Err(CliError::Config(
                        "--train-fraction must lie strictly between 0 and 1".into(),
                    ));
                }
                Source::Csv {
                    path: path.clone(),
                    target,
                    train_fraction,
                    split_seed: mix64(search.seed ^ SPLIT_STREAM),
                }
            }
        };
        Ok(RunSpec {
            source,
            search,
            out: o.out.clone(),
            formats: default_formats(&o.out),
        })
    }
}

fn default_formats(out: &Option<PathBuf>) -> Vec<String> {
    match out {
        Some(_) => vec!["json".into(), "text".into(), "jsonl".into()],
        None => vec!["text".into()],
    }
}

pub(crate) fn read_config(path: &Path) -> Result<Options, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
}

/// Where the data comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    Benchmark {
        id: String,
        seed: u64,
    },
    Csv {
        path: PathBuf,
        target: String,
        train_fraction: f64,
        split_seed: u64,
    },
}

impl Source {
    pub fn load(&self) -> Result<Dataset, CliError> {
        let data = match self {
            Source::Benchmark { id, seed } => generate(id, *seed)?,
            Source::Csv {
                path,
                target,
                train_fraction,
                split_seed,
            } => load_csv(
                path,
                target,
                SplitSpec::Shuffle {
                    train_fraction: *train_fraction,
                    seed: *split_seed,
                },
            )?,
        };
        Ok(data)
    }

    pub fn label(&self) -> String {
        match self {
            Source::Benchmark { id, seed } => format!("benchmark {id} (seed {seed})"),
            Source::Csv { path, target, .. } => format!("csv {} (target {target})", path.display()),
        }
    }
}

/// Everything needed to reproduce a run, given the artifact version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub source: Source,
    pub search: SearchConfig,
    pub out: Option<PathBuf>,
    pub formats: Vec<String>,
}
