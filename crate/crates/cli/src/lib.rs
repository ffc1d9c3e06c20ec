//! Command-line front end for the esr engine.

mod options;
mod report;

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use esr_core::canon::canonicalize;
use esr_core::data::{catalog, DataError};
use esr_core::enumerate::{space_stats, SpaceError, DEFAULT_GUARD};
use esr_core::expr::Phrase;
use esr_core::grammar::Grammar;
use esr_core::search::{run, SearchError};

pub use options::{Options, RunSpec, Source};
pub use report::{render_run, render_suite, RunReport, SuiteReport, SuiteRow, SOLVED_NMSE};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(#[from] DataError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Data(_) => EXIT_DATA,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Config(m) => CliError::Config(m),
            SearchError::Grammar(g) => CliError::Config(g.to_string()),
            SearchError::Fit(f) => CliError::Runtime(f.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "esr",
    version,
    about = "Deterministic symbolic regression by grammar enumeration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search one dataset.
    Run(Options),
    /// Search several catalog benchmarks and tabulate the results.
    Suite(SuiteArgs),
    /// Enumerate a small search space and count duplicates.
    SpaceStats(SpaceArgs),
    /// List the benchmark catalog.
    Catalog,
    /// Print the grammar for a feature list.
    Grammar(GrammarArgs),
    /// Print the canonical form and hash of a sentence.
    Hash(HashArgs),
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Comma-separated benchmark ids.
    #[arg(long, value_delimiter = ',')]
    pub benchmarks: Vec<String>,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long)]
    pub max_var_refs: usize,
    /// Number of features.
    #[arg(long, default_value_t = 1)]
    pub features: usize,
    /// Refuse spaces with more derivations than this.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: u128,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GrammarArgs {
    /// Comma-separated feature names.
    #[arg(long, value_delimiter = ',', default_value = "x")]
    pub features: Vec<String>,
    #[arg(long, default_value_t = 20)]
    pub max_var_refs: usize,
}

#[derive(Debug, Args)]
pub struct HashArgs {
    /// Sentence in infix form with coefficients written `c0`, `c1`, ...
    pub expression: String,
    #[arg(long, value_delimiter = ',', default_value = "x")]
    pub features: Vec<String>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a command and returns what it prints.
pub fn execute(command: Command) -> Result<String, CliError> {
    match command {
        Command::Run(o) => cmd_run(&o.resolve()?).map(|r| render_run(&r)),
        Command::Suite(s) => cmd_suite(&s).map(|r| render_suite(&r)),
        Command::SpaceStats(a) => cmd_space_stats(&a),
        Command::Catalog => Ok(cmd_catalog()),
        Command::Grammar(a) => cmd_grammar(&a),
        Command::Hash(a) => cmd_hash(&a),
    }
}

pub fn cmd_run(spec: &RunSpec) -> Result<RunReport, CliError> {
    let data = spec.source.load()?;
    let result = run(&data, spec.search.clone())?;
    let report = RunReport::new(spec.clone(), &data, result);
    if let Some(dir) = &spec.out {
        write_run(dir, &report)?;
    }
    Ok(report)
}

fn write_run(dir: &Path, report: &RunReport) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::Runtime(e.to_string()))?;
    write(&dir.join("report.json"), &(json + "\n"))?;
    write(&dir.join("report.txt"), &render_run(report))?;
    let mut lines = String::new();
    for imp in &report.result.improvements {
        lines += &serde_json::to_string(imp).map_err(|e| CliError::Runtime(e.to_string()))?;
        lines.push('\n');
    }
    write(&dir.join("improvements.jsonl"), &lines)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("cannot write {}: {e}", path.display()))
}

pub fn cmd_suite(args: &SuiteArgs) -> Result<SuiteReport, CliError> {
    let o = args.options.layered()?;
    if o.benchmark.is_some() || o.csv.is_some() {
        return Err(CliError::Config(
            "suite takes --benchmarks, not --benchmark or --csv".into(),
        ));
    }
    let search = o.search_config()?;
    let mut rows = Vec::with_capacity(args.benchmarks.len());
    for id in &args.benchmarks {
        let spec = RunSpec {
            source: Source::Benchmark {
                id: id.clone(),
                seed: search.seed,
            },
            search: search.clone(),
            out: None,
            formats: vec![],
        };
        let row = match spec.source.load().and_then(|data| {
            let result = run(&data, search.clone())?;
            Ok(RunReport::new(spec, &data, result))
        }) {
            Ok(r) => SuiteRow::from_run(id, &r),
            Err(e) => SuiteRow::failed(id, &e),
        };
        rows.push(row);
    }
    let report = SuiteReport::new(search, rows);
    if let Some(dir) = &o.out {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
        write(&dir.join("suite.json"), &(json + "\n"))?;
        write(&dir.join("suite.txt"), &render_suite(&report))?;
    }
    Ok(report)
}

fn space_error(e: SpaceError) -> CliError {
    match e {
        SpaceError::NoFeatures | SpaceError::NoRefs | SpaceError::TooLarge { .. } => CliError::Config(e.to_string()),
        SpaceError::Grammar(g) => CliError::Config(g.to_string()),
    }
}

pub fn cmd_space_stats(a: &SpaceArgs) -> Result<String, CliError> {
    let s = space_stats(a.max_var_refs, a.features, a.guard).map_err(space_error)?;
    if a.json {
        let json = serde_json::to_string_pretty(&s).map_err(|e| CliError::Runtime(e.to_string()))?;
        return Ok(json + "\n");
    }
    let rows = [
        ("max variable refs", s.max_variable_refs.to_string()),
        ("features", s.n_features.to_string()),
        ("total derivations", s.total_derivations.to_string()),
        ("unfinished phrases", s.unfinished_phrases.to_string()),
        ("distinct sentences", s.distinct_sentences.to_string()),
        ("distinct canonical", s.distinct_canonical.to_string()),
        ("distinct hashes", s.distinct_hashes.to_string()),
        ("duplicate ratio", format!("{:.4}", s.duplicate_ratio)),
    ];
    Ok(rows.iter().map(|(k, v)| format!("{k:<20}{v:>12}\n")).collect())
}

pub fn cmd_catalog() -> String {
    let c = catalog();
    let mut out = format!("catalog version {}\n", c.version);
    out += &format!(
        "{:<18} {:<5} {:>6} {:>6}  {}\n",
        "id", "space", "train", "test", "formula"
    );
    for b in &c.benchmarks {
        let rows = |d: &esr_core::data::Design| d.rows.map_or("grid".to_string(), |r| r.to_string());
        out += &format!(
            "{:<18} {:<5} {:>6} {:>6}  {}\n",
            b.id,
            if b.in_search_space { "yes" } else { "no" },
            rows(&b.train),
            rows(&b.test),
            b.formula
        );
    }
    out
}

pub fn cmd_grammar(a: &GrammarArgs) -> Result<String, CliError> {
    let g = Grammar::new(&a.features).map_err(|e| CliError::Config(e.to_string()))?;
    if a.max_var_refs == 0 {
        return Err(CliError::Config("--max-var-refs must be at least 1".into()));
    }
    let mut out = String::new();
    for p in g.all_productions() {
        let rhs = Phrase::from_symbols(p.rhs.clone())
            .map(|ph| ph.render(&a.features))
            .unwrap_or_else(|_| format!("{:?}", p.rhs));
        out += &format!("{:<16} -> {rhs}\n", format!("<{}>", p.lhs.name()));
    }
    out += &format!(
        "estimated max length at {} variable refs: {}\n",
        a.max_var_refs,
        g.estimate_max_length(a.max_var_refs)
    );
    Ok(out)
}

pub fn cmd_hash(a: &HashArgs) -> Result<String, CliError> {
    let p = Phrase::parse(&a.expression, &a.features).map_err(|e| CliError::Config(e.to_string()))?;
    if !p.is_sentence() {
        return Err(CliError::Config("expression still has nonterminals".into()));
    }
    let c = canonicalize(&p.to_tree());
    Ok(format!(
        "input      {}\ncanonical  {}\nhash       {}\n",
        p.render(&a.features),
        c.render(&a.features),
        c.hash()
    ))
}
