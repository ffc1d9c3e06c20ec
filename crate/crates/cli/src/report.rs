//! Run and suite reports: JSON structures and fixed-width text tables.

use std::fmt::Write;

use serde::Serialize;

use esr_core::data::{Dataset, Provenance};
use esr_core::search::{SearchConfig, SearchReport};
use esr_core::{PARALLEL_BUILD, VERSION};

use crate::{CliError, RunSpec};

/// Train NMSE below which an instance counts as solved.
pub const SOLVED_NMSE: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct DatasetInfo {
    pub provenance: Provenance,
    pub features: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub version: String,
    pub parallel_build: bool,
    pub spec: RunSpec,
    pub dataset: DatasetInfo,
    pub solved: bool,
    pub result: SearchReport,
}

impl RunReport {
    pub fn new(spec: RunSpec, data: &Dataset, result: SearchReport) -> RunReport {
        RunReport {
            version: VERSION.to_string(),
            parallel_build: PARALLEL_BUILD,
            spec,
            dataset: DatasetInfo {
                provenance: data.provenance().clone(),
                features: data.feature_names().to_vec(),
                train_rows: data.train_targets().len(),
                test_rows: data.test_targets().len(),
            },
            solved: result.best.train_nmse < SOLVED_NMSE,
            result,
        }
    }
}

fn sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        format!("{v}")
    }
}

fn opt_sci(v: Option<f64>) -> String {
    v.map_or("-".to_string(), sci)
}

pub fn render_run(r: &RunReport) -> String {
    let s = &r.result;
    let c = &r.spec.search;
    let mut out = String::new();
    let _ = writeln!(out, "esr {}  {}", r.version, r.spec.source.label());
    let _ = writeln!(
        out,
        "config      refs {}  budget {}  w {}  lm {}x{}  seed {}",
        c.max_variable_refs, c.max_evaluated_sentences, c.w, c.fit.restarts, c.fit.max_iterations, c.seed
    );
    let _ = writeln!(
        out,
        "data        {} features, {} train rows, {} test rows",
        r.dataset.features.len(),
        r.dataset.train_rows,
        r.dataset.test_rows
    );
    let _ = writeln!(out, "best        {}", s.expression);
    let _ = writeln!(out, "fitted      {}", s.expression_with_values);
    let _ = writeln!(out, "train NMSE  {}", sci(s.best.train_nmse));
    let _ = writeln!(out, "test NMSE   {}", opt_sci(s.best.test_nmse));
    let _ = writeln!(out, "solved      {}", if r.solved { "yes" } else { "no" });
    let _ = writeln!(
        out,
        "search      {:?}: {} sentences fitted, {} duplicates rejected, {} phrases expanded, {} ms",
        s.termination, s.evaluated_sentences, s.rejected_duplicates, s.expanded_phrases, s.elapsed_ms
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>9} {:>10} {:>11} {:>11}  expression",
        "counter", "ms", "train", "test"
    );
    for i in &s.improvements {
        let _ = writeln!(
            out,
            "{:>9} {:>10} {:>11} {:>11}  {}",
            i.counter,
            i.elapsed_ms,
            sci(i.train_nmse),
            opt_sci(i.test_nmse),
            i.expression
        );
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteRow {
    pub id: String,
    pub train_nmse: Option<f64>,
    pub test_nmse: Option<f64>,
    pub solved: bool,
    pub evaluated_sentences: usize,
    pub termination: Option<String>,
    pub expression: Option<String>,
    pub elapsed_ms: u64,
    pub error: Option<String>,
}

impl SuiteRow {
    pub fn from_run(id: &str, r: &RunReport) -> SuiteRow {
        SuiteRow {
            id: id.to_string(),
            train_nmse: Some(r.result.best.train_nmse),
            test_nmse: r.result.best.test_nmse,
            solved: r.solved,
            evaluated_sentences: r.result.evaluated_sentences,
            termination: Some(format!("{:?}", r.result.termination).to_lowercase()),
            expression: Some(r.result.expression.clone()),
            elapsed_ms: r.result.elapsed_ms,
            error: None,
        }
    }

    pub fn failed(id: &str, e: &CliError) -> SuiteRow {
        SuiteRow {
            id: id.to_string(),
            train_nmse: None,
            test_nmse: None,
            solved: false,
            evaluated_sentences: 0,
            termination: None,
            expression: None,
            elapsed_ms: 0,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub version: String,
    pub parallel_build: bool,
    pub search: SearchConfig,
    pub solved_threshold: f64,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn new(search: SearchConfig, rows: Vec<SuiteRow>) -> SuiteReport {
        SuiteReport {
            version: VERSION.to_string(),
            parallel_build: PARALLEL_BUILD,
            search,
            solved_threshold: SOLVED_NMSE,
            rows,
        }
    }
}

pub fn render_suite(r: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "esr {}  suite of {}  refs {}  budget {}  seed {}",
        r.version,
        r.rows.len(),
        r.search.max_variable_refs,
        r.search.max_evaluated_sentences,
        r.search.seed
    );
    let _ = writeln!(
        out,
        "{:<18} {:>11} {:>11} {:>6} {:>9} {:>10}  expression",
        "instance", "train", "test", "solved", "fitted", "stop"
    );
    for row in &r.rows {
        if let Some(e) = &row.error {
            let _ = writeln!(out, "{:<18} error: {e}", row.id);
            continue;
        }
        let _ = writeln!(
            out,
            "{:<18} {:>11} {:>11} {:>6} {:>9} {:>10}  {}",
            row.id,
            opt_sci(row.train_nmse),
            opt_sci(row.test_nmse),
            if row.solved { "yes" } else { "no" },
            row.evaluated_sentences,
            row.termination.as_deref().unwrap_or("-"),
            row.expression.as_deref().unwrap_or("")
        );
    }
    out
}
