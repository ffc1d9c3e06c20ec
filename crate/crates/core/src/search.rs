//! Best-first enumeration of semantically unique sentences.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{hash_phrase, HashValue};
use crate::data::Dataset;
use crate::expr::Phrase;
use crate::fit::{fit, FitConfig, FitError, FittedModel};
use crate::grammar::{Grammar, GrammarError};
use crate::heuristic::{priority, seed_for_hash, trailing_expr_sentence, PriorityParams, QualityEstimate};
use crate::par;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// How open phrases are scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityMode {
    /// Trailing-Expr phrases are fitted, others inherit from their parent.
    #[default]
    Fitted,
    /// Every phrase gets the same estimate; ordering is by length only.
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub max_variable_refs: usize,
    /// Budget of fitted sentences.
    pub max_evaluated_sentences: usize,
    /// Length weight of the priority.
    pub w: f64,
    pub fit: FitConfig,
    pub seed: u64,
    pub time_limit_secs: Option<f64>,
    /// Stop as soon as the best train NMSE drops below this value.
    pub stop_nmse: Option<f64>,
    /// Cap on the open store; the worst-priority entries are dropped.
    pub max_open: Option<usize>,
    /// Fan fits out to worker threads (needs the `parallel` feature).
    pub parallel: bool,
    pub quality: QualityMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_variable_refs: 20,
            max_evaluated_sentences: 200_000,
            w: 0.05,
            fit: FitConfig::default(),
            seed: 0,
            time_limit_secs: None,
            stop_nmse: None,
            max_open: None,
            parallel: true,
            quality: QualityMode::Fitted,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        if self.max_variable_refs < 1 {
            return bad("max_variable_refs must be at least 1");
        }
        if self.max_evaluated_sentences < 1 {
            return bad("max_evaluated_sentences must be at least 1");
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return bad("w must be a finite value >= 0");
        }
        if let Some(t) = self.time_limit_secs {
            if !(t > 0.0 && t.is_finite()) {
                return bad("time limit must be positive");
            }
        }
        if self.max_open == Some(0) {
            return bad("max_open must be at least 1");
        }
        self.fit.validate()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Every phrase within the variable-reference limit was expanded.
    Exhausted,
    Budget,
    TimeLimit,
    /// `stop_nmse` was reached.
    Target,
}

/// One new best model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    /// Evaluated-sentence count when the model was found (0 = constant model).
    pub counter: usize,
    pub elapsed_ms: u64,
    pub expression: String,
    pub coefficients: Vec<f64>,
    pub train_nmse: f64,
    pub test_nmse: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub best: FittedModel,
    pub expression: String,
    pub expression_with_values: String,
    pub termination: Termination,
    pub evaluated_sentences: usize,
    pub rejected_duplicates: usize,
    pub discarded_over_limit: usize,
    pub expanded_phrases: usize,
    pub estimate_fits: usize,
    pub fit_cache_hits: usize,
    pub dropped_open: usize,
    pub open_remaining: usize,
    pub length_max: usize,
    pub elapsed_ms: u64,
    pub improvements: Vec<Improvement>,
    /// Hash of every fitted sentence, in evaluation order.
    #[serde(skip)]
    pub evaluation_log: Vec<HashValue>,
}

/// Open-store key: lowest priority first, then insertion order.
#[derive(Clone, Copy, Debug)]
struct OpenKey {
    priority: f64,
    counter: u64,
}

impl PartialEq for OpenKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenKey {}

impl PartialOrd for OpenKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then(self.counter.cmp(&other.counter))
    }
}

struct Pending {
    phrase: Phrase,
    hash: HashValue,
    sentence: bool,
    /// Sentence to fit for this entry: the phrase itself, or its
    /// trailing-Expr stand-in.
    task: Option<(Phrase, HashValue)>,
}

/// Search state. Drive it with [`Search::step`] or [`Search::run`].
pub struct Search<'a> {
    data: &'a Dataset,
    grammar: Grammar,
    cfg: SearchConfig,
    params: PriorityParams,
    open: BTreeMap<OpenKey, (Phrase, QualityEstimate)>,
    seen: HashSet<HashValue>,
    fit_cache: HashMap<HashValue, FittedModel>,
    best: FittedModel,
    counter: u64,
    evaluated: usize,
    rejected: usize,
    discarded: usize,
    expanded: usize,
    estimate_fits: usize,
    cache_hits: usize,
    dropped: usize,
    improvements: Vec<Improvement>,
    evaluation_log: Vec<HashValue>,
    termination: Option<Termination>,
    started: Instant,
}

impl<'a> Search<'a> {
    pub fn new(data: &'a Dataset, cfg: SearchConfig) -> Result<Search<'a>, SearchError> {
        cfg.validate()?;
        let grammar = Grammar::new(data.feature_names())?;
        let length_max = grammar.estimate_max_length(cfg.max_variable_refs);
        let started = Instant::now();
        let mut best = FittedModel::constant(data);
        best.score_test(data)?;
        let names = data.feature_names();
        let improvements = vec![Improvement {
            counter: 0,
            elapsed_ms: 0,
            expression: best.sentence.render(names),
            coefficients: best.coefficients.clone(),
            train_nmse: best.train_nmse,
            test_nmse: best.test_nmse,
        }];
        let mut search = Search {
            data,
            grammar,
            params: PriorityParams { w: cfg.w, length_max },
            cfg,
            open: BTreeMap::new(),
            seen: HashSet::new(),
            fit_cache: HashMap::new(),
            best,
            counter: 0,
            evaluated: 0,
            rejected: 0,
            discarded: 0,
            expanded: 0,
            estimate_fits: 0,
            cache_hits: 0,
            dropped: 0,
            improvements,
            evaluation_log: Vec::new(),
            termination: None,
            started,
        };
        // The trailing-Expr stand-in of the start phrase is the constant
        // model, whose NMSE is 1 by definition.
        search.push_open(Phrase::start(), QualityEstimate::evaluated(1.0));
        Ok(search)
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn best(&self) -> &FittedModel {
        &self.best
    }

    pub fn evaluated(&self) -> usize {
        self.evaluated
    }

    pub fn rejected_duplicates(&self) -> usize {
        self.rejected
    }

    pub fn open_len(&self) -> usize {
        self.open.len()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    pub fn length_max(&self) -> usize {
        self.params.length_max
    }

    fn push_open(&mut self, phrase: Phrase, estimate: QualityEstimate) {
        let key = OpenKey {
            priority: priority(&phrase, estimate, &self.params),
            counter: self.counter,
        };
        self.counter += 1;
        self.open.insert(key, (phrase, estimate));
    }

    fn check_termination(&mut self) -> Option<Termination> {
        if self.termination.is_none() {
            if self.evaluated >= self.cfg.max_evaluated_sentences {
                self.termination = Some(Termination::Budget);
            } else if let Some(t) = self.cfg.time_limit_secs {
                if self.started.elapsed() >= Duration::from_secs_f64(t) {
                    self.termination = Some(Termination::TimeLimit);
                }
            }
            if self.termination.is_none() && self.open.is_empty() {
                self.termination = Some(Termination::Exhausted);
            }
        }
        self.termination
    }

    /// Pops the best open phrase and processes all of its expansions.
    /// Returns the expanded phrase, or `None` once the search has ended.
    pub fn step(&mut self) -> Option<Phrase> {
        if self.check_termination().is_some() {
            return None;
        }
        let (_, (phrase, parent_estimate)) = self.open.pop_first()?;
        self.expanded += 1;
        let children = self
            .grammar
            .expansions(&phrase)
            .expect("open phrases have a nonterminal");

        let mut pending = Vec::with_capacity(children.len());
        let mut sentences = 0;
        for child in children {
            if child.variable_refs() > self.cfg.max_variable_refs {
                self.discarded += 1;
                continue;
            }
            let sentence = child.is_sentence();
            if sentence && self.evaluated + sentences >= self.cfg.max_evaluated_sentences {
                break;
            }
            let hash = hash_phrase(&child);
            if !self.seen.insert(hash) {
                self.rejected += 1;
                continue;
            }
            let task = if sentence {
                sentences += 1;
                Some((child.clone(), hash))
            } else if self.cfg.quality == QualityMode::Fitted {
                trailing_expr_sentence(&child).map(|s| {
                    let h = hash_phrase(&s);
                    (s, h)
                })
            } else {
                None
            };
            pending.push(Pending {
                phrase: child,
                hash,
                sentence,
                task,
            });
        }

        let fits = self.run_fits(&pending);

        let names = self.data.feature_names();
        for (p, fitted) in pending.into_iter().zip(fits) {
            if p.sentence {
                let model = fitted.expect("sentences have a fit task");
                self.evaluated += 1;
                self.evaluation_log.push(p.hash);
                if model.train_nmse < self.best.train_nmse {
                    self.best = model;
                    // Test data is not used for selection, only for reporting.
                    let _ = self.best.score_test(self.data);
                    self.improvements.push(Improvement {
                        counter: self.evaluated,
                        elapsed_ms: self.started.elapsed().as_millis() as u64,
                        expression: self.best.sentence.render(names),
                        coefficients: self.best.coefficients.clone(),
                        train_nmse: self.best.train_nmse,
                        test_nmse: self.best.test_nmse,
                    });
                    if self.cfg.stop_nmse.is_some_and(|t| self.best.train_nmse < t) {
                        self.termination = Some(Termination::Target);
                    }
                }
            } else {
                let estimate = match (fitted, self.cfg.quality) {
                    (_, QualityMode::Constant) => QualityEstimate::inherited(QualityEstimate::evaluated(1.0)),
                    (Some(m), QualityMode::Fitted) => QualityEstimate::evaluated(m.train_nmse),
                    (None, QualityMode::Fitted) => QualityEstimate::inherited(parent_estimate),
                };
                self.push_open(p.phrase, estimate);
            }
        }

        if let Some(cap) = self.cfg.max_open {
            while self.open.len() > cap {
                self.open.pop_last();
                self.dropped += 1;
            }
        }
        Some(phrase)
    }

    fn cached(&self, s: &Phrase, h: HashValue) -> Option<&FittedModel> {
        self.fit_cache.get(&h).filter(|m| m.sentence == *s)
    }

    /// Resolves the fit of every task in the batch, from the cache or by
    /// fitting. Fits fan out to worker threads; results come back in batch
    /// order, so nothing depends on thread scheduling.
    fn run_fits(&mut self, pending: &[Pending]) -> Vec<Option<FittedModel>> {
        enum Slot {
            None,
            Cached(FittedModel),
            Todo(usize),
        }
        let mut todo: Vec<(Phrase, HashValue)> = Vec::new();
        let mut slots = Vec::with_capacity(pending.len());
        for p in pending {
            let Some((s, h)) = &p.task else {
                slots.push(Slot::None);
                continue;
            };
            if let Some(m) = self.cached(s, *h).cloned() {
                self.cache_hits += 1;
                slots.push(Slot::Cached(m));
            } else if let Some(i) = todo.iter().position(|(t, th)| th == h && t == s) {
                self.cache_hits += 1;
                slots.push(Slot::Todo(i));
            } else {
                if !p.sentence {
                    self.estimate_fits += 1;
                }
                slots.push(Slot::Todo(todo.len()));
                todo.push((s.clone(), *h));
            }
        }
        let data = self.data;
        let (fit_cfg, seed) = (&self.cfg.fit, self.cfg.seed);
        let results = par::map(&todo, self.cfg.parallel, |(s, h)| {
            fit(s, data, fit_cfg, seed_for_hash(seed, *h)).unwrap_or_else(|_| failed_model(s))
        });
        let resolved = slots
            .into_iter()
            .map(|slot| match slot {
                Slot::None => None,
                Slot::Cached(m) => Some(m),
                Slot::Todo(i) => Some(results[i].clone()),
            })
            .collect();
        for ((_, h), model) in todo.into_iter().zip(results) {
            self.fit_cache.insert(h, model);
        }
        resolved
    }

    /// Steps until the search ends.
    pub fn run(mut self) -> SearchReport {
        while self.step().is_some() {}
        self.report()
    }

    pub fn report(&self) -> SearchReport {
        let names = self.data.feature_names();
        SearchReport {
            expression: self.best.sentence.render(names),
            expression_with_values: self.best.render_with_values(names),
            best: self.best.clone(),
            termination: self.termination.unwrap_or(Termination::Exhausted),
            evaluated_sentences: self.evaluated,
            rejected_duplicates: self.rejected,
            discarded_over_limit: self.discarded,
            expanded_phrases: self.expanded,
            estimate_fits: self.estimate_fits,
            fit_cache_hits: self.cache_hits,
            dropped_open: self.dropped,
            open_remaining: self.open.len(),
            length_max: self.params.length_max,
            elapsed_ms: self.started.elapsed().as_millis() as u64,
            improvements: self.improvements.clone(),
            evaluation_log: self.evaluation_log.clone(),
        }
    }
}

fn failed_model(s: &Phrase) -> FittedModel {
    FittedModel {
        sentence: s.clone(),
        coefficients: vec![f64::NAN; s.coefficient_count()],
        train_nmse: f64::INFINITY,
        test_nmse: None,
        failed: true,
        iterations: 0,
        converged: false,
    }
}

/// Runs a complete search.
pub fn run(data: &Dataset, cfg: SearchConfig) -> Result<SearchReport, SearchError> {
    Ok(Search::new(data, cfg)?.run())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Matrix, Provenance};

    fn line_data() -> Dataset {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let y = xs.iter().map(|x| 3.0 * x + 2.0).collect();
        Dataset::new(
            vec!["x".into()],
            Matrix::from_columns(vec![xs]),
            y,
            Matrix::from_columns(vec![]),
            vec![],
            Provenance::Inline,
        )
        .unwrap()
    }

    fn small(refs: usize) -> SearchConfig {
        SearchConfig {
            max_variable_refs: refs,
            max_evaluated_sentences: 100_000,
            fit: FitConfig {
                restarts: 2,
                ..FitConfig::default()
            },
            ..SearchConfig::default()
        }
    }

    #[test]
    fn linear_target_is_found() {
        let report = run(&line_data(), small(2)).unwrap();
        assert_eq!(report.termination, Termination::Exhausted);
        assert!(report.best.train_nmse < 1e-20, "{}", report.best.train_nmse);
        assert_eq!(report.improvements[0].counter, 0);
        assert_eq!(report.improvements[0].train_nmse, 1.0);
        let nmses: Vec<f64> = report.improvements.iter().map(|i| i.train_nmse).collect();
        assert!(nmses.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn budget_counts_sentences() {
        let cfg = SearchConfig {
            max_evaluated_sentences: 5,
            ..small(3)
        };
        let report = run(&line_data(), cfg).unwrap();
        assert_eq!(report.termination, Termination::Budget);
        assert_eq!(report.evaluated_sentences, 5);
        assert_eq!(report.evaluation_log.len(), 5);
    }

    #[test]
    fn fitted_hashes_are_unique() {
        let report = run(&line_data(), small(3)).unwrap();
        let set: HashSet<_> = report.evaluation_log.iter().collect();
        assert_eq!(set.len(), report.evaluation_log.len());
        assert!(report.rejected_duplicates > 0);
    }

    #[test]
    fn open_cap_drops_entries() {
        let cfg = SearchConfig {
            max_open: Some(3),
            ..small(3)
        };
        let data = line_data();
        let mut s = Search::new(&data, cfg).unwrap();
        while s.step().is_some() {
            assert!(s.open_len() <= 3);
        }
        assert!(s.report().dropped_open > 0);
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        for bad in [
            SearchConfig {
                max_variable_refs: 0,
                ..SearchConfig::default()
            },
            SearchConfig {
                max_evaluated_sentences: 0,
                ..SearchConfig::default()
            },
            SearchConfig {
                w: -1.0,
                ..SearchConfig::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(SearchError::Config(_))));
        }
    }
}
