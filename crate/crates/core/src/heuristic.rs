//! Priorities for open phrases: a pessimistic quality estimate minus a
//! relative length bonus.

use serde::{Deserialize, Serialize};

use crate::canon::{hash_phrase, mix64, HashValue};
use crate::data::Dataset;
use crate::expr::{NonTerminal, Phrase, Symbol};
use crate::fit::{fit, FitConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorityParams {
    pub w: f64,
    pub length_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateSource {
    EvaluatedHere,
    InheritedFromParent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityEstimate {
    pub nmse_estimate: f64,
    pub source: EstimateSource,
}

impl QualityEstimate {
    /// Estimate given to phrases whose trailing-Expr fit failed.
    pub const WORST: f64 = f64::INFINITY;

    pub fn evaluated(nmse: f64) -> QualityEstimate {
        QualityEstimate {
            nmse_estimate: if nmse.is_nan() { Self::WORST } else { nmse },
            source: EstimateSource::EvaluatedHere,
        }
    }

    pub fn inherited(parent: QualityEstimate) -> QualityEstimate {
        QualityEstimate {
            nmse_estimate: parent.nmse_estimate,
            source: EstimateSource::InheritedFromParent,
        }
    }
}

/// Seed for fitting one sentence: the run seed mixed with the sentence's
/// semantic hash, so it does not depend on when the sentence is reached.
pub fn sentence_seed(global_seed: u64, sentence: &Phrase) -> u64 {
    seed_for_hash(global_seed, hash_phrase(sentence))
}

pub fn seed_for_hash(global_seed: u64, h: HashValue) -> u64 {
    mix64(global_seed ^ mix64(h.0))
}

/// If the only nonterminal of `p` is a trailing `Expr`, the sentence with
/// that `Expr` replaced by a coefficient slot.
pub fn trailing_expr_sentence(p: &Phrase) -> Option<Phrase> {
    let symbols = p.symbols();
    if p.nonterminal_count() != 1 || symbols.last() != Some(&Symbol::Nt(NonTerminal::Expr)) {
        return None;
    }
    let mut s = symbols.to_vec();
    *s.last_mut().expect("nonempty") = Symbol::Coeff;
    Phrase::from_symbols(s).ok()
}

/// Pessimistic quality of the sentences derivable from `p`.
pub fn estimate_quality(
    p: &Phrase,
    data: &Dataset,
    parent_estimate: QualityEstimate,
    cfg: &FitConfig,
    global_seed: u64,
) -> QualityEstimate {
    match trailing_expr_sentence(p) {
        Some(s) => match fit(&s, data, cfg, sentence_seed(global_seed, &s)) {
            Ok(m) => QualityEstimate::evaluated(m.train_nmse),
            Err(_) => QualityEstimate::evaluated(QualityEstimate::WORST),
        },
        None => QualityEstimate::inherited(parent_estimate),
    }
}

/// Lower values are expanded first.
pub fn priority(p: &Phrase, q: QualityEstimate, params: &PriorityParams) -> f64 {
    q.nmse_estimate - params.w * p.len() as f64 / params.length_max.max(1) as f64
}
