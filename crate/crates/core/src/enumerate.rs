//! Exhaustive enumeration of the search space without hashing, for
//! statistics and for checking the search against brute force.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::canon::{canonicalize, CanonicalTree, HashValue};
use crate::expr::{NonTerminal, Phrase, Symbol};
use crate::grammar::{expansions, Grammar, GrammarError};

/// Default refusal threshold for [`space_stats`].
pub const DEFAULT_GUARD: u128 = 5_000_000;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("need at least one feature")]
    NoFeatures,
    #[error("max_variable_refs must be at least 1")]
    NoRefs,
    #[error("space has {count} sentence derivations, above the limit of {guard}")]
    TooLarge { count: u128, guard: u128 },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceStats {
    pub max_variable_refs: usize,
    pub n_features: usize,
    /// Leaves of the derivation tree (every path that ends in a sentence).
    pub total_derivations: u64,
    /// Unfinished phrases visited on the way.
    pub unfinished_phrases: u64,
    /// Distinct symbol sequences.
    pub distinct_sentences: u64,
    /// Distinct canonical trees (structural equality).
    pub distinct_canonical: u64,
    /// Distinct canonical hash values.
    pub distinct_hashes: u64,
    /// `total_derivations / distinct_canonical`.
    pub duplicate_ratio: f64,
}

/// Number of leftmost derivations from the start symbol that end in a
/// sentence with at most `max_refs` variable references, by dynamic
/// programming over exact variable counts.
pub fn count_derivations(g: &Grammar, max_refs: usize) -> u128 {
    let mut memo: HashMap<(NonTerminal, usize), u128> = HashMap::new();
    (1..=max_refs)
        .map(|r| exact(g, g.start(), r, &mut memo))
        .fold(0u128, u128::saturating_add)
}

/// Derivation trees from `nt` whose yield has exactly `r` variables. Every
/// nonterminal yields at least one variable, which bounds the recursion.
fn exact(g: &Grammar, nt: NonTerminal, r: usize, memo: &mut HashMap<(NonTerminal, usize), u128>) -> u128 {
    if let Some(&v) = memo.get(&(nt, r)) {
        return v;
    }
    let mut total = 0u128;
    for prod in g.productions(nt) {
        let vars = prod.rhs.iter().filter(|s| matches!(s, Symbol::Var(_))).count();
        let nts: Vec<NonTerminal> = prod
            .rhs
            .iter()
            .filter_map(|s| match s {
                Symbol::Nt(n) => Some(*n),
                _ => None,
            })
            .collect();
        if vars + nts.len() > r {
            continue;
        }
        // ways[k]: ways for the nonterminals processed so far to yield k vars
        let budget = r - vars;
        let mut ways = vec![0u128; budget + 1];
        ways[0] = 1;
        for &child in &nts {
            let mut next = vec![0u128; budget + 1];
            for (have, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for add in 1..=budget - have {
                    let c = exact(g, child, add, memo);
                    next[have + add] = next[have + add].saturating_add(w.saturating_mul(c));
                }
            }
            ways = next;
        }
        total = total.saturating_add(ways[budget]);
    }
    memo.insert((nt, r), total);
    total
}

/// Visits every sentence reachable by leftmost derivation within the
/// variable-reference limit, once per derivation, in depth-first order.
pub fn for_each_sentence(g: &Grammar, max_refs: usize, mut visit: impl FnMut(&Phrase)) -> u64 {
    let mut unfinished = 0;
    let mut stack = vec![Phrase::start()];
    while let Some(p) = stack.pop() {
        unfinished += 1;
        let children = expansions(g, &p).expect("stack holds unfinished phrases");
        for child in children.into_iter().rev() {
            if child.variable_refs() > max_refs {
                continue;
            }
            if child.is_sentence() {
                visit(&child);
            } else {
                stack.push(child);
            }
        }
    }
    unfinished
}

/// Feature names used for synthetic spaces: `x0`, `x1`, ...
pub fn default_feature_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn space_stats(max_refs: usize, n_features: usize, guard: u128) -> Result<SpaceStats, SpaceError> {
    if n_features == 0 {
        return Err(SpaceError::NoFeatures);
    }
    if max_refs == 0 {
        return Err(SpaceError::NoRefs);
    }
    let g = Grammar::new(&default_feature_names(n_features))?;
    let count = count_derivations(&g, max_refs);
    if count > guard {
        return Err(SpaceError::TooLarge { count, guard });
    }
    let mut total = 0u64;
    let mut sentences: HashSet<Vec<Symbol>> = HashSet::new();
    let mut canon: HashSet<CanonicalTree> = HashSet::new();
    let mut hashes: HashSet<HashValue> = HashSet::new();
    let unfinished = for_each_sentence(&g, max_refs, |s| {
        total += 1;
        if sentences.insert(s.symbols().to_vec()) {
            let c = canonicalize(&s.to_tree());
            hashes.insert(c.hash());
            canon.insert(c);
        }
    });
    let distinct_canonical = canon.len() as u64;
    Ok(SpaceStats {
        max_variable_refs: max_refs,
        n_features,
        total_derivations: total,
        unfinished_phrases: unfinished,
        distinct_sentences: sentences.len() as u64,
        distinct_canonical,
        distinct_hashes: hashes.len() as u64,
        duplicate_ratio: total as f64 / distinct_canonical.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_count_matches_enumeration() {
        for (refs, n) in [(1, 1), (2, 1), (3, 1), (2, 2), (4, 1)] {
            let g = Grammar::new(&default_feature_names(n)).unwrap();
            let mut seen = 0u128;
            for_each_sentence(&g, refs, |_| seen += 1);
            assert_eq!(count_derivations(&g, refs), seen, "refs={refs} n={n}");
        }
    }

    #[test]
    fn stats_shape() {
        let s = space_stats(1, 1, DEFAULT_GUARD).unwrap();
        assert!(s.distinct_canonical <= s.distinct_sentences);
        assert!(s.distinct_sentences <= s.total_derivations);
        assert_eq!(s.distinct_hashes, s.distinct_canonical);
        let s2 = space_stats(2, 1, DEFAULT_GUARD).unwrap();
        assert!(s2.duplicate_ratio > 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(space_stats(1, 0, DEFAULT_GUARD), Err(SpaceError::NoFeatures)));
        assert!(matches!(space_stats(6, 2, 10), Err(SpaceError::TooLarge { .. })));
    }
}
