//! Helpers shared by the integration tests. The oracle here is written
//! from the grammar listing directly and shares no code with the engine.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use esr_core::data::{Dataset, Matrix, Provenance};
use esr_core::expr::{ExprTree, Phrase};
use esr_core::grammar::Grammar;

/// Oracle expression: functions by name, sums and products n-ary.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum T {
    C,
    V(usize),
    F(&'static str, Box<T>),
    Sum(Vec<T>),
    Prod(Vec<T>),
}

fn sum(a: T, b: T) -> T {
    T::Sum(vec![a, b])
}

fn prod(a: T, b: T) -> T {
    T::Prod(vec![a, b])
}

fn f(name: &'static str, a: T) -> T {
    T::F(name, Box::new(a))
}

/// Sentences derivable with exactly `r` variable occurrences.
pub struct Oracle {
    pub n_vars: usize,
}

impl Oracle {
    /// Ways to split `r` into `k` positive parts.
    fn splits(r: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return if r >= 1 { vec![vec![r]] } else { vec![] };
        }
        let mut out = Vec::new();
        for first in 1..r {
            for mut rest in Self::splits(r - first, k - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    fn pairs(&self, r: usize, a: impl Fn(usize) -> Vec<T>, b: impl Fn(usize) -> Vec<T>) -> Vec<T> {
        let mut out = Vec::new();
        for s in Self::splits(r, 2) {
            for x in a(s[0]) {
                for y in b(s[1]) {
                    out.push(prod(x.clone(), y));
                }
            }
        }
        out
    }

    fn triples(&self, r: usize) -> Vec<T> {
        let mut out = Vec::new();
        for s in Self::splits(r, 3) {
            for x in self.inv(s[0]) {
                for y in self.sqrt(s[1]) {
                    for z in self.cbrt(s[2]) {
                        out.push(prod(prod(x.clone(), y.clone()), z));
                    }
                }
            }
        }
        out
    }

    pub fn expr(&self, r: usize) -> Vec<T> {
        let mut out = Vec::new();
        for s in Self::splits(r, 2) {
            for t in self.term(s[0]) {
                for e in self.expr(s[1]) {
                    out.push(sum(prod(T::C, t.clone()), e));
                }
            }
        }
        for t in self.term(r) {
            out.push(sum(prod(T::C, t), T::C));
        }
        out
    }

    fn term(&self, r: usize) -> Vec<T> {
        let mut out = self.pairs(r, |a| self.recurring(a), |b| self.term(b));
        out.extend(self.recurring(r));
        out.extend(self.one_time(r));
        out
    }

    fn recurring(&self, r: usize) -> Vec<T> {
        let mut out = Vec::new();
        if r == 1 {
            out.extend((0..self.n_vars).map(T::V));
        }
        out.extend(self.simple_expr(r).into_iter().map(|a| f("log", a)));
        out.extend(self.simple_term(r).into_iter().map(|a| f("exp", prod(T::C, a))));
        out.extend(self.simple_expr(r).into_iter().map(|a| f("sin", a)));
        out
    }

    fn one_time(&self, r: usize) -> Vec<T> {
        let mut out = self.triples(r);
        out.extend(self.pairs(r, |a| self.inv(a), |b| self.sqrt(b)));
        out.extend(self.pairs(r, |a| self.inv(a), |b| self.cbrt(b)));
        out.extend(self.pairs(r, |a| self.sqrt(a), |b| self.cbrt(b)));
        out.extend(self.inv(r));
        out.extend(self.sqrt(r));
        out.extend(self.cbrt(r));
        out
    }

    fn inv(&self, r: usize) -> Vec<T> {
        self.inv_expr(r).into_iter().map(|a| f("inv", a)).collect()
    }

    fn sqrt(&self, r: usize) -> Vec<T> {
        self.simple_expr(r).into_iter().map(|a| f("sqrt", a)).collect()
    }

    fn cbrt(&self, r: usize) -> Vec<T> {
        self.simple_expr(r).into_iter().map(|a| f("cbrt", a)).collect()
    }

    fn simple_expr(&self, r: usize) -> Vec<T> {
        let mut out = Vec::new();
        for s in Self::splits(r, 2) {
            for t in self.simple_term(s[0]) {
                for e in self.simple_expr(s[1]) {
                    out.push(sum(prod(T::C, t.clone()), e));
                }
            }
        }
        for t in self.simple_term(r) {
            out.push(sum(prod(T::C, t), T::C));
        }
        out
    }

    fn simple_term(&self, r: usize) -> Vec<T> {
        if r == 1 {
            return (0..self.n_vars).map(T::V).collect();
        }
        let mut out = Vec::new();
        for v in 0..self.n_vars {
            for t in self.simple_term(r - 1) {
                out.push(prod(T::V(v), t));
            }
        }
        out
    }

    fn inv_expr(&self, r: usize) -> Vec<T> {
        let mut out = Vec::new();
        for s in Self::splits(r, 2) {
            for t in self.inv_term(s[0]) {
                for e in self.inv_expr(s[1]) {
                    out.push(sum(prod(T::C, t.clone()), e));
                }
            }
        }
        for t in self.inv_term(r) {
            out.push(sum(prod(T::C, t), T::C));
        }
        out
    }

    fn inv_term(&self, r: usize) -> Vec<T> {
        let mut out = self.pairs(r, |a| self.recurring(a), |b| self.inv_term(b));
        for s in Self::splits(r, 3) {
            for x in self.recurring(s[0]) {
                for y in self.sqrt(s[1]) {
                    for z in self.cbrt(s[2]) {
                        out.push(prod(prod(x.clone(), y.clone()), z));
                    }
                }
            }
        }
        out.extend(self.pairs(r, |a| self.recurring(a), |b| self.sqrt(b)));
        out.extend(self.pairs(r, |a| self.recurring(a), |b| self.cbrt(b)));
        out.extend(self.pairs(r, |a| self.sqrt(a), |b| self.cbrt(b)));
        out.extend(self.recurring(r));
        out.extend(self.sqrt(r));
        out.extend(self.cbrt(r));
        out
    }

    /// Every derivation with at most `max_refs` variables, duplicates kept.
    pub fn all(&self, max_refs: usize) -> Vec<T> {
        (1..=max_refs).flat_map(|r| self.expr(r)).collect()
    }

    pub fn distinct_canonical(&self, max_refs: usize) -> BTreeSet<T> {
        self.all(max_refs).iter().map(canon).collect()
    }
}

fn has_c(t: &T) -> bool {
    match t {
        T::C => true,
        T::V(_) => false,
        T::F(_, a) => has_c(a),
        T::Sum(v) | T::Prod(v) => v.iter().any(has_c),
    }
}

/// `c` alone or `c` times coefficient-free factors.
fn free_multiple(t: &T) -> bool {
    match t {
        T::C => true,
        T::Prod(v) => {
            v.iter().filter(|x| **x == T::C).count() == 1 && v.iter().filter(|x| **x != T::C).all(|x| !has_c(x))
        }
        _ => false,
    }
}

/// Oracle canonical form: flatten, drop duplicates a coefficient absorbs
/// (`c*g + c*g`, `c*c`, `exp(c*g)*exp(c*g)`), sort.
pub fn canon(t: &T) -> T {
    match t {
        T::C | T::V(_) => t.clone(),
        T::F(name, a) => T::F(name, Box::new(canon(a))),
        T::Sum(v) | T::Prod(v) => {
            let is_sum = matches!(t, T::Sum(_));
            let mut flat = Vec::new();
            for child in v.iter().map(canon) {
                match (is_sum, child) {
                    (true, T::Sum(inner)) | (false, T::Prod(inner)) => flat.extend(inner),
                    (_, other) => flat.push(other),
                }
            }
            flat.sort();
            let mut kept: Vec<T> = Vec::new();
            for child in flat {
                let absorbed = if is_sum {
                    free_multiple(&child)
                } else {
                    child == T::C || matches!(&child, T::F("exp", a) if free_multiple(a))
                };
                if absorbed && kept.last() == Some(&child) {
                    continue;
                }
                kept.push(child);
            }
            if kept.len() == 1 {
                return kept.pop().unwrap();
            }
            if is_sum {
                T::Sum(kept)
            } else {
                T::Prod(kept)
            }
        }
    }
}

/// Derives a random sentence with at most `max_refs` variable references.
pub fn random_sentence(g: &Grammar, max_refs: usize, rng: &mut ChaCha8Rng) -> Phrase {
    'retry: loop {
        let mut p = Phrase::start();
        while !p.is_sentence() {
            let kids: Vec<Phrase> = g
                .expansions(&p)
                .unwrap()
                .into_iter()
                .filter(|k| k.variable_refs() <= max_refs)
                .collect();
            if kids.is_empty() {
                continue 'retry;
            }
            p = kids[rng.gen_range(0..kids.len())].clone();
        }
        return p;
    }
}

/// Copy of `t` with the children of every `+` and `*` randomly permuted.
pub fn shuffle(t: &ExprTree, rng: &mut ChaCha8Rng) -> ExprTree {
    use rand::seq::SliceRandom;
    let mut children: Vec<ExprTree> = t.children.iter().map(|c| shuffle(c, rng)).collect();
    if matches!(t.op(), Some(op) if op.is_commutative()) {
        children.shuffle(rng);
    }
    ExprTree {
        symbol: t.symbol,
        children,
    }
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Smooth 1- or 2-feature data on a positive domain.
pub fn smooth_data(n_features: usize, rows: usize) -> Dataset {
    let cols: Vec<Vec<f64>> = (0..n_features)
        .map(|j| {
            (0..rows)
                .map(|i| 0.5 + ((i * (j + 3) * 7919) % rows) as f64 / rows as f64)
                .collect()
        })
        .collect();
    let y = (0..rows)
        .map(|i| {
            let x = cols[0][i];
            let z = cols.get(1).map_or(0.0, |c| c[i]);
            (1.3 * x).sin() + 0.4 * x * z + 0.2
        })
        .collect();
    Dataset::new(
        names(n_features),
        Matrix::from_columns(cols),
        y,
        Matrix::from_columns(vec![]),
        vec![],
        Provenance::Inline,
    )
    .unwrap()
}
