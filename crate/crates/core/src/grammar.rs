//! The restricted expression grammar and leftmost derivation.
//!
//! Productions are written in prefix form: `Expr -> + * c Term Expr` is the
//! infix rule `Expr -> c * Term + Expr`. Production order inside each
//! nonterminal follows the textual order of the original rule listing.

use std::collections::HashMap;

use thiserror::Error;

use crate::expr::{is_coefficient_name, is_function_name, NonTerminal, Op, Phrase, Symbol};

#[derive(Debug, Error, PartialEq)]
pub enum GrammarError {
    #[error("at least one feature name is required")]
    NoFeatures,
    #[error("too many features ({0}); at most 65535 are supported")]
    TooManyFeatures(usize),
    #[error("invalid feature name {0:?}: names must be identifiers that are not function names or coefficient names (c0, c1, ...)")]
    InvalidFeatureName(String),
    #[error("duplicate feature name {0:?}")]
    DuplicateFeatureName(String),
    #[error("phrase has no nonterminal to derive")]
    NothingToDerive,
    #[error("production for {expected:?} applied to leftmost nonterminal {found:?}")]
    LhsMismatch { expected: NonTerminal, found: NonTerminal },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Production {
    pub lhs: NonTerminal,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn nonterminal_count(&self) -> usize {
        self.rhs.iter().filter(|s| s.is_nonterminal()).count()
    }

    pub fn variable_refs(&self) -> usize {
        self.rhs.iter().filter(|s| s.is_variable_ref()).count()
    }

    /// Change in variable references when the lhs nonterminal is replaced.
    pub fn variable_ref_delta(&self) -> isize {
        self.variable_refs() as isize - 1
    }
}

#[derive(Clone, Debug)]
pub struct Grammar {
    productions: Vec<Vec<Production>>,
    feature_names: Vec<String>,
}

/// Builds the expression grammar for the given dataset features.
pub fn build_default_grammar(feature_names: &[String]) -> Result<Grammar, GrammarError> {
    Grammar::new(feature_names)
}

impl Grammar {
    pub fn new(feature_names: &[String]) -> Result<Grammar, GrammarError> {
        if feature_names.is_empty() {
            return Err(GrammarError::NoFeatures);
        }
        if feature_names.len() > u16::MAX as usize {
            return Err(GrammarError::TooManyFeatures(feature_names.len()));
        }
        for (i, name) in feature_names.iter().enumerate() {
            if !valid_feature_name(name) {
                return Err(GrammarError::InvalidFeatureName(name.clone()));
            }
            if feature_names[..i].contains(name) {
                return Err(GrammarError::DuplicateFeatureName(name.clone()));
            }
        }

        use NonTerminal as N;
        use Symbol::{Coeff as C, Nt};
        let add = Symbol::Op(Op::Add);
        let mul = Symbol::Op(Op::Mul);
        let f = Symbol::Op;

        let mut rules: Vec<(N, Vec<Symbol>)> = vec![
            (N::Expr, vec![add, mul, C, Nt(N::Term), Nt(N::Expr)]),
            (N::Expr, vec![add, mul, C, Nt(N::Term), C]),
            (N::Term, vec![mul, Nt(N::RecurringFactors), Nt(N::Term)]),
            (N::Term, vec![Nt(N::RecurringFactors)]),
            (N::Term, vec![Nt(N::OneTimeFactors)]),
            (N::RecurringFactors, vec![Nt(N::VarFactor)]),
            (N::RecurringFactors, vec![Nt(N::LogFactor)]),
            (N::RecurringFactors, vec![Nt(N::ExpFactor)]),
            (N::RecurringFactors, vec![Nt(N::SinFactor)]),
        ];
        for i in 0..feature_names.len() {
            rules.push((N::VarFactor, vec![Symbol::Var(i as u16)]));
        }
        rules.extend([
            (N::LogFactor, vec![f(Op::Log), Nt(N::SimpleExpr)]),
            (N::ExpFactor, vec![f(Op::Exp), mul, C, Nt(N::SimpleTerm)]),
            (N::SinFactor, vec![f(Op::Sin), Nt(N::SimpleExpr)]),
            (
                N::OneTimeFactors,
                vec![mul, Nt(N::InvFactor), mul, Nt(N::SqrtFactor), Nt(N::CbrtFactor)],
            ),
            (N::OneTimeFactors, vec![mul, Nt(N::InvFactor), Nt(N::SqrtFactor)]),
            (N::OneTimeFactors, vec![mul, Nt(N::InvFactor), Nt(N::CbrtFactor)]),
            (N::OneTimeFactors, vec![mul, Nt(N::SqrtFactor), Nt(N::CbrtFactor)]),
            (N::OneTimeFactors, vec![Nt(N::InvFactor)]),
            (N::OneTimeFactors, vec![Nt(N::SqrtFactor)]),
            (N::OneTimeFactors, vec![Nt(N::CbrtFactor)]),
            (N::InvFactor, vec![f(Op::Inv), Nt(N::InvExpr)]),
            (N::SqrtFactor, vec![f(Op::Sqrt), Nt(N::SimpleExpr)]),
            (N::CbrtFactor, vec![f(Op::Cbrt), Nt(N::SimpleExpr)]),
            (N::SimpleExpr, vec![add, mul, C, Nt(N::SimpleTerm), Nt(N::SimpleExpr)]),
            (N::SimpleExpr, vec![add, mul, C, Nt(N::SimpleTerm), C]),
            (N::SimpleTerm, vec![mul, Nt(N::VarFactor), Nt(N::SimpleTerm)]),
            (N::SimpleTerm, vec![Nt(N::VarFactor)]),
            (N::InvExpr, vec![add, mul, C, Nt(N::InvTerm), Nt(N::InvExpr)]),
            (N::InvExpr, vec![add, mul, C, Nt(N::InvTerm), C]),
            (N::InvTerm, vec![mul, Nt(N::RecurringFactors), Nt(N::InvTerm)]),
            (
                N::InvTerm,
                vec![mul, Nt(N::RecurringFactors), mul, Nt(N::SqrtFactor), Nt(N::CbrtFactor)],
            ),
            (N::InvTerm, vec![mul, Nt(N::RecurringFactors), Nt(N::SqrtFactor)]),
            (N::InvTerm, vec![mul, Nt(N::RecurringFactors), Nt(N::CbrtFactor)]),
            (N::InvTerm, vec![mul, Nt(N::SqrtFactor), Nt(N::CbrtFactor)]),
            (N::InvTerm, vec![Nt(N::RecurringFactors)]),
            (N::InvTerm, vec![Nt(N::SqrtFactor)]),
            (N::InvTerm, vec![Nt(N::CbrtFactor)]),
        ]);

        let mut productions = vec![Vec::new(); NonTerminal::ALL.len()];
        for (lhs, rhs) in rules {
            productions[lhs.index()].push(Production { lhs, rhs });
        }
        Ok(Grammar {
            productions,
            feature_names: feature_names.to_vec(),
        })
    }

    pub fn start(&self) -> NonTerminal {
        NonTerminal::Expr
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn productions(&self, nt: NonTerminal) -> &[Production] {
        &self.productions[nt.index()]
    }

    pub fn all_productions(&self) -> impl Iterator<Item = &Production> {
        self.productions.iter().flatten()
    }

    /// One derived phrase per production of the leftmost nonterminal of `p`,
    /// in declaration order.
    pub fn expansions(&self, p: &Phrase) -> Result<Vec<Phrase>, GrammarError> {
        expansions(self, p)
    }

    /// Greedy estimate of the longest phrase reachable within `max_var_refs`.
    pub fn estimate_max_length(&self, max_var_refs: usize) -> usize {
        estimate_max_length(self, max_var_refs)
    }
}

fn valid_feature_name(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_coefficient_name(name)
        && !is_function_name(name)
}

/// Position and kind of the first nonterminal in symbol order.
pub fn leftmost_nonterminal(p: &Phrase) -> Option<(usize, NonTerminal)> {
    p.symbols().iter().enumerate().find_map(|(i, s)| match s {
        Symbol::Nt(nt) => Some((i, *nt)),
        _ => None,
    })
}

/// Replaces the leftmost nonterminal of `p` by the rhs of `prod`.
pub fn derive(p: &Phrase, prod: &Production) -> Result<Phrase, GrammarError> {
    let (pos, nt) = leftmost_nonterminal(p).ok_or(GrammarError::NothingToDerive)?;
    if nt != prod.lhs {
        return Err(GrammarError::LhsMismatch {
            expected: prod.lhs,
            found: nt,
        });
    }
    Ok(splice(p, pos, &prod.rhs))
}

fn splice(p: &Phrase, pos: usize, rhs: &[Symbol]) -> Phrase {
    let old = p.symbols();
    let mut symbols = Vec::with_capacity(old.len() + rhs.len() - 1);
    symbols.extend_from_slice(&old[..pos]);
    symbols.extend_from_slice(rhs);
    symbols.extend_from_slice(&old[pos + 1..]);
    Phrase::from_parts(symbols, p.depth() + 1)
}

pub fn expansions(g: &Grammar, p: &Phrase) -> Result<Vec<Phrase>, GrammarError> {
    let (pos, nt) = leftmost_nonterminal(p).ok_or(GrammarError::NothingToDerive)?;
    Ok(g.productions(nt).iter().map(|prod| splice(p, pos, &prod.rhs)).collect())
}

/// Estimates the maximum phrase length under a variable-reference budget.
///
/// Starting from `Expr`, the leftmost nonterminal is repeatedly replaced by
/// the admissible production whose best completion is longest; ties go to
/// the production with fewer nonterminals, then fewer variable references,
/// then declaration order. The completion lengths come from a memoized
/// table, so the result is the exact maximum sentence length.
pub fn estimate_max_length(g: &Grammar, max_var_refs: usize) -> usize {
    longest_derivation(g, max_var_refs).len()
}

/// The phrase built by [`estimate_max_length`].
pub fn longest_derivation(g: &Grammar, max_var_refs: usize) -> Phrase {
    let budget = max_var_refs.max(1);
    let mut table = LongestTable::new(g);
    let mut phrase = Phrase::start();
    while let Some((pos, nt)) = leftmost_nonterminal(&phrase) {
        let mut best: Option<(Phrase, &Production, usize)> = None;
        for prod in g.productions(nt) {
            let candidate = splice(&phrase, pos, &prod.rhs);
            if candidate.variable_refs() > budget {
                continue;
            }
            let Some(len) = table.sequence_best(candidate.symbols(), budget) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((_, b, best_len)) => {
                    len > *best_len
                        || (len == *best_len
                            && (prod.nonterminal_count(), prod.variable_refs())
                                < (b.nonterminal_count(), b.variable_refs()))
                }
            };
            if better {
                best = Some((candidate, prod, len));
            }
        }
        let (next, _, _) = best.expect("every nonterminal derives a single-variable sentence");
        phrase = next;
    }
    phrase
}

/// Longest sentence length derivable from a nonterminal using at most `k`
/// variables.
struct LongestTable<'g> {
    grammar: &'g Grammar,
    memo: HashMap<(NonTerminal, usize), Option<usize>>,
}

impl<'g> LongestTable<'g> {
    fn new(grammar: &'g Grammar) -> Self {
        LongestTable {
            grammar,
            memo: HashMap::new(),
        }
    }

    fn best(&mut self, nt: NonTerminal, k: usize) -> Option<usize> {
        if k == 0 {
            return None;
        }
        if let Some(v) = self.memo.get(&(nt, k)) {
            return *v;
        }
        let grammar = self.grammar;
        let best = grammar
            .productions(nt)
            .iter()
            .filter_map(|prod| self.sequence_best(&prod.rhs, k))
            .max();
        self.memo.insert((nt, k), best);
        best
    }

    /// Longest completion of a symbol sequence using at most `k` variables.
    fn sequence_best(&mut self, symbols: &[Symbol], k: usize) -> Option<usize> {
        let vars = symbols.iter().filter(|s| matches!(s, Symbol::Var(_))).count();
        let terminals = symbols.iter().filter(|s| !s.is_nonterminal()).count();
        let nts: Vec<NonTerminal> = symbols
            .iter()
            .filter_map(|s| match s {
                Symbol::Nt(nt) => Some(*nt),
                _ => None,
            })
            .collect();
        if vars + nts.len() > k {
            return None;
        }
        let budget = k - vars;
        // reach[b]: best length of the nonterminals seen so far using at most b variables
        let mut reach: Vec<Option<usize>> = vec![Some(0); budget + 1];
        for nt in nts {
            let mut next = vec![None; budget + 1];
            for b in 1..=budget {
                for own in 1..=b {
                    // Check the rest first: a recursive rule such as
                    // `Expr -> c*Term + Expr` must not ask for Expr at full budget.
                    let Some(rest) = reach[b - own] else { continue };
                    if let Some(a) = self.best(nt, own) {
                        next[b] = next[b].max(Some(a + rest));
                    }
                }
            }
            reach = next;
        }
        reach[budget].map(|len| len + terminals)
    }
}
