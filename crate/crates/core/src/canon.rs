//! Semantic hashing of expressions.
//!
//! Hash values are aggregated bottom-up like a Merkle tree. Children of
//! `Add` and `Mul` are sorted by (node rank, hash) before they are combined,
//! so commutation does not change the digest. Sentences are first reduced
//! to a canonical minimal form:
//!
//! 1. fold: nested `Add` under `Add` and `Mul` under `Mul` are flattened;
//! 2. simplify: redundant subexpressions are removed:
//!    - duplicate summands `c*g + c*g` collapse to `c*g` when `g` carries no
//!      coefficient of its own (bare coefficients `c + c` included),
//!    - `exp(c*T)*exp(c*T)` collapses to `exp(c*T)` when `T` carries no
//!      coefficient,
//!    - duplicate coefficient factors `c*c` collapse to `c`;
//! 3. steps 1 and 2 repeat until nothing changes.
//!
//! Coefficient slots all hash alike; the digest never depends on slot
//! numbering, memory addresses or process-level random state.

use std::cmp::Ordering;
use std::fmt;

use crate::expr::{ExprTree, Op, Phrase, Symbol};

/// 64-bit digest of an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HashValue(pub u64);

impl fmt::Display for HashValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn symbol_token(symbol: Symbol) -> u64 {
    let (class, sub) = rank(symbol);
    mix64(((class as u64) << 32) | sub as u64 | 0x5eed_0000_0000_0000)
}

/// Combines a node's own token with its (already ordered) child hashes.
fn combine(symbol: Symbol, children: &[HashValue]) -> HashValue {
    let mut h = mix64(symbol_token(symbol) ^ (children.len() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    for c in children {
        h = mix64(h.rotate_left(23) ^ c.0.wrapping_add(0x632b_e59b_d9b4_e019));
    }
    HashValue(h)
}

/// Sort rank: coefficients < variables (by index) < functions (by
/// operator order) < nonterminals.
fn rank(symbol: Symbol) -> (u8, u16) {
    match symbol {
        Symbol::Coeff => (0, 0),
        Symbol::Var(i) => (1, i),
        Symbol::Op(op) => (2, op.index()),
        Symbol::Nt(nt) => (3, nt.index() as u16),
    }
}

/// Expression tree with sorted commutative children and cached digests.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalTree {
    symbol: Symbol,
    children: Vec<CanonicalTree>,
    hash: HashValue,
}

impl CanonicalTree {
    fn new(symbol: Symbol, mut children: Vec<CanonicalTree>) -> CanonicalTree {
        if matches!(symbol, Symbol::Op(op) if op.is_commutative()) {
            children.sort_by(CanonicalTree::order);
        }
        let hashes: Vec<HashValue> = children.iter().map(|c| c.hash).collect();
        CanonicalTree {
            hash: combine(symbol, &hashes),
            symbol,
            children,
        }
    }

    /// Sorts commutative children and hashes, without folding or simplifying.
    pub fn sorted(t: &ExprTree) -> CanonicalTree {
        let children = t.children.iter().map(CanonicalTree::sorted).collect();
        CanonicalTree::new(t.symbol, children)
    }

    fn order(a: &CanonicalTree, b: &CanonicalTree) -> Ordering {
        rank(a.symbol).cmp(&rank(b.symbol)).then(a.hash.cmp(&b.hash))
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }

    pub fn children(&self) -> &[CanonicalTree] {
        &self.children
    }

    pub fn hash(&self) -> HashValue {
        self.hash
    }

    pub fn op(&self) -> Option<Op> {
        match self.symbol {
            Symbol::Op(op) => Some(op),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(CanonicalTree::size).sum::<usize>()
    }

    pub fn to_tree(&self) -> ExprTree {
        ExprTree {
            symbol: self.symbol,
            children: self.children.iter().map(CanonicalTree::to_tree).collect(),
        }
    }

    fn contains_coefficient(&self) -> bool {
        self.symbol == Symbol::Coeff || self.children.iter().any(CanonicalTree::contains_coefficient)
    }

    /// `c` or `c * g` where `g` has no coefficient: any multiple of it is
    /// again of the same form.
    fn is_free_multiple(&self) -> bool {
        match self.symbol {
            Symbol::Coeff => true,
            Symbol::Op(Op::Mul) => {
                let coeffs = self.children.iter().filter(|c| c.symbol == Symbol::Coeff).count();
                coeffs == 1
                    && self
                        .children
                        .iter()
                        .filter(|c| c.symbol != Symbol::Coeff)
                        .all(|c| !c.contains_coefficient())
            }
            _ => false,
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        self.to_tree().render(names)
    }
}

/// Canonical minimal form of a sentence tree.
///
/// Runs as a single bottom-up pass: every child is canonical before its
/// parent is folded, simplified and sorted, so the result is the fixpoint
/// of `fold` and `simplify`.
pub fn canonicalize(t: &ExprTree) -> CanonicalTree {
    let children: Vec<CanonicalTree> = t.children.iter().map(canonicalize).collect();
    match t.symbol {
        Symbol::Op(op) if op.is_commutative() => {
            let mut flat = Vec::with_capacity(children.len());
            for c in children {
                if c.symbol == t.symbol {
                    flat.extend(c.children);
                } else {
                    flat.push(c);
                }
            }
            flat.sort_by(CanonicalTree::order);
            flat.dedup_by(|b, a| a == b && redundant_duplicate(op, a));
            if flat.len() == 1 {
                return flat.pop().expect("one child");
            }
            CanonicalTree::new(t.symbol, flat)
        }
        _ => CanonicalTree::new(t.symbol, children),
    }
}

/// Whether a second copy of `child` under `op` adds nothing.
fn redundant_duplicate(op: Op, child: &CanonicalTree) -> bool {
    match op {
        Op::Add => child.is_free_multiple(),
        Op::Mul => match child.symbol {
            Symbol::Coeff => true,
            Symbol::Op(Op::Exp) => child.children[0].is_free_multiple(),
            _ => false,
        },
        _ => false,
    }
}

/// Flattens nested `Add`/`Mul` nodes of the same operator.
pub fn fold(t: &ExprTree) -> ExprTree {
    let children: Vec<ExprTree> = t.children.iter().map(fold).collect();
    match t.op() {
        Some(op) if op.is_commutative() => {
            let mut flat = Vec::with_capacity(children.len());
            for c in children {
                if c.symbol == t.symbol {
                    flat.extend(c.children);
                } else {
                    flat.push(c);
                }
            }
            ExprTree {
                symbol: t.symbol,
                children: flat,
            }
        }
        _ => ExprTree {
            symbol: t.symbol,
            children,
        },
    }
}

/// Removes redundant duplicate children of `Add`/`Mul` nodes, bottom-up.
/// Duplicates are detected modulo commutation; the first occurrence is kept
/// and child order is otherwise preserved. A node left with one child is
/// replaced by that child.
pub fn simplify(t: &ExprTree) -> ExprTree {
    let children: Vec<ExprTree> = t.children.iter().map(simplify).collect();
    let Some(op) = t.op().filter(|op| op.is_commutative()) else {
        return ExprTree {
            symbol: t.symbol,
            children,
        };
    };
    let mut kept: Vec<ExprTree> = Vec::with_capacity(children.len());
    let mut kept_keys: Vec<CanonicalTree> = Vec::with_capacity(children.len());
    for child in children {
        let key = CanonicalTree::sorted(&child);
        if redundant_duplicate(op, &key) && kept_keys.contains(&key) {
            continue;
        }
        kept.push(child);
        kept_keys.push(key);
    }
    if kept.len() == 1 {
        return kept.pop().expect("one child");
    }
    ExprTree {
        symbol: t.symbol,
        children: kept,
    }
}

/// Canonical form computed by iterating `fold` and `simplify` until neither
/// changes the tree, then sorting. Slower than [`canonicalize`]; kept as an
/// independent route for checking it.
pub fn canonicalize_by_fixpoint(t: &ExprTree) -> CanonicalTree {
    let mut cur = t.clone();
    loop {
        let next = simplify(&fold(&cur));
        if next == cur {
            return CanonicalTree::sorted(&cur);
        }
        cur = next;
    }
}

/// Digest of a phrase. Sentences hash by their canonical minimal form;
/// unfinished phrases hash structurally (commutative children sorted,
/// nonterminals hashed by kind).
pub fn hash_phrase(p: &Phrase) -> HashValue {
    if p.is_empty() {
        return HashValue(mix64(0));
    }
    let tree = p.to_tree();
    if p.is_sentence() {
        canonicalize(&tree).hash
    } else {
        CanonicalTree::sorted(&tree).hash
    }
}

/// Per-node digests of a tree in post-order, root last.
pub fn hash_sequence(t: &CanonicalTree) -> Vec<HashValue> {
    fn walk(t: &CanonicalTree, out: &mut Vec<HashValue>) {
        for c in &t.children {
            walk(c, out);
        }
        out.push(t.hash);
    }
    let mut out = Vec::with_capacity(t.size());
    walk(t, &mut out);
    out
}
