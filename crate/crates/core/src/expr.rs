//! Symbols, phrases and expression trees.
//!
//! A [`Phrase`] is stored as a prefix-ordered symbol sequence. In a phrase
//! `Add` and `Mul` are always binary, so the sequence converts to an
//! [`ExprTree`] without ambiguity. Trees produced by folding may carry
//! `Add`/`Mul` nodes with more than two children.

use std::fmt;

use thiserror::Error;

/// Function symbols of the grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Add,
    Mul,
    Inv,
    Exp,
    Log,
    Sin,
    Sqrt,
    Cbrt,
}

impl Op {
    pub const ALL: [Op; 8] = [Op::Add, Op::Mul, Op::Inv, Op::Exp, Op::Log, Op::Sin, Op::Sqrt, Op::Cbrt];

    pub fn min_arity(self) -> usize {
        match self {
            Op::Add | Op::Mul => 2,
            _ => 1,
        }
    }

    pub fn is_commutative(self) -> bool {
        matches!(self, Op::Add | Op::Mul)
    }

    pub fn is_unary(self) -> bool {
        !self.is_commutative()
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Mul => "*",
            Op::Inv => "inv",
            Op::Exp => "exp",
            Op::Log => "log",
            Op::Sin => "sin",
            Op::Sqrt => "sqrt",
            Op::Cbrt => "cbrt",
        }
    }

    fn from_function_name(name: &str) -> Option<Op> {
        match name {
            "exp" => Some(Op::Exp),
            "log" => Some(Op::Log),
            "sin" => Some(Op::Sin),
            "sqrt" => Some(Op::Sqrt),
            "cbrt" => Some(Op::Cbrt),
            _ => None,
        }
    }

    /// Applies a unary operator. `cbrt` is the real, sign-preserving cube root.
    pub fn apply_unary(self, x: f64) -> f64 {
        match self {
            Op::Inv => 1.0 / x,
            Op::Exp => x.exp(),
            Op::Log => x.ln(),
            Op::Sin => x.sin(),
            Op::Sqrt => x.sqrt(),
            Op::Cbrt => x.cbrt(),
            Op::Add | Op::Mul => panic!("{self:?} is not unary"),
        }
    }

    pub(crate) fn index(self) -> u16 {
        self as u16
    }
}

/// Nonterminal symbols of the expression grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NonTerminal {
    Expr,
    Term,
    RecurringFactors,
    VarFactor,
    LogFactor,
    ExpFactor,
    SinFactor,
    OneTimeFactors,
    InvFactor,
    SqrtFactor,
    CbrtFactor,
    SimpleExpr,
    SimpleTerm,
    InvExpr,
    InvTerm,
}

impl NonTerminal {
    pub const ALL: [NonTerminal; 15] = [
        NonTerminal::Expr,
        NonTerminal::Term,
        NonTerminal::RecurringFactors,
        NonTerminal::VarFactor,
        NonTerminal::LogFactor,
        NonTerminal::ExpFactor,
        NonTerminal::SinFactor,
        NonTerminal::OneTimeFactors,
        NonTerminal::InvFactor,
        NonTerminal::SqrtFactor,
        NonTerminal::CbrtFactor,
        NonTerminal::SimpleExpr,
        NonTerminal::SimpleTerm,
        NonTerminal::InvExpr,
        NonTerminal::InvTerm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NonTerminal::Expr => "Expr",
            NonTerminal::Term => "Term",
            NonTerminal::RecurringFactors => "RecurringFactors",
            NonTerminal::VarFactor => "VarFactor",
            NonTerminal::LogFactor => "LogFactor",
            NonTerminal::ExpFactor => "ExpFactor",
            NonTerminal::SinFactor => "SinFactor",
            NonTerminal::OneTimeFactors => "OneTimeFactors",
            NonTerminal::InvFactor => "InvFactor",
            NonTerminal::SqrtFactor => "SqrtFactor",
            NonTerminal::CbrtFactor => "CbrtFactor",
            NonTerminal::SimpleExpr => "SimpleExpr",
            NonTerminal::SimpleTerm => "SimpleTerm",
            NonTerminal::InvExpr => "InvExpr",
            NonTerminal::InvTerm => "InvTerm",
        }
    }

    pub fn from_name(name: &str) -> Option<NonTerminal> {
        NonTerminal::ALL.into_iter().find(|nt| nt.name() == name)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A grammar token: terminal (coefficient slot, variable, function) or nonterminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Placeholder for a numeric coefficient fitted against data.
    Coeff,
    /// Input feature, by column index.
    Var(u16),
    Op(Op),
    Nt(NonTerminal),
}

impl Symbol {
    /// Arity of the symbol inside a phrase (binary `Add`/`Mul`).
    pub fn phrase_arity(self) -> usize {
        match self {
            Symbol::Op(op) => op.min_arity(),
            _ => 0,
        }
    }

    pub fn is_nonterminal(self) -> bool {
        matches!(self, Symbol::Nt(_))
    }

    pub fn is_variable_ref(self) -> bool {
        matches!(self, Symbol::Var(_) | Symbol::Nt(_))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PhraseError {
    #[error("symbol sequence is not a complete prefix expression")]
    Malformed,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Reasons an expression cannot produce a finite value.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("non-finite result")]
    NonFinite,
    #[error("expression still contains nonterminal symbols")]
    Unfinished,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("variable index {0} outside the input row")]
    MissingVariable(usize),
}

/// Ordered symbol sequence in prefix order. A phrase without nonterminals is a sentence.
#[derive(Clone, Debug)]
pub struct Phrase {
    symbols: Vec<Symbol>,
    depth: u32,
}

impl PartialEq for Phrase {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Phrase {}

impl std::hash::Hash for Phrase {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state)
    }
}

impl Phrase {
    /// The start phrase `Expr`.
    pub fn start() -> Phrase {
        Phrase {
            symbols: vec![Symbol::Nt(NonTerminal::Expr)],
            depth: 0,
        }
    }

    /// Builds a phrase, checking that the sequence is a complete prefix expression.
    /// The empty sequence is accepted.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Result<Phrase, PhraseError> {
        if !symbols.is_empty() && prefix_extent(&symbols, 0) != Some(symbols.len()) {
            return Err(PhraseError::Malformed);
        }
        Ok(Phrase { symbols, depth: 0 })
    }

    pub(crate) fn from_parts(symbols: Vec<Symbol>, depth: u32) -> Phrase {
        Phrase { symbols, depth }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Number of derivation steps that produced this phrase.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_sentence(&self) -> bool {
        !self.symbols.iter().any(|s| s.is_nonterminal())
    }

    pub fn nonterminal_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_nonterminal()).count()
    }

    /// Variables plus nonterminals; every nonterminal eventually yields at
    /// least one variable.
    pub fn variable_refs(&self) -> usize {
        count_variable_refs(self)
    }

    pub fn coefficient_count(&self) -> usize {
        self.symbols.iter().filter(|s| **s == Symbol::Coeff).count()
    }

    pub fn to_tree(&self) -> ExprTree {
        assert!(!self.symbols.is_empty(), "empty phrase has no tree");
        let mut pos = 0;
        let tree = build_tree(&self.symbols, &mut pos);
        debug_assert_eq!(pos, self.symbols.len());
        tree
    }

    /// Deterministic infix rendering. Variables without a name in `names`
    /// render as `x{index}`.
    pub fn render(&self, names: &[String]) -> String {
        if self.symbols.is_empty() {
            return EMPTY_SENTINEL.to_string();
        }
        self.to_tree().render(names)
    }

    /// Parses the output of [`Phrase::render`]. `+` and `*` associate to the right.
    pub fn parse(text: &str, names: &[String]) -> Result<Phrase, PhraseError> {
        if text.trim() == EMPTY_SENTINEL {
            return Ok(Phrase {
                symbols: Vec::new(),
                depth: 0,
            });
        }
        let mut parser = Parser {
            tokens: tokenize(text)?,
            pos: 0,
            names,
        };
        let tree = parser.sum()?;
        if let Some((pos, tok)) = parser.tokens.get(parser.pos) {
            return Err(PhraseError::Parse {
                pos: *pos,
                msg: format!("unexpected token {tok:?}"),
            });
        }
        let mut symbols = Vec::new();
        tree.push_prefix(&mut symbols);
        Ok(Phrase { symbols, depth: 0 })
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

/// Serialized as its infix rendering with default variable names.
impl serde::Serialize for Phrase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render(&[]))
    }
}

impl<'de> serde::Deserialize<'de> for Phrase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Phrase, D::Error> {
        let text = String::deserialize(d)?;
        Phrase::parse(&text, &[]).map_err(serde::de::Error::custom)
    }
}

/// Rendering of the empty phrase.
pub const EMPTY_SENTINEL: &str = "<empty>";

/// Number of variable symbols plus number of nonterminal symbols.
pub fn count_variable_refs(p: &Phrase) -> usize {
    p.symbols.iter().filter(|s| s.is_variable_ref()).count()
}

/// Index one past the subtree starting at `start`, or `None` if truncated.
fn prefix_extent(symbols: &[Symbol], start: usize) -> Option<usize> {
    let mut need = 1usize;
    let mut i = start;
    while need > 0 {
        let s = symbols.get(i)?;
        need = need - 1 + s.phrase_arity();
        i += 1;
    }
    Some(i)
}

fn build_tree(symbols: &[Symbol], pos: &mut usize) -> ExprTree {
    let symbol = symbols[*pos];
    *pos += 1;
    let children = (0..symbol.phrase_arity()).map(|_| build_tree(symbols, pos)).collect();
    ExprTree { symbol, children }
}

/// Expression tree. Coefficient slots are numbered in pre-order, which is
/// the left-to-right order of the phrase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExprTree {
    pub symbol: Symbol,
    pub children: Vec<ExprTree>,
}

impl ExprTree {
    pub fn leaf(symbol: Symbol) -> ExprTree {
        ExprTree {
            symbol,
            children: Vec::new(),
        }
    }

    pub fn coeff() -> ExprTree {
        ExprTree::leaf(Symbol::Coeff)
    }

    pub fn var(index: u16) -> ExprTree {
        ExprTree::leaf(Symbol::Var(index))
    }

    pub fn node(op: Op, children: Vec<ExprTree>) -> ExprTree {
        ExprTree {
            symbol: Symbol::Op(op),
            children,
        }
    }

    pub fn add(children: Vec<ExprTree>) -> ExprTree {
        ExprTree::node(Op::Add, children)
    }

    pub fn mul(children: Vec<ExprTree>) -> ExprTree {
        ExprTree::node(Op::Mul, children)
    }

    pub fn unary(op: Op, child: ExprTree) -> ExprTree {
        ExprTree::node(op, vec![child])
    }

    pub fn op(&self) -> Option<Op> {
        match self.symbol {
            Symbol::Op(op) => Some(op),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ExprTree::size).sum::<usize>()
    }

    pub fn coefficient_count(&self) -> usize {
        usize::from(self.symbol == Symbol::Coeff) + self.children.iter().map(ExprTree::coefficient_count).sum::<usize>()
    }

    pub fn contains_coefficient(&self) -> bool {
        self.symbol == Symbol::Coeff || self.children.iter().any(ExprTree::contains_coefficient)
    }

    pub fn is_sentence(&self) -> bool {
        !self.symbol.is_nonterminal() && self.children.iter().all(ExprTree::is_sentence)
    }

    /// Largest variable index used, if any.
    pub fn max_variable(&self) -> Option<usize> {
        let own = match self.symbol {
            Symbol::Var(i) => Some(i as usize),
            _ => None,
        };
        self.children.iter().filter_map(ExprTree::max_variable).chain(own).max()
    }

    /// Binary-nested prefix serialization. N-ary `Add`/`Mul` nodes are
    /// emitted right-nested.
    pub fn to_phrase(&self) -> Phrase {
        let mut symbols = Vec::new();
        self.push_prefix(&mut symbols);
        Phrase { symbols, depth: 0 }
    }

    fn push_prefix(&self, out: &mut Vec<Symbol>) {
        match self.symbol {
            Symbol::Op(op) if op.is_commutative() && self.children.len() > 2 => {
                out.push(self.symbol);
                self.children[0].push_prefix(out);
                let rest = ExprTree::node(op, self.children[1..].to_vec());
                rest.push_prefix(out);
            }
            Symbol::Op(op) if op.is_commutative() && self.children.len() == 1 => {
                self.children[0].push_prefix(out);
            }
            _ => {
                out.push(self.symbol);
                for c in &self.children {
                    c.push_prefix(out);
                }
            }
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        let mut slot = 0;
        self.render_into(names, &mut slot, &mut out);
        out
    }

    fn render_into(&self, names: &[String], slot: &mut usize, out: &mut String) {
        use std::fmt::Write;
        match self.symbol {
            Symbol::Coeff => {
                let _ = write!(out, "c{slot}");
                *slot += 1;
            }
            Symbol::Var(i) => match names.get(i as usize) {
                Some(name) => out.push_str(name),
                None => {
                    let _ = write!(out, "x{i}");
                }
            },
            Symbol::Nt(nt) => {
                let _ = write!(out, "<{}>", nt.name());
            }
            Symbol::Op(op @ (Op::Add | Op::Mul)) => {
                let sep = if op == Op::Add { " + " } else { "*" };
                let last = self.children.len().saturating_sub(1);
                for (i, child) in self.children.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    let paren = match (op, child.op()) {
                        (Op::Add, Some(Op::Add)) => i < last,
                        (Op::Mul, Some(Op::Add)) => true,
                        (Op::Mul, Some(Op::Mul)) => i < last,
                        _ => false,
                    };
                    if paren {
                        out.push('(');
                    }
                    child.render_into(names, slot, out);
                    if paren {
                        out.push(')');
                    }
                }
            }
            Symbol::Op(op) => {
                out.push_str(if op == Op::Inv { "1/" } else { op.name() });
                out.push('(');
                for c in &self.children {
                    c.render_into(names, slot, out);
                }
                out.push(')');
            }
        }
    }
}

/// Evaluates a sentence tree on one input row.
pub fn evaluate(t: &ExprTree, coeffs: &[f64], row: &[f64]) -> Result<f64, EvalError> {
    let expected = t.coefficient_count();
    if expected != coeffs.len() {
        return Err(EvalError::CoefficientCount {
            expected,
            got: coeffs.len(),
        });
    }
    let mut slot = 0;
    let v = eval_node(t, coeffs, row, &mut slot)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_node(t: &ExprTree, coeffs: &[f64], row: &[f64], slot: &mut usize) -> Result<f64, EvalError> {
    let v = match t.symbol {
        Symbol::Coeff => {
            let v = coeffs[*slot];
            *slot += 1;
            v
        }
        Symbol::Var(i) => *row.get(i as usize).ok_or(EvalError::MissingVariable(i as usize))?,
        Symbol::Nt(_) => return Err(EvalError::Unfinished),
        Symbol::Op(Op::Add) => {
            let mut acc = 0.0;
            for c in &t.children {
                acc += eval_node(c, coeffs, row, slot)?;
            }
            acc
        }
        Symbol::Op(Op::Mul) => {
            let mut acc = 1.0;
            for c in &t.children {
                acc *= eval_node(c, coeffs, row, slot)?;
            }
            acc
        }
        Symbol::Op(op) => op.apply_unary(eval_node(&t.children[0], coeffs, row, slot)?),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Plus,
    Star,
    Open,
    Close,
    InvOpen,
    Coeff,
    Ident(String),
    Nt(NonTerminal),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, PhraseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => {
                out.push((start, Token::Plus));
                i += 1;
            }
            b'*' => {
                out.push((start, Token::Star));
                i += 1;
            }
            b'(' => {
                out.push((start, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((start, Token::Close));
                i += 1;
            }
            b'1' if text[i..].starts_with("1/(") => {
                out.push((start, Token::InvOpen));
                i += 3;
            }
            b'<' => {
                let end = text[i..].find('>').ok_or_else(|| PhraseError::Parse {
                    pos: start,
                    msg: "unterminated nonterminal".into(),
                })?;
                let name = &text[i + 1..i + end];
                let nt = NonTerminal::from_name(name).ok_or_else(|| PhraseError::Parse {
                    pos: start,
                    msg: format!("unknown nonterminal {name:?}"),
                })?;
                out.push((start, Token::Nt(nt)));
                i += end + 1;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                if is_coefficient_name(word) {
                    out.push((start, Token::Coeff));
                } else {
                    out.push((start, Token::Ident(word.to_string())));
                }
            }
            _ => {
                return Err(PhraseError::Parse {
                    pos: start,
                    msg: format!("unexpected character {:?}", b as char),
                })
            }
        }
    }
    Ok(out)
}

/// `c` followed by one or more digits.
pub(crate) fn is_coefficient_name(word: &str) -> bool {
    word.len() > 1 && word.starts_with('c') && word[1..].bytes().all(|b| b.is_ascii_digit())
}

pub(crate) fn is_function_name(word: &str) -> bool {
    Op::from_function_name(word).is_some()
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn err(&self, msg: impl Into<String>) -> PhraseError {
        let pos = self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX);
        PhraseError::Parse { pos, msg: msg.into() }
    }

    fn expect_close(&mut self) -> Result<(), PhraseError> {
        if self.peek() == Some(&Token::Close) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err("expected ')'"))
        }
    }

    fn sum(&mut self) -> Result<ExprTree, PhraseError> {
        let lhs = self.product()?;
        if self.peek() == Some(&Token::Plus) {
            self.pos += 1;
            let rhs = self.sum()?;
            return Ok(ExprTree::add(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<ExprTree, PhraseError> {
        let lhs = self.atom()?;
        if self.peek() == Some(&Token::Star) {
            self.pos += 1;
            let rhs = self.product()?;
            return Ok(ExprTree::mul(vec![lhs, rhs]));
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<ExprTree, PhraseError> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Token::Open => {
                let inner = self.sum()?;
                self.expect_close()?;
                Ok(inner)
            }
            Token::InvOpen => {
                let inner = self.sum()?;
                self.expect_close()?;
                Ok(ExprTree::unary(Op::Inv, inner))
            }
            Token::Coeff => Ok(ExprTree::coeff()),
            Token::Nt(nt) => Ok(ExprTree::leaf(Symbol::Nt(nt))),
            Token::Ident(word) => {
                if let Some(op) = Op::from_function_name(&word) {
                    if self.peek() == Some(&Token::Open) {
                        self.pos += 1;
                        let inner = self.sum()?;
                        self.expect_close()?;
                        return Ok(ExprTree::unary(op, inner));
                    }
                }
                if let Some(i) = self.names.iter().position(|n| *n == word) {
                    return Ok(ExprTree::var(i as u16));
                }
                // default names x0, x1, ... when not shadowed by `names`
                if let Some(i) = word.strip_prefix('x').and_then(|d| d.parse::<u16>().ok()) {
                    if (i as usize) >= self.names.len() {
                        return Ok(ExprTree::var(i));
                    }
                }
                self.pos -= 1;
                Err(self.err(format!("unknown identifier {word:?}")))
            }
            _ => {
                self.pos -= 1;
                Err(self.err(format!("unexpected token {tok:?}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn p(text: &str, ns: &[&str]) -> Phrase {
        Phrase::parse(text, &names(ns)).unwrap()
    }

    #[test]
    fn variable_refs_count_variables_and_nonterminals() {
        assert_eq!(p("c0*x*x + c1", &["x"]).variable_refs(), 2);
        assert_eq!(p("c0*log(c1*x + c2) + c3*x + c4", &["x"]).variable_refs(), 2);
        assert_eq!(p("c0", &["x"]).variable_refs(), 0);
        assert_eq!(p("c0*x + <Expr>", &["x"]).variable_refs(), 2);
    }

    #[test]
    fn evaluate_examples() {
        let t = p("c0*x + c1", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[2.0, 3.0], &[5.0]), Ok(13.0));
        let t = p("exp(c0*x)", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[0.0], &[7.0]), Ok(1.0));
        let t = p("1/(c0*x + c1)", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[1.0, 0.0], &[0.0]), Err(EvalError::NonFinite));
    }

    #[test]
    fn cbrt_preserves_sign() {
        let t = p("cbrt(c0*x + c1)", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[1.0, 0.0], &[-8.0]), Ok(-2.0));
    }

    #[test]
    fn evaluate_reports_domain_errors() {
        let t = p("log(c0*x + c1)", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[1.0, 0.0], &[-1.0]), Err(EvalError::NonFinite));
        let t = p("sqrt(c0*x + c1)", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[1.0, 0.0], &[-1.0]), Err(EvalError::NonFinite));
        let t = p("c0*x + <Expr>", &["x"]).to_tree();
        assert_eq!(evaluate(&t, &[1.0], &[1.0]), Err(EvalError::Unfinished));
        let t = p("c0*x + c1", &["x"]).to_tree();
        assert!(matches!(
            evaluate(&t, &[1.0], &[1.0]),
            Err(EvalError::CoefficientCount { .. })
        ));
    }

    #[test]
    fn render_examples() {
        let e0 = Phrase::from_symbols(vec![
            Symbol::Op(Op::Add),
            Symbol::Op(Op::Mul),
            Symbol::Coeff,
            Symbol::Var(0),
            Symbol::Coeff,
        ])
        .unwrap();
        assert_eq!(e0.render(&names(&["x"])), "c0*x + c1");
        let open = Phrase::from_symbols(vec![
            Symbol::Op(Op::Add),
            Symbol::Op(Op::Mul),
            Symbol::Coeff,
            Symbol::Var(0),
            Symbol::Nt(NonTerminal::Expr),
        ])
        .unwrap();
        assert_eq!(open.render(&names(&["x"])), "c0*x + <Expr>");
        let empty = Phrase::from_symbols(Vec::new()).unwrap();
        assert_eq!(empty.render(&[]), EMPTY_SENTINEL);
        assert_eq!(Phrase::parse(EMPTY_SENTINEL, &[]).unwrap(), empty);
    }

    #[test]
    fn render_uses_default_names() {
        let t = p("c0*x0*x1 + c1", &[]);
        assert_eq!(t.to_string(), "c0*x0*x1 + c1");
    }

    #[test]
    fn render_parenthesizes_left_nesting() {
        let t = ExprTree::add(vec![
            ExprTree::add(vec![ExprTree::var(0), ExprTree::coeff()]),
            ExprTree::coeff(),
        ]);
        let s = t.render(&names(&["x"]));
        assert_eq!(s, "(x + c0) + c1");
        assert_eq!(Phrase::parse(&s, &names(&["x"])).unwrap(), t.to_phrase());
        let t = ExprTree::mul(vec![
            ExprTree::var(0),
            ExprTree::add(vec![ExprTree::var(0), ExprTree::coeff()]),
        ]);
        assert_eq!(t.render(&names(&["x"])), "x*(x + c0)");
    }

    #[test]
    fn from_symbols_rejects_truncated_sequences() {
        assert_eq!(
            Phrase::from_symbols(vec![Symbol::Op(Op::Add), Symbol::Coeff]),
            Err(PhraseError::Malformed)
        );
        assert_eq!(
            Phrase::from_symbols(vec![Symbol::Coeff, Symbol::Coeff]),
            Err(PhraseError::Malformed)
        );
    }

    #[test]
    fn parse_errors() {
        assert!(Phrase::parse("c0*q", &names(&["x"])).is_err());
        assert!(Phrase::parse("c0*x +", &names(&["x"])).is_err());
        assert!(Phrase::parse("log(x", &names(&["x"])).is_err());
        assert!(Phrase::parse("<Nope>", &names(&["x"])).is_err());
    }

    #[test]
    fn n_ary_trees_serialize_right_nested() {
        let t = ExprTree::add(vec![ExprTree::coeff(), ExprTree::var(0), ExprTree::var(1)]);
        let phrase = t.to_phrase();
        assert_eq!(phrase.len(), 5);
        assert_eq!(phrase.render(&[]), "c0 + x0 + x1");
    }
}
