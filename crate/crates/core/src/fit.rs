//! Coefficient fitting: Levenberg–Marquardt over a compiled sentence tape,
//! scored by normalized mean squared error.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{mean, Dataset, Matrix};
use crate::expr::{ExprTree, Op, Phrase, Symbol};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("{0} predictions for {1} targets")]
    LengthMismatch(usize, usize),
    #[error("need at least two targets")]
    TooFewTargets,
    #[error("targets have zero variance")]
    ZeroVariance,
    #[error("phrase still contains nonterminals")]
    Unfinished,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("sentence uses variable {0} but the data has fewer columns")]
    MissingVariable(usize),
    #[error("invalid fit configuration: {0}")]
    Config(String),
}

/// Mean squared error divided by the population variance of `targets`.
pub fn nmse(predictions: &[f64], targets: &[f64]) -> Result<f64, FitError> {
    if predictions.len() != targets.len() {
        return Err(FitError::LengthMismatch(predictions.len(), targets.len()));
    }
    if targets.len() < 2 {
        return Err(FitError::TooFewTargets);
    }
    let ss = sum_sq_dev(targets);
    if ss <= 0.0 {
        return Err(FitError::ZeroVariance);
    }
    Ok(raw_nmse(predictions, targets, ss))
}

/// Sum of squared deviations from the mean: n times the population variance.
fn sum_sq_dev(y: &[f64]) -> f64 {
    let m = mean(y);
    y.iter().map(|t| (t - m) * (t - m)).sum()
}

/// NMSE as SSE over the summed squared deviations of the targets; any
/// non-finite prediction gives +inf.
fn raw_nmse(pred: &[f64], y: &[f64], ss: f64) -> f64 {
    let mut sse = 0.0;
    for (p, t) in pred.iter().zip(y) {
        if !p.is_finite() {
            return f64::INFINITY;
        }
        sse += (p - t) * (p - t);
    }
    let v = sse / ss;
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    /// Cap on LM iterations. One iteration is one Jacobian evaluation;
    /// rejected trial steps within it only raise the damping.
    pub max_iterations: usize,
    pub restarts: usize,
    pub initial_damping: f64,
    pub damping_factor: f64,
    /// A restart stops, unconverged, once the damping exceeds this.
    pub max_damping: f64,
    pub gradient_tolerance: f64,
    pub step_tolerance: f64,
    /// Residual assigned to rows whose prediction is not finite.
    pub penalty: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iterations: 100,
            restarts: 10,
            initial_damping: 1e-3,
            damping_factor: 10.0,
            max_damping: 1e16,
            gradient_tolerance: 1e-12,
            step_tolerance: 1e-14,
            penalty: 1e6,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        if self.max_iterations < 1 {
            return Err(FitError::Config("max_iterations must be at least 1".into()));
        }
        if self.restarts < 1 {
            return Err(FitError::Config("restarts must be at least 1".into()));
        }
        if !(self.damping_factor > 1.0 && self.initial_damping > 0.0) {
            return Err(FitError::Config("damping must be positive with factor > 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub sentence: Phrase,
    pub coefficients: Vec<f64>,
    pub train_nmse: f64,
    /// Filled in only when a model is reported.
    pub test_nmse: Option<f64>,
    /// Every restart ended with a non-finite prediction somewhere.
    pub failed: bool,
    /// LM iterations of the winning restart.
    pub iterations: usize,
    /// Whether the winning restart met a gradient or step tolerance.
    pub converged: bool,
}

impl FittedModel {
    /// The constant model: one coefficient set to the training mean.
    pub fn constant(data: &Dataset) -> FittedModel {
        FittedModel {
            sentence: Phrase::from_symbols(vec![Symbol::Coeff]).expect("valid"),
            coefficients: vec![mean(data.train_targets())],
            train_nmse: 1.0,
            test_nmse: None,
            failed: false,
            iterations: 0,
            converged: true,
        }
    }

    /// Infix rendering with the fitted values substituted for `c{k}`.
    pub fn render_with_values(&self, names: &[String]) -> String {
        let text = self.sentence.render(names);
        let bytes = text.as_bytes();
        let mut out = String::with_capacity(text.len() * 2);
        let mut i = 0;
        while i < bytes.len() {
            let starts_word = i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
            if bytes[i] == b'c' && starts_word {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let ends_word = j == bytes.len() || !(bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_');
                if j > i + 1 && ends_word {
                    if let Some(v) = text[i + 1..j]
                        .parse::<usize>()
                        .ok()
                        .and_then(|k| self.coefficients.get(k))
                    {
                        if *v < 0.0 {
                            out.push_str(&format!("({v})"));
                        } else {
                            out.push_str(&format!("{v}"));
                        }
                        i = j;
                        continue;
                    }
                }
            }
            out.push(bytes[i] as char);
            i += 1;
        }
        out
    }

    /// Predictions on every row of `x`; non-finite values are kept.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>, FitError> {
        let tape = Tape::compile(&self.sentence.to_tree())?;
        tape.check(x)?;
        let mut ws = Workspace::new(&tape, x.n_rows());
        tape.forward(&self.coefficients, x, &mut ws);
        Ok(ws.output(&tape).to_vec())
    }

    /// NMSE on the test partition, `None` when the partition is empty.
    pub fn score_test(&mut self, data: &Dataset) -> Result<Option<f64>, FitError> {
        if data.test().n_rows() < 2 {
            self.test_nmse = None;
            return Ok(None);
        }
        let pred = self.predict(data.test())?;
        let ss = sum_sq_dev(data.test_targets());
        let v = if ss > 0.0 {
            raw_nmse(&pred, data.test_targets(), ss)
        } else {
            f64::NAN
        };
        self.test_nmse = Some(v);
        Ok(Some(v))
    }
}

#[derive(Clone, Debug)]
enum Node {
    Coeff(usize),
    Var(usize),
    Add(usize, usize),
    Mul(usize, usize),
    Unary(Op, usize),
}

/// A sentence flattened to post-order with n-ary sums and products. Node
/// values are computed column-wise over all rows at once.
#[derive(Clone, Debug)]
pub struct Tape {
    nodes: Vec<Node>,
    args: Vec<usize>,
    n_coeffs: usize,
    max_var: Option<usize>,
}

/// Scratch buffers for one tape over a fixed number of rows.
pub struct Workspace {
    n_rows: usize,
    values: Vec<f64>,
    adjoint: Vec<f64>,
}

impl Workspace {
    pub fn new(tape: &Tape, n_rows: usize) -> Workspace {
        Workspace {
            n_rows,
            values: vec![0.0; tape.nodes.len() * n_rows],
            adjoint: vec![0.0; tape.nodes.len() * n_rows],
        }
    }

    fn output(&self, tape: &Tape) -> &[f64] {
        let root = tape.nodes.len() - 1;
        &self.values[root * self.n_rows..(root + 1) * self.n_rows]
    }
}

impl Tape {
    pub fn compile(t: &ExprTree) -> Result<Tape, FitError> {
        let mut tape = Tape {
            nodes: Vec::with_capacity(t.size()),
            args: Vec::new(),
            n_coeffs: 0,
            max_var: t.max_variable(),
        };
        tape.push(t)?;
        Ok(tape)
    }

    fn push(&mut self, t: &ExprTree) -> Result<usize, FitError> {
        let node = match t.symbol {
            // Leaves appear in the same order in pre- and post-order, so slot
            // numbers agree with the phrase order.
            Symbol::Coeff => {
                self.n_coeffs += 1;
                Node::Coeff(self.n_coeffs - 1)
            }
            Symbol::Var(i) => Node::Var(i as usize),
            Symbol::Nt(_) => return Err(FitError::Unfinished),
            Symbol::Op(op) => {
                let ids = t.children.iter().map(|c| self.push(c)).collect::<Result<Vec<_>, _>>()?;
                if op.is_unary() {
                    Node::Unary(op, ids[0])
                } else {
                    let start = self.args.len();
                    self.args.extend(ids);
                    if op == Op::Add {
                        Node::Add(start, self.args.len())
                    } else {
                        Node::Mul(start, self.args.len())
                    }
                }
            }
        };
        self.nodes.push(node);
        Ok(self.nodes.len() - 1)
    }

    pub fn n_coeffs(&self) -> usize {
        self.n_coeffs
    }

    fn check(&self, x: &Matrix) -> Result<(), FitError> {
        match self.max_var {
            Some(v) if v >= x.n_cols() => Err(FitError::MissingVariable(v)),
            _ => Ok(()),
        }
    }

    /// Fills `ws.values`; the last node holds the predictions.
    pub fn forward(&self, coeffs: &[f64], x: &Matrix, ws: &mut Workspace) {
        let n = ws.n_rows;
        for (k, node) in self.nodes.iter().enumerate() {
            let (before, rest) = ws.values.split_at_mut(k * n);
            let out = &mut rest[..n];
            let col = |j: usize| &before[j * n..(j + 1) * n];
            match *node {
                Node::Coeff(s) => out.fill(coeffs[s]),
                Node::Var(i) => out.copy_from_slice(x.column(i)),
                Node::Add(a, b) => {
                    out.copy_from_slice(col(self.args[a]));
                    for &j in &self.args[a + 1..b] {
                        for (o, v) in out.iter_mut().zip(col(j)) {
                            *o += v;
                        }
                    }
                }
                Node::Mul(a, b) => {
                    out.copy_from_slice(col(self.args[a]));
                    for &j in &self.args[a + 1..b] {
                        for (o, v) in out.iter_mut().zip(col(j)) {
                            *o *= v;
                        }
                    }
                }
                Node::Unary(op, j) => {
                    for (o, v) in out.iter_mut().zip(col(j)) {
                        *o = op.apply_unary(*v);
                    }
                }
            }
        }
    }

    /// Reverse sweep after `forward`. Writes d(prediction)/d(c_k) into the
    /// column-major `jac` (rows x coefficients).
    pub fn reverse(&self, ws: &mut Workspace, jac: &mut [f64]) {
        let n = ws.n_rows;
        jac.fill(0.0);
        ws.adjoint.fill(0.0);
        let root = self.nodes.len() - 1;
        ws.adjoint[root * n..(root + 1) * n].fill(1.0);
        for k in (0..self.nodes.len()).rev() {
            let (lower, upper) = ws.adjoint.split_at_mut(k * n);
            let adj = &upper[..n];
            let val = |j: usize| &ws.values[j * n..(j + 1) * n];
            match self.nodes[k] {
                Node::Coeff(s) => {
                    for (d, a) in jac[s * n..(s + 1) * n].iter_mut().zip(adj) {
                        *d += a;
                    }
                }
                Node::Var(_) => {}
                Node::Add(a, b) => {
                    for &j in &self.args[a..b] {
                        for (d, g) in lower[j * n..(j + 1) * n].iter_mut().zip(adj) {
                            *d += g;
                        }
                    }
                }
                Node::Mul(a, b) => {
                    let kids = &self.args[a..b];
                    for (pos, &j) in kids.iter().enumerate() {
                        for i in 0..n {
                            let mut others = 1.0;
                            for (q, &o) in kids.iter().enumerate() {
                                if q != pos {
                                    others *= ws.values[o * n + i];
                                }
                            }
                            lower[j * n + i] += adj[i] * others;
                        }
                    }
                }
                Node::Unary(op, j) => {
                    let (xs, ys) = (val(j), val(k));
                    let dst = &mut lower[j * n..(j + 1) * n];
                    for i in 0..n {
                        let (x, y) = (xs[i], ys[i]);
                        let d = match op {
                            Op::Inv => -y * y,
                            Op::Exp => y,
                            Op::Log => 1.0 / x,
                            Op::Sin => x.cos(),
                            Op::Sqrt => 0.5 / y,
                            Op::Cbrt => 1.0 / (3.0 * y * y),
                            Op::Add | Op::Mul => unreachable!(),
                        };
                        dst[i] += adj[i] * d;
                    }
                }
            }
        }
    }
}

/// Analytic Jacobian of the predictions with respect to the coefficient
/// slots, with the rows whose prediction or derivative is not finite.
#[derive(Clone, Debug)]
pub struct Jacobian {
    pub matrix: DMatrix<f64>,
    pub failed_rows: Vec<usize>,
}

pub fn jacobian(sentence: &Phrase, coefficients: &[f64], x: &Matrix) -> Result<Jacobian, FitError> {
    let tape = Tape::compile(&sentence.to_tree())?;
    tape.check(x)?;
    if coefficients.len() != tape.n_coeffs {
        return Err(FitError::CoefficientCount {
            expected: tape.n_coeffs,
            got: coefficients.len(),
        });
    }
    let n = x.n_rows();
    let mut ws = Workspace::new(&tape, n);
    let mut jac = vec![0.0; n * tape.n_coeffs];
    tape.forward(coefficients, x, &mut ws);
    tape.reverse(&mut ws, &mut jac);
    let pred = ws.output(&tape);
    let failed_rows = (0..n)
        .filter(|&i| !pred[i].is_finite() || (0..tape.n_coeffs).any(|s| !jac[s * n + i].is_finite()))
        .collect();
    Ok(Jacobian {
        matrix: DMatrix::from_column_slice(n, tape.n_coeffs, &jac),
        failed_rows,
    })
}

struct Lm<'a> {
    tape: &'a Tape,
    x: &'a Matrix,
    y: &'a [f64],
    cfg: &'a FitConfig,
    ws: Workspace,
    jac: Vec<f64>,
    residual: Vec<f64>,
}

struct LmResult {
    coefficients: Vec<f64>,
    iterations: usize,
    converged: bool,
}

impl<'a> Lm<'a> {
    fn new(tape: &'a Tape, x: &'a Matrix, y: &'a [f64], cfg: &'a FitConfig) -> Lm<'a> {
        let n = x.n_rows();
        Lm {
            tape,
            x,
            y,
            cfg,
            ws: Workspace::new(tape, n),
            jac: vec![0.0; n * tape.n_coeffs],
            residual: vec![0.0; n],
        }
    }

    /// Residuals and squared cost at `c`; failing rows get the penalty.
    fn cost(&mut self, c: &[f64]) -> f64 {
        self.tape.forward(c, self.x, &mut self.ws);
        let pred = self.ws.output(self.tape);
        let mut sum = 0.0;
        for ((r, p), t) in self.residual.iter_mut().zip(pred).zip(self.y) {
            *r = if p.is_finite() { p - t } else { self.cfg.penalty };
            sum += *r * *r;
        }
        if sum.is_finite() {
            sum
        } else {
            f64::INFINITY
        }
    }

    /// Normal equations at the point of the last `cost` call. Rows with a
    /// failed prediction or a non-finite derivative do not contribute.
    fn normal_equations(&mut self) -> (DMatrix<f64>, DVector<f64>) {
        let n = self.x.n_rows();
        let m = self.tape.n_coeffs;
        self.tape.reverse(&mut self.ws, &mut self.jac);
        let pred = self.ws.output(self.tape);
        for i in 0..n {
            let bad = !pred[i].is_finite() || (0..m).any(|s| !self.jac[s * n + i].is_finite());
            if bad {
                for s in 0..m {
                    self.jac[s * n + i] = 0.0;
                }
            }
        }
        let mut a = DMatrix::zeros(m, m);
        let mut g = DVector::zeros(m);
        for p in 0..m {
            let jp = &self.jac[p * n..(p + 1) * n];
            g[p] = jp.iter().zip(&self.residual).map(|(j, r)| j * r).sum();
            for q in 0..=p {
                let jq = &self.jac[q * n..(q + 1) * n];
                let v: f64 = jp.iter().zip(jq).map(|(a, b)| a * b).sum();
                a[(p, q)] = v;
                a[(q, p)] = v;
            }
        }
        (a, g)
    }

    fn run(&mut self, init: Vec<f64>) -> LmResult {
        let cfg = self.cfg;
        let mut c = init;
        let mut cost = self.cost(&c);
        let mut lambda = cfg.initial_damping;
        let mut iterations = 0;
        let mut converged = false;
        'outer: while iterations < cfg.max_iterations {
            let (a, g) = self.normal_equations();
            if g.amax() < cfg.gradient_tolerance {
                converged = true;
                break;
            }
            iterations += 1;
            loop {
                let mut damped = a.clone();
                for d in 0..damped.nrows() {
                    damped[(d, d)] += lambda * a[(d, d)].max(1e-12);
                }
                let accepted = match damped.cholesky() {
                    Some(ch) => {
                        let step = ch.solve(&(-&g));
                        let trial: Vec<f64> = c.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                        let trial_cost = self.cost(&trial);
                        if trial_cost < cost {
                            let c_norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                            let small = step.norm() < cfg.step_tolerance * (1.0 + c_norm);
                            c = trial;
                            cost = trial_cost;
                            lambda = (lambda / cfg.damping_factor).max(1e-300);
                            if small {
                                converged = true;
                                break 'outer;
                            }
                            true
                        } else {
                            false
                        }
                    }
                    None => false,
                };
                if accepted {
                    break;
                }
                lambda *= cfg.damping_factor;
                if lambda > cfg.max_damping {
                    break 'outer;
                }
            }
        }
        LmResult {
            coefficients: c,
            iterations,
            converged,
        }
    }
}

/// Fits the coefficient slots of `sentence` to the training partition.
/// Initial coefficients for all restarts are drawn up front from a
/// standard normal seeded by `seed`; the winner is the lowest train NMSE,
/// ties going to the earlier restart.
pub fn fit(sentence: &Phrase, data: &Dataset, cfg: &FitConfig, seed: u64) -> Result<FittedModel, FitError> {
    let tree = sentence.to_tree();
    let tape = Tape::compile(&tree)?;
    tape.check(data.train())?;
    let y = data.train_targets();
    let var = sum_sq_dev(y);
    if var <= 0.0 {
        return Err(FitError::ZeroVariance);
    }
    if tree.symbol == Symbol::Coeff {
        return Ok(FittedModel {
            sentence: sentence.clone(),
            ..FittedModel::constant(data)
        });
    }

    let m = tape.n_coeffs;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits: Vec<Vec<f64>> = (0..cfg.restarts)
        .map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();

    let mut lm = Lm::new(&tape, data.train(), y, cfg);
    let mut best: Option<(f64, LmResult)> = None;
    for init in inits {
        let result = if m == 0 {
            LmResult {
                coefficients: init,
                iterations: 0,
                converged: true,
            }
        } else {
            lm.run(init)
        };
        lm.tape.forward(&result.coefficients, lm.x, &mut lm.ws);
        let score = raw_nmse(lm.ws.output(&tape), y, var);
        if best.as_ref().is_none_or(|(s, _)| score < *s || s.is_nan()) {
            best = Some((score, result));
        }
        if m == 0 {
            break;
        }
    }
    let (score, result) = best.expect("restarts >= 1");
    Ok(FittedModel {
        sentence: sentence.clone(),
        coefficients: result.coefficients,
        train_nmse: score,
        test_nmse: None,
        failed: !score.is_finite(),
        iterations: result.iterations,
        converged: result.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Provenance;

    fn names() -> Vec<String> {
        vec!["x".to_string()]
    }

    fn line_data(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Dataset {
        let y = xs.iter().map(|&x| f(x)).collect();
        Dataset::new(
            names(),
            Matrix::from_columns(vec![xs]),
            y,
            Matrix::from_columns(vec![]),
            vec![],
            Provenance::Inline,
        )
        .unwrap()
    }

    fn grid21() -> Vec<f64> {
        (0..21).map(|i| -1.0 + 0.1 * i as f64).collect()
    }

    #[test]
    fn nmse_examples() {
        assert_eq!(nmse(&[0.0, 0.0, 0.0], &[0.0, 1.0, 2.0]).unwrap(), 2.5);
        assert_eq!(nmse(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(nmse(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(nmse(&[1.0, 1.0], &[3.0, 3.0]), Err(FitError::ZeroVariance));
        assert_eq!(nmse(&[1.0], &[3.0, 3.0]), Err(FitError::LengthMismatch(1, 2)));
    }

    #[test]
    fn linear_fit() {
        let data = line_data(grid21(), |x| 3.0 * x + 2.0);
        let p = Phrase::parse("c0*x + c1", &names()).unwrap();
        let m = fit(&p, &data, &FitConfig::default(), 1).unwrap();
        assert!(m.train_nmse < 1e-20, "{}", m.train_nmse);
        assert!((m.coefficients[0] - 3.0).abs() < 1e-10);
        assert!((m.coefficients[1] - 2.0).abs() < 1e-10);
        assert!(!m.failed);
    }

    #[test]
    fn fit_is_deterministic() {
        let data = line_data(grid21(), |x| (1.5 * x).exp() + 0.3);
        let p = Phrase::parse("c0*exp(c1*x) + c2", &names()).unwrap();
        let a = fit(&p, &data, &FitConfig::default(), 42).unwrap();
        let b = fit(&p, &data, &FitConfig::default(), 42).unwrap();
        assert_eq!(a, b);
        assert!(a.train_nmse < 1e-12);
    }

    #[test]
    fn domain_failure_gives_sentinel() {
        let xs: Vec<f64> = (1..=10).map(|i| -(i as f64)).collect();
        let data = line_data(xs, |x| x * x);
        // log of a negative argument on every row, whatever the coefficient
        let p = Phrase::parse("c0*log(x)", &names()).unwrap();
        let m = fit(&p, &data, &FitConfig::default(), 3).unwrap();
        assert!(m.failed);
        assert_eq!(m.train_nmse, f64::INFINITY);
    }

    #[test]
    fn constant_model_is_closed_form() {
        let data = line_data(grid21(), |x| x);
        let p = Phrase::from_symbols(vec![Symbol::Coeff]).unwrap();
        let m = fit(&p, &data, &FitConfig::default(), 0).unwrap();
        assert_eq!(m.train_nmse, 1.0);
        assert!(m.coefficients[0].abs() < 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let x = Matrix::from_columns(vec![vec![5.0, -1.0]]);
        let p = Phrase::parse("c0*x + c1", &names()).unwrap();
        let j = jacobian(&p, &[2.0, 3.0], &x).unwrap();
        assert_eq!(j.matrix[(0, 0)], 5.0);
        assert_eq!(j.matrix[(1, 0)], -1.0);
        assert_eq!(j.matrix[(0, 1)], 1.0);
        let p = Phrase::parse("exp(c0*x)", &names()).unwrap();
        let j = jacobian(&p, &[0.0], &Matrix::from_columns(vec![vec![2.0]])).unwrap();
        assert_eq!(j.matrix[(0, 0)], 2.0);
        assert!(j.failed_rows.is_empty());
    }

    #[test]
    fn jacobian_reports_failed_rows() {
        let x = Matrix::from_columns(vec![vec![1.0, -1.0, 4.0]]);
        let p = Phrase::parse("c0*sqrt(c1*x)", &names()).unwrap();
        let j = jacobian(&p, &[1.0, 1.0], &x).unwrap();
        assert_eq!(j.failed_rows, vec![1]);
    }

    #[test]
    fn predict_matches_evaluate() {
        let p = Phrase::parse("c0*1/(c1*x + c2) + c3*cbrt(c4*x)", &names()).unwrap();
        let c = [0.5, 1.5, 2.0, -1.0, 3.0];
        let xs = vec![-2.0, -0.5, 0.0, 0.7, 3.0];
        let model = FittedModel {
            sentence: p.clone(),
            coefficients: c.to_vec(),
            train_nmse: 0.0,
            test_nmse: None,
            failed: false,
            iterations: 0,
            converged: true,
        };
        let pred = model.predict(&Matrix::from_columns(vec![xs.clone()])).unwrap();
        let tree = p.to_tree();
        for (x, v) in xs.iter().zip(pred) {
            assert_eq!(crate::expr::evaluate(&tree, &c, &[*x]).unwrap(), v);
        }
    }

    #[test]
    fn render_substitutes_values() {
        let p = Phrase::parse("c0*x + c1", &names()).unwrap();
        let m = FittedModel {
            sentence: p,
            coefficients: vec![3.0, -2.5],
            train_nmse: 0.0,
            test_nmse: None,
            failed: false,
            iterations: 0,
            converged: true,
        };
        assert_eq!(m.render_with_values(&names()), "3*x + (-2.5)");
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::default().validate().is_ok());
        let bad = FitConfig {
            restarts: 0,
            ..FitConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
