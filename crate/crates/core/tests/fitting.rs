mod common;

use common::{names, random_sentence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use esr_core::data::Matrix;
use esr_core::expr::evaluate;
use esr_core::fit::jacobian;
use esr_core::grammar::Grammar;

/// Central differences with a step-halving check; only points where the
/// difference itself is stable are compared.
#[test]
fn jacobian_matches_central_differences() {
    let xs = names(1);
    let g = Grammar::new(&xs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let x = Matrix::from_columns(vec![(0..6).map(|_| rng.gen_range(0.5..2.0)).collect()]);
    let mut compared = 0;
    while compared < 60 {
        let s = random_sentence(&g, 4, &mut rng);
        let t = s.to_tree();
        let c: Vec<f64> = (0..s.coefficient_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let jac = jacobian(&s, &c, &x).unwrap();
        if !jac.failed_rows.is_empty() {
            continue;
        }
        let d = |k: usize, i: usize, h: f64| {
            let (mut up, mut down) = (c.clone(), c.clone());
            up[k] += h;
            down[k] -= h;
            (evaluate(&t, &up, &x.row(i)).unwrap() - evaluate(&t, &down, &x.row(i)).unwrap()) / (2.0 * h)
        };
        for k in 0..c.len() {
            let h = 1e-6 * c[k].abs().max(1.0);
            for i in 0..x.n_rows() {
                let (fd, half) = (d(k, i, h), d(k, i, h / 2.0));
                let scale = fd.abs().max(1.0);
                if !fd.is_finite() || (fd - half).abs() > 1e-6 * scale {
                    continue;
                }
                let a = jac.matrix[(i, k)];
                assert!(
                    (a - fd).abs() <= 1e-4 * scale,
                    "{} d/dc{k} row {i}: {a} vs {fd}",
                    s.render(&xs)
                );
                compared += 1;
            }
        }
    }
}
