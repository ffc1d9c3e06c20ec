mod common;

use common::{canon, names, smooth_data, Oracle, T};

use esr_core::canon::canonicalize;
use esr_core::enumerate::{count_derivations, for_each_sentence, space_stats, DEFAULT_GUARD};
use esr_core::fit::FitConfig;
use esr_core::grammar::Grammar;
use esr_core::search::{QualityMode, Search, SearchConfig, Termination};

const CASES: [(usize, usize); 5] = [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)];

fn exhaustive(refs: usize) -> SearchConfig {
    SearchConfig {
        max_variable_refs: refs,
        max_evaluated_sentences: usize::MAX,
        quality: QualityMode::Constant,
        fit: FitConfig {
            restarts: 1,
            max_iterations: 3,
            ..FitConfig::default()
        },
        ..SearchConfig::default()
    }
}

#[test]
fn oracle_derivation_count_matches_dp() {
    for (refs, n) in CASES {
        let g = Grammar::new(&names(n)).unwrap();
        let oracle = Oracle { n_vars: n };
        assert_eq!(
            oracle.all(refs).len() as u128,
            count_derivations(&g, refs),
            "refs={refs} n={n}"
        );
    }
}

#[test]
fn oracle_known_small_values() {
    // refs = 1, one variable: the four recurring factors x, log(c*x + c),
    // exp(c*x), sin(c*x + c); 1/(c*T + c) for the six one-variable InvTerms
    // (the recurring factors, sqrt and cbrt); sqrt(c*x + c); cbrt(c*x + c).
    let o = Oracle { n_vars: 1 };
    assert_eq!(o.all(1).len(), 4 + 6 + 2);
    assert_eq!(o.distinct_canonical(1).len(), 12);
    // c*x + c*x + c folds to c*x + c
    let a = canon(&T::Sum(vec![
        T::Prod(vec![T::C, T::V(0)]),
        T::Sum(vec![T::Prod(vec![T::C, T::V(0)]), T::C]),
    ]));
    assert_eq!(a, T::Sum(vec![T::C, T::Prod(vec![T::C, T::V(0)])]));
}

#[test]
fn search_visits_each_canonical_sentence_once() {
    for (refs, n) in CASES {
        let expected = Oracle { n_vars: n }.distinct_canonical(refs).len();
        let data = smooth_data(n, 12);
        let mut s = Search::new(&data, exhaustive(refs)).unwrap();
        while s.step().is_some() {}
        assert_eq!(s.termination(), Some(Termination::Exhausted));
        assert_eq!(s.evaluated(), expected, "refs={refs} n={n}");
        let stats = space_stats(refs, n, DEFAULT_GUARD).unwrap();
        assert_eq!(stats.distinct_canonical as usize, expected);
        assert_eq!(
            stats.distinct_hashes as usize, expected,
            "hash collision at refs={refs} n={n}"
        );
    }
}

#[test]
fn canonicalize_is_idempotent_on_small_spaces() {
    for (refs, n) in CASES {
        let g = Grammar::new(&names(n)).unwrap();
        for_each_sentence(&g, refs, |s| {
            let once = canonicalize(&s.to_tree());
            let twice = canonicalize(&once.to_tree());
            assert_eq!(once, twice, "{}", s.render(&names(n)));
        });
    }
}
