//! The engine against a plain graph search built from `successors`.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schemata::engine::{
    accepts_fixed, initial_config, successors, Config, Limits, Outcome, Semantics,
};
use schemata::fuzz::{random_scheme, random_structure, SchemeShape};
use schemata::lang::{desugar, label, Body};
use schemata::model::{Elem, Expansion};

/// `None` when the search passes `cap` configurations.
fn naive(
    labeled: &schemata::lang::LabeledScheme,
    e: &Expansion<'_>,
    zero: Elem,
    max: Elem,
    cap: usize,
) -> Option<bool> {
    let nio = labeled.scheme.io_vars.len();
    let done = |c: &Config| c.line == labeled.len() && c.vals[..nio].iter().all(|&v| v == max);
    let start = initial_config(labeled, e, zero).unwrap();
    let mut seen = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        if done(&c) {
            return Some(true);
        }
        for next in successors(labeled, e, zero, max, &c, Semantics::Standard).unwrap() {
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(next);
            }
        }
    }
    Some(false)
}

#[test]
fn random_schemes_agree_with_naive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut compared, mut accepted) = (0, 0);
    for _ in 0..60 {
        let s = random_scheme(&mut rng, SchemeShape::default());
        assert!(matches!(s.body, Body::Program(_)));
        let st = random_structure(&mut rng, 3, 0.4);
        let e = Expansion::plain(&st);
        let labeled = label(&desugar(&s)).unwrap();
        for (zero, max) in [(0, 2), (2, 1)] {
            let v =
                accepts_fixed(&s, &e, zero, max, Limits::default(), Semantics::Standard).unwrap();
            let Some(want) = naive(&labeled, &e, zero, max, 20_000) else {
                continue;
            };
            assert_ne!(v.outcome, Outcome::ResourceExceeded);
            assert_eq!(v.accepted(), want, "{}", schemata::lang::print(&s));
            compared += 1;
            accepted += want as usize;
        }
    }
    assert!(compared >= 100, "{compared}");
    assert!(accepted > 0 && accepted < compared);
}
