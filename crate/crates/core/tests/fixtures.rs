use schemata::engine::{
    accepts, accepts_with_successor, lift_successor_scheme, InvarianceReport, Limits, Outcome,
    Semantics,
};
use schemata::lang::Mode;
use schemata::model::{Expansion, Structure};
use schemata::problems::*;

fn decide(scheme: &schemata::lang::Scheme, st: &Structure, sem: Semantics) -> Outcome {
    let (v, r) = accepts(scheme, &Expansion::plain(st), Limits::default(), sem).unwrap();
    assert_eq!(r, InvarianceReport::Invariant, "{}", st.name());
    v.outcome
}

fn accepted(b: bool) -> Outcome {
    if b {
        Outcome::Accepted
    } else {
        Outcome::Rejected
    }
}

#[test]
fn cub_matches_brute_force_up_to_four_vertices() {
    let s = cub_scheme();
    for n in 2..=4 {
        for g in graphs_up_to_iso(n) {
            let want = cub_bruteforce(&g).unwrap();
            assert_eq!(want, cub_backtracking(&g));
            let st = g.to_structure("g");
            assert_eq!(
                decide(&s, &st, Semantics::Standard),
                accepted(want),
                "{g:?}"
            );
        }
    }
}

#[test]
fn cub_on_named_graphs() {
    let s = cub_scheme();
    let k4 = complete_graph(4).to_structure("k4");
    assert_eq!(decide(&s, &k4, Semantics::Standard), Outcome::Accepted);
    // a 5-cycle has no vertex of degree 3
    let c5 = GraphView::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).to_structure("c5");
    assert_eq!(decide(&s, &c5, Semantics::Standard), Outcome::Rejected);
}

#[test]
fn prop14_matches_the_sentence() {
    let s = prop14_scheme();
    let cases: [(&[(u32, u32)], bool); 4] = [
        (&[(0, 1), (1, 2)], true),
        (&[(0, 1), (1, 2), (1, 0)], false),
        (&[(0, 1), (1, 1)], true),
        (&[(1, 0)], false),
    ];
    for (edges, want) in cases {
        let tuples = edges.iter().map(|&(u, v)| vec![u, v]).collect();
        let st = Structure::from_parts("d", sigma_prop14(), 3, vec![tuples], vec![0]).unwrap();
        assert_eq!(prop14_sentence_eval(&st).unwrap(), want);
        assert_eq!(
            decide(&s, &st, Semantics::Standard),
            accepted(want),
            "{edges:?}"
        );
    }
}

#[test]
fn even_size_needs_passed_arrays() {
    let s = even_size_scheme_p();
    for n in 2..=5 {
        let st = GraphView::new(n, &[]).to_structure("empty");
        assert_eq!(
            decide(&s, &st, Semantics::PassedArrays),
            accepted(n % 2 == 0)
        );
    }
    let st = GraphView::new(2, &[]).to_structure("empty");
    assert!(accepts(
        &s,
        &Expansion::plain(&st),
        Limits::default(),
        Semantics::Standard
    )
    .is_err());
}

#[test]
fn lifted_size_test_in_both_modes() {
    let s = size_at_least_3_scheme();
    for mode in [Mode::Npsb, Mode::Npsa] {
        let lifted = lift_successor_scheme(&s, mode).unwrap();
        assert!(!lifted.successor);
        for n in 2..=5 {
            let st = GraphView::new(n, &[(0, 1)]).to_structure("g");
            let order: Vec<u32> = (0..n as u32).collect();
            let direct = accepts_with_successor(
                &s,
                &Expansion::plain(&st),
                &order,
                Limits::default(),
                Semantics::Standard,
            )
            .unwrap()
            .outcome;
            assert_eq!(direct, accepted(n >= 3));
            assert_eq!(
                decide(&lifted, &st, Semantics::Standard),
                direct,
                "{mode:?} n={n}"
            );
        }
    }
}

#[test]
fn graph_fixtures_are_invariant_and_the_odd_one_is_not() {
    for name in ["cub", "even_size_p", "reject_all", "accept_all", "has_edge"] {
        let f = fixture(name).unwrap();
        let s = f.scheme();
        for g in graphs_up_to_iso(3) {
            let st = g.to_structure("g");
            let (_, r) =
                accepts(&s, &Expansion::plain(&st), Limits::default(), f.semantics).unwrap();
            assert_eq!(r, InvarianceReport::Invariant, "{name} on {g:?}");
        }
    }
    let path = GraphView::new(3, &[(0, 1), (1, 2)]).to_structure("p3");
    let (_, r) = accepts(
        &non_invariant_scheme(),
        &Expansion::plain(&path),
        Limits::default(),
        Semantics::Standard,
    )
    .unwrap();
    assert!(matches!(r, InvarianceReport::NotWellFormed { .. }));
}
