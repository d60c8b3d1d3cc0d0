//! Reference problems with direct solvers, the shipped scheme fixtures, and
//! the extension-closure probe.

mod graph;

pub use graph::{
    complete_graph, cub_backtracking, cub_bruteforce, graphs_up_to_iso, labeled_graphs, petersen,
    sigma_graph, GraphView, CUB_EDGE_GUARD,
};

use thiserror::Error;

use crate::engine::{self, EngineError, Limits, Outcome, Semantics};
use crate::lang::{parse_scheme, Body, Scheme};
use crate::model::{Elem, Expansion, ModelError, Signature, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("graph has {edges} edges; brute force is limited to {limit}")]
    EdgeGuard { edges: usize, limit: usize },
    #[error("structure must have {0}")]
    WrongSignature(&'static str),
    #[error("the probe needs a level-1 program, found level {0}")]
    NotLevel1(usize),
    #[error("the probe needs a scheme without `succ`")]
    Successor,
    #[error("the probe needs a scheme without free variables")]
    FreeVariables,
    #[error("pair {0}: the first structure is not a substructure of the second")]
    NotSubstructure(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A shipped scheme source together with what it is meant to decide.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    pub semantics: Semantics,
    /// Whether acceptance is expected not to depend on the choice of 0 and max.
    pub invariant: bool,
}

impl Fixture {
    pub fn scheme(&self) -> Scheme {
        parse_scheme(self.source)
            .unwrap_or_else(|e| panic!("fixture {} does not parse: {e}", self.name))
    }
}

macro_rules! fixture {
    ($name:literal, $sem:ident, $inv:literal) => {
        Fixture {
            name: $name,
            source: include_str!(concat!("../../fixtures/", $name, ".sch")),
            semantics: Semantics::$sem,
            invariant: $inv,
        }
    };
}

pub const FIXTURES: &[Fixture] = &[
    fixture!("cub", Standard, true),
    fixture!("prop14", Standard, true),
    fixture!("even_size_p", PassedArrays, true),
    fixture!("succ_size3", Standard, true),
    fixture!("succ_size3_npsa", Standard, true),
    fixture!("succ_even", Standard, true),
    fixture!("reject_all", Standard, true),
    fixture!("accept_all", Standard, true),
    fixture!("has_edge", Standard, true),
    fixture!("edge_zero_max", Standard, false),
];

pub fn fixture(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}

fn load(name: &str) -> Scheme {
    fixture(name).expect("shipped fixture").scheme()
}

/// Guesses a chain of distinct edges and accepts iff they form a nonempty
/// subgraph in which every touched vertex has degree 3.
pub fn cub_scheme() -> Scheme {
    load("cub")
}

/// Level-3 scheme for "some E-successor of C has a unique E-successor".
pub fn prop14_scheme() -> Scheme {
    load("prop14")
}

/// Accepts exactly the structures of even size, under passed-array semantics.
pub fn even_size_scheme_p() -> Scheme {
    load("even_size_p")
}

/// Successor-mode scheme accepting structures with at least three elements.
pub fn size_at_least_3_scheme() -> Scheme {
    load("succ_size3")
}

/// Successor-mode scheme accepting structures of even size.
pub fn succ_even_scheme() -> Scheme {
    load("succ_even")
}

/// Accepts iff `E(0, max)`; its verdict depends on the choice of 0 and max.
pub fn non_invariant_scheme() -> Scheme {
    load("edge_zero_max")
}

/// The signature `E/2` plus a constant `C`.
pub fn sigma_prop14() -> Signature {
    Signature::of(&[("E", 2)], &["C"])
}

/// `exists x (E(C,x) & exists y (E(x,y) & forall z (E(x,z) -> z = y)))`.
pub fn prop14_sentence_eval(st: &Structure) -> Result<bool, ProblemError> {
    let sig = st.signature();
    let (Some(e), Some(c)) = (sig.relation_index("E"), sig.constant_index("C")) else {
        return Err(ProblemError::WrongSignature(
            "a binary relation `E` and a constant `C`",
        ));
    };
    if sig.arity(e) != 2 {
        return Err(ProblemError::WrongSignature(
            "a binary relation `E` and a constant `C`",
        ));
    }
    let c = st.constant(c);
    let rel = st.relation(e);
    let out = |x: Elem| rel.iter().filter(move |t| t[0] == x).map(|t| t[1]);
    Ok(out(c).any(|x| out(x).take(2).count() == 1))
}

/// Outcome of [`extension_closure_probe`], as indices into the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProbeReport {
    /// Pairs where the substructure is accepted and the superstructure not.
    pub violations: Vec<usize>,
    /// Pairs the engine could not decide within the limits.
    pub exceeded: Vec<usize>,
    pub checked: usize,
}

/// Checks that acceptance of a level-1 scheme survives passing to a
/// superstructure. Each pair `(a, b)` is compared under every choice of 0
/// and max among the elements of `a`.
pub fn extension_closure_probe(
    scheme: &Scheme,
    corpus: &[(Structure, Structure)],
    limits: Limits,
) -> Result<ProbeReport, ProblemError> {
    if !matches!(scheme.body, Body::Program(_)) || scheme.level() != 1 {
        return Err(ProblemError::NotLevel1(scheme.level()));
    }
    if scheme.successor {
        return Err(ProblemError::Successor);
    }
    if !scheme.free_vars.is_empty() {
        return Err(ProblemError::FreeVariables);
    }
    for (i, (a, b)) in corpus.iter().enumerate() {
        if !a.is_substructure_of(b)? {
            return Err(ProblemError::NotSubstructure(i));
        }
    }
    let mut report = ProbeReport::default();
    for (i, (a, b)) in corpus.iter().enumerate() {
        let mut exceeded = false;
        let mut violated = false;
        for (zero, max) in engine::ordered_pairs(a.size()) {
            let run = |st: &Structure| {
                engine::accepts_fixed(
                    scheme,
                    &Expansion::plain(st),
                    zero,
                    max,
                    limits,
                    Semantics::Standard,
                )
                .map(|v| v.outcome)
            };
            match (run(a)?, run(b)?) {
                (Outcome::ResourceExceeded, _) | (Outcome::Accepted, Outcome::ResourceExceeded) => {
                    exceeded = true
                }
                (Outcome::Accepted, Outcome::Rejected) => violated = true,
                _ => {}
            }
        }
        report.checked += 1;
        if violated {
            report.violations.push(i);
        } else if exceeded {
            report.exceeded.push(i);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: usize, edges: &[(Elem, Elem)], c: Elem) -> Structure {
        let tuples = edges.iter().map(|&(u, v)| vec![u, v]).collect();
        Structure::from_parts("d", sigma_prop14(), n, vec![tuples], vec![c]).unwrap()
    }

    #[test]
    fn fixtures_parse() {
        for f in FIXTURES {
            f.scheme();
        }
        assert_eq!(prop14_scheme().level(), 3);
        assert_eq!(even_size_scheme_p().level(), 3);
        assert_eq!(cub_scheme().level(), 1);
    }

    #[test]
    fn prop14_gadgets() {
        assert!(prop14_sentence_eval(&digraph(3, &[(0, 1), (1, 2)], 0)).unwrap());
        assert!(!prop14_sentence_eval(&digraph(4, &[(0, 1), (1, 2), (1, 3)], 0)).unwrap());
        let g = complete_graph(3).to_structure("k3");
        assert!(prop14_sentence_eval(&g).is_err());
    }

    #[test]
    fn probe_refuses_quantified_schemes() {
        let s = parse_scheme("forall y ( free y input(x) output(x) )").unwrap();
        assert_eq!(
            extension_closure_probe(&s, &[], Limits::default()),
            Err(ProblemError::NotLevel1(2))
        );
    }
}
