//! Petri-net views of structures over two fixed signatures, and solvers.
//!
//! A *partitioned* net (signature `P/1 Q/1 T1/2 T2/3 T3/4; const C D`) has
//! its places split by `P` into graph places and resources; resources in `Q`
//! are user resources (one token, spent at most once) and the rest are
//! system resources (tokens only ever accumulate). A *general* net
//! (signature `T1/2 T3/4 M/1; const C`) has 1-in-1-out and 2-in-2-out
//! transitions and an initial marking given by `M`.

mod coverability;
mod dot;
mod omega_b;

use thiserror::Error;

use crate::model::{Elem, Signature, Structure};

pub use coverability::{
    naive_marking_search, solve_omega_a, CoverResult, ExplicitNet, NaiveResult, Transition,
};
pub use omega_b::{solve_omega_b, NetVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PetriError {
    #[error("expected signature {expected}, found {found}")]
    WrongSignature { expected: String, found: String },
}

/// Signature of partitioned nets.
pub fn sigma_b() -> Signature {
    Signature::of(
        &[("P", 1), ("Q", 1), ("T1", 2), ("T2", 3), ("T3", 4)],
        &["C", "D"],
    )
}

/// Signature of general nets.
pub fn sigma_a() -> Signature {
    Signature::of(&[("T1", 2), ("T3", 4), ("M", 1)], &["C"])
}

fn describe(sig: &Signature) -> String {
    let rels: Vec<String> = sig
        .relations()
        .iter()
        .map(|(n, a)| format!("{n}/{a}"))
        .collect();
    format!(
        "rel {}; const {}",
        rels.join(" "),
        sig.constants().join(" ")
    )
}

/// Same symbols with the same arities, in any order.
fn same_symbols(a: &Signature, b: &Signature) -> bool {
    let mut ra = a.relations().to_vec();
    let mut rb = b.relations().to_vec();
    ra.sort();
    rb.sort();
    let mut ca = a.constants().to_vec();
    let mut cb = b.constants().to_vec();
    ca.sort();
    cb.sort();
    ra == rb && ca == cb
}

fn expect_signature(st: &Structure, want: &Signature) -> Result<(), PetriError> {
    if same_symbols(st.signature(), want) {
        Ok(())
    } else {
        Err(PetriError::WrongSignature {
            expected: describe(want),
            found: describe(st.signature()),
        })
    }
}

/// Class of a place in a partitioned net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Graph,
    User,
    System,
}

/// Tuples discarded because they do not match a transition shape.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dropped {
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
}

impl Dropped {
    pub fn total(&self) -> usize {
        self.t1 + self.t2 + self.t3
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedNet {
    pub size: usize,
    pub p: Vec<bool>,
    pub q: Vec<bool>,
    /// `(u, v)`: token moves from `u` to `v`.
    pub t1: Vec<(Elem, Elem)>,
    /// `(u, v, i)`: move guarded by an unused user or an available system
    /// resource `i`, which keeps its token.
    pub t2: Vec<(Elem, Elem, Elem)>,
    /// `(u, v, i, j)`: move spending user resource `i` and adding a token to
    /// system resource `j`.
    pub t3: Vec<(Elem, Elem, Elem, Elem)>,
    pub c: Elem,
    pub d: Elem,
    pub dropped: Dropped,
}

impl PartitionedNet {
    pub fn from_structure_b(st: &Structure) -> Result<Self, PetriError> {
        expect_signature(st, &sigma_b())?;
        let n = st.size();
        let rel = |name: &str| st.relation_by_name(name).expect("checked signature");
        let mut p = vec![false; n];
        let mut q = vec![false; n];
        for t in rel("P").iter() {
            p[t[0] as usize] = true;
        }
        for t in rel("Q").iter() {
            q[t[0] as usize] = true;
        }
        let graph = |x: Elem| p[x as usize];
        let user = |x: Elem| !p[x as usize] && q[x as usize];
        let system = |x: Elem| !p[x as usize] && !q[x as usize];
        let mut dropped = Dropped::default();
        let mut t1 = Vec::new();
        for t in rel("T1").iter() {
            if graph(t[0]) && graph(t[1]) {
                t1.push((t[0], t[1]));
            } else {
                dropped.t1 += 1;
            }
        }
        let mut t2 = Vec::new();
        for t in rel("T2").iter() {
            if graph(t[0]) && graph(t[1]) && !graph(t[2]) {
                t2.push((t[0], t[1], t[2]));
            } else {
                dropped.t2 += 1;
            }
        }
        let mut t3 = Vec::new();
        for t in rel("T3").iter() {
            if graph(t[0]) && graph(t[1]) && user(t[2]) && system(t[3]) {
                t3.push((t[0], t[1], t[2], t[3]));
            } else {
                dropped.t3 += 1;
            }
        }
        Ok(PartitionedNet {
            size: n,
            p,
            q,
            t1,
            t2,
            t3,
            c: st.constant_by_name("C").expect("checked signature"),
            d: st.constant_by_name("D").expect("checked signature"),
            dropped,
        })
    }

    pub fn kind(&self, x: Elem) -> PlaceKind {
        match (self.p[x as usize], self.q[x as usize]) {
            (true, _) => PlaceKind::Graph,
            (false, true) => PlaceKind::User,
            (false, false) => PlaceKind::System,
        }
    }

    /// Places marked initially: `C` and every user resource, one token each.
    pub fn initial_marking(&self) -> Vec<u32> {
        let mut m = vec![0; self.size];
        m[self.c as usize] = 1;
        for (x, tokens) in m.iter_mut().enumerate() {
            if self.kind(x as Elem) == PlaceKind::User {
                *tokens = 1;
            }
        }
        m
    }

    pub fn user_resources(&self) -> usize {
        (0..self.size)
            .filter(|&x| self.kind(x as Elem) == PlaceKind::User)
            .count()
    }

    /// The same net with explicit pre/post multisets.
    pub fn to_explicit(&self) -> ExplicitNet {
        let mut transitions = Vec::new();
        for &(u, v) in &self.t1 {
            transitions.push(Transition::new(vec![u], vec![v]));
        }
        for &(u, v, i) in &self.t2 {
            transitions.push(Transition::new(vec![u, i], vec![v, i]));
        }
        for &(u, v, i, j) in &self.t3 {
            transitions.push(Transition::new(vec![u, i], vec![v, j]));
        }
        ExplicitNet {
            places: self.size,
            transitions,
            initial: self.initial_marking(),
            goal: self.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralNet {
    pub size: usize,
    pub t1: Vec<(Elem, Elem)>,
    /// `(x1, x2, y1, y2)` with `x1 != x2` and `y1 != y2`.
    pub t3: Vec<(Elem, Elem, Elem, Elem)>,
    pub initial: Vec<bool>,
    pub goal: Elem,
    pub dropped: usize,
}

impl GeneralNet {
    pub fn from_structure_a(st: &Structure) -> Result<Self, PetriError> {
        expect_signature(st, &sigma_a())?;
        let rel = |name: &str| st.relation_by_name(name).expect("checked signature");
        let t1 = rel("T1").iter().map(|t| (t[0], t[1])).collect();
        let mut t3 = Vec::new();
        let mut dropped = 0;
        for t in rel("T3").iter() {
            if t[0] != t[1] && t[2] != t[3] {
                t3.push((t[0], t[1], t[2], t[3]));
            } else {
                dropped += 1;
            }
        }
        let mut initial = vec![false; st.size()];
        for t in rel("M").iter() {
            initial[t[0] as usize] = true;
        }
        Ok(GeneralNet {
            size: st.size(),
            t1,
            t3,
            initial,
            goal: st.constant_by_name("C").expect("checked signature"),
            dropped,
        })
    }

    pub fn to_explicit(&self) -> ExplicitNet {
        let mut transitions = Vec::new();
        for &(x, y) in &self.t1 {
            transitions.push(Transition::new(vec![x], vec![y]));
        }
        for &(x1, x2, y1, y2) in &self.t3 {
            transitions.push(Transition::new(vec![x1, x2], vec![y1, y2]));
        }
        ExplicitNet {
            places: self.size,
            transitions,
            initial: self.initial.iter().map(|&b| b as u32).collect(),
            goal: self.goal,
        }
    }
}

pub use dot::to_dot;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Limits, Outcome};

    /// Places 0..3 are graph places, 4 a user resource, 5 a system resource.
    fn net(t1: &[[Elem; 2]], t2: &[[Elem; 3]], t3: &[[Elem; 4]], d: Elem) -> PartitionedNet {
        let st = Structure::from_parts(
            "n",
            sigma_b(),
            6,
            vec![
                (0..4).map(|x| vec![x]).collect(),
                vec![vec![4]],
                t1.iter().map(|t| t.to_vec()).collect(),
                t2.iter().map(|t| t.to_vec()).collect(),
                t3.iter().map(|t| t.to_vec()).collect(),
            ],
            vec![0, d],
        )
        .unwrap();
        PartitionedNet::from_structure_b(&st).unwrap()
    }

    #[test]
    fn place_kinds_and_initial_marking() {
        let n = net(&[], &[], &[], 3);
        assert_eq!(n.kind(0), PlaceKind::Graph);
        assert_eq!(n.kind(4), PlaceKind::User);
        assert_eq!(n.kind(5), PlaceKind::System);
        assert_eq!(n.initial_marking(), vec![1, 0, 0, 0, 1, 0]);
        assert_eq!(n.user_resources(), 1);
    }

    #[test]
    fn nonconforming_tuples_are_dropped() {
        let n = net(&[[0, 4]], &[[0, 1, 2]], &[[0, 1, 5, 4]], 3);
        assert_eq!(
            n.dropped,
            Dropped {
                t1: 1,
                t2: 1,
                t3: 1
            }
        );
        assert!(n.t1.is_empty() && n.t2.is_empty() && n.t3.is_empty());
    }

    #[test]
    fn single_move_reaches_d() {
        let n = net(&[[0, 3]], &[], &[], 3);
        assert_eq!(
            solve_omega_b(&n, Limits::default()).outcome,
            Outcome::Accepted
        );
        let n = net(&[[0, 1]], &[], &[], 3);
        assert_eq!(
            solve_omega_b(&n, Limits::default()).outcome,
            Outcome::Rejected
        );
    }

    #[test]
    fn users_are_spent_once_and_systems_accumulate() {
        // 0 -> 1 spending user 4 into system 5; 1 -> 0 freely; 0 -> 3 needs
        // user 4 still unused.
        let spend = net(&[[1, 0]], &[[0, 3, 4]], &[[0, 1, 4, 5]], 3);
        assert_eq!(
            solve_omega_b(&spend, Limits::default()).outcome,
            Outcome::Accepted
        );
        let after = net(&[[1, 2]], &[[2, 3, 4]], &[[0, 1, 4, 5]], 3);
        assert_eq!(
            solve_omega_b(&after, Limits::default()).outcome,
            Outcome::Rejected
        );
        let system = net(&[[1, 2]], &[[2, 3, 5]], &[[0, 1, 4, 5]], 3);
        assert_eq!(
            solve_omega_b(&system, Limits::default()).outcome,
            Outcome::Accepted
        );
        let d_system = net(&[], &[], &[[0, 1, 4, 5]], 5);
        assert_eq!(
            solve_omega_b(&d_system, Limits::default()).outcome,
            Outcome::Accepted
        );
    }

    #[test]
    fn trivial_cases_carry_a_note() {
        let d_user = net(&[], &[], &[], 4);
        let v = solve_omega_b(&d_user, Limits::default());
        assert_eq!(v.outcome, Outcome::Accepted);
        assert!(v.note.is_some());
    }

    #[test]
    fn explicit_search_agrees_on_small_nets() {
        for n in [
            net(&[[0, 3]], &[], &[], 3),
            net(&[[1, 0]], &[[0, 3, 4]], &[[0, 1, 4, 5]], 3),
            net(&[[1, 2]], &[[2, 3, 4]], &[[0, 1, 4, 5]], 3),
        ] {
            let fast = solve_omega_b(&n, Limits::default()).outcome;
            let naive = naive_marking_search(&n.to_explicit(), 4, 10_000);
            assert_eq!(fast == Outcome::Accepted, naive == NaiveResult::Accepted);
        }
    }

    #[test]
    fn signature_is_checked() {
        let st = crate::problems::complete_graph(3).to_structure("k3");
        assert!(matches!(
            PartitionedNet::from_structure_b(&st),
            Err(PetriError::WrongSignature { .. })
        ));
        assert!(GeneralNet::from_structure_a(&st).is_err());
    }

    #[test]
    fn general_nets_conserve_tokens() {
        let st = Structure::from_parts(
            "a",
            sigma_a(),
            4,
            vec![
                vec![vec![0, 1]],
                vec![vec![1, 2, 3, 3], vec![0, 0, 1, 2], vec![1, 2, 2, 3]],
                vec![vec![0], vec![2]],
            ],
            vec![3],
        )
        .unwrap();
        let n = GeneralNet::from_structure_a(&st).unwrap();
        assert_eq!(n.dropped, 2);
        let explicit = n.to_explicit();
        for t in &explicit.transitions {
            let sum = |side: &[(Elem, u32)]| side.iter().map(|&(_, k)| k).sum::<u32>();
            assert_eq!(sum(&t.pre), sum(&t.post));
        }
        let v = solve_omega_a(&explicit, Limits::default());
        assert_eq!(v.outcome, Outcome::Accepted);
        assert!(!v.accelerated);
    }

    #[test]
    fn dot_output() {
        let d = to_dot(&net(&[[0, 3]], &[], &[], 3).to_explicit(), "n");
        assert!(d.starts_with("digraph \"n\""));
        assert!(d.contains("p3 [shape=doublecircle"));
        assert!(d.contains("p0 -> t0"));
    }
}
