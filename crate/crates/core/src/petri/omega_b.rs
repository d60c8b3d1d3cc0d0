//! Deciding reachability of a token on `D` in a partitioned net.
//!
//! Exactly one token lives on the graph places (when `C` is one of them) and
//! every transition moves it. A user resource holds its single token until
//! a `T3` spends it; a system resource only gains tokens, and the number it
//! holds never matters beyond "at least one". So a marking is summarised by
//! the graph token's place, the set of spent users and the set of system
//! resources holding a token. Both sets only grow.

use fixedbitset::FixedBitSet;
use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::engine::{Limits, Outcome};
use crate::model::Elem;

use super::{PartitionedNet, PlaceKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetVerdict {
    pub outcome: Outcome,
    /// Abstract states visited.
    pub states: usize,
    /// Set when the answer follows from the initial marking alone.
    pub note: Option<&'static str>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    token: Elem,
    used: FixedBitSet,
    available: FixedBitSet,
}

enum Step {
    Move(Elem),
    Guarded(Elem, Elem),
    Spend(Elem, Elem, Elem),
}

pub fn solve_omega_b(net: &PartitionedNet, limits: Limits) -> NetVerdict {
    let decided = |outcome, note| NetVerdict {
        outcome,
        states: 0,
        note: Some(note),
    };
    let d_kind = net.kind(net.d);
    if net.kind(net.c) != PlaceKind::Graph {
        // No token ever enters the graph places, so nothing can fire.
        return if net.d == net.c || d_kind == PlaceKind::User {
            decided(Outcome::Accepted, "D is marked initially")
        } else {
            decided(
                Outcome::Rejected,
                "C is not a graph place; no transition can fire",
            )
        };
    }
    if d_kind == PlaceKind::User {
        return decided(Outcome::Accepted, "D is an unused user resource");
    }

    let n = net.size;
    let mut out: Vec<Vec<Step>> = (0..n).map(|_| Vec::new()).collect();
    for &(u, v) in &net.t1 {
        out[u as usize].push(Step::Move(v));
    }
    for &(u, v, i) in &net.t2 {
        out[u as usize].push(Step::Guarded(v, i));
    }
    for &(u, v, i, j) in &net.t3 {
        out[u as usize].push(Step::Spend(v, i, j));
    }

    let start = State {
        token: net.c,
        used: FixedBitSet::with_capacity(n),
        available: FixedBitSet::with_capacity(n),
    };
    let goal = |s: &State| match d_kind {
        PlaceKind::Graph => s.token == net.d,
        _ => s.available.contains(net.d as usize),
    };
    let done = |states, outcome| NetVerdict {
        outcome,
        states,
        note: None,
    };
    if goal(&start) {
        return done(1, Outcome::Accepted);
    }
    let mut seen: IndexSet<State, FxBuildHasher> = IndexSet::default();
    seen.insert(start);
    let mut cursor = 0;
    while cursor < seen.len() {
        let s = seen[cursor].clone();
        cursor += 1;
        for step in &out[s.token as usize] {
            let next = match *step {
                Step::Move(v) => State {
                    token: v,
                    ..s.clone()
                },
                Step::Guarded(v, i) => {
                    let ok = match net.kind(i) {
                        PlaceKind::User => !s.used.contains(i as usize),
                        PlaceKind::System => s.available.contains(i as usize),
                        PlaceKind::Graph => unreachable!("non-conforming tuples are dropped"),
                    };
                    if !ok {
                        continue;
                    }
                    State {
                        token: v,
                        ..s.clone()
                    }
                }
                Step::Spend(v, i, j) => {
                    if s.used.contains(i as usize) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.token = v;
                    t.used.insert(i as usize);
                    t.available.insert(j as usize);
                    t
                }
            };
            if goal(&next) {
                return done(seen.len(), Outcome::Accepted);
            }
            if !seen.contains(&next) {
                if seen.len() >= limits.max_states {
                    return done(seen.len(), Outcome::ResourceExceeded);
                }
                seen.insert(next);
            }
        }
    }
    done(seen.len(), Outcome::Rejected)
}
