//! Coverability: the Karp–Miller tree and a bounded explicit search.

use indexmap::IndexSet;
use rustc_hash::{FxBuildHasher, FxHashSet};

use crate::engine::{Limits, Outcome};
use crate::model::Elem;

/// Token count standing for "unboundedly many".
pub const OMEGA: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    /// Input places with multiplicity.
    pub pre: Vec<(Elem, u32)>,
    pub post: Vec<(Elem, u32)>,
}

impl Transition {
    /// Builds a transition from place lists; repeated places add up.
    pub fn new(pre: Vec<Elem>, post: Vec<Elem>) -> Self {
        fn bag(mut xs: Vec<Elem>) -> Vec<(Elem, u32)> {
            xs.sort_unstable();
            let mut out: Vec<(Elem, u32)> = Vec::new();
            for x in xs {
                match out.last_mut() {
                    Some((y, k)) if *y == x => *k += 1,
                    _ => out.push((x, 1)),
                }
            }
            out
        }
        Transition {
            pre: bag(pre),
            post: bag(post),
        }
    }
}

/// A place/transition net with an initial marking and a goal place to cover
/// with one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitNet {
    pub places: usize,
    pub transitions: Vec<Transition>,
    pub initial: Vec<u32>,
    pub goal: Elem,
}

impl ExplicitNet {
    fn enabled(&self, t: &Transition, m: &[u32]) -> bool {
        t.pre.iter().all(|&(p, k)| m[p as usize] >= k)
    }

    fn fire(&self, t: &Transition, m: &[u32]) -> Vec<u32> {
        let mut out = m.to_vec();
        for &(p, k) in &t.pre {
            if out[p as usize] != OMEGA {
                out[p as usize] -= k;
            }
        }
        for &(p, k) in &t.post {
            if out[p as usize] != OMEGA {
                out[p as usize] = out[p as usize].saturating_add(k).min(OMEGA - 1);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverResult {
    pub outcome: Outcome,
    /// True when some node of the tree received an ω.
    pub accelerated: bool,
    pub nodes: usize,
}

/// Decides whether a marking with a token on the goal place is reachable,
/// by building the Karp–Miller tree. A new marking that strictly dominates
/// an ancestor gets ω on every place where it is larger; a marking already
/// present anywhere in the tree is not expanded again.
pub fn solve_omega_a(net: &ExplicitNet, limits: Limits) -> CoverResult {
    let covers = |m: &[u32]| m[net.goal as usize] >= 1;
    let mut accelerated = false;
    if covers(&net.initial) {
        return CoverResult {
            outcome: Outcome::Accepted,
            accelerated,
            nodes: 1,
        };
    }
    // Nodes in creation order; `parent` links give the ancestor chains.
    let mut markings: Vec<Vec<u32>> = vec![net.initial.clone()];
    let mut parent: Vec<usize> = vec![usize::MAX];
    let mut seen: FxHashSet<Vec<u32>> = FxHashSet::default();
    seen.insert(net.initial.clone());
    let mut stack = vec![0usize];
    while let Some(node) = stack.pop() {
        for t in &net.transitions {
            if !net.enabled(t, &markings[node]) {
                continue;
            }
            let mut m = net.fire(t, &markings[node]);
            let mut a = node;
            while a != usize::MAX {
                let anc = &markings[a];
                if anc != &m && anc.iter().zip(&m).all(|(x, y)| x <= y) {
                    for (x, y) in anc.iter().zip(m.iter_mut()) {
                        if x < y && *y != OMEGA {
                            *y = OMEGA;
                            accelerated = true;
                        }
                    }
                }
                a = parent[a];
            }
            if covers(&m) {
                return CoverResult {
                    outcome: Outcome::Accepted,
                    accelerated,
                    nodes: markings.len() + 1,
                };
            }
            if !seen.insert(m.clone()) {
                continue;
            }
            if markings.len() >= limits.max_states {
                return CoverResult {
                    outcome: Outcome::ResourceExceeded,
                    accelerated,
                    nodes: markings.len(),
                };
            }
            markings.push(m);
            parent.push(node);
            stack.push(markings.len() - 1);
        }
    }
    CoverResult {
        outcome: Outcome::Rejected,
        accelerated,
        nodes: markings.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NaiveResult {
    Accepted,
    Rejected,
    /// Some marking was cut off by the token or step cap.
    Inconclusive,
}

/// Breadth-first search over explicit markings with at most `token_cap`
/// tokens per place and at most `step_cap` markings in total.
pub fn naive_marking_search(net: &ExplicitNet, token_cap: u32, step_cap: usize) -> NaiveResult {
    let covers = |m: &[u32]| m[net.goal as usize] >= 1;
    if covers(&net.initial) {
        return NaiveResult::Accepted;
    }
    let mut capped = net.initial.iter().any(|&k| k > token_cap);
    if capped {
        return NaiveResult::Inconclusive;
    }
    let mut seen: IndexSet<Vec<u32>, FxBuildHasher> = IndexSet::default();
    seen.insert(net.initial.clone());
    let mut cursor = 0;
    while cursor < seen.len() {
        let m = seen[cursor].clone();
        cursor += 1;
        for t in &net.transitions {
            if !net.enabled(t, &m) {
                continue;
            }
            let next = net.fire(t, &m);
            if covers(&next) {
                return NaiveResult::Accepted;
            }
            if next.iter().any(|&k| k > token_cap) {
                capped = true;
                continue;
            }
            if !seen.contains(&next) {
                if seen.len() >= step_cap {
                    capped = true;
                    continue;
                }
                seen.insert(next);
            }
        }
    }
    if capped {
        NaiveResult::Inconclusive
    } else {
        NaiveResult::Rejected
    }
}
