use crate::model::{Elem, Signature, Structure};

use super::ProblemError;

/// Largest edge count `cub_bruteforce` will enumerate subsets of.
pub const CUB_EDGE_GUARD: usize = 24;

/// The signature of graphs: one binary relation `E`.
pub fn sigma_graph() -> Signature {
    Signature::of(&[("E", 2)], &[])
}

/// Undirected simple reading of a structure with a binary `E`: `{u, v}` is
/// an edge iff `u != v` and `E(u, v)` or `E(v, u)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphView {
    n: usize,
    /// Edges as `(u, v)` with `u < v`, sorted.
    edges: Vec<(Elem, Elem)>,
}

impl GraphView {
    pub fn from_structure(st: &Structure) -> Result<Self, ProblemError> {
        let e = st
            .signature()
            .relation_index("E")
            .filter(|&i| st.signature().arity(i) == 2)
            .ok_or(ProblemError::WrongSignature("a binary relation `E`"))?;
        let mut edges: Vec<(Elem, Elem)> = st
            .relation(e)
            .iter()
            .filter(|t| t[0] != t[1])
            .map(|t| (t[0].min(t[1]), t[0].max(t[1])))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Ok(GraphView {
            n: st.size(),
            edges,
        })
    }

    pub fn new(n: usize, edges: &[(Elem, Elem)]) -> Self {
        let mut edges: Vec<(Elem, Elem)> = edges
            .iter()
            .filter(|(u, v)| u != v)
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        GraphView { n, edges }
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(Elem, Elem)] {
        &self.edges
    }

    pub fn degree(&self, v: Elem) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// The symmetric structure over `E` with this edge set.
    pub fn to_structure(&self, name: &str) -> Structure {
        let tuples = self
            .edges
            .iter()
            .flat_map(|&(u, v)| [vec![u, v], vec![v, u]])
            .collect();
        Structure::from_parts(name, sigma_graph(), self.n.max(2), vec![tuples], vec![])
            .expect("edges lie in the universe")
    }
}

/// Is there a nonempty edge set in which every touched vertex has degree 3?
/// Enumerates all edge subsets, so it refuses graphs with more than
/// [`CUB_EDGE_GUARD`] edges.
pub fn cub_bruteforce(g: &GraphView) -> Result<bool, ProblemError> {
    let m = g.edges.len();
    if m > CUB_EDGE_GUARD {
        return Err(ProblemError::EdgeGuard {
            edges: m,
            limit: CUB_EDGE_GUARD,
        });
    }
    let incident: Vec<u32> = (0..g.n as Elem)
        .map(|v| {
            g.edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    Ok((1u32..1 << m).any(|set| {
        incident
            .iter()
            .all(|&inc| matches!((set & inc).count_ones(), 0 | 3))
    }))
}

/// Independent check for `cub_bruteforce`: decide edges one at a time, never
/// letting a degree pass 3 and closing each vertex (degree 0 or 3) once its
/// last incident edge has been decided.
pub fn cub_backtracking(g: &GraphView) -> bool {
    let mut last = vec![None; g.n];
    for (i, &(u, v)) in g.edges.iter().enumerate() {
        last[u as usize] = Some(i);
        last[v as usize] = Some(i);
    }
    let mut deg = vec![0u8; g.n];

    fn go(g: &GraphView, last: &[Option<usize>], deg: &mut [u8], i: usize, any: bool) -> bool {
        if i == g.edges.len() {
            return any;
        }
        let (u, v) = (g.edges[i].0 as usize, g.edges[i].1 as usize);
        let closes = |x: usize, deg: &[u8]| last[x] != Some(i) || matches!(deg[x], 0 | 3);
        if deg[u] < 3 && deg[v] < 3 {
            deg[u] += 1;
            deg[v] += 1;
            if closes(u, deg) && closes(v, deg) && go(g, last, deg, i + 1, true) {
                return true;
            }
            deg[u] -= 1;
            deg[v] -= 1;
        }
        closes(u, deg) && closes(v, deg) && go(g, last, deg, i + 1, any)
    }

    go(g, &last, &mut deg, 0, false)
}

/// All graphs on `n` labelled vertices, in order of their edge bitmask over
/// the pairs `(u, v)`, `u < v`, taken lexicographically.
pub fn labeled_graphs(n: usize) -> impl Iterator<Item = GraphView> {
    let pairs: Vec<(Elem, Elem)> = (0..n as Elem)
        .flat_map(|u| (u + 1..n as Elem).map(move |v| (u, v)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<(Elem, Elem)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        GraphView::new(n, &edges)
    })
}

/// One representative per isomorphism class of graphs on `n` vertices (the
/// one whose sorted edge list is least). Feasible for `n <= 6`.
pub fn graphs_up_to_iso(n: usize) -> Vec<GraphView> {
    let perms = permutations(n);
    let mut out: Vec<GraphView> = labeled_graphs(n)
        .filter(|g| {
            perms.iter().all(|p| {
                let mut image: Vec<(Elem, Elem)> = g
                    .edges
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (p[u as usize], p[v as usize]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                image.sort_unstable();
                image >= g.edges
            })
        })
        .collect();
    out.sort_by(|a, b| (a.edges.len(), &a.edges).cmp(&(b.edges.len(), &b.edges)));
    out
}

fn permutations(n: usize) -> Vec<Vec<Elem>> {
    let mut p: Vec<Elem> = (0..n as Elem).collect();
    let mut out = vec![p.clone()];
    while crate::engine::next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

pub fn complete_graph(n: usize) -> GraphView {
    let edges: Vec<(Elem, Elem)> = (0..n as Elem)
        .flat_map(|u| (u + 1..n as Elem).map(move |v| (u, v)))
        .collect();
    GraphView::new(n, &edges)
}

pub fn petersen() -> GraphView {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, (i + 2) % 5 + 5));
    }
    GraphView::new(10, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert!(cub_bruteforce(&complete_graph(4)).unwrap());
        assert!(!cub_bruteforce(&complete_graph(3)).unwrap());
        assert!(cub_bruteforce(&petersen()).unwrap());
        assert!(cub_backtracking(&petersen()));
        assert!(!cub_backtracking(&GraphView::new(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)]
        )));
    }

    #[test]
    fn guard_refuses_large_graphs() {
        let err = cub_bruteforce(&complete_graph(8)).unwrap_err();
        assert!(err.to_string().contains("28 edges"));
    }

    #[test]
    fn iso_class_counts() {
        let counts: Vec<usize> = (1..=5).map(|n| graphs_up_to_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }

    #[test]
    fn reading_ignores_loops_and_direction() {
        let st = Structure::from_parts(
            "g",
            sigma_graph(),
            3,
            vec![vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![2, 1]]],
            vec![],
        )
        .unwrap();
        let g = GraphView::from_structure(&st).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }
}
