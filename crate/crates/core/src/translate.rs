//! Compiling a level-1 npsb scheme and a structure into a partitioned net.
//!
//! Places are the partial configurations `(line, valuation)` plus two places
//! per array cell, one meaning "this cell is 0" and one meaning "this cell is
//! max". Partial configurations form `P`; the zero-cell places form the rest
//! of `Q`, so each starts with one token and loses it for good when the cell
//! is set, exactly as a write-once cell behaves. The run starts at
//! `(1, all zero)` and accepts at `(l, all max)`.

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::compile::{CLine, CScheme, CTest, Compiler};
use crate::engine::search::Env;
use crate::engine::{self, Config, EngineError, Limits, Outcome, Semantics};
use crate::lang::{self, LabeledScheme, Mode, Scheme, SchemeError};
use crate::model::{Elem, Expansion, Structure};
use crate::petri::{self, PartitionedNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("scheme is not in translation normal form: {0}")]
    NotNormalized(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("translated net would have {0} places")]
    TooLarge(u128),
}

/// A place of the translated net.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    PartialId { line: usize, vals: Vec<Elem> },
    Cell { index: Vec<Elem>, max: bool },
}

/// Bijection between [`Place`]s and `0..count()`: partial configurations
/// first, line-major with the valuation read as a base-`n` number (first
/// variable most significant), then the zero cells, then the max cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaceCode {
    pub lines: usize,
    pub n: usize,
    pub vars: usize,
    pub dim: usize,
}

impl PlaceCode {
    fn valuations(&self) -> usize {
        self.n.pow(self.vars as u32)
    }

    fn cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `l * n^k + 2 * n^d`.
    pub fn count(&self) -> usize {
        self.lines * self.valuations() + 2 * self.cells()
    }

    fn number(&self, digits: &[Elem]) -> usize {
        digits.iter().fold(0, |acc, &x| acc * self.n + x as usize)
    }

    fn digits(&self, mut x: usize, len: usize) -> Vec<Elem> {
        let mut out = vec![0; len];
        for slot in out.iter_mut().rev() {
            *slot = (x % self.n) as Elem;
            x /= self.n;
        }
        out
    }

    pub fn encode(&self, place: &Place) -> Elem {
        (match place {
            Place::PartialId { line, vals } => (line - 1) * self.valuations() + self.number(vals),
            Place::Cell { index, max } => {
                self.lines * self.valuations()
                    + if *max { self.cells() } else { 0 }
                    + self.number(index)
            }
        }) as Elem
    }

    pub fn decode(&self, x: Elem) -> Place {
        let x = x as usize;
        let graph = self.lines * self.valuations();
        if x < graph {
            Place::PartialId {
                line: x / self.valuations() + 1,
                vals: self.digits(x % self.valuations(), self.vars),
            }
        } else {
            let y = x - graph;
            Place::Cell {
                index: self.digits(y % self.cells(), self.dim),
                max: y >= self.cells(),
            }
        }
    }
}

/// The translated net as a structure, with its place coding.
#[derive(Debug, Clone)]
pub struct Translation {
    pub structure: Structure,
    pub code: PlaceCode,
}

/// Builds the partitioned net for `labeled` on `expansion` with the given
/// reading of 0 and max. The scheme must already be in translation normal
/// form (see `lang::normalize_for_translation`).
pub fn scheme_to_omega_b(
    labeled: &LabeledScheme,
    expansion: &Expansion<'_>,
    zero: Elem,
    max: Elem,
) -> Result<Translation, TranslateError> {
    let s = &labeled.scheme;
    lang::normalize::is_normal(s).map_err(TranslateError::NotNormalized)?;
    let st = expansion.base();
    let n = st.size();
    if zero == max || zero as usize >= n || max as usize >= n {
        return Err(EngineError::BadPair { zero, max, size: n }.into());
    }
    let free: Vec<Elem> = s
        .free_vars
        .iter()
        .map(|v| {
            expansion.get(v).ok_or_else(|| EngineError::Bindings {
                expected: s.free_vars.clone(),
                got: expansion
                    .bindings()
                    .iter()
                    .map(|(n, _)| n.clone())
                    .collect(),
            })
        })
        .collect::<Result<_, _>>()?;
    let CScheme::Program(p) = Compiler::new(st, Semantics::Standard, false).scheme(s)? else {
        unreachable!("normal form is a program")
    };
    let code = PlaceCode {
        lines: p.lines.len(),
        n,
        vars: p.var_names.len(),
        dim: p.arrays[0].dim,
    };
    let total = (code.lines as u128) * (n as u128).pow(code.vars as u32)
        + 2 * (n as u128).pow(code.dim as u32);
    if total > (1 << 24) {
        return Err(TranslateError::TooLarge(total));
    }
    let env = Env::new(st, zero, max, None, Limits::default());

    let graph = code.lines * code.valuations();
    let mut p_rel = Vec::with_capacity(graph);
    let mut q_rel = Vec::with_capacity(code.cells());
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    let mut t3 = Vec::new();
    for x in 0..graph {
        p_rel.push(vec![x as Elem]);
    }
    for c in 0..code.cells() {
        q_rel.push(vec![(graph + c) as Elem]);
    }
    let zero_cell = |ix: usize| (graph + ix) as Elem;
    let max_cell = |ix: usize| (graph + code.cells() + ix) as Elem;
    let place =
        |line: usize, vals: &[Elem]| ((line - 1) * code.valuations() + code.number(vals)) as Elem;

    let mut vals = vec![0 as Elem; code.vars];
    loop {
        for line in 1..=code.lines {
            let u = place(line, &vals);
            let to = |next: usize, vals: &[Elem]| place(next, vals);
            match p.line(line) {
                CLine::Output => {}
                CLine::Input { next } => t1.push(vec![u, to(*next, &vals)]),
                CLine::Assign { var, value, next } => {
                    let mut w = vals.clone();
                    w[*var] = env.term(*value, &vals);
                    t1.push(vec![u, to(*next, &w)]);
                }
                CLine::Guess { var, next } => {
                    let mut w = vals.clone();
                    for g in 0..n as Elem {
                        w[*var] = g;
                        t1.push(vec![u, to(*next, &w)]);
                    }
                }
                CLine::Branch {
                    test: CTest::Qf(f),
                    on_true,
                    on_false,
                } => {
                    let c = Config {
                        line,
                        vals: vals.clone(),
                        cells: Vec::new(),
                    };
                    let target = if env.formula(&p, f, &c) {
                        *on_true
                    } else {
                        *on_false
                    };
                    t1.push(vec![u, to(target, &vals)]);
                }
                CLine::Branch { .. } => unreachable!("normal form has formula tests"),
                CLine::Read {
                    var,
                    array,
                    index,
                    next,
                } => {
                    let ix = env.cell(&p, *array, index, &vals);
                    let mut w = vals.clone();
                    w[*var] = zero;
                    t2.push(vec![u, to(*next, &w), zero_cell(ix)]);
                    w[*var] = max;
                    t2.push(vec![u, to(*next, &w), max_cell(ix)]);
                }
                CLine::SetMax { array, index, next } => {
                    let ix = env.cell(&p, *array, index, &vals);
                    let v = to(*next, &vals);
                    t2.push(vec![u, v, max_cell(ix)]);
                    t3.push(vec![u, v, zero_cell(ix), max_cell(ix)]);
                }
                CLine::Write { .. } => unreachable!("npsb has no value writes"),
            }
        }
        if !engine::search::advance(&mut vals, n) {
            break;
        }
    }

    let mut start = vec![zero; code.vars];
    let mut goal = vec![max; code.vars];
    for (&slot, &v) in p.free_slots.iter().zip(&free) {
        start[slot] = v;
        goal[slot] = v;
    }
    let c = place(1, &start);
    let d = place(code.lines, &goal);
    let structure = Structure::from_parts(
        &format!("{}-net", st.name()),
        petri::sigma_b(),
        code.count(),
        vec![p_rel, q_rel, t1, t2, t3],
        vec![c, d],
    )
    .expect("translation emits well-formed tuples");
    Ok(Translation { structure, code })
}

/// Per-pair comparison of the engine and the translated net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCheck {
    pub zero: Elem,
    pub max: Elem,
    pub engine: Outcome,
    pub net: Outcome,
    pub places: usize,
    pub dropped: usize,
}

impl PairCheck {
    pub fn mismatch(&self) -> bool {
        self.engine != Outcome::ResourceExceeded
            && self.net != Outcome::ResourceExceeded
            && self.engine != self.net
    }

    pub fn inconclusive(&self) -> bool {
        self.engine == Outcome::ResourceExceeded || self.net == Outcome::ResourceExceeded
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub pairs: Vec<PairCheck>,
}

impl EquivalenceReport {
    pub fn mismatches(&self) -> usize {
        self.pairs.iter().filter(|p| p.mismatch()).count()
    }

    pub fn inconclusive(&self) -> usize {
        self.pairs.iter().filter(|p| p.inconclusive()).count()
    }

    pub fn dropped(&self) -> usize {
        self.pairs.iter().map(|p| p.dropped).sum()
    }
}

/// Runs the engine on `scheme` and the Ω_b solver on its translation for
/// every ordered pair `(zero, max)`.
pub fn verify_equivalence(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    limits: Limits,
) -> Result<EquivalenceReport, TranslateError> {
    if scheme.mode != Mode::Npsb {
        return Err(SchemeError::NotNpsb.into());
    }
    let normal = lang::normalize_for_translation(&lang::desugar(scheme))?;
    let labeled = lang::label(&normal)?;
    let pairs = engine::ordered_pairs(expansion.base().size());
    let check = |&(zero, max): &(Elem, Elem)| -> Result<PairCheck, TranslateError> {
        let single = Limits {
            threads: 1,
            ..limits
        };
        let ev = engine::accepts_fixed(scheme, expansion, zero, max, single, Semantics::Standard)?;
        let tr = scheme_to_omega_b(&labeled, expansion, zero, max)?;
        let net = PartitionedNet::from_structure_b(&tr.structure).expect("sigma_b structure");
        let nv = petri::solve_omega_b(&net, single);
        Ok(PairCheck {
            zero,
            max,
            engine: ev.outcome,
            net: nv.outcome,
            places: tr.code.count(),
            dropped: net.dropped.total(),
        })
    };
    let pairs: Vec<PairCheck> = if limits.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(limits.threads)
            .build()
            .expect("thread pool");
        pool.install(|| pairs.par_iter().map(check).collect::<Result<_, _>>())?
    } else {
        pairs.iter().map(check).collect::<Result<_, _>>()?
    };
    Ok(EquivalenceReport { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_scheme;
    use crate::problems::complete_graph;

    fn labeled(src: &str) -> LabeledScheme {
        let s =
            lang::normalize_for_translation(&lang::desugar(&parse_scheme(src).unwrap())).unwrap();
        lang::label(&s).unwrap()
    }

    #[test]
    fn place_code_round_trips() {
        let code = PlaceCode {
            lines: 4,
            n: 3,
            vars: 2,
            dim: 2,
        };
        assert_eq!(code.count(), 4 * 9 + 2 * 9);
        for x in 0..code.count() as Elem {
            assert_eq!(code.encode(&code.decode(x)), x);
        }
        assert_eq!(
            code.decode(0),
            Place::PartialId {
                line: 1,
                vals: vec![0, 0]
            }
        );
    }

    #[test]
    fn minimal_scheme_has_ten_places() {
        let st = complete_graph(2).to_structure("two");
        let tr = scheme_to_omega_b(
            &labeled("input(x) x := max output(x)"),
            &Expansion::plain(&st),
            0,
            1,
        )
        .unwrap();
        assert_eq!(tr.structure.size(), 10);
        let net = PartitionedNet::from_structure_b(&tr.structure).unwrap();
        assert_eq!(net.dropped.total(), 0);
        assert_eq!(
            petri::solve_omega_b(&net, Limits::default()).outcome,
            Outcome::Accepted
        );
    }

    #[test]
    fn refuses_unnormalized_input() {
        let s = parse_scheme("array A/1, B/1 input(x) output(x)").unwrap();
        let st = complete_graph(2).to_structure("two");
        let l = lang::label(&s).unwrap();
        assert!(matches!(
            scheme_to_omega_b(&l, &Expansion::plain(&st), 0, 1),
            Err(TranslateError::NotNormalized(_))
        ));
    }

    #[test]
    fn equivalence_on_a_guessing_scheme() {
        let s = parse_scheme(
            "array A/2 var u, v input(x) guess u; guess v; while !E(u, v) do od \
             A[u, v] := max; u := A[v, u]; if u = 0 then x := max fi output(x)",
        )
        .unwrap();
        let st = complete_graph(3).to_structure("k3");
        let rep = verify_equivalence(&s, &Expansion::plain(&st), Limits::default()).unwrap();
        assert_eq!(rep.pairs.len(), 6);
        assert_eq!(rep.mismatches(), 0);
        assert_eq!(rep.inconclusive(), 0);
        assert!(rep.pairs.iter().all(|p| p.engine == Outcome::Accepted));
    }
}
