//! Exact acceptance for program schemes by explicit-state reachability.

pub(crate) mod compile;
mod eval;
mod lift;
pub(crate) mod search;
mod trace;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::lang::{Body, LabeledScheme, Mode, Scheme, SchemeError};
use crate::model::{Elem, Expansion, ModelError, Structure};

pub use eval::eval_qf;
pub use lift::lift_successor_scheme;
pub use trace::Trace;

use compile::{CLine, CScheme, Compiler};
use search::{Env, Exceeded};

/// How nested test schemes see the caller's arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Semantics {
    /// Tests start from all-zero arrays.
    #[default]
    Standard,
    /// Tests start from a snapshot of the caller's arrays with the same names.
    PassedArrays,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Standard => "standard",
            Semantics::PassedArrays => "passed-arrays",
        })
    }
}

/// Search budget. `max_states` is shared by every search made while deciding
/// one `(zero, max)` pair, nested tests included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
    /// Maximum number of guesses along a run; `usize::MAX` for no bound.
    pub max_depth: usize,
    pub memo_capacity: usize,
    /// Worker threads for pair enumeration; 1 is the sequential reference.
    pub threads: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 5_000_000,
            max_depth: usize::MAX,
            memo_capacity: 1_000_000,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Accepted,
    Rejected,
    ResourceExceeded,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Accepted => "accepted",
            Outcome::Rejected => "rejected",
            Outcome::ResourceExceeded => "resource exceeded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Trace>,
    /// Configurations stored while deciding.
    pub states: usize,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }

    fn bare(outcome: Outcome, states: usize) -> Self {
        Verdict {
            outcome,
            witness: None,
            states,
        }
    }
}

/// One execution state: a line, a value per variable (slot order: io,
/// bound, free) and the flattened array cells in declaration order,
/// row-major within each array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub line: usize,
    pub vals: Vec<Elem>,
    pub cells: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvarianceReport {
    /// Every ordered pair gave the same answer.
    Invariant,
    /// Two pairs disagree; the scheme depends on the choice of 0 and max.
    NotWellFormed {
        accepting: (Elem, Elem),
        rejecting: (Elem, Elem),
    },
    /// Some pairs ran out of budget and the rest agree.
    Inconclusive { exceeded: Vec<(Elem, Elem)> },
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvarianceReport::Invariant => f.write_str("invariant"),
            InvarianceReport::NotWellFormed {
                accepting,
                rejecting,
            } => write!(
                f,
                "not well-formed: accepted with (0,max) = {accepting:?}, rejected with {rejecting:?}"
            ),
            InvarianceReport::Inconclusive { exceeded } => {
                write!(f, "inconclusive: {} pair(s) exceeded limits", exceeded.len())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("relation `{0}` is not in the structure's signature")]
    UnknownRelation(String),
    #[error("constant `{0}` is not in the structure's signature")]
    UnknownConstant(String),
    #[error("relation `{name}` has arity {expected}, used with {got} arguments")]
    RelationArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("zero and max must be distinct elements below {size}, got {zero} and {max}")]
    BadPair { zero: Elem, max: Elem, size: usize },
    #[error("free variables {expected:?} must be bound exactly, got {got:?}")]
    Bindings {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("nested test shares array `{0}` with its caller; arrays are only passed to tests under passed-arrays semantics")]
    ArraysNotPassable(String),
    #[error("array `{0}` has different dimensions in a test and its caller")]
    PassedDimension(String),
    #[error("successor-mode scheme needs an ordering")]
    NeedsOrdering,
    #[error("scheme is not in successor mode")]
    NotSuccessor,
    #[error("ordering must list every element exactly once")]
    BadOrdering,
    #[error("array reads need a configuration; use the engine")]
    ArrayInFormula,
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("line {line} does not exist (scheme has {len})")]
    InvalidLine { line: usize, len: usize },
    #[error("configuration does not fit the scheme")]
    BadConfig,
    #[error("{0} is too large to represent")]
    TooLarge(String),
}

fn check_pair(st: &Structure, zero: Elem, max: Elem) -> Result<(), EngineError> {
    let n = st.size();
    if zero == max || zero as usize >= n || max as usize >= n {
        return Err(EngineError::BadPair { zero, max, size: n });
    }
    Ok(())
}

fn free_values(scheme: &Scheme, expansion: &Expansion<'_>) -> Result<Vec<Elem>, EngineError> {
    let got: Vec<String> = expansion
        .bindings()
        .iter()
        .map(|(n, _)| n.clone())
        .collect();
    let mut sorted_got = got.clone();
    sorted_got.sort();
    let mut expected = scheme.free_vars.clone();
    expected.sort();
    if sorted_got != expected {
        return Err(EngineError::Bindings {
            expected: scheme.free_vars.clone(),
            got,
        });
    }
    Ok(scheme
        .free_vars
        .iter()
        .map(|v| expansion.get(v).expect("checked above"))
        .collect())
}

struct Prepared {
    compiled: CScheme,
    free: Vec<Elem>,
}

fn prepare(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    semantics: Semantics,
) -> Result<Prepared, EngineError> {
    crate::lang::validate(scheme)?;
    let free = free_values(scheme, expansion)?;
    let compiled = Compiler::new(expansion.base(), semantics, scheme.successor).scheme(scheme)?;
    Ok(Prepared { compiled, free })
}

fn decide(
    prep: &Prepared,
    st: &Structure,
    zero: Elem,
    max: Elem,
    next: Option<&[Elem]>,
    limits: Limits,
    want_witness: bool,
) -> Verdict {
    let env = Env::new(st, zero, max, next, limits);
    let result = match &prep.compiled {
        CScheme::Program(p) => env.program(p, &prep.free, None, want_witness).map(|r| {
            let witness = r.choices.and_then(|choices| {
                let steps = env.replay(p, &prep.free, &choices).ok()?;
                Some(Trace::new(p, steps))
            });
            (r.accepted, witness)
        }),
        other => env.scheme(other, &prep.free, None).map(|a| (a, None)),
    };
    let states = env.states_stored();
    match result {
        Ok((true, witness)) => Verdict {
            outcome: Outcome::Accepted,
            witness,
            states,
        },
        Ok((false, _)) => Verdict::bare(Outcome::Rejected, states),
        Err(Exceeded::States | Exceeded::Depth) => Verdict::bare(Outcome::ResourceExceeded, states),
    }
}

/// Decides acceptance for one choice of the constants 0 and max.
pub fn accepts_fixed(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    zero: Elem,
    max: Elem,
    limits: Limits,
    semantics: Semantics,
) -> Result<Verdict, EngineError> {
    if scheme.successor {
        return Err(EngineError::NeedsOrdering);
    }
    check_pair(expansion.base(), zero, max)?;
    let prep = prepare(scheme, expansion, semantics)?;
    Ok(decide(
        &prep,
        expansion.base(),
        zero,
        max,
        None,
        limits,
        false,
    ))
}

/// Like [`accepts_fixed`] but also returns an accepting run when one exists
/// (only for schemes whose body is a program).
pub fn accepts_fixed_with_witness(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    zero: Elem,
    max: Elem,
    limits: Limits,
    semantics: Semantics,
) -> Result<Verdict, EngineError> {
    if scheme.successor {
        return Err(EngineError::NeedsOrdering);
    }
    check_pair(expansion.base(), zero, max)?;
    let prep = prepare(scheme, expansion, semantics)?;
    Ok(decide(
        &prep,
        expansion.base(),
        zero,
        max,
        None,
        limits,
        true,
    ))
}

/// All ordered pairs of distinct elements, lexicographically.
pub fn ordered_pairs(n: usize) -> Vec<(Elem, Elem)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1));
    for z in 0..n as Elem {
        for m in 0..n as Elem {
            if z != m {
                out.push((z, m));
            }
        }
    }
    out
}

/// Decides acceptance for every ordered pair `(zero, max)` and reports
/// whether the answer depends on the pair. The returned verdict is the one
/// for the first pair `(0, 1)`; it carries a witness when `want_witness`.
pub fn accepts(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    limits: Limits,
    semantics: Semantics,
) -> Result<(Verdict, InvarianceReport), EngineError> {
    accepts_inner(scheme, expansion, limits, semantics, false)
}

pub fn accepts_with_witness(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    limits: Limits,
    semantics: Semantics,
) -> Result<(Verdict, InvarianceReport), EngineError> {
    accepts_inner(scheme, expansion, limits, semantics, true)
}

fn accepts_inner(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    limits: Limits,
    semantics: Semantics,
    want_witness: bool,
) -> Result<(Verdict, InvarianceReport), EngineError> {
    if scheme.successor {
        return Err(EngineError::NeedsOrdering);
    }
    let st = expansion.base();
    let prep = prepare(scheme, expansion, semantics)?;
    let pairs = ordered_pairs(st.size());
    let run = |(i, &(z, m)): (usize, &(Elem, Elem))| {
        decide(&prep, st, z, m, None, limits, want_witness && i == 0)
    };
    let verdicts: Vec<Verdict> = if limits.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(limits.threads)
            .build()
            .expect("thread pool");
        pool.install(|| pairs.par_iter().enumerate().map(run).collect())
    } else {
        pairs.iter().enumerate().map(run).collect()
    };
    let report = invariance(&pairs, &verdicts);
    let mut first = verdicts.into_iter().next().expect("n >= 2 gives a pair");
    if let InvarianceReport::Inconclusive { .. } = report {
        first = Verdict::bare(Outcome::ResourceExceeded, first.states);
    }
    Ok((first, report))
}

fn invariance(pairs: &[(Elem, Elem)], verdicts: &[Verdict]) -> InvarianceReport {
    let find = |o: Outcome| {
        pairs
            .iter()
            .zip(verdicts)
            .find(|(_, v)| v.outcome == o)
            .map(|(p, _)| *p)
    };
    if let (Some(a), Some(r)) = (find(Outcome::Accepted), find(Outcome::Rejected)) {
        return InvarianceReport::NotWellFormed {
            accepting: a,
            rejecting: r,
        };
    }
    let exceeded: Vec<_> = pairs
        .iter()
        .zip(verdicts)
        .filter(|(_, v)| v.outcome == Outcome::ResourceExceeded)
        .map(|(p, _)| *p)
        .collect();
    if exceeded.is_empty() {
        InvarianceReport::Invariant
    } else {
        InvarianceReport::Inconclusive { exceeded }
    }
}

fn successor_table(st: &Structure, ordering: &[Elem]) -> Result<Vec<Elem>, EngineError> {
    crate::model::check_permutation(ordering, st.size()).map_err(|_| EngineError::BadOrdering)?;
    let mut next = vec![Elem::MAX; st.size()];
    for w in ordering.windows(2) {
        next[w[0] as usize] = w[1];
    }
    Ok(next)
}

/// Acceptance of a successor-mode scheme where `succ` follows `ordering`,
/// 0 is its first element and max its last.
pub fn accepts_with_successor(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    ordering: &[Elem],
    limits: Limits,
    semantics: Semantics,
) -> Result<Verdict, EngineError> {
    if !scheme.successor {
        return Err(EngineError::NotSuccessor);
    }
    let st = expansion.base();
    let next = successor_table(st, ordering)?;
    let prep = prepare(scheme, expansion, semantics)?;
    let zero = ordering[0];
    let max = *ordering.last().expect("size >= 2");
    Ok(decide(&prep, st, zero, max, Some(&next), limits, false))
}

/// Two orderings under which a successor scheme answers differently.
pub type OrderingConflict = (Vec<Elem>, Vec<Elem>);

/// Re-checks a successor-mode scheme over every ordering of the universe
/// (sizes up to 5). Returns the common verdict, or the first two orderings
/// that disagree.
pub fn successor_invariance(
    scheme: &Scheme,
    expansion: &Expansion<'_>,
    limits: Limits,
    semantics: Semantics,
) -> Result<Result<Outcome, OrderingConflict>, EngineError> {
    let n = expansion.base().size();
    if n > 5 {
        return Err(EngineError::TooLarge(format!("{n}! orderings")));
    }
    let mut ordering: Vec<Elem> = (0..n as Elem).collect();
    let mut first: Option<(Outcome, Vec<Elem>)> = None;
    loop {
        let v = accepts_with_successor(scheme, expansion, &ordering, limits, semantics)?;
        match &first {
            None => first = Some((v.outcome, ordering.clone())),
            Some((o, ord)) if *o != v.outcome => return Ok(Err((ord.clone(), ordering))),
            _ => {}
        }
        if !next_permutation(&mut ordering) {
            break;
        }
    }
    Ok(Ok(first.expect("at least one ordering").0))
}

pub(crate) fn next_permutation(v: &mut [Elem]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// One-step successors of `config`, in exploration order: instruction
/// order, then ascending guessed value. Nested tests are decided with
/// default limits.
pub fn successors(
    labeled: &LabeledScheme,
    expansion: &Expansion<'_>,
    zero: Elem,
    max: Elem,
    config: &Config,
    semantics: Semantics,
) -> Result<Vec<Config>, EngineError> {
    let st = expansion.base();
    check_pair(st, zero, max)?;
    if labeled.scheme.successor {
        return Err(EngineError::NeedsOrdering);
    }
    let prep = prepare(&labeled.scheme, expansion, semantics)?;
    let CScheme::Program(p) = &prep.compiled else {
        unreachable!("labeled schemes are programs")
    };
    if config.line == 0 || config.line > p.lines.len() {
        return Err(EngineError::InvalidLine {
            line: config.line,
            len: p.lines.len(),
        });
    }
    if config.vals.len() != p.var_names.len() || config.cells.len() != p.ncells {
        return Err(EngineError::BadConfig);
    }
    let env = Env::new(st, zero, max, None, Limits::default());
    match p.line(config.line) {
        CLine::Output => Ok(Vec::new()),
        CLine::Guess { var, next } => Ok((0..st.size() as Elem)
            .map(|g| {
                let mut c = config.clone();
                c.vals[*var] = g;
                c.line = *next;
                c
            })
            .collect()),
        _ => {
            let mut c = config.clone();
            env.step(p, &mut c)
                .map_err(|_| EngineError::TooLarge("nested test".into()))?;
            Ok(vec![c])
        }
    }
}

/// The all-zero starting configuration of a labeled program.
pub fn initial_config(
    labeled: &LabeledScheme,
    expansion: &Expansion<'_>,
    zero: Elem,
) -> Result<Config, EngineError> {
    let free = free_values(&labeled.scheme, expansion)?;
    let s = &labeled.scheme;
    let mut vals = vec![zero; s.variables().len()];
    let base = s.io_vars.len() + s.bound_vars.len();
    for (i, v) in free.into_iter().enumerate() {
        vals[base + i] = v;
    }
    let n = expansion.base().size();
    let ncells = s.arrays.iter().map(|a| n.pow(a.dim as u32)).sum();
    Ok(Config {
        line: 1,
        vals,
        cells: vec![zero; ncells],
    })
}

/// Upper bound on the number of configurations of a level-1 program on a
/// structure of size `n`: `l * n^k * (cells)`.
pub fn theoretical_state_count(scheme: &Scheme, n: usize) -> f64 {
    let Body::Program(_) = &scheme.body else {
        return f64::INFINITY;
    };
    let k = scheme.variables().len() as f64;
    let lines = crate::lang::label(&crate::lang::desugar(scheme))
        .map(|l| l.len())
        .unwrap_or(1) as f64;
    let cells: f64 = scheme
        .arrays
        .iter()
        .map(|a| (n as f64).powi(a.dim as i32))
        .sum();
    let per_cell = match scheme.mode {
        Mode::Npsb => 2f64,
        Mode::Npsa => n as f64,
    };
    lines * (n as f64).powf(k) * per_cell.powf(cells)
}
