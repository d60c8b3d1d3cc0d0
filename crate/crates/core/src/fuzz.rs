//! Seeded random corpora and the property suites run over them.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`. A suite draws one
//! 64-bit seed per case from a generator seeded with the suite seed, then
//! builds the case from its own generator, so cases can be run in any order
//! or in parallel and still come out identical.

use std::fmt::{self, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{self, Limits, Outcome, Semantics};
use crate::lang::{self, ArrayDecl, Body, Formula, Instr, Mode, Operand, Scheme, Term, Test};
use crate::model::{Elem, Expansion, Signature, Structure};
use crate::petri;
use crate::problems;
use crate::translate;

/// Signature of the random structures: a binary and a unary relation.
pub fn sigma_fuzz() -> Signature {
    Signature::of(&[("E", 2), ("P", 1)], &[])
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape bounds for random schemes.
#[derive(Debug, Clone, Copy)]
pub struct SchemeShape {
    /// Source lines, counting `input` and `output`.
    pub max_lines: usize,
    pub max_vars: usize,
    pub max_dim: usize,
    pub max_arrays: usize,
}

impl Default for SchemeShape {
    fn default() -> Self {
        SchemeShape {
            max_lines: 8,
            max_vars: 3,
            max_dim: 2,
            max_arrays: 2,
        }
    }
}

struct SchemeGen<'a> {
    rng: &'a mut ChaCha8Rng,
    vars: Vec<String>,
    arrays: Vec<ArrayDecl>,
}

impl SchemeGen<'_> {
    fn term(&mut self) -> Term {
        match self.rng.gen_range(0..6) {
            0 => Term::Zero,
            1 => Term::Max,
            _ => Term::var(self.vars.choose(self.rng).expect("nonempty")),
        }
    }

    fn index(&mut self, dim: usize) -> Vec<Term> {
        (0..dim).map(|_| self.term()).collect()
    }

    fn atom(&mut self) -> Formula {
        match self.rng.gen_range(0..8) {
            0 | 1 => Formula::rel("E", vec![self.term(), self.term()]),
            2 => Formula::rel("P", vec![self.term()]),
            3 if !self.arrays.is_empty() => {
                let a = self.arrays.choose(self.rng).expect("nonempty").clone();
                Formula::Eq(
                    Operand::Array {
                        index: self.index(a.dim),
                        name: a.name,
                    },
                    Operand::Term(Term::Max),
                )
            }
            4 => Formula::True,
            _ => Formula::eq(self.term(), self.term()),
        }
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.5) {
            let a = self.atom();
            return if self.rng.gen_bool(0.3) {
                Formula::not(a)
            } else {
                a
            };
        }
        let (a, b) = (self.formula(depth - 1), self.formula(depth - 1));
        if self.rng.gen_bool(0.5) {
            Formula::and(a, b)
        } else {
            Formula::or(a, b)
        }
    }

    /// A block of at most `budget` lines; returns the lines used.
    fn block(&mut self, budget: usize, nest: usize) -> (Vec<Instr>, usize) {
        let mut out = Vec::new();
        let mut used = 0;
        let want = self.rng.gen_range(1..=budget.max(1)).min(budget);
        while used < want {
            let left = budget - used;
            let kind = self.rng.gen_range(0..10);
            let instr = match kind {
                // `while ... do` and `od` take a line each, as do `if`,
                // `else` and `fi`.
                0 | 1 if nest < 2 && left >= 3 => {
                    let (body, k) = self.block((left - 2).min(3), nest + 1);
                    used += k + 1;
                    Instr::While {
                        test: Test::Formula(self.formula(1)),
                        body,
                    }
                }
                2 if nest < 2 && left >= 3 => {
                    let (then_body, k) = self.block((left - 2).min(3), nest + 1);
                    used += k + 1;
                    let else_body = if left - 2 - k >= 2 && self.rng.gen_bool(0.5) {
                        let (e, k2) = self.block((left - 3 - k).min(2), nest + 1);
                        used += k2 + 1;
                        Some(e)
                    } else {
                        None
                    };
                    Instr::If {
                        test: Test::Formula(self.formula(1)),
                        then_body,
                        else_body,
                    }
                }
                3 | 4 if !self.arrays.is_empty() => {
                    let a = self.arrays.choose(self.rng).expect("nonempty").clone();
                    if self.rng.gen_bool(0.5) {
                        Instr::SetMax {
                            index: self.index(a.dim),
                            array: a.name,
                        }
                    } else {
                        Instr::Read {
                            var: self.vars.choose(self.rng).expect("nonempty").clone(),
                            index: self.index(a.dim),
                            array: a.name,
                        }
                    }
                }
                5 | 6 => Instr::Guess {
                    var: self.vars.choose(self.rng).expect("nonempty").clone(),
                },
                _ => Instr::Assign {
                    var: self.vars.choose(self.rng).expect("nonempty").clone(),
                    value: self.term(),
                },
            };
            used += 1;
            out.push(instr);
        }
        (out, used)
    }
}

/// A random level-1 npsb scheme over [`sigma_fuzz`].
pub fn random_scheme(rng: &mut ChaCha8Rng, shape: SchemeShape) -> Scheme {
    let nvars = rng.gen_range(1..=shape.max_vars);
    let vars: Vec<String> = (1..=nvars).map(|i| format!("x{i}")).collect();
    let nio = rng.gen_range(1..=nvars.min(2));
    let narrays = rng.gen_range(0..=shape.max_arrays);
    let arrays: Vec<ArrayDecl> = (0..narrays)
        .map(|i| ArrayDecl {
            name: format!("A{}", i + 1),
            dim: rng.gen_range(1..=shape.max_dim),
        })
        .collect();
    let mut g = SchemeGen {
        rng,
        vars: vars.clone(),
        arrays: arrays.clone(),
    };
    let (body, _) = g.block(shape.max_lines.saturating_sub(2).max(1), 0);
    let s = Scheme {
        mode: Mode::Npsb,
        successor: false,
        io_vars: vars[..nio].to_vec(),
        free_vars: Vec::new(),
        bound_vars: vars[nio..].to_vec(),
        arrays,
        body: Body::Program(body),
    };
    lang::validate(&s).expect("generator emits valid schemes");
    s
}

/// Source lines of a program: instructions plus `input` and `output`.
pub fn source_lines(s: &Scheme) -> usize {
    let mut n = 2;
    if let Some(p) = s.program() {
        lang::visit_instrs(p, &mut |i| {
            n += match i {
                Instr::If {
                    else_body: Some(_), ..
                } => 3,
                Instr::If { .. } | Instr::While { .. } => 2,
                _ => 1,
            }
        });
    }
    n
}

/// A random structure over [`sigma_fuzz`]; each tuple is present with
/// probability `density`.
pub fn random_structure(rng: &mut ChaCha8Rng, size: usize, density: f64) -> Structure {
    let n = size as Elem;
    let e = (0..n)
        .flat_map(|u| (0..n).map(move |v| vec![u, v]))
        .filter(|_| rng.gen_bool(density))
        .collect::<Vec<_>>();
    let p = (0..n)
        .filter(|_| rng.gen_bool(density))
        .map(|u| vec![u])
        .collect();
    Structure::from_parts(&format!("r{size}"), sigma_fuzz(), size, vec![e, p], vec![])
        .expect("tuples in range")
}

/// A superstructure of `a` with `extra` new elements; tuples touching a new
/// element are present with probability `density`.
pub fn random_extension(
    rng: &mut ChaCha8Rng,
    a: &Structure,
    extra: usize,
    density: f64,
) -> Structure {
    let old = a.size() as Elem;
    let n = old + extra as Elem;
    let mut e: Vec<Vec<Elem>> = a.relation(0).iter().map(<[Elem]>::to_vec).collect();
    let mut p: Vec<Vec<Elem>> = a.relation(1).iter().map(<[Elem]>::to_vec).collect();
    for u in 0..n {
        for v in 0..n {
            if (u >= old || v >= old) && rng.gen_bool(density) {
                e.push(vec![u, v]);
            }
        }
        if u >= old && rng.gen_bool(density) {
            p.push(vec![u]);
        }
    }
    Structure::from_parts(
        &format!("{}+{extra}", a.name()),
        sigma_fuzz(),
        n as usize,
        vec![e, p],
        vec![],
    )
    .expect("tuples in range")
}

/// A random structure over the partitioned-net signature.
pub fn random_net_b(rng: &mut ChaCha8Rng, size: usize) -> Structure {
    let n = size as Elem;
    let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..n);
    let p: Vec<Vec<Elem>> = (0..n)
        .filter(|_| rng.gen_bool(0.5))
        .map(|x| vec![x])
        .collect();
    let q: Vec<Vec<Elem>> = (0..n)
        .filter(|_| rng.gen_bool(0.4))
        .map(|x| vec![x])
        .collect();
    let t1 = (0..rng.gen_range(0..=size))
        .map(|_| vec![pick(rng), pick(rng)])
        .collect();
    let t2 = (0..rng.gen_range(0..=size))
        .map(|_| vec![pick(rng), pick(rng), pick(rng)])
        .collect();
    let t3 = (0..rng.gen_range(0..=size))
        .map(|_| vec![pick(rng), pick(rng), pick(rng), pick(rng)])
        .collect();
    let consts = vec![pick(rng), pick(rng)];
    Structure::from_parts(
        "net-b",
        petri::sigma_b(),
        size,
        vec![p, q, t1, t2, t3],
        consts,
    )
    .expect("tuples in range")
}

/// A random structure over the general-net signature.
pub fn random_net_a(rng: &mut ChaCha8Rng, size: usize) -> Structure {
    let n = size as Elem;
    let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..n);
    let t1 = (0..rng.gen_range(0..=size))
        .map(|_| vec![pick(rng), pick(rng)])
        .collect();
    let t3 = (0..rng.gen_range(0..=size))
        .map(|_| vec![pick(rng), pick(rng), pick(rng), pick(rng)])
        .collect();
    let m = (0..n)
        .filter(|_| rng.gen_bool(0.4))
        .map(|x| vec![x])
        .collect();
    Structure::from_parts(
        "net-a",
        petri::sigma_a(),
        size,
        vec![t1, t3, m],
        vec![pick(rng)],
    )
    .expect("tuples in range")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Invariance,
    Extension,
    Isomorphism,
    Translate,
    Nets,
}

impl Suite {
    pub const DEFAULT: [Suite; 4] = [
        Suite::Invariance,
        Suite::Extension,
        Suite::Isomorphism,
        Suite::Translate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Invariance => "invariance",
            Suite::Extension => "extension",
            Suite::Isomorphism => "isomorphism",
            Suite::Translate => "translate",
            Suite::Nets => "nets",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        [Suite::Nets]
            .into_iter()
            .chain(Suite::DEFAULT)
            .find(|x| x.name() == s)
    }

    pub fn default_count(self) -> usize {
        match self {
            Suite::Invariance => 40,
            Suite::Extension => 200,
            Suite::Isomorphism => 100,
            Suite::Translate => 100,
            Suite::Nets => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub seed: u64,
    /// Cases per suite; `None` uses each suite's default.
    pub count: Option<usize>,
    pub limits: Limits,
}

/// Result of one case.
#[derive(Debug, Clone, PartialEq, Eq)]
enum CaseResult {
    Pass,
    Inconclusive,
    Violation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub inconclusive: usize,
    /// `(case, seed, description)`.
    pub violations: Vec<(usize, u64, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl FuzzReport {
    pub fn violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations.len()).sum()
    }

    /// Plain-text report; depends only on the seed, the counts and the limits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fuzz seed {}", self.seed);
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<12} cases {:>4}  violations {:>3}  inconclusive {:>3}",
                s.suite.name(),
                s.cases,
                s.violations.len(),
                s.inconclusive
            );
            for (i, seed, msg) in &s.violations {
                let _ = writeln!(out, "  case {i} (seed {seed:#018x}): {msg}");
            }
        }
        let _ = writeln!(out, "total violations {}", self.violations());
        out
    }
}

pub fn run(suites: &[Suite], config: FuzzConfig) -> FuzzReport {
    let mut reports = Vec::new();
    for &suite in suites {
        // Each suite gets its own seed stream, so selecting suites does not
        // shift the others.
        let suite_seed = config.seed ^ (suite as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let count = config.count.unwrap_or(suite.default_count());
        let mut seeder = rng(suite_seed);
        let seeds: Vec<u64> = (0..count).map(|_| seeder.gen()).collect();
        let single = Limits {
            threads: 1,
            ..config.limits
        };
        let case = |&s: &u64| run_case(suite, s, single);
        let results: Vec<CaseResult> = if config.limits.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.limits.threads)
                .build()
                .expect("thread pool");
            pool.install(|| seeds.par_iter().map(case).collect())
        } else {
            seeds.iter().map(case).collect()
        };
        let mut report = SuiteReport {
            suite,
            cases: count,
            inconclusive: 0,
            violations: Vec::new(),
        };
        for (i, (r, &s)) in results.into_iter().zip(&seeds).enumerate() {
            match r {
                CaseResult::Pass => {}
                CaseResult::Inconclusive => report.inconclusive += 1,
                CaseResult::Violation(msg) => report.violations.push((i, s, msg)),
            }
        }
        reports.push(report);
    }
    FuzzReport {
        seed: config.seed,
        suites: reports,
    }
}

fn run_case(suite: Suite, seed: u64, limits: Limits) -> CaseResult {
    let mut r = rng(seed);
    match suite {
        Suite::Invariance => invariance_case(&mut r, limits),
        Suite::Extension => extension_case(&mut r, limits),
        Suite::Isomorphism => isomorphism_case(&mut r, limits),
        Suite::Translate => translate_case(&mut r, limits),
        Suite::Nets => nets_case(&mut r, limits),
    }
}

/// A shipped fixture that should not depend on 0 and max, on a random
/// structure of its own signature with at most 4 elements.
fn invariance_case(r: &mut ChaCha8Rng, limits: Limits) -> CaseResult {
    let candidates: Vec<&problems::Fixture> = problems::FIXTURES
        .iter()
        .filter(|f| f.invariant && !f.scheme().successor)
        .collect();
    let f = *candidates.choose(r).expect("fixtures");
    let scheme = f.scheme();
    let size = r.gen_range(2..=4);
    let st = if f.name == "prop14" {
        let n = size as Elem;
        let e = (0..n)
            .flat_map(|u| (0..n).map(move |v| vec![u, v]))
            .filter(|_| r.gen_bool(0.4))
            .collect();
        Structure::from_parts(
            "d",
            problems::sigma_prop14(),
            size,
            vec![e],
            vec![r.gen_range(0..n)],
        )
        .expect("tuples in range")
    } else {
        let g = random_structure(r, size, 0.5);
        let e = g.relation(0).iter().map(<[Elem]>::to_vec).collect();
        Structure::from_parts("g", problems::sigma_graph(), size, vec![e], vec![])
            .expect("tuples in range")
    };
    match engine::accepts(&scheme, &Expansion::plain(&st), limits, f.semantics) {
        Ok((_, engine::InvarianceReport::Invariant)) => CaseResult::Pass,
        Ok((_, engine::InvarianceReport::Inconclusive { .. })) => CaseResult::Inconclusive,
        Ok((_, report)) => CaseResult::Violation(format!("fixture {}: {report}", f.name)),
        Err(e) => CaseResult::Violation(format!("fixture {}: {e}", f.name)),
    }
}

fn extension_case(r: &mut ChaCha8Rng, limits: Limits) -> CaseResult {
    let scheme = random_scheme(r, SchemeShape::default());
    let size = r.gen_range(2..=3);
    let a = random_structure(r, size, 0.5);
    let extra = r.gen_range(1..=2);
    let b = random_extension(r, &a, extra, 0.5);
    match problems::extension_closure_probe(&scheme, &[(a, b)], limits) {
        Ok(rep) if !rep.violations.is_empty() => CaseResult::Violation(format!(
            "accepted on A but not on B:\n{}",
            lang::print(&scheme)
        )),
        Ok(rep) if !rep.exceeded.is_empty() => CaseResult::Inconclusive,
        Ok(_) => CaseResult::Pass,
        Err(e) => CaseResult::Violation(e.to_string()),
    }
}

/// Renaming the elements (and 0 and max with them) must not change the
/// verdict.
fn isomorphism_case(r: &mut ChaCha8Rng, limits: Limits) -> CaseResult {
    let scheme = random_scheme(r, SchemeShape::default());
    let size = r.gen_range(2..=4);
    let a = random_structure(r, size, 0.5);
    let mut perm: Vec<Elem> = (0..size as Elem).collect();
    perm.shuffle(r);
    let b = a.apply_permutation(&perm).expect("permutation");
    let zero = r.gen_range(0..size as Elem);
    let max = loop {
        let m = r.gen_range(0..size as Elem);
        if m != zero {
            break m;
        }
    };
    let run = |st: &Structure, z, m| {
        engine::accepts_fixed(
            &scheme,
            &Expansion::plain(st),
            z,
            m,
            limits,
            Semantics::Standard,
        )
        .map(|v| v.outcome)
    };
    match (
        run(&a, zero, max),
        run(&b, perm[zero as usize], perm[max as usize]),
    ) {
        (Ok(x), Ok(y)) if x == y => CaseResult::Pass,
        (Ok(Outcome::ResourceExceeded), Ok(_)) | (Ok(_), Ok(Outcome::ResourceExceeded)) => {
            CaseResult::Inconclusive
        }
        (Ok(x), Ok(y)) => CaseResult::Violation(format!(
            "{x} on the original, {y} on the copy renamed by {perm:?}:\n{}",
            lang::print(&scheme)
        )),
        (Err(e), _) | (_, Err(e)) => CaseResult::Violation(e.to_string()),
    }
}

fn translate_case(r: &mut ChaCha8Rng, limits: Limits) -> CaseResult {
    let scheme = random_scheme(r, SchemeShape::default());
    let size = r.gen_range(2..=3);
    let st = random_structure(r, size, 0.5);
    match translate::verify_equivalence(&scheme, &Expansion::plain(&st), limits) {
        Ok(rep) if rep.mismatches() > 0 => {
            let bad: Vec<String> = rep
                .pairs
                .iter()
                .filter(|p| p.mismatch())
                .map(|p| format!("({}, {}): engine {} net {}", p.zero, p.max, p.engine, p.net))
                .collect();
            CaseResult::Violation(format!("{}\n{}", bad.join("; "), lang::print(&scheme)))
        }
        Ok(rep) if rep.inconclusive() > 0 => CaseResult::Inconclusive,
        Ok(_) => CaseResult::Pass,
        Err(translate::TranslateError::TooLarge(_)) => CaseResult::Inconclusive,
        Err(e) => CaseResult::Violation(e.to_string()),
    }
}

/// Both net solvers against the bounded explicit search.
fn nets_case(r: &mut ChaCha8Rng, limits: Limits) -> CaseResult {
    let size_b = r.gen_range(2..=6);
    let net = petri::PartitionedNet::from_structure_b(&random_net_b(r, size_b)).expect("sigma_b");
    let fast = petri::solve_omega_b(&net, limits).outcome;
    let naive = petri::naive_marking_search(&net.to_explicit(), 6, 200_000);
    if let Some(msg) = disagreement("omega-b", fast, naive) {
        return CaseResult::Violation(msg);
    }
    let size_a = r.gen_range(2..=5);
    let net = petri::GeneralNet::from_structure_a(&random_net_a(r, size_a)).expect("sigma_a");
    let fast = petri::solve_omega_a(&net.to_explicit(), limits).outcome;
    let naive = petri::naive_marking_search(&net.to_explicit(), 6, 200_000);
    match disagreement("omega-a", fast, naive) {
        Some(msg) => CaseResult::Violation(msg),
        None => CaseResult::Pass,
    }
}

fn disagreement(what: &str, fast: Outcome, naive: petri::NaiveResult) -> Option<String> {
    let naive = match naive {
        petri::NaiveResult::Accepted => Outcome::Accepted,
        petri::NaiveResult::Rejected => Outcome::Rejected,
        petri::NaiveResult::Inconclusive => return None,
    };
    (fast != Outcome::ResourceExceeded && fast != naive)
        .then(|| format!("{what}: solver says {fast}, explicit search says {naive}"))
}
