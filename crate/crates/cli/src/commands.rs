use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use schemata::engine::{self, InvarianceReport, Limits, Outcome, Semantics};
use schemata::fuzz::{self, FuzzConfig, Suite};
use schemata::lang::{self, Mode, Scheme};
use schemata::model::{parse_structure, Elem, Expansion, Structure};
use schemata::petri::{self, GeneralNet, NaiveResult, PartitionedNet};
use schemata::translate;

use crate::{exit, limits, Cli, Command, LintAs, ProblemArg, SemanticsArg};

/// Above this many potential configurations an npsa run gets a warning.
const NPSA_WARN_STATES: f64 = 1e8;

pub fn dispatch(cli: Cli) -> Result<u8> {
    let env = std::env::var(limits::ENV).ok();
    let limits = limits::resolve(&cli.limits, env.as_deref())?;
    match cli.command {
        Command::Run {
            scheme,
            structure,
            witness,
            semantics,
            succ,
            free,
        } => run(
            &scheme,
            &structure,
            witness,
            semantics,
            succ.as_deref(),
            free.as_deref(),
            limits,
        ),
        Command::Translate {
            scheme,
            structure,
            output,
            pair,
            free,
            verify,
            dot,
        } => translate_cmd(
            &scheme,
            &structure,
            output.as_deref(),
            pair.as_deref(),
            free.as_deref(),
            verify,
            dot,
            limits,
        ),
        Command::Solve {
            net,
            problem,
            oracle,
            token_cap,
        } => solve(&net, problem, oracle, token_cap, limits),
        Command::Fuzz {
            seed,
            suites,
            count,
            output,
        } => fuzz_cmd(seed, &suites, count, output.as_deref(), limits),
        Command::Fmt { scheme, check } => fmt(&scheme, check),
        Command::Lint { structure, kind } => lint(&structure, kind),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_scheme(path: &Path) -> Result<Scheme> {
    lang::parse_scheme(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_structure(path: &Path) -> Result<Structure> {
    parse_structure(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// `x=3,y=0`.
fn parse_bindings(text: Option<&str>) -> Result<Vec<(String, Elem)>> {
    let Some(text) = text else {
        return Ok(Vec::new());
    };
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .with_context(|| format!("--free: expected name=value, got `{item}`"))?;
            let value = value
                .trim()
                .parse()
                .with_context(|| format!("--free: `{name}` needs an element"))?;
            Ok((name.trim().to_string(), value))
        })
        .collect()
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Accepted => exit::ACCEPTED,
        Outcome::Rejected => exit::REJECTED,
        Outcome::ResourceExceeded => exit::UNDECIDED,
    }
}

fn run(
    scheme_path: &Path,
    structure_path: &Path,
    witness: bool,
    semantics: SemanticsArg,
    succ: Option<&Path>,
    free: Option<&str>,
    limits: Limits,
) -> Result<u8> {
    let scheme = load_scheme(scheme_path)?;
    let st = load_structure(structure_path)?;
    let bindings = parse_bindings(free)?;
    let expansion = Expansion::new(&st, bindings)?;
    let semantics = match semantics {
        SemanticsArg::Standard => Semantics::Standard,
        SemanticsArg::PassedArrays => Semantics::PassedArrays,
    };
    if scheme.mode == Mode::Npsa {
        let bound = engine::theoretical_state_count(&scheme, st.size());
        if bound > NPSA_WARN_STATES {
            eprintln!(
                "warning: npsa scheme has up to {bound:.2e} configurations on this structure; \
                 expect to hit --max-states"
            );
        }
    }

    if scheme.successor {
        let ordering: Vec<Elem> = match succ {
            Some(path) => read(path)?
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .with_context(|| format!("bad element `{s}` in ordering"))
                })
                .collect::<Result<_>>()?,
            None => (0..st.size() as Elem).collect(),
        };
        let verdict =
            engine::accepts_with_successor(&scheme, &expansion, &ordering, limits, semantics)?;
        println!("verdict: {}", verdict.outcome);
        println!("ordering: {ordering:?}");
        println!("states: {}", verdict.states);
        if witness {
            println!("witness: not available for successor schemes");
        }
        return Ok(outcome_code(verdict.outcome));
    }
    if succ.is_some() {
        bail!("--succ given but the scheme does not use `succ`");
    }

    let (verdict, report) = if witness {
        engine::accepts_with_witness(&scheme, &expansion, limits, semantics)?
    } else {
        engine::accepts(&scheme, &expansion, limits, semantics)?
    };
    let pairs = engine::ordered_pairs(st.size());
    println!("verdict: {}", verdict.outcome);
    println!("invariance: {report} ({} pairs)", pairs.len());
    println!("states: {}", verdict.states);
    if let Some(trace) = &verdict.witness {
        let (zero, max) = pairs[0];
        println!("witness (0 = {zero}, max = {max}):");
        print!("{}", trace.to_text(zero));
    }
    Ok(match report {
        InvarianceReport::NotWellFormed { .. } => exit::UNDECIDED,
        _ => outcome_code(verdict.outcome),
    })
}

#[allow(clippy::too_many_arguments)]
fn translate_cmd(
    scheme_path: &Path,
    structure_path: &Path,
    output: Option<&Path>,
    pair: Option<&str>,
    free: Option<&str>,
    verify: bool,
    dot: bool,
    limits: Limits,
) -> Result<u8> {
    let scheme = load_scheme(scheme_path)?;
    if scheme.mode != Mode::Npsb {
        bail!("translate needs an npsb scheme");
    }
    if scheme.level() != 1 {
        bail!(
            "translate needs a level-1 scheme, this one is level {}",
            scheme.level()
        );
    }
    if scheme.successor {
        bail!("translate does not handle `succ`; lift the scheme first");
    }
    let st = load_structure(structure_path)?;
    let bindings = parse_bindings(free)?;
    let expansion = Expansion::new(&st, bindings)?;
    let (zero, max) = match pair {
        Some(text) => {
            let (z, m) = text.split_once(',').context("--pair: expected ZERO,MAX")?;
            (z.trim().parse()?, m.trim().parse()?)
        }
        None => (0, st.size() as Elem - 1),
    };
    let normal = lang::normalize_for_translation(&lang::desugar(&scheme))?;
    let labeled = lang::label(&normal)?;
    let tr = translate::scheme_to_omega_b(&labeled, &expansion, zero, max)?;
    let text = if dot {
        let net = PartitionedNet::from_structure_b(&tr.structure)?;
        petri::to_dot(&net.to_explicit(), tr.structure.name())
    } else {
        tr.structure.to_document()
    };
    match output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    let say = |line: String| {
        if output.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    };
    say(format!(
        "translated: {} places (pair 0 = {zero}, max = {max})",
        tr.code.count()
    ));
    if !verify {
        return Ok(0);
    }
    let rep = translate::verify_equivalence(&scheme, &expansion, limits)?;
    say(format!(
        "verify: {} pairs, {} mismatches, {} inconclusive",
        rep.pairs.len(),
        rep.mismatches(),
        rep.inconclusive()
    ));
    for p in rep.pairs.iter().filter(|p| p.mismatch()) {
        say(format!(
            "  mismatch at ({}, {}): engine {}, net {}",
            p.zero, p.max, p.engine, p.net
        ));
    }
    Ok(if rep.mismatches() > 0 {
        exit::REJECTED
    } else if rep.inconclusive() > 0 {
        exit::UNDECIDED
    } else {
        0
    })
}

fn solve(path: &Path, problem: ProblemArg, oracle: bool, cap: u32, limits: Limits) -> Result<u8> {
    let st = load_structure(path)?;
    let (outcome, explicit) = match problem {
        ProblemArg::OmegaB => {
            let net = PartitionedNet::from_structure_b(&st)?;
            if net.dropped.total() > 0 {
                eprintln!(
                    "warning: ignored {} transition tuple(s) with the wrong place kinds",
                    net.dropped.total()
                );
            }
            let v = petri::solve_omega_b(&net, limits);
            println!("verdict: {}", v.outcome);
            println!("states: {}", v.states);
            if let Some(note) = v.note {
                println!("note: {note}");
            }
            (v.outcome, net.to_explicit())
        }
        ProblemArg::OmegaA => {
            let net = GeneralNet::from_structure_a(&st)?;
            if net.dropped > 0 {
                eprintln!(
                    "warning: ignored {} T3 tuple(s) with repeated places",
                    net.dropped
                );
            }
            let explicit = net.to_explicit();
            let v = petri::solve_omega_a(&explicit, limits);
            println!("verdict: {}", v.outcome);
            println!("nodes: {}", v.nodes);
            if v.accelerated {
                println!("note: accelerated (some place became unbounded)");
            }
            (v.outcome, explicit)
        }
    };
    if oracle {
        let naive = petri::naive_marking_search(&explicit, cap, limits.max_states);
        let agrees = match naive {
            NaiveResult::Accepted => outcome != Outcome::Rejected,
            NaiveResult::Rejected => outcome != Outcome::Accepted,
            NaiveResult::Inconclusive => true,
        };
        println!("oracle: {naive:?}");
        if !agrees {
            println!("oracle disagrees");
            return Ok(exit::ORACLE_DISAGREES);
        }
    }
    Ok(outcome_code(outcome))
}

fn fuzz_cmd(
    seed: u64,
    names: &[String],
    count: Option<usize>,
    output: Option<&Path>,
    limits: Limits,
) -> Result<u8> {
    let suites: Vec<Suite> = if names.is_empty() {
        Suite::DEFAULT.to_vec()
    } else {
        names
            .iter()
            .map(|n| Suite::parse(n).with_context(|| format!("unknown suite `{n}`")))
            .collect::<Result<_>>()?
    };
    let report = fuzz::run(
        &suites,
        FuzzConfig {
            seed,
            count,
            limits,
        },
    );
    let text = report.to_text();
    print!("{text}");
    std::io::stdout().flush()?;
    if let Some(path) = output {
        fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if report.violations() > 0 { 1 } else { 0 })
}

fn fmt(path: &Path, check: bool) -> Result<u8> {
    let src = read(path)?;
    let scheme = lang::parse_scheme(&src).with_context(|| format!("{}", path.display()))?;
    let pretty = lang::print(&scheme);
    if check {
        if pretty == src {
            return Ok(0);
        }
        println!("{} is not in canonical form", path.display());
        return Ok(1);
    }
    print!("{pretty}");
    Ok(0)
}

fn lint(path: &Path, kind: LintAs) -> Result<u8> {
    let st = load_structure(path)?;
    println!("{}: size {}, signature ok", st.name(), st.size());
    match kind {
        LintAs::Any => Ok(0),
        LintAs::OmegaB => {
            let net = PartitionedNet::from_structure_b(&st)?;
            let count = |k| (0..net.size).filter(|&x| net.kind(x as Elem) == k).count();
            println!(
                "places: {} graph, {} user, {} system",
                count(petri::PlaceKind::Graph),
                count(petri::PlaceKind::User),
                count(petri::PlaceKind::System)
            );
            let d = net.dropped;
            println!(
                "nonconforming tuples: T1 {}, T2 {}, T3 {}",
                d.t1, d.t2, d.t3
            );
            Ok(if d.total() > 0 { 1 } else { 0 })
        }
        LintAs::OmegaA => {
            let net = GeneralNet::from_structure_a(&st)?;
            println!("nonconforming tuples: T3 {}", net.dropped);
            Ok(if net.dropped > 0 { 1 } else { 0 })
        }
    }
}
