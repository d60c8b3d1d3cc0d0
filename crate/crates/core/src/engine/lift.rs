//! Removing the built-in successor from a level-1 scheme.
//!
//! The lifted scheme first guesses a chain `0 = u0, u1, ..., um = max` of
//! distinct elements and records it in an array `$M`: one-dimensional
//! (`$M[u_i] = u_{i+1}`) for npsa, two-dimensional 0/max
//! (`$M[u_i, u_{i+1}] = max`) for npsb. Atoms `succ(s, t)` are read off `$M`
//! and every `guess x` is followed by a walk along the chain that loops
//! forever unless `x` lies on it. The chain need not cover the universe;
//! for problems closed under extensions that does not change the answer.

use crate::lang::{self, Body, Formula, Instr, Mode, Operand, Scheme, SchemeError, Term, Test};

use super::EngineError;

const M: &str = "$M";
const SEEN: &str = "$V";

fn v(name: &str) -> Term {
    Term::var(name)
}

fn assign(var: &str, value: Term) -> Instr {
    Instr::Assign {
        var: var.into(),
        value,
    }
}

fn hang_while(f: Formula) -> Instr {
    Instr::While {
        test: Test::Formula(f),
        body: Vec::new(),
    }
}

fn cell(array: &str, index: Vec<Term>) -> Operand {
    Operand::Array {
        name: array.into(),
        index,
    }
}

pub fn lift_successor_scheme(scheme: &Scheme, mode: Mode) -> Result<Scheme, EngineError> {
    if !scheme.successor {
        return Err(EngineError::NotSuccessor);
    }
    let level = scheme.level();
    let Body::Program(instrs) = &scheme.body else {
        return Err(SchemeError::NotLevel1(level).into());
    };
    if level != 1 {
        return Err(SchemeError::NotLevel1(level).into());
    }
    let binary = mode == Mode::Npsb;

    let mut body = chain(binary);
    body.extend(rewrite_block(instrs, binary));

    let mut out = scheme.clone();
    out.mode = mode;
    out.successor = false;
    out.arrays.push(lang::ArrayDecl {
        name: M.into(),
        dim: if binary { 2 } else { 1 },
    });
    out.arrays.push(lang::ArrayDecl {
        name: SEEN.into(),
        dim: 1,
    });
    let mut fresh = vec!["$c", "$u", "$r", "$done", "$gx", "$ok"];
    if binary {
        fresh.push("$gn");
    }
    for f in fresh {
        out.bound_vars.push(f.into());
    }
    out.body = Body::Program(body);
    lang::validate(&out)?;
    Ok(out)
}

/// Guesses the chain into `$M`, rejecting repeated elements on the spot.
fn chain(binary: bool) -> Vec<Instr> {
    let mut step = vec![
        Instr::Guess { var: "$u".into() },
        Instr::Read {
            var: "$r".into(),
            array: SEEN.into(),
            index: vec![v("$u")],
        },
        hang_while(Formula::neq(v("$r"), Term::Zero)),
    ];
    step.push(if binary {
        Instr::SetMax {
            array: M.into(),
            index: vec![v("$c"), v("$u")],
        }
    } else {
        Instr::Write {
            array: M.into(),
            index: vec![v("$c")],
            value: v("$u"),
        }
    });
    step.extend([
        Instr::SetMax {
            array: SEEN.into(),
            index: vec![v("$u")],
        },
        assign("$c", v("$u")),
        Instr::If {
            test: Test::Formula(Formula::eq(v("$u"), Term::Max)),
            then_body: vec![assign("$done", Term::Max)],
            else_body: None,
        },
    ]);
    vec![
        assign("$c", Term::Zero),
        Instr::SetMax {
            array: SEEN.into(),
            index: vec![Term::Zero],
        },
        assign("$done", Term::Zero),
        Instr::While {
            test: Test::Formula(Formula::eq(v("$done"), Term::Zero)),
            body: step,
        },
    ]
}

/// The guarded guess: walk the chain from 0 until `x` or max is met, and
/// hang unless `x` was met.
fn guarded_guess(x: &str, binary: bool) -> Vec<Instr> {
    let advance = if binary {
        vec![
            Instr::Guess { var: "$gn".into() },
            Instr::Read {
                var: "$r".into(),
                array: M.into(),
                index: vec![v("$gx"), v("$gn")],
            },
            hang_while(Formula::eq(v("$r"), Term::Zero)),
            assign("$gx", v("$gn")),
        ]
    } else {
        vec![Instr::Read {
            var: "$gx".into(),
            array: M.into(),
            index: vec![v("$gx")],
        }]
    };
    vec![
        Instr::Guess { var: x.into() },
        assign("$gx", Term::Zero),
        assign("$ok", Term::Zero),
        Instr::While {
            test: Test::Formula(Formula::eq(v("$ok"), Term::Zero)),
            body: vec![Instr::If {
                test: Test::Formula(Formula::or(
                    Formula::eq(v(x), v("$gx")),
                    Formula::eq(v("$gx"), Term::Max),
                )),
                then_body: vec![assign("$ok", Term::Max)],
                else_body: Some(advance),
            }],
        },
        hang_while(Formula::neq(v(x), v("$gx"))),
    ]
}

fn rewrite_block(instrs: &[Instr], binary: bool) -> Vec<Instr> {
    let mut out = Vec::new();
    for i in instrs {
        match i {
            Instr::Guess { var } => out.extend(guarded_guess(var, binary)),
            Instr::While { test, body } => out.push(Instr::While {
                test: rewrite_test(test, binary),
                body: rewrite_block(body, binary),
            }),
            Instr::If {
                test,
                then_body,
                else_body,
            } => out.push(Instr::If {
                test: rewrite_test(test, binary),
                then_body: rewrite_block(then_body, binary),
                else_body: else_body.as_ref().map(|e| rewrite_block(e, binary)),
            }),
            other => out.push(other.clone()),
        }
    }
    out
}

fn rewrite_test(t: &Test, binary: bool) -> Test {
    match t {
        Test::Formula(f) => Test::Formula(rewrite_formula(f, binary)),
        Test::Scheme(_) => unreachable!("level-1 schemes have formula tests"),
    }
}

fn rewrite_formula(f: &Formula, binary: bool) -> Formula {
    match f {
        Formula::Rel { name, args } if name == "succ" => {
            let (s, t) = (args[0].clone(), args[1].clone());
            if binary {
                Formula::Eq(cell(M, vec![s, t]), Operand::Term(Term::Max))
            } else {
                // $M[max] holds 0 by default, so max must be excluded
                // explicitly: nothing follows the last element.
                Formula::and(
                    Formula::Eq(Operand::Term(t), cell(M, vec![s.clone()])),
                    Formula::neq(s, Term::Max),
                )
            }
        }
        Formula::Not(g) => Formula::not(rewrite_formula(g, binary)),
        Formula::And(a, b) => Formula::and(rewrite_formula(a, binary), rewrite_formula(b, binary)),
        Formula::Or(a, b) => Formula::or(rewrite_formula(a, binary), rewrite_formula(b, binary)),
        other => other.clone(),
    }
}
