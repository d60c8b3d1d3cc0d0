//! `if` elimination.
//!
//! `if T then A fi` becomes
//!
//! ```text
//! $t := 0
//! while T & $t = 0 do A; $t := max od
//! ```
//!
//! and an `else` branch adds a second flag `$e` and a loop
//! `while $t = 0 & $e = 0 do B; $e := max od`. Flags are indexed by the
//! nesting depth of the `if` (and of the enclosing test scheme), so an inner
//! `if` never clobbers an outer flag.
//! When `T` is a nested scheme the flag cannot be conjoined syntactically;
//! instead the test receives the flag as a free variable and refuses to
//! accept unless it is still 0.

use super::ast::*;

pub fn desugar(scheme: &Scheme) -> Scheme {
    if !scheme.has_if() {
        return scheme.clone();
    }
    let mut s = scheme.clone();
    desugar_in_place(&mut s, 0);
    s
}

fn desugar_in_place(s: &mut Scheme, nest: usize) {
    match &mut s.body {
        Body::Forall { vars, inner } => {
            desugar_in_place(inner, nest);
            // Flags are new bound variables of the inner program.
            let rebuilt = super::quantify(vars.clone(), (**inner).clone());
            s.bound_vars = rebuilt.bound_vars;
        }
        Body::Program(instrs) => {
            let mut fresh = Vec::new();
            let body = std::mem::take(instrs);
            *instrs = block(body, 0, nest, &mut fresh);
            for v in fresh {
                if !s.bound_vars.contains(&v) {
                    s.bound_vars.push(v);
                }
            }
        }
    }
}

fn then_flag(nest: usize, depth: usize) -> String {
    format!("$t{nest}_{depth}")
}

fn else_flag(nest: usize, depth: usize) -> String {
    format!("$e{nest}_{depth}")
}

fn is_zero(var: &str) -> Formula {
    Formula::eq(Term::var(var), Term::Zero)
}

fn guarded(test: Test, flag: &str, nest: usize) -> Test {
    match test {
        Test::Formula(f) => Test::Formula(Formula::and(f, is_zero(flag))),
        Test::Scheme(mut inner) => {
            desugar_in_place(&mut inner, nest + 1);
            guard_scheme(&mut inner, flag);
            Test::Scheme(inner)
        }
    }
}

/// Makes a nested test reject whenever `flag` is not 0.
fn guard_scheme(s: &mut Scheme, flag: &str) {
    s.free_vars.push(flag.to_string());
    match &mut s.body {
        Body::Forall { inner, .. } => guard_scheme(inner, flag),
        Body::Program(instrs) => instrs.insert(
            0,
            Instr::While {
                test: Test::Formula(Formula::not(is_zero(flag))),
                body: Vec::new(),
            },
        ),
    }
}

fn block(instrs: Vec<Instr>, depth: usize, nest: usize, fresh: &mut Vec<String>) -> Vec<Instr> {
    let mut out = Vec::with_capacity(instrs.len());
    for i in instrs {
        match i {
            Instr::While { test, body } => {
                let test = match test {
                    Test::Scheme(mut s) => {
                        desugar_in_place(&mut s, nest + 1);
                        Test::Scheme(s)
                    }
                    f => f,
                };
                out.push(Instr::While {
                    test,
                    body: block(body, depth, nest, fresh),
                });
            }
            Instr::If {
                test,
                then_body,
                else_body,
            } => {
                let t = then_flag(nest, depth);
                fresh.push(t.clone());
                out.push(Instr::Assign {
                    var: t.clone(),
                    value: Term::Zero,
                });
                let mut then_loop = block(then_body, depth + 1, nest, fresh);
                then_loop.push(Instr::Assign {
                    var: t.clone(),
                    value: Term::Max,
                });
                match else_body {
                    None => out.push(Instr::While {
                        test: guarded(test, &t, nest),
                        body: then_loop,
                    }),
                    Some(else_body) => {
                        let e = else_flag(nest, depth);
                        fresh.push(e.clone());
                        out.push(Instr::Assign {
                            var: e.clone(),
                            value: Term::Zero,
                        });
                        out.push(Instr::While {
                            test: guarded(test, &t, nest),
                            body: then_loop,
                        });
                        let mut else_loop = block(else_body, depth + 1, nest, fresh);
                        else_loop.push(Instr::Assign {
                            var: e.clone(),
                            value: Term::Max,
                        });
                        out.push(Instr::While {
                            test: Test::Formula(Formula::and(is_zero(&t), is_zero(&e))),
                            body: else_loop,
                        });
                    }
                }
            }
            other => out.push(other),
        }
    }
    out
}
