use std::fmt::Write;

use super::ast::*;

/// Canonical pretty-printing. Parsing the output gives back an equal AST
/// (with `allow_reserved` when the scheme contains generated names).
pub fn print(scheme: &Scheme) -> String {
    let mut out = String::new();
    if scheme.mode == Mode::Npsa {
        out.push_str("mode npsa\n");
    }
    if scheme.successor {
        out.push_str("successor\n");
    }
    scheme_at(&mut out, scheme, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn scheme_at(out: &mut String, s: &Scheme, depth: usize) {
    match &s.body {
        Body::Forall { vars, inner } => {
            indent(out, depth);
            let _ = writeln!(out, "forall {} (", vars.join(", "));
            scheme_at(out, inner, depth + 1);
            indent(out, depth);
            out.push_str(")\n");
        }
        Body::Program(instrs) => {
            if !s.arrays.is_empty() {
                indent(out, depth);
                let decls: Vec<_> = s
                    .arrays
                    .iter()
                    .map(|a| format!("{}/{}", a.name, a.dim))
                    .collect();
                let _ = writeln!(out, "array {}", decls.join(", "));
            }
            if !s.free_vars.is_empty() {
                indent(out, depth);
                let _ = writeln!(out, "free {}", s.free_vars.join(", "));
            }
            if !s.bound_vars.is_empty() {
                indent(out, depth);
                let _ = writeln!(out, "var {}", s.bound_vars.join(", "));
            }
            indent(out, depth);
            let _ = writeln!(out, "input({})", s.io_vars.join(", "));
            block(out, instrs, depth + 1);
            indent(out, depth);
            let _ = writeln!(out, "output({})", s.io_vars.join(", "));
        }
    }
}

fn block(out: &mut String, instrs: &[Instr], depth: usize) {
    for i in instrs {
        match i {
            Instr::While { test: t, body } => {
                indent(out, depth);
                out.push_str("while ");
                test(out, t, depth);
                if body.is_empty() {
                    out.push_str(" do od\n");
                    continue;
                }
                out.push_str(" do\n");
                block(out, body, depth + 1);
                indent(out, depth);
                out.push_str("od\n");
            }
            Instr::If {
                test: t,
                then_body,
                else_body,
            } => {
                indent(out, depth);
                out.push_str("if ");
                test(out, t, depth);
                out.push_str(" then\n");
                block(out, then_body, depth + 1);
                if let Some(e) = else_body {
                    indent(out, depth);
                    out.push_str("else\n");
                    block(out, e, depth + 1);
                }
                indent(out, depth);
                out.push_str("fi\n");
            }
            simple => {
                indent(out, depth);
                out.push_str(&simple_instr(simple));
                out.push('\n');
            }
        }
    }
}

fn simple_instr(i: &Instr) -> String {
    match i {
        Instr::Assign { var, value } => format!("{var} := {}", term(value)),
        Instr::Read { var, array, index } => format!("{var} := {array}[{}]", terms(index)),
        Instr::SetMax { array, index } => format!("{array}[{}] := max", terms(index)),
        Instr::Write {
            array,
            index,
            value,
        } => format!("{array}[{}] := {}", terms(index), term(value)),
        Instr::Guess { var } => format!("guess {var}"),
        Instr::While { .. } | Instr::If { .. } => unreachable!("compound instruction"),
    }
}

fn test(out: &mut String, t: &Test, depth: usize) {
    match t {
        Test::Formula(f) => out.push_str(&formula(f)),
        Test::Scheme(s) => {
            // The scheme opens on the keyword's line and closes on its own.
            let mut inner = String::new();
            scheme_at(&mut inner, s, depth + 1);
            out.push_str(inner.trim_start().trim_end_matches('\n'));
        }
    }
}

pub(crate) fn term(t: &Term) -> String {
    match t {
        Term::Var(n) | Term::Const(n) => n.clone(),
        Term::Zero => "0".into(),
        Term::Max => "max".into(),
    }
}

fn terms(ts: &[Term]) -> String {
    ts.iter().map(term).collect::<Vec<_>>().join(", ")
}

fn operand(op: &Operand) -> String {
    match op {
        Operand::Term(t) => term(t),
        Operand::Array { name, index } => format!("{name}[{}]", terms(index)),
    }
}

/// Formula text with the fewest parentheses that still reparse to the same
/// tree. `|` and `&` associate to the left.
pub fn formula(f: &Formula) -> String {
    match f {
        Formula::Or(a, b) => {
            let rhs = if matches!(**b, Formula::Or(..)) {
                format!("({})", formula(b))
            } else {
                formula(b)
            };
            format!("{} | {rhs}", formula(a))
        }
        Formula::And(a, b) => {
            let lhs = conj_operand(a, false);
            let rhs = conj_operand(b, true);
            format!("{lhs} & {rhs}")
        }
        _ => unary(f),
    }
}

fn conj_operand(f: &Formula, right: bool) -> String {
    match f {
        Formula::Or(..) => format!("({})", formula(f)),
        Formula::And(..) if right => format!("({})", formula(f)),
        _ => formula(f),
    }
}

fn unary(f: &Formula) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Rel { name, args } => format!("{name}({})", terms(args)),
        Formula::Eq(a, b) => format!("{} = {}", operand(a), operand(b)),
        Formula::Not(g) => match &**g {
            Formula::Eq(a, b) => format!("{} != {}", operand(a), operand(b)),
            Formula::And(..) | Formula::Or(..) => format!("!({})", formula(g)),
            other => format!("!{}", unary(other)),
        },
        Formula::And(..) | Formula::Or(..) => format!("({})", formula(f)),
    }
}
