use std::fmt::Write;

use super::compile::CProgram;
use super::Config;

/// An accepting run, one configuration per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub vars: Vec<String>,
    /// Array name, dimension and cell count, in cell order.
    pub arrays: Vec<(String, usize, usize)>,
    pub steps: Vec<Config>,
}

impl Trace {
    pub(crate) fn new(p: &CProgram, steps: Vec<Config>) -> Self {
        Trace {
            vars: p.var_names.clone(),
            arrays: p
                .arrays
                .iter()
                .map(|a| (a.name.clone(), a.dim, a.len))
                .collect(),
            steps,
        }
    }

    /// Human-readable form: one line per configuration. Only cells that
    /// differ from `zero` are listed.
    pub fn to_text(&self, zero: u32) -> String {
        let mut out = String::new();
        for (i, c) in self.steps.iter().enumerate() {
            let _ = write!(out, "{i:>4}  line {:>3} ", c.line);
            for (name, v) in self.vars.iter().zip(&c.vals) {
                let _ = write!(out, " {name}={v}");
            }
            let mut at = 0;
            for (name, _, len) in &self.arrays {
                let set: Vec<String> = c.cells[at..at + len]
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != zero)
                    .map(|(k, v)| format!("{k}:{v}"))
                    .collect();
                if !set.is_empty() {
                    let _ = write!(out, "  {name}{{{}}}", set.join(","));
                }
                at += len;
            }
            out.push('\n');
        }
        out
    }

    /// Line-oriented document in the same style as structure documents.
    pub fn to_document(&self) -> String {
        let mut out = String::from("trace\n");
        let _ = writeln!(out, "vars {}", self.vars.join(" "));
        for (name, dim, _) in &self.arrays {
            let _ = writeln!(out, "array {name}/{dim}");
        }
        let _ = writeln!(out, "steps {}", self.steps.len());
        for c in &self.steps {
            let vals: Vec<String> = c.vals.iter().map(u32::to_string).collect();
            let cells: Vec<String> = c.cells.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "step {}: vals {}; cells {}",
                c.line,
                vals.join(" "),
                cells.join(" ")
            );
        }
        out
    }
}
