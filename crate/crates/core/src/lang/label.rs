use super::ast::*;
use super::SchemeError;

/// What a numbered line does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineOp {
    Input,
    Output,
    Assign {
        var: String,
        value: Term,
    },
    Read {
        var: String,
        array: String,
        index: Vec<Term>,
    },
    SetMax {
        array: String,
        index: Vec<Term>,
    },
    Write {
        array: String,
        index: Vec<Term>,
        value: Term,
    },
    Guess {
        var: String,
    },
    /// A loop head: jump to `on_true` when the test holds, else `on_false`.
    Branch {
        test: Test,
        on_true: usize,
        on_false: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub op: LineOp,
    /// Next line for straight-line instructions; unused for branches and the
    /// output line.
    pub next: usize,
}

/// A desugared program flattened into lines `1..=l`. Line 1 is `input`,
/// line `l` is `output`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledScheme {
    pub scheme: Scheme,
    lines: Vec<Line>,
}

impl LabeledScheme {
    /// Number of lines `l`.
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Line `n`, 1-based.
    pub fn line(&self, n: usize) -> &Line {
        &self.lines[n - 1]
    }

    pub fn lines(&self) -> impl Iterator<Item = (usize, &Line)> {
        self.lines.iter().enumerate().map(|(i, l)| (i + 1, l))
    }

    /// Control successors of line `n` in branch order (true before false).
    pub fn successors(&self, n: usize) -> Vec<usize> {
        match &self.line(n).op {
            LineOp::Output => Vec::new(),
            LineOp::Branch {
                on_true, on_false, ..
            } => vec![*on_true, *on_false],
            _ => vec![self.line(n).next],
        }
    }
}

/// Numbers the lines of a program body. Loops are the only control flow,
/// so `if` must have been desugared away.
pub fn label(scheme: &Scheme) -> Result<LabeledScheme, SchemeError> {
    let Some(instrs) = scheme.program() else {
        return Err(SchemeError::NotLevel1(scheme.level()));
    };
    let mut bad = false;
    visit_instrs(instrs, &mut |i| bad |= matches!(i, Instr::If { .. }));
    if bad {
        return Err(SchemeError::NotDesugared);
    }
    let total = 2 + size(instrs);
    let mut lines = Vec::with_capacity(total);
    lines.push(Line {
        op: LineOp::Input,
        next: 2,
    });
    emit(instrs, 2, total, &mut lines);
    lines.push(Line {
        op: LineOp::Output,
        next: 0,
    });
    debug_assert_eq!(lines.len(), total);
    Ok(LabeledScheme {
        scheme: scheme.clone(),
        lines,
    })
}

fn size(instrs: &[Instr]) -> usize {
    instrs
        .iter()
        .map(|i| match i {
            Instr::While { body, .. } => 1 + size(body),
            _ => 1,
        })
        .sum()
}

/// Emits `instrs` starting at line `start`; control leaves the sequence to
/// line `exit`.
fn emit(instrs: &[Instr], start: usize, exit: usize, out: &mut Vec<Line>) {
    let mut at = start;
    for (k, i) in instrs.iter().enumerate() {
        let width = match i {
            Instr::While { body, .. } => 1 + size(body),
            _ => 1,
        };
        let next = if k + 1 == instrs.len() {
            exit
        } else {
            at + width
        };
        let op = match i {
            Instr::Assign { var, value } => LineOp::Assign {
                var: var.clone(),
                value: value.clone(),
            },
            Instr::Read { var, array, index } => LineOp::Read {
                var: var.clone(),
                array: array.clone(),
                index: index.clone(),
            },
            Instr::SetMax { array, index } => LineOp::SetMax {
                array: array.clone(),
                index: index.clone(),
            },
            Instr::Write {
                array,
                index,
                value,
            } => LineOp::Write {
                array: array.clone(),
                index: index.clone(),
                value: value.clone(),
            },
            Instr::Guess { var } => LineOp::Guess { var: var.clone() },
            Instr::While { test, body } => {
                out.push(Line {
                    op: LineOp::Branch {
                        test: test.clone(),
                        on_true: if body.is_empty() { at } else { at + 1 },
                        on_false: next,
                    },
                    next: 0,
                });
                emit(body, at + 1, at, out);
                at += width;
                continue;
            }
            Instr::If { .. } => unreachable!("checked above"),
        };
        out.push(Line { op, next });
        at += width;
    }
}
