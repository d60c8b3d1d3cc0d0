//! Lowering of schemes to slot-indexed form for a fixed structure.

use std::collections::HashMap;

use crate::lang::{self, Body, Formula, LineOp, Mode, Operand, Scheme, Term, Test};
use crate::model::{Elem, Structure};

use super::{EngineError, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum CTerm {
    Var(usize),
    Elem(Elem),
    Zero,
    Max,
}

#[derive(Debug, Clone)]
pub(crate) enum COp {
    Term(CTerm),
    Cell { array: usize, index: Vec<CTerm> },
}

#[derive(Debug, Clone)]
pub(crate) enum CFormula {
    Const(bool),
    Rel { rel: usize, args: Vec<CTerm> },
    Succ(CTerm, CTerm),
    Eq(COp, COp),
    Not(Box<CFormula>),
    And(Box<CFormula>, Box<CFormula>),
    Or(Box<CFormula>, Box<CFormula>),
}

#[derive(Debug, Clone)]
pub(crate) struct CNested {
    pub id: usize,
    pub scheme: CScheme,
    /// Outer slot feeding each free variable of the test scheme.
    pub args: Vec<usize>,
    /// (inner array, outer array) pairs copied in under passed-arrays.
    pub passed: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) enum CTest {
    Qf(CFormula),
    Nested(Box<CNested>),
}

#[derive(Debug, Clone)]
pub(crate) enum CLine {
    Input {
        next: usize,
    },
    Output,
    Assign {
        var: usize,
        value: CTerm,
        next: usize,
    },
    Read {
        var: usize,
        array: usize,
        index: Vec<CTerm>,
        next: usize,
    },
    SetMax {
        array: usize,
        index: Vec<CTerm>,
        next: usize,
    },
    Write {
        array: usize,
        index: Vec<CTerm>,
        value: CTerm,
        next: usize,
    },
    Guess {
        var: usize,
        next: usize,
    },
    Branch {
        test: CTest,
        on_true: usize,
        on_false: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct CArray {
    pub name: String,
    pub dim: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct CProgram {
    /// `lines[i]` is line `i + 1`.
    pub lines: Vec<CLine>,
    pub var_names: Vec<String>,
    pub nio: usize,
    pub free_slots: Vec<usize>,
    pub arrays: Vec<CArray>,
    pub ncells: usize,
    pub binary: bool,
}

impl CProgram {
    pub fn line(&self, n: usize) -> &CLine {
        &self.lines[n - 1]
    }

    pub fn output_line(&self) -> usize {
        self.lines.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum FreeSource {
    Outer(usize),
    Quantified(usize),
}

#[derive(Debug, Clone)]
pub(crate) enum CScheme {
    Program(CProgram),
    Forall {
        quantified: usize,
        /// Where each free variable of `inner` gets its value.
        sources: Vec<FreeSource>,
        inner: CProgram,
    },
}

pub(crate) struct Compiler<'a> {
    st: &'a Structure,
    n: usize,
    semantics: Semantics,
    successor: bool,
    next_id: usize,
}

impl<'a> Compiler<'a> {
    pub fn new(st: &'a Structure, semantics: Semantics, successor: bool) -> Self {
        Compiler {
            st,
            n: st.size(),
            semantics,
            successor,
            next_id: 0,
        }
    }

    pub fn scheme(&mut self, s: &Scheme) -> Result<CScheme, EngineError> {
        match &s.body {
            Body::Program(_) => Ok(CScheme::Program(self.program(s)?)),
            Body::Forall { vars, inner } => {
                let sources = inner
                    .free_vars
                    .iter()
                    .map(|v| match vars.iter().position(|q| q == v) {
                        Some(j) => FreeSource::Quantified(j),
                        None => FreeSource::Outer(
                            s.free_vars.iter().position(|f| f == v).expect("validated"),
                        ),
                    })
                    .collect();
                Ok(CScheme::Forall {
                    quantified: vars.len(),
                    sources,
                    inner: self.program(inner)?,
                })
            }
        }
    }

    fn program(&mut self, s: &Scheme) -> Result<CProgram, EngineError> {
        let desugared = lang::desugar(s);
        let labeled = lang::label(&desugared)?;
        let s = &labeled.scheme;
        let var_names: Vec<String> = s.variables().into_iter().map(String::from).collect();
        let slots: HashMap<&str, usize> = var_names
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let nio = s.io_vars.len();
        let free_slots = s.free_vars.iter().map(|v| slots[v.as_str()]).collect();
        let mut arrays = Vec::new();
        let mut offset = 0;
        for a in &s.arrays {
            let len = self
                .n
                .checked_pow(a.dim as u32)
                .filter(|&l| l <= 1 << 26)
                .ok_or_else(|| EngineError::TooLarge(format!("array {}/{}", a.name, a.dim)))?;
            arrays.push(CArray {
                name: a.name.clone(),
                dim: a.dim,
                offset,
                len,
            });
            offset += len;
        }
        let mut lines = Vec::with_capacity(labeled.len());
        for (_, line) in labeled.lines() {
            let next = line.next;
            let term = |t: &Term| self_term(self.st, &slots, t);
            let array_ix = |name: &str| {
                arrays
                    .iter()
                    .position(|a| a.name == name)
                    .expect("validated")
            };
            let terms = |ts: &[Term]| {
                ts.iter()
                    .map(|t| self_term(self.st, &slots, t))
                    .collect::<Result<Vec<_>, _>>()
            };
            let c = match &line.op {
                LineOp::Input => CLine::Input { next },
                LineOp::Output => CLine::Output,
                LineOp::Assign { var, value } => CLine::Assign {
                    var: slots[var.as_str()],
                    value: term(value)?,
                    next,
                },
                LineOp::Read { var, array, index } => CLine::Read {
                    var: slots[var.as_str()],
                    array: array_ix(array),
                    index: terms(index)?,
                    next,
                },
                LineOp::SetMax { array, index } => CLine::SetMax {
                    array: array_ix(array),
                    index: terms(index)?,
                    next,
                },
                LineOp::Write {
                    array,
                    index,
                    value,
                } => CLine::Write {
                    array: array_ix(array),
                    index: terms(index)?,
                    value: term(value)?,
                    next,
                },
                LineOp::Guess { var } => CLine::Guess {
                    var: slots[var.as_str()],
                    next,
                },
                LineOp::Branch {
                    test,
                    on_true,
                    on_false,
                } => {
                    let test = match test {
                        Test::Formula(f) => CTest::Qf(self.formula(f, &slots, &arrays)?),
                        Test::Scheme(inner) => {
                            CTest::Nested(Box::new(self.nested(inner, &slots, &arrays)?))
                        }
                    };
                    CLine::Branch {
                        test,
                        on_true: *on_true,
                        on_false: *on_false,
                    }
                }
            };
            lines.push(c);
        }
        Ok(CProgram {
            lines,
            var_names,
            nio,
            free_slots,
            arrays,
            ncells: offset,
            binary: s.mode == Mode::Npsb,
        })
    }

    fn nested(
        &mut self,
        inner: &Scheme,
        slots: &HashMap<&str, usize>,
        outer_arrays: &[CArray],
    ) -> Result<CNested, EngineError> {
        let id = self.next_id;
        self.next_id += 1;
        let scheme = self.scheme(inner)?;
        let args = inner.free_vars.iter().map(|v| slots[v.as_str()]).collect();
        let inner_arrays = match &scheme {
            CScheme::Program(p) => &p.arrays,
            CScheme::Forall { inner, .. } => &inner.arrays,
        };
        let mut passed = Vec::new();
        for (i, a) in inner_arrays.iter().enumerate() {
            if let Some(j) = outer_arrays.iter().position(|o| o.name == a.name) {
                if self.semantics == Semantics::Standard {
                    return Err(EngineError::ArraysNotPassable(a.name.clone()));
                }
                if outer_arrays[j].dim != a.dim {
                    return Err(EngineError::PassedDimension(a.name.clone()));
                }
                passed.push((i, j));
            }
        }
        Ok(CNested {
            id,
            scheme,
            args,
            passed,
        })
    }

    fn formula(
        &self,
        f: &Formula,
        slots: &HashMap<&str, usize>,
        arrays: &[CArray],
    ) -> Result<CFormula, EngineError> {
        let term = |t: &Term| self_term(self.st, slots, t);
        Ok(match f {
            Formula::True => CFormula::Const(true),
            Formula::False => CFormula::Const(false),
            Formula::Rel { name, args } => {
                if self.successor && name == "succ" {
                    CFormula::Succ(term(&args[0])?, term(&args[1])?)
                } else {
                    let sig = self.st.signature();
                    let rel = sig
                        .relation_index(name)
                        .ok_or_else(|| EngineError::UnknownRelation(name.clone()))?;
                    let arity = sig.arity(rel);
                    if arity != args.len() {
                        return Err(EngineError::RelationArity {
                            name: name.clone(),
                            expected: arity,
                            got: args.len(),
                        });
                    }
                    CFormula::Rel {
                        rel,
                        args: args.iter().map(term).collect::<Result<_, _>>()?,
                    }
                }
            }
            Formula::Eq(a, b) => {
                let op = |o: &Operand| -> Result<COp, EngineError> {
                    Ok(match o {
                        Operand::Term(t) => COp::Term(term(t)?),
                        Operand::Array { name, index } => COp::Cell {
                            array: arrays
                                .iter()
                                .position(|a| &a.name == name)
                                .expect("validated"),
                            index: index.iter().map(term).collect::<Result<_, _>>()?,
                        },
                    })
                };
                CFormula::Eq(op(a)?, op(b)?)
            }
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g, slots, arrays)?)),
            Formula::And(a, b) => CFormula::And(
                Box::new(self.formula(a, slots, arrays)?),
                Box::new(self.formula(b, slots, arrays)?),
            ),
            Formula::Or(a, b) => CFormula::Or(
                Box::new(self.formula(a, slots, arrays)?),
                Box::new(self.formula(b, slots, arrays)?),
            ),
        })
    }
}

fn self_term(st: &Structure, slots: &HashMap<&str, usize>, t: &Term) -> Result<CTerm, EngineError> {
    Ok(match t {
        Term::Var(v) => CTerm::Var(slots[v.as_str()]),
        Term::Const(c) => CTerm::Elem(
            st.constant_by_name(c)
                .ok_or_else(|| EngineError::UnknownConstant(c.clone()))?,
        ),
        Term::Zero => CTerm::Zero,
        Term::Max => CTerm::Max,
    })
}
