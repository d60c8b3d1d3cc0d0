use std::collections::HashSet;

use super::ast::*;
use super::SchemeError;

/// Checks the structural rules every scheme must satisfy. Parsing calls this;
/// programmatic constructions should too.
pub fn validate(scheme: &Scheme) -> Result<(), SchemeError> {
    check(scheme, scheme.mode, scheme.successor)
}

fn check(s: &Scheme, mode: Mode, successor: bool) -> Result<(), SchemeError> {
    if s.mode != mode || s.successor != successor {
        return Err(SchemeError::NestedModeMismatch);
    }
    let mut seen = HashSet::new();
    for v in s.variables() {
        if !seen.insert(v) {
            return Err(SchemeError::DuplicateVariable(v.to_string()));
        }
    }
    match &s.body {
        Body::Forall { vars, inner } => {
            if vars.is_empty() {
                return Err(SchemeError::EmptyQuantifier);
            }
            if inner.program().is_none() {
                return Err(SchemeError::TestNotQuantified);
            }
            for v in vars {
                if !inner.free_vars.contains(v) {
                    return Err(SchemeError::QuantifiedNotFree(v.clone()));
                }
            }
            check(inner, mode, successor)
        }
        Body::Program(instrs) => {
            if s.io_vars.is_empty() {
                return Err(SchemeError::EmptyIo);
            }
            let mut arrays = HashSet::new();
            for a in &s.arrays {
                if !arrays.insert(a.name.as_str()) {
                    return Err(SchemeError::DuplicateArray(a.name.clone()));
                }
            }
            let ctx = Ctx {
                scheme: s,
                vars: seen,
            };
            ctx.block(instrs)
        }
    }
}

struct Ctx<'a> {
    scheme: &'a Scheme,
    vars: HashSet<&'a str>,
}

impl Ctx<'_> {
    fn term(&self, t: &Term) -> Result<(), SchemeError> {
        match t {
            Term::Var(v) if !self.vars.contains(v.as_str()) => {
                Err(SchemeError::UnknownVariable(v.clone()))
            }
            Term::Const(c) if self.vars.contains(c.as_str()) => {
                Err(SchemeError::ConstantClash(c.clone()))
            }
            _ => Ok(()),
        }
    }

    fn target(&self, v: &str) -> Result<(), SchemeError> {
        if self.scheme.free_vars.iter().any(|f| f == v) {
            return Err(SchemeError::FreeAssigned(v.to_string()));
        }
        if !self.vars.contains(v) {
            return Err(SchemeError::UnknownVariable(v.to_string()));
        }
        Ok(())
    }

    fn array(&self, name: &str, index: &[Term]) -> Result<(), SchemeError> {
        let decl = self
            .scheme
            .array(name)
            .ok_or_else(|| SchemeError::UnknownArray(name.to_string()))?;
        if decl.dim != index.len() {
            return Err(SchemeError::DimensionMismatch {
                array: name.to_string(),
                expected: decl.dim,
                got: index.len(),
            });
        }
        index.iter().try_for_each(|t| self.term(t))
    }

    fn formula(&self, f: &Formula) -> Result<(), SchemeError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Rel { name, args } => {
                if self.scheme.successor && name == "succ" && args.len() != 2 {
                    return Err(SchemeError::SuccArity);
                }
                args.iter().try_for_each(|t| self.term(t))
            }
            Formula::Eq(a, b) => {
                for op in [a, b] {
                    match op {
                        Operand::Term(t) => self.term(t)?,
                        Operand::Array { name, index } => self.array(name, index)?,
                    }
                }
                Ok(())
            }
            Formula::Not(g) => self.formula(g),
            Formula::And(a, b) | Formula::Or(a, b) => {
                self.formula(a)?;
                self.formula(b)
            }
        }
    }

    fn test(&self, t: &Test) -> Result<(), SchemeError> {
        match t {
            Test::Formula(f) => self.formula(f),
            Test::Scheme(inner) => {
                if !matches!(inner.body, Body::Forall { .. }) {
                    return Err(SchemeError::TestNotQuantified);
                }
                for v in &inner.free_vars {
                    if !self.vars.contains(v.as_str()) {
                        return Err(SchemeError::TestFreeVariable(v.clone()));
                    }
                }
                check(inner, self.scheme.mode, self.scheme.successor)
            }
        }
    }

    fn block(&self, instrs: &[Instr]) -> Result<(), SchemeError> {
        for i in instrs {
            match i {
                Instr::Assign { var, value } => {
                    self.target(var)?;
                    self.term(value)?;
                }
                Instr::Read { var, array, index } => {
                    self.target(var)?;
                    self.array(array, index)?;
                }
                Instr::SetMax { array, index } => self.array(array, index)?,
                Instr::Write {
                    array,
                    index,
                    value,
                } => {
                    if self.scheme.mode == Mode::Npsb {
                        return Err(SchemeError::IllegalArrayWrite {
                            array: array.clone(),
                        });
                    }
                    self.array(array, index)?;
                    self.term(value)?;
                }
                Instr::Guess { var } => self.target(var)?,
                Instr::While { test, body } => {
                    self.test(test)?;
                    self.block(body)?;
                }
                Instr::If {
                    test,
                    then_body,
                    else_body,
                } => {
                    self.test(test)?;
                    self.block(then_body)?;
                    if let Some(e) = else_body {
                        self.block(e)?;
                    }
                }
            }
        }
        Ok(())
    }
}
