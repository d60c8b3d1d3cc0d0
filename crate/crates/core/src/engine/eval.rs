use crate::lang::{Formula, Operand, Term};
use crate::model::{Elem, Structure};

use super::EngineError;

/// Truth of a quantifier-free formula under `valuation`, with the special
/// constants read as `zero` and `max`.
pub fn eval_qf(
    phi: &Formula,
    valuation: &[(&str, Elem)],
    st: &Structure,
    zero: Elem,
    max: Elem,
) -> Result<bool, EngineError> {
    let term = |t: &Term| -> Result<Elem, EngineError> {
        match t {
            Term::Var(v) => valuation
                .iter()
                .find(|(name, _)| name == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| EngineError::Unbound(v.clone())),
            Term::Const(c) => st
                .constant_by_name(c)
                .ok_or_else(|| EngineError::UnknownConstant(c.clone())),
            Term::Zero => Ok(zero),
            Term::Max => Ok(max),
        }
    };
    Ok(match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel { name, args } => {
            let rel = st
                .signature()
                .relation_index(name)
                .ok_or_else(|| EngineError::UnknownRelation(name.clone()))?;
            let expected = st.signature().arity(rel);
            if expected != args.len() {
                return Err(EngineError::RelationArity {
                    name: name.clone(),
                    expected,
                    got: args.len(),
                });
            }
            let tuple = args.iter().map(term).collect::<Result<Vec<_>, _>>()?;
            st.holds(rel, &tuple)
        }
        Formula::Eq(a, b) => {
            let op = |o: &Operand| match o {
                Operand::Term(t) => term(t),
                Operand::Array { .. } => Err(EngineError::ArrayInFormula),
            };
            op(a)? == op(b)?
        }
        Formula::Not(g) => !eval_qf(g, valuation, st, zero, max)?,
        Formula::And(a, b) => {
            eval_qf(a, valuation, st, zero, max)? && eval_qf(b, valuation, st, zero, max)?
        }
        Formula::Or(a, b) => {
            eval_qf(a, valuation, st, zero, max)? || eval_qf(b, valuation, st, zero, max)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Signature;

    fn edge01() -> Structure {
        Structure::from_parts(
            "e",
            Signature::of(&[("E", 2)], &[]),
            3,
            vec![vec![vec![0, 1]]],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn zero_never_equals_max() {
        let st = edge01();
        let f = Formula::eq(Term::Zero, Term::Max);
        for z in 0..3 {
            for m in (0..3).filter(|&m| m != z) {
                assert!(!eval_qf(&f, &[], &st, z, m).unwrap());
            }
        }
    }

    #[test]
    fn atom_lookup() {
        let st = edge01();
        let f = Formula::rel("E", vec![Term::var("x"), Term::var("y")]);
        assert!(eval_qf(&f, &[("x", 0), ("y", 1)], &st, 0, 2).unwrap());
        assert!(!eval_qf(&f, &[("x", 1), ("y", 0)], &st, 0, 2).unwrap());
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let st = edge01();
        let f = Formula::rel("F", vec![Term::Zero]);
        assert!(matches!(
            eval_qf(&f, &[], &st, 0, 1),
            Err(EngineError::UnknownRelation(_))
        ));
        let g = Formula::eq(Term::var("q"), Term::Zero);
        assert!(matches!(
            eval_qf(&g, &[], &st, 0, 1),
            Err(EngineError::Unbound(_))
        ));
    }
}
