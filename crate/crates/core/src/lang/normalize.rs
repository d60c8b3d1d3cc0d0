//! Translation normal form for level-1 npsb schemes.
//!
//! Three rewrites, each verdict-preserving:
//! 1. array reads inside loop tests are hoisted into temporaries `$r1, ...`,
//!    refreshed before the loop and at the end of its body;
//! 2. all arrays are merged into one array `$B` (or the single existing
//!    array is kept). With `r >= 2` arrays the merged array has dimension
//!    `ceil(log2 r) + max dim`: a prefix of 0/max tag bits names the source
//!    array and shorter indices are padded with 0. A scheme with no array
//!    gets a dummy `$B/1`;
//! 3. every bound variable is set to max just before `output`, so accepting
//!    runs end in one fixed configuration.

use super::ast::*;
use super::SchemeError;

const MERGED: &str = "$B";

pub fn normalize_for_translation(scheme: &Scheme) -> Result<Scheme, SchemeError> {
    let level = scheme.level();
    if level != 1 || scheme.program().is_none() {
        return Err(SchemeError::NotLevel1(level));
    }
    if scheme.mode != Mode::Npsb {
        return Err(SchemeError::NotNpsb);
    }
    if scheme.has_if() {
        return Err(SchemeError::NotDesugared);
    }
    let mut s = scheme.clone();
    let Body::Program(instrs) = &mut s.body else {
        unreachable!()
    };

    let mut temps = 0;
    let body = hoist(std::mem::take(instrs), &mut temps);
    for t in 1..=temps {
        let name = format!("$r{t}");
        if !s.bound_vars.contains(&name) {
            s.bound_vars.push(name);
        }
    }

    let mut body = if s.arrays.len() == 1 {
        body
    } else {
        let merge = Merge::new(&s.arrays);
        s.arrays = vec![ArrayDecl {
            name: MERGED.to_string(),
            dim: merge.dim,
        }];
        merge.block(body)
    };

    for v in &s.bound_vars {
        body.push(Instr::Assign {
            var: v.clone(),
            value: Term::Max,
        });
    }
    s.body = Body::Program(body);
    super::validate(&s)?;
    Ok(s)
}

/// True when `scheme` is already in the form the translation expects.
pub(crate) fn is_normal(scheme: &Scheme) -> Result<(), String> {
    let Some(instrs) = scheme.program() else {
        return Err("not a program".into());
    };
    if scheme.mode != Mode::Npsb {
        return Err("not npsb".into());
    }
    if scheme.arrays.len() != 1 {
        return Err(format!("{} arrays, expected one", scheme.arrays.len()));
    }
    let mut problem = None;
    visit_instrs(instrs, &mut |i| match i {
        Instr::If { .. } => problem = Some("contains `if`".to_string()),
        Instr::While {
            test: Test::Scheme(_),
            ..
        } => problem = Some("nested test".to_string()),
        Instr::While {
            test: Test::Formula(f),
            ..
        } if f.has_array_operands() => problem = Some("array read in a test".to_string()),
        _ => {}
    });
    problem.map_or(Ok(()), Err)
}

fn hoist(instrs: Vec<Instr>, temps: &mut usize) -> Vec<Instr> {
    let mut out = Vec::with_capacity(instrs.len());
    for i in instrs {
        match i {
            Instr::While {
                test: Test::Formula(mut f),
                body,
            } if f.has_array_operands() => {
                let mut reads = Vec::new();
                replace_arrays(&mut f, &mut reads);
                *temps = (*temps).max(reads.len());
                let loads: Vec<Instr> = reads
                    .into_iter()
                    .enumerate()
                    .map(|(k, (array, index))| Instr::Read {
                        var: format!("$r{}", k + 1),
                        array,
                        index,
                    })
                    .collect();
                out.extend(loads.iter().cloned());
                let mut body = hoist(body, temps);
                body.extend(loads);
                out.push(Instr::While {
                    test: Test::Formula(f),
                    body,
                });
            }
            Instr::While { test, body } => out.push(Instr::While {
                test,
                body: hoist(body, temps),
            }),
            other => out.push(other),
        }
    }
    out
}

fn replace_arrays(f: &mut Formula, reads: &mut Vec<(String, Vec<Term>)>) {
    match f {
        Formula::Eq(a, b) => {
            for op in [a, b] {
                if let Operand::Array { name, index } = op {
                    reads.push((std::mem::take(name), std::mem::take(index)));
                    *op = Operand::Term(Term::Var(format!("$r{}", reads.len())));
                }
            }
        }
        Formula::Not(g) => replace_arrays(g, reads),
        Formula::And(a, b) | Formula::Or(a, b) => {
            replace_arrays(a, reads);
            replace_arrays(b, reads);
        }
        _ => {}
    }
}

struct Merge {
    names: Vec<String>,
    tag_bits: usize,
    width: usize,
    dim: usize,
}

impl Merge {
    fn new(arrays: &[ArrayDecl]) -> Merge {
        let r = arrays.len();
        let tag_bits = if r <= 1 {
            0
        } else {
            (usize::BITS - (r - 1).leading_zeros()) as usize
        };
        let width = arrays.iter().map(|a| a.dim).max().unwrap_or(1);
        Merge {
            names: arrays.iter().map(|a| a.name.clone()).collect(),
            tag_bits,
            width,
            dim: tag_bits + width,
        }
    }

    fn index(&self, array: &str, index: Vec<Term>) -> Vec<Term> {
        // With no declared arrays there is nothing to rewrite; the dummy
        // array is never touched.
        let k = self.names.iter().position(|n| n == array).unwrap_or(0);
        let mut out: Vec<Term> = (0..self.tag_bits)
            .map(|b| {
                if k >> b & 1 == 1 {
                    Term::Max
                } else {
                    Term::Zero
                }
            })
            .collect();
        let pad = self.width - index.len();
        out.extend(index);
        out.extend(std::iter::repeat_n(Term::Zero, pad));
        out
    }

    fn block(&self, instrs: Vec<Instr>) -> Vec<Instr> {
        instrs
            .into_iter()
            .map(|i| match i {
                Instr::Read { var, array, index } => Instr::Read {
                    var,
                    index: self.index(&array, index),
                    array: MERGED.to_string(),
                },
                Instr::SetMax { array, index } => Instr::SetMax {
                    index: self.index(&array, index),
                    array: MERGED.to_string(),
                },
                Instr::While { test, body } => Instr::While {
                    test,
                    body: self.block(body),
                },
                other => other,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{desugar, parse_scheme};

    fn normal(src: &str) -> Scheme {
        normalize_for_translation(&desugar(&parse_scheme(src).unwrap())).unwrap()
    }

    #[test]
    fn adds_dummy_array() {
        let s = normal("input(x) x := max output(x)");
        assert_eq!(
            s.arrays,
            vec![ArrayDecl {
                name: MERGED.into(),
                dim: 1
            }]
        );
        is_normal(&s).unwrap();
    }

    #[test]
    fn merges_arrays_with_tag_bits() {
        let s = normal("array A/1, B/2, C/1 input(x) A[x] := max; C[0] := max output(x)");
        // three arrays need two tag bits in front of the widest index
        assert_eq!(s.arrays[0].dim, 4);
        is_normal(&s).unwrap();
    }

    #[test]
    fn hoists_array_tests() {
        let s = normal("array A/1 var t input(x) while A[x] = max do guess x od output(x)");
        assert!(s.bound_vars.iter().any(|v| v == "$r1"));
        is_normal(&s).unwrap();
    }

    #[test]
    fn bound_variables_end_at_max() {
        let s = normal("var t input(x) guess t output(x)");
        let p = s.program().unwrap();
        assert!(
            p.iter()
                .rev()
                .take_while(|i| matches!(
                    i,
                    Instr::Assign {
                        value: Term::Max,
                        ..
                    }
                ))
                .count()
                >= 1
        );
    }

    #[test]
    fn refuses_other_shapes() {
        let npsa = parse_scheme("mode npsa input(x) output(x)").unwrap();
        assert_eq!(normalize_for_translation(&npsa), Err(SchemeError::NotNpsb));
        let l2 = parse_scheme("forall y ( free y input(x) output(x) )").unwrap();
        assert_eq!(
            normalize_for_translation(&l2),
            Err(SchemeError::NotLevel1(2))
        );
        let with_if = parse_scheme("input(x) if true then x := max fi output(x)").unwrap();
        assert_eq!(
            normalize_for_translation(&with_if),
            Err(SchemeError::NotDesugared)
        );
    }
}
