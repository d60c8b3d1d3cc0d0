//! Abstract syntax of program schemes.

/// Which array discipline a scheme follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Binary write-once arrays: cells start at 0 and may only be set to `max`.
    #[default]
    Npsb,
    /// Unrestricted arrays holding arbitrary universe elements.
    Npsa,
}

/// A first-order term: a variable, a signature constant, or one of the two
/// built-in constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    Zero,
    Max,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

/// Either side of an equality atom. Array reads are accepted in tests as a
/// convenience; `normalize_for_translation` hoists them into assignments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Term(Term),
    Array { name: String, index: Vec<Term> },
}

/// Quantifier-free formula over the signature plus `0` and `max`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Rel { name: String, args: Vec<Term> },
    Eq(Operand, Operand),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(Operand::Term(a), Operand::Term(b))
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn rel(name: &str, args: Vec<Term>) -> Formula {
        Formula::Rel {
            name: name.to_string(),
            args,
        }
    }

    /// Visits every term, including array indices.
    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel { args, .. } => args.iter().for_each(f),
            Formula::Eq(a, b) => {
                for op in [a, b] {
                    match op {
                        Operand::Term(t) => f(t),
                        Operand::Array { index, .. } => index.iter().for_each(&mut *f),
                    }
                }
            }
            Formula::Not(g) => g.for_each_term(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn for_each_term_mut(&mut self, f: &mut impl FnMut(&mut Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel { args, .. } => args.iter_mut().for_each(f),
            Formula::Eq(a, b) => {
                for op in [a, b] {
                    match op {
                        Operand::Term(t) => f(t),
                        Operand::Array { index, .. } => index.iter_mut().for_each(&mut *f),
                    }
                }
            }
            Formula::Not(g) => g.for_each_term_mut(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.for_each_term_mut(f);
                b.for_each_term_mut(f);
            }
        }
    }

    /// Array operands in left-to-right order.
    pub fn array_operands(&self) -> Vec<(&str, &[Term])> {
        let mut out = Vec::new();
        self.collect_arrays(&mut out);
        out
    }

    fn collect_arrays<'a>(&'a self, out: &mut Vec<(&'a str, &'a [Term])>) {
        match self {
            Formula::Eq(a, b) => {
                for op in [a, b] {
                    if let Operand::Array { name, index } = op {
                        out.push((name, index));
                    }
                }
            }
            Formula::Not(g) => g.collect_arrays(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_arrays(out);
                b.collect_arrays(out);
            }
            _ => {}
        }
    }

    pub fn has_array_operands(&self) -> bool {
        !self.array_operands().is_empty()
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Not(g) => 1 + g.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }
}

/// The test of a `while` or `if`: a quantifier-free formula, or at odd levels
/// above 1 a scheme of the level below.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Test {
    Formula(Formula),
    Scheme(Box<Scheme>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    /// `x := t`
    Assign {
        var: String,
        value: Term,
    },
    /// `x := A[t1, ..., td]`
    Read {
        var: String,
        array: String,
        index: Vec<Term>,
    },
    /// `A[t1, ..., td] := max`
    SetMax {
        array: String,
        index: Vec<Term>,
    },
    /// `A[t1, ..., td] := t` (unrestricted arrays only)
    Write {
        array: String,
        index: Vec<Term>,
        value: Term,
    },
    /// `guess x`
    Guess {
        var: String,
    },
    While {
        test: Test,
        body: Vec<Instr>,
    },
    /// `if` with an optional `else` branch.
    If {
        test: Test,
        then_body: Vec<Instr>,
        else_body: Option<Vec<Instr>>,
    },
}

impl Instr {
    /// The variable this instruction writes, if any.
    pub fn target(&self) -> Option<&str> {
        match self {
            Instr::Assign { var, .. } | Instr::Read { var, .. } | Instr::Guess { var } => Some(var),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrayDecl {
    pub name: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Body {
    /// An instruction sequence between `input(...)` and `output(...)`.
    Program(Vec<Instr>),
    /// Universal quantification over some free variables of a program.
    Forall {
        vars: Vec<String>,
        inner: Box<Scheme>,
    },
}

/// A validated program scheme.
///
/// Variables are partitioned into input-output, bound (work variables and,
/// for quantified schemes, everything hidden by the quantifier) and free
/// variables. Free variables behave as constants during a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub mode: Mode,
    pub successor: bool,
    pub io_vars: Vec<String>,
    pub free_vars: Vec<String>,
    pub bound_vars: Vec<String>,
    pub arrays: Vec<ArrayDecl>,
    pub body: Body,
}

impl Scheme {
    /// Hierarchy level: 1 for quantifier-free tests, `m + 1` for a quantified
    /// level-`m` program, and one above the highest nested test otherwise.
    pub fn level(&self) -> usize {
        match &self.body {
            Body::Forall { inner, .. } => inner.level() + 1,
            Body::Program(instrs) => {
                let mut level = 1;
                visit_tests(instrs, &mut |t| {
                    if let Test::Scheme(s) = t {
                        level = level.max(s.level() + 1);
                    }
                });
                level
            }
        }
    }

    pub fn program(&self) -> Option<&[Instr]> {
        match &self.body {
            Body::Program(p) => Some(p),
            Body::Forall { .. } => None,
        }
    }

    pub fn array(&self, name: &str) -> Option<&ArrayDecl> {
        self.arrays.iter().find(|a| a.name == name)
    }

    /// Variables in slot order: input-output, bound, free.
    pub fn variables(&self) -> Vec<&str> {
        self.io_vars
            .iter()
            .chain(&self.bound_vars)
            .chain(&self.free_vars)
            .map(String::as_str)
            .collect()
    }

    pub fn has_if(&self) -> bool {
        match &self.body {
            Body::Forall { inner, .. } => inner.has_if(),
            Body::Program(p) => {
                let mut found = false;
                visit_instrs(p, &mut |i| {
                    if matches!(i, Instr::If { .. }) {
                        found = true;
                    }
                });
                let mut nested = false;
                visit_tests(p, &mut |t| {
                    if let Test::Scheme(s) = t {
                        nested |= s.has_if();
                    }
                });
                found || nested
            }
        }
    }
}

/// Pre-order walk over instructions, descending into bodies but not into
/// nested test schemes.
pub fn visit_instrs<'a>(instrs: &'a [Instr], f: &mut impl FnMut(&'a Instr)) {
    for i in instrs {
        f(i);
        match i {
            Instr::While { body, .. } => visit_instrs(body, f),
            Instr::If {
                then_body,
                else_body,
                ..
            } => {
                visit_instrs(then_body, f);
                if let Some(e) = else_body {
                    visit_instrs(e, f);
                }
            }
            _ => {}
        }
    }
}

/// Visits the test of every `while`/`if` in the sequence (not inside nested
/// test schemes).
pub fn visit_tests<'a>(instrs: &'a [Instr], f: &mut impl FnMut(&'a Test)) {
    visit_instrs(instrs, &mut |i| match i {
        Instr::While { test, .. } | Instr::If { test, .. } => f(test),
        _ => {}
    });
}
