//! Recursive-descent parser for the scheme DSL.
//!
//! Names are classified per program after parsing: anything listed in
//! `input(...)`, `free`, `var`, or written by an assignment or guess is a
//! variable; every other bare name is a signature constant.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{validate, SchemeError};

const KEYWORDS: &[&str] = &[
    "input",
    "output",
    "while",
    "do",
    "od",
    "if",
    "then",
    "else",
    "fi",
    "guess",
    "forall",
    "free",
    "array",
    "var",
    "mode",
    "successor",
    "true",
    "false",
    "max",
    "npsb",
    "npsa",
];

/// Options for [`parse_scheme_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `$`-prefixed names, which only machine-generated code uses.
    pub allow_reserved: bool,
}

/// Parses and validates a scheme written in the DSL.
pub fn parse_scheme(src: &str) -> Result<Scheme, SchemeError> {
    parse_scheme_with(src, ParseOptions::default())
}

pub fn parse_scheme_with(src: &str, opts: ParseOptions) -> Result<Scheme, SchemeError> {
    let tokens = tokenize(src, opts.allow_reserved)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut mode = Mode::Npsb;
    let mut successor = false;
    loop {
        if p.eat_kw("mode") {
            if p.eat_kw("npsb") {
                mode = Mode::Npsb;
            } else if p.eat_kw("npsa") {
                mode = Mode::Npsa;
            } else {
                return Err(p.error("expected `npsb` or `npsa`"));
            }
        } else if p.eat_kw("successor") {
            successor = true;
        } else {
            break;
        }
        p.eat(&Tok::Semi);
    }
    let scheme = p.scheme(mode, successor)?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&format!("unexpected {}", p.peek().describe())));
    }
    validate::validate(&scheme)?;
    Ok(scheme)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

#[derive(Default)]
struct RawProgram {
    arrays: Vec<ArrayDecl>,
    free: Vec<String>,
    vars: Vec<String>,
    input: Vec<String>,
    output: Vec<String>,
    body: Vec<Instr>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: &str) -> SchemeError {
        let t = &self.tokens[self.pos];
        SchemeError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), SchemeError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().describe()
            )))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SchemeError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.error(&format!(
                "expected `{kw}`, found {}",
                self.peek().describe()
            )))
        }
    }

    fn name(&mut self) -> Result<String, SchemeError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            other => Err(self.error(&format!("expected a name, found {}", other.describe()))),
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>, SchemeError> {
        let mut names = Vec::new();
        while matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            names.push(self.name()?);
            self.eat(&Tok::Comma);
        }
        Ok(names)
    }

    fn paren_names(&mut self) -> Result<Vec<String>, SchemeError> {
        self.expect(&Tok::LParen)?;
        let names = self.name_list()?;
        self.expect(&Tok::RParen)?;
        Ok(names)
    }

    fn scheme(&mut self, mode: Mode, successor: bool) -> Result<Scheme, SchemeError> {
        if self.eat_kw("forall") {
            let vars = self.name_list()?;
            self.expect(&Tok::LParen)?;
            let inner = self.program(mode, successor)?;
            self.expect(&Tok::RParen)?;
            Ok(quantify(vars, inner))
        } else {
            self.program(mode, successor)
        }
    }

    fn decl(&mut self, raw: &mut RawProgram) -> Result<bool, SchemeError> {
        if self.eat_kw("array") {
            loop {
                let name = self.name()?;
                self.expect(&Tok::Slash)?;
                let dim = match self.bump() {
                    Tok::Num(n) if n >= 1 => n as usize,
                    _ => return Err(self.error("expected a positive dimension")),
                };
                raw.arrays.push(ArrayDecl { name, dim });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        } else if self.eat_kw("free") {
            raw.free.extend(self.name_list()?);
        } else if self.eat_kw("var") {
            raw.vars.extend(self.name_list()?);
        } else if self.is_kw("mode") || self.is_kw("successor") {
            return Err(self.error("`mode` and `successor` may only appear at the very top"));
        } else {
            return Ok(false);
        }
        self.eat(&Tok::Semi);
        Ok(true)
    }

    fn program(&mut self, mode: Mode, successor: bool) -> Result<Scheme, SchemeError> {
        let mut raw = RawProgram::default();
        while self.decl(&mut raw)? {}
        self.expect_kw("input")?;
        raw.input = self.paren_names()?;
        self.eat(&Tok::Semi);
        raw.body = self.block(mode, successor, &["output"])?;
        self.expect_kw("output")?;
        raw.output = self.paren_names()?;
        self.eat(&Tok::Semi);
        while self.decl(&mut raw)? {}
        build_program(raw, mode, successor)
    }

    /// Instructions up to (not including) one of the terminating keywords.
    fn block(
        &mut self,
        mode: Mode,
        successor: bool,
        stop: &[&str],
    ) -> Result<Vec<Instr>, SchemeError> {
        let mut out = Vec::new();
        loop {
            while self.eat(&Tok::Semi) {}
            if stop.iter().any(|kw| self.is_kw(kw)) {
                return Ok(out);
            }
            if self.peek() == &Tok::Eof {
                return Err(self.error(&format!("expected `{}`", stop[0])));
            }
            out.push(self.instr(mode, successor)?);
        }
    }

    fn instr(&mut self, mode: Mode, successor: bool) -> Result<Instr, SchemeError> {
        if self.eat_kw("guess") {
            return Ok(Instr::Guess { var: self.name()? });
        }
        if self.eat_kw("while") {
            let test = self.test(mode, successor)?;
            self.expect_kw("do")?;
            let body = self.block(mode, successor, &["od"])?;
            self.expect_kw("od")?;
            return Ok(Instr::While { test, body });
        }
        if self.eat_kw("if") {
            let test = self.test(mode, successor)?;
            self.expect_kw("then")?;
            let then_body = self.block(mode, successor, &["else", "fi"])?;
            let else_body = if self.eat_kw("else") {
                Some(self.block(mode, successor, &["fi"])?)
            } else {
                None
            };
            self.expect_kw("fi")?;
            return Ok(Instr::If {
                test,
                then_body,
                else_body,
            });
        }
        let target = self.name()?;
        if self.peek() == &Tok::LBracket {
            let index = self.index()?;
            self.expect(&Tok::Assign)?;
            let value = self.term()?;
            return Ok(if value == Term::Max {
                Instr::SetMax {
                    array: target,
                    index,
                }
            } else {
                Instr::Write {
                    array: target,
                    index,
                    value,
                }
            });
        }
        self.expect(&Tok::Assign)?;
        if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::LBracket {
            let array = self.name()?;
            let index = self.index()?;
            return Ok(Instr::Read {
                var: target,
                array,
                index,
            });
        }
        let value = self.term()?;
        Ok(Instr::Assign { var: target, value })
    }

    fn index(&mut self) -> Result<Vec<Term>, SchemeError> {
        self.expect(&Tok::LBracket)?;
        let mut terms = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            terms.push(self.term()?);
        }
        self.expect(&Tok::RBracket)?;
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term, SchemeError> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(Term::Zero)
            }
            Tok::Ident(s) if s == "max" => {
                self.bump();
                Ok(Term::Max)
            }
            Tok::Ident(_) => Ok(Term::Var(self.name()?)),
            other => Err(self.error(&format!(
                "expected a term (name, `0` or `max`), found {}",
                other.describe()
            ))),
        }
    }

    fn test(&mut self, mode: Mode, successor: bool) -> Result<Test, SchemeError> {
        if self.is_kw("forall") {
            Ok(Test::Scheme(Box::new(self.scheme(mode, successor)?)))
        } else {
            Ok(Test::Formula(self.formula()?))
        }
    }

    fn formula(&mut self) -> Result<Formula, SchemeError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Or) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, SchemeError> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, SchemeError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        if self.eat_kw("true") {
            return Ok(Formula::True);
        }
        if self.eat_kw("false") {
            return Ok(Formula::False);
        }
        if matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && self.peek_at(1) == &Tok::LParen
        {
            let name = self.name()?;
            self.expect(&Tok::LParen)?;
            let mut args = vec![self.term()?];
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            self.expect(&Tok::RParen)?;
            return Ok(Formula::Rel { name, args });
        }
        let lhs = self.operand()?;
        let negate = match self.bump() {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected `=` or `!=`"));
            }
        };
        let rhs = self.operand()?;
        let atom = Formula::Eq(lhs, rhs);
        Ok(if negate { Formula::not(atom) } else { atom })
    }

    fn operand(&mut self) -> Result<Operand, SchemeError> {
        if matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
            && self.peek_at(1) == &Tok::LBracket
        {
            let name = self.name()?;
            let index = self.index()?;
            Ok(Operand::Array { name, index })
        } else {
            Ok(Operand::Term(self.term()?))
        }
    }
}

/// Wraps a program in universal quantifiers, computing the variable classes.
pub(crate) fn quantify(vars: Vec<String>, inner: Scheme) -> Scheme {
    let free_vars = inner
        .free_vars
        .iter()
        .filter(|v| !vars.contains(v))
        .cloned()
        .collect();
    let mut bound_vars: Vec<String> = inner
        .io_vars
        .iter()
        .chain(&inner.bound_vars)
        .cloned()
        .collect();
    bound_vars.extend(vars.iter().cloned());
    Scheme {
        mode: inner.mode,
        successor: inner.successor,
        io_vars: Vec::new(),
        free_vars,
        bound_vars,
        arrays: Vec::new(),
        body: Body::Forall {
            vars,
            inner: Box::new(inner),
        },
    }
}

fn build_program(raw: RawProgram, mode: Mode, successor: bool) -> Result<Scheme, SchemeError> {
    if raw.input != raw.output {
        return Err(SchemeError::IoMismatch {
            input: raw.input,
            output: raw.output,
        });
    }
    let mut seen = HashSet::new();
    for v in raw.input.iter().chain(&raw.free).chain(&raw.vars) {
        if !seen.insert(v.clone()) {
            return Err(SchemeError::DuplicateVariable(v.clone()));
        }
    }
    let mut bound = raw.vars.clone();
    let mut targets = Vec::new();
    visit_instrs(&raw.body, &mut |i| {
        if let Some(t) = i.target() {
            targets.push(t.to_string());
        }
    });
    for t in targets {
        if raw.free.contains(&t) {
            return Err(SchemeError::FreeAssigned(t));
        }
        if !seen.contains(&t) {
            seen.insert(t.clone());
            bound.push(t);
        }
    }
    let mut body = raw.body;
    resolve_block(&mut body, &seen);
    Ok(Scheme {
        mode,
        successor,
        io_vars: raw.input,
        free_vars: raw.free,
        bound_vars: bound,
        arrays: raw.arrays,
        body: Body::Program(body),
    })
}

fn resolve_term(t: &mut Term, vars: &HashSet<String>) {
    if let Term::Var(name) = t {
        if !vars.contains(name.as_str()) {
            *t = Term::Const(std::mem::take(name));
        }
    }
}

fn resolve_block(instrs: &mut [Instr], vars: &HashSet<String>) {
    for i in instrs {
        match i {
            Instr::Assign { value, .. } => resolve_term(value, vars),
            Instr::Read { index, .. } | Instr::SetMax { index, .. } => {
                index.iter_mut().for_each(|t| resolve_term(t, vars))
            }
            Instr::Write { index, value, .. } => {
                index.iter_mut().for_each(|t| resolve_term(t, vars));
                resolve_term(value, vars);
            }
            Instr::Guess { .. } => {}
            Instr::While { test, body } => {
                if let Test::Formula(f) = test {
                    f.for_each_term_mut(&mut |t| resolve_term(t, vars));
                }
                resolve_block(body, vars);
            }
            Instr::If {
                test,
                then_body,
                else_body,
            } => {
                if let Test::Formula(f) = test {
                    f.for_each_term_mut(&mut |t| resolve_term(t, vars));
                }
                resolve_block(then_body, vars);
                if let Some(e) = else_body {
                    resolve_block(e, vars);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_variables() {
        let s = parse_scheme("free c var t input(x, y) guess t; x := t; y := max output(x, y)")
            .unwrap();
        assert_eq!(s.io_vars, ["x", "y"]);
        assert_eq!(s.free_vars, ["c"]);
        assert_eq!(s.bound_vars, ["t"]);
    }

    #[test]
    fn unknown_names_are_constants() {
        let s = parse_scheme("input(x) while !E(C, x) do guess x od output(x)").unwrap();
        let Body::Program(p) = &s.body else { panic!() };
        let Instr::While {
            test: Test::Formula(Formula::Not(f)),
            ..
        } = &p[0]
        else {
            panic!("{p:?}")
        };
        assert_eq!(
            **f,
            Formula::rel("E", vec![Term::Const("C".into()), Term::var("x")])
        );
    }

    #[test]
    fn io_lists_must_match() {
        let err = parse_scheme("input(x) output(y)").unwrap_err();
        assert!(matches!(err, SchemeError::IoMismatch { .. }), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_scheme("input(x)\n  x := \noutput(x)").unwrap_err();
        let SchemeError::Syntax { line, .. } = err else {
            panic!("{err}")
        };
        assert_eq!(line, 3);
    }

    #[test]
    fn reserved_names_need_permission() {
        assert!(parse_scheme("input($x) output($x)").is_err());
        let opts = ParseOptions {
            allow_reserved: true,
        };
        assert!(parse_scheme_with("input($x) output($x)", opts).is_ok());
    }

    #[test]
    fn npsb_forbids_value_writes() {
        let err = parse_scheme("array A/1 input(x) A[x] := x output(x)").unwrap_err();
        assert_eq!(err, SchemeError::IllegalArrayWrite { array: "A".into() });
        assert!(parse_scheme("mode npsa array A/1 input(x) A[x] := x output(x)").is_ok());
    }

    #[test]
    fn levels() {
        let l1 = "input(x) output(x)";
        assert_eq!(parse_scheme(l1).unwrap().level(), 1);
        let l2 = "forall y ( free y input(x) output(x) )";
        assert_eq!(parse_scheme(l2).unwrap().level(), 2);
        let l3 = "input(x) while forall y ( free y input(z) output(z) ) do od output(x)";
        assert_eq!(parse_scheme(l3).unwrap().level(), 3);
    }

    #[test]
    fn nested_tests_must_be_quantified() {
        let err = parse_scheme("input(x) while input(z) output(z) do od output(x)");
        assert!(err.is_err());
    }

    #[test]
    fn quantified_variable_must_be_free_inside() {
        let err = parse_scheme("forall y ( input(x) output(x) )").unwrap_err();
        assert_eq!(err, SchemeError::QuantifiedNotFree("y".into()));
    }

    #[test]
    fn free_variables_cannot_be_assigned() {
        let err = parse_scheme("free c input(x) c := x output(x)").unwrap_err();
        assert_eq!(err, SchemeError::FreeAssigned("c".into()));
    }

    #[test]
    fn array_dimensions_are_checked() {
        let err = parse_scheme("array A/2 input(x) A[x] := max output(x)").unwrap_err();
        assert!(matches!(err, SchemeError::DimensionMismatch { .. }));
    }
}
