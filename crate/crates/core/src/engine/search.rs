//! Reachability over configurations.
//!
//! Only configurations sitting on a `guess` line are stored. Everything
//! between two guesses is deterministic, so it is replayed on the fly and a
//! deterministic loop is caught with Brent's cycle finder. Witnesses are
//! rebuilt from the recorded guess choices.

use std::cell::{Cell, RefCell};

use indexmap::IndexSet;
use rustc_hash::{FxBuildHasher, FxHashMap};

use crate::model::{Elem, Structure};

use super::compile::*;
use super::{Config, Limits};

/// Why a search stopped without an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Exceeded {
    States,
    Depth,
}

pub(crate) struct Env<'a> {
    pub st: &'a Structure,
    pub n: usize,
    pub zero: Elem,
    pub max: Elem,
    /// `next[x]` for the built-in successor, `Elem::MAX` for the last element.
    pub next: Option<&'a [Elem]>,
    pub limits: Limits,
    stored: Cell<usize>,
    memo: RefCell<FxHashMap<Vec<u8>, bool>>,
}

pub(crate) struct ProgramResult {
    pub accepted: bool,
    /// Guess choices leading to acceptance, in order.
    pub choices: Option<Vec<Elem>>,
}

impl<'a> Env<'a> {
    pub fn new(
        st: &'a Structure,
        zero: Elem,
        max: Elem,
        next: Option<&'a [Elem]>,
        limits: Limits,
    ) -> Self {
        Env {
            st,
            n: st.size(),
            zero,
            max,
            next,
            limits,
            stored: Cell::new(0),
            memo: RefCell::new(FxHashMap::default()),
        }
    }

    pub fn states_stored(&self) -> usize {
        self.stored.get()
    }

    pub fn term(&self, t: CTerm, vals: &[Elem]) -> Elem {
        match t {
            CTerm::Var(s) => vals[s],
            CTerm::Elem(e) => e,
            CTerm::Zero => self.zero,
            CTerm::Max => self.max,
        }
    }

    pub fn cell(&self, p: &CProgram, array: usize, index: &[CTerm], vals: &[Elem]) -> usize {
        let a = &p.arrays[array];
        let mut ix = 0;
        for t in index {
            ix = ix * self.n + self.term(*t, vals) as usize;
        }
        a.offset + ix
    }

    pub fn formula(&self, p: &CProgram, f: &CFormula, c: &Config) -> bool {
        match f {
            CFormula::Const(b) => *b,
            CFormula::Rel { rel, args } => {
                let mut buf = [0 as Elem; 8];
                if args.len() <= buf.len() {
                    for (slot, t) in buf.iter_mut().zip(args) {
                        *slot = self.term(*t, &c.vals);
                    }
                    self.st.holds(*rel, &buf[..args.len()])
                } else {
                    let tuple: Vec<Elem> = args.iter().map(|t| self.term(*t, &c.vals)).collect();
                    self.st.holds(*rel, &tuple)
                }
            }
            CFormula::Succ(a, b) => {
                let next = self
                    .next
                    .expect("successor scheme evaluated without an ordering");
                next[self.term(*a, &c.vals) as usize] == self.term(*b, &c.vals)
            }
            CFormula::Eq(a, b) => self.operand(p, a, c) == self.operand(p, b, c),
            CFormula::Not(g) => !self.formula(p, g, c),
            CFormula::And(a, b) => self.formula(p, a, c) && self.formula(p, b, c),
            CFormula::Or(a, b) => self.formula(p, a, c) || self.formula(p, b, c),
        }
    }

    fn operand(&self, p: &CProgram, op: &COp, c: &Config) -> Elem {
        match op {
            COp::Term(t) => self.term(*t, &c.vals),
            COp::Cell { array, index } => c.cells[self.cell(p, *array, index, &c.vals)],
        }
    }

    pub fn initial(&self, p: &CProgram, free: &[Elem], cells: Option<Vec<Elem>>) -> Config {
        let mut vals = vec![self.zero; p.var_names.len()];
        for (slot, v) in p.free_slots.iter().zip(free) {
            vals[*slot] = *v;
        }
        Config {
            line: 1,
            vals,
            cells: cells.unwrap_or_else(|| vec![self.zero; p.ncells]),
        }
    }

    fn accepting(&self, p: &CProgram, c: &Config) -> bool {
        c.line == p.output_line() && c.vals[..p.nio].iter().all(|&v| v == self.max)
    }

    /// One deterministic step. Guess and output lines are not stepped here.
    pub fn step(&self, p: &CProgram, c: &mut Config) -> Result<(), Exceeded> {
        match p.line(c.line) {
            CLine::Input { next } => c.line = *next,
            CLine::Assign { var, value, next } => {
                c.vals[*var] = self.term(*value, &c.vals);
                c.line = *next;
            }
            CLine::Read {
                var,
                array,
                index,
                next,
            } => {
                c.vals[*var] = c.cells[self.cell(p, *array, index, &c.vals)];
                c.line = *next;
            }
            CLine::SetMax { array, index, next } => {
                let ix = self.cell(p, *array, index, &c.vals);
                c.cells[ix] = self.max;
                c.line = *next;
            }
            CLine::Write {
                array,
                index,
                value,
                next,
            } => {
                let ix = self.cell(p, *array, index, &c.vals);
                c.cells[ix] = self.term(*value, &c.vals);
                c.line = *next;
            }
            CLine::Branch {
                test,
                on_true,
                on_false,
            } => {
                let holds = match test {
                    CTest::Qf(f) => self.formula(p, f, c),
                    CTest::Nested(nested) => self.nested(p, nested, c)?,
                };
                c.line = if holds { *on_true } else { *on_false };
            }
            CLine::Guess { .. } | CLine::Output => unreachable!("not a deterministic line"),
        }
        Ok(())
    }

    /// Runs deterministic steps until a guess or output line. `None` means
    /// the run loops forever without guessing again.
    fn settle(
        &self,
        p: &CProgram,
        mut c: Config,
        mut trace: Option<&mut Vec<Config>>,
    ) -> Result<Option<Config>, Exceeded> {
        let mut saved: Option<Config> = None;
        let mut power = 1usize;
        let mut lam = 0usize;
        loop {
            if matches!(p.line(c.line), CLine::Guess { .. } | CLine::Output) {
                return Ok(Some(c));
            }
            self.step(p, &mut c)?;
            if let Some(t) = trace.as_deref_mut() {
                t.push(c.clone());
            }
            match &saved {
                Some(s) if s.line == c.line && *s == c => return Ok(None),
                _ => {}
            }
            lam += 1;
            if saved.is_none() || lam == power {
                saved = Some(c.clone());
                power *= 2;
                lam = 0;
            }
        }
    }

    fn nested(&self, outer: &CProgram, t: &CNested, c: &Config) -> Result<bool, Exceeded> {
        let args: Vec<Elem> = t.args.iter().map(|&s| c.vals[s]).collect();
        let inner = match &t.scheme {
            CScheme::Program(p) => p,
            CScheme::Forall { inner, .. } => inner,
        };
        let mut cells = None;
        let mut key = Vec::with_capacity(8 + 4 * args.len());
        key.extend_from_slice(&(t.id as u32).to_le_bytes());
        for a in &args {
            key.extend_from_slice(&a.to_le_bytes());
        }
        if !t.passed.is_empty() {
            let mut init = vec![self.zero; inner.ncells];
            for &(i, o) in &t.passed {
                let (ia, oa) = (&inner.arrays[i], &outer.arrays[o]);
                let src = &c.cells[oa.offset..oa.offset + oa.len];
                init[ia.offset..ia.offset + ia.len].copy_from_slice(src);
                for v in src {
                    key.extend_from_slice(&v.to_le_bytes());
                }
            }
            cells = Some(init);
        }
        if let Some(&hit) = self.memo.borrow().get(&key) {
            return Ok(hit);
        }
        let result = self.scheme(&t.scheme, &args, cells)?;
        let mut memo = self.memo.borrow_mut();
        if memo.len() < self.limits.memo_capacity {
            memo.insert(key, result);
        }
        Ok(result)
    }

    /// Acceptance of a compiled scheme under the given free-variable values.
    pub fn scheme(
        &self,
        s: &CScheme,
        free: &[Elem],
        cells: Option<Vec<Elem>>,
    ) -> Result<bool, Exceeded> {
        match s {
            CScheme::Program(p) => Ok(self.program(p, free, cells, false)?.accepted),
            CScheme::Forall {
                quantified,
                sources,
                inner,
            } => {
                let mut binding = vec![0 as Elem; *quantified];
                let mut inner_free = vec![0 as Elem; sources.len()];
                let mut exceeded = None;
                loop {
                    for (slot, src) in inner_free.iter_mut().zip(sources) {
                        *slot = match *src {
                            FreeSource::Outer(i) => free[i],
                            FreeSource::Quantified(j) => binding[j],
                        };
                    }
                    match self.program(inner, &inner_free, cells.clone(), false) {
                        Ok(r) if !r.accepted => return Ok(false),
                        Ok(_) => {}
                        Err(Exceeded::States) => return Err(Exceeded::States),
                        Err(e) => exceeded = Some(e),
                    }
                    if !advance(&mut binding, self.n) {
                        break;
                    }
                }
                match exceeded {
                    Some(e) => Err(e),
                    None => Ok(true),
                }
            }
        }
    }

    pub fn program(
        &self,
        p: &CProgram,
        free: &[Elem],
        cells: Option<Vec<Elem>>,
        witness: bool,
    ) -> Result<ProgramResult, Exceeded> {
        let codec = Codec::new(p, self.n, self.zero, self.max);
        let start = self.initial(p, free, cells);
        let Some(root) = self.settle(p, start, None)? else {
            return Ok(ProgramResult {
                accepted: false,
                choices: None,
            });
        };
        if matches!(p.line(root.line), CLine::Output) {
            let accepted = self.accepting(p, &root);
            return Ok(ProgramResult {
                accepted,
                choices: accepted.then(Vec::new),
            });
        }
        let mut seen: IndexSet<Box<[u8]>, FxBuildHasher> = IndexSet::default();
        let mut parents: Vec<(u32, Elem)> = Vec::new();
        self.store(&mut seen, codec.encode(&root))?;
        if witness {
            parents.push((u32::MAX, 0));
        }
        let mut cursor = 0;
        let mut depth = 0usize;
        let mut level_end = 1;
        let mut cut = false;
        let mut scratch = root;
        while cursor < seen.len() {
            if cursor == level_end {
                depth += 1;
                level_end = seen.len();
            }
            if depth >= self.limits.max_depth {
                cut = true;
                break;
            }
            codec.decode(&seen[cursor], &mut scratch);
            let CLine::Guess { var, next } = *p.line(scratch.line) else {
                unreachable!("only guess lines are stored")
            };
            for g in 0..self.n as Elem {
                let mut c = scratch.clone();
                c.vals[var] = g;
                c.line = next;
                let Some(c) = self.settle(p, c, None)? else {
                    continue;
                };
                if matches!(p.line(c.line), CLine::Output) {
                    if self.accepting(p, &c) {
                        let choices = witness.then(|| {
                            let mut path = vec![g];
                            let mut at = cursor as u32;
                            while at != u32::MAX {
                                let (parent, choice) = parents[at as usize];
                                if parent != u32::MAX {
                                    path.push(choice);
                                }
                                at = parent;
                            }
                            path.reverse();
                            path
                        });
                        return Ok(ProgramResult {
                            accepted: true,
                            choices,
                        });
                    }
                    continue;
                }
                if self.store(&mut seen, codec.encode(&c))? && witness {
                    parents.push((cursor as u32, g));
                }
            }
            cursor += 1;
        }
        if cut {
            return Err(Exceeded::Depth);
        }
        Ok(ProgramResult {
            accepted: false,
            choices: None,
        })
    }

    fn store(
        &self,
        seen: &mut IndexSet<Box<[u8]>, FxBuildHasher>,
        key: Box<[u8]>,
    ) -> Result<bool, Exceeded> {
        if seen.contains(&key) {
            return Ok(false);
        }
        let used = self.stored.get() + 1;
        if used > self.limits.max_states {
            return Err(Exceeded::States);
        }
        self.stored.set(used);
        seen.insert(key);
        Ok(true)
    }

    /// Every configuration of the accepting run selected by `choices`.
    pub fn replay(
        &self,
        p: &CProgram,
        free: &[Elem],
        choices: &[Elem],
    ) -> Result<Vec<Config>, Exceeded> {
        let mut trace = vec![self.initial(p, free, None)];
        let mut c = self
            .settle(p, trace[0].clone(), Some(&mut trace))?
            .expect("replayed run reached a guess");
        for &g in choices {
            let CLine::Guess { var, next } = *p.line(c.line) else {
                unreachable!("choice recorded at a guess line")
            };
            c.vals[var] = g;
            c.line = next;
            trace.push(c.clone());
            c = self
                .settle(p, c, Some(&mut trace))?
                .expect("replayed run reached a guess");
        }
        Ok(trace)
    }
}

/// Lexicographic successor of `v` in `0..n`; false after the last vector.
pub(crate) fn advance(v: &mut [Elem], n: usize) -> bool {
    for x in v.iter_mut().rev() {
        if (*x as usize) + 1 < n {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

/// Byte encoding of stored configurations. Binary arrays are bit-packed.
pub(crate) struct Codec {
    wide: bool,
    binary: bool,
    nvars: usize,
    ncells: usize,
    zero: Elem,
    max: Elem,
}

impl Codec {
    pub fn new(p: &CProgram, n: usize, zero: Elem, max: Elem) -> Self {
        Codec {
            wide: n > 256,
            binary: p.binary,
            nvars: p.var_names.len(),
            ncells: p.ncells,
            zero,
            max,
        }
    }

    pub fn encode(&self, c: &Config) -> Box<[u8]> {
        let w = if self.wide { 4 } else { 1 };
        let cell_bytes = if self.binary {
            self.ncells.div_ceil(8)
        } else {
            self.ncells * w
        };
        let mut out = Vec::with_capacity(4 + self.nvars * w + cell_bytes);
        out.extend_from_slice(&(c.line as u32).to_le_bytes());
        let put = |out: &mut Vec<u8>, v: Elem| {
            if self.wide {
                out.extend_from_slice(&v.to_le_bytes());
            } else {
                out.push(v as u8);
            }
        };
        for &v in &c.vals {
            put(&mut out, v);
        }
        if self.binary {
            for chunk in c.cells.chunks(8) {
                let mut byte = 0u8;
                for (i, &v) in chunk.iter().enumerate() {
                    if v == self.max {
                        byte |= 1 << i;
                    }
                }
                out.push(byte);
            }
        } else {
            for &v in &c.cells {
                put(&mut out, v);
            }
        }
        out.into_boxed_slice()
    }

    pub fn decode(&self, key: &[u8], into: &mut Config) {
        into.line = u32::from_le_bytes(key[..4].try_into().unwrap()) as usize;
        let mut at = 4;
        let get = |at: &mut usize| -> Elem {
            if self.wide {
                let v = Elem::from_le_bytes(key[*at..*at + 4].try_into().unwrap());
                *at += 4;
                v
            } else {
                let v = key[*at] as Elem;
                *at += 1;
                v
            }
        };
        into.vals.clear();
        for _ in 0..self.nvars {
            into.vals.push(get(&mut at));
        }
        into.cells.clear();
        if self.binary {
            for i in 0..self.ncells {
                let bit = key[at + i / 8] >> (i % 8) & 1;
                into.cells.push(if bit == 1 { self.max } else { self.zero });
            }
        } else {
            for _ in 0..self.ncells {
                into.cells.push(get(&mut at));
            }
        }
    }
}
