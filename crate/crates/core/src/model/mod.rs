//! Signatures, finite structures and expansions.
//!
//! The universe of a structure of size `n` is always `0..n`. Relations are
//! stored as sorted, deduplicated flat tuple lists so that structural equality
//! coincides with equality of the canonical serialization.

mod format;

pub use format::{parse_structure, FormatError};

use std::fmt;

use thiserror::Error;

/// A universe element.
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("structures must have size at least 2 (got {0})")]
    TooSmall(usize),
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    #[error("relation `{0}` must have positive arity")]
    ZeroArity(String),
    #[error("relation `{name}` has arity {expected}, got a tuple of length {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("element {elem} out of range for a structure of size {size}")]
    OutOfRange { elem: Elem, size: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("constant `{0}` has no value")]
    MissingConstant(String),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("binding for `{0}`: {1}")]
    BadBinding(String, String),
}

/// A relational signature: relation symbols with arities and constant symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new<R, C>(relations: R, constants: C) -> Result<Self, ModelError>
    where
        R: IntoIterator<Item = (String, usize)>,
        C: IntoIterator<Item = String>,
    {
        let sig = Signature {
            relations: relations.into_iter().collect(),
            constants: constants.into_iter().collect(),
        };
        let mut seen = std::collections::HashSet::new();
        for (name, arity) in &sig.relations {
            if *arity == 0 {
                return Err(ModelError::ZeroArity(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateSymbol(name.clone()));
            }
        }
        for name in &sig.constants {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(sig)
    }

    /// Shorthand for building signatures in code: `Signature::of(&[("E", 2)], &["C"])`.
    pub fn of(relations: &[(&str, usize)], constants: &[&str]) -> Self {
        Self::new(
            relations.iter().map(|(n, a)| (n.to_string(), *a)),
            constants.iter().map(|c| c.to_string()),
        )
        .expect("static signature is well-formed")
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|(n, _)| n == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|n| n == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].1
    }
}

/// A relation of fixed arity, stored as a sorted, deduplicated flat list of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    data: Vec<Elem>,
}

impl Relation {
    pub fn empty(arity: usize) -> Self {
        Relation {
            arity,
            data: Vec::new(),
        }
    }

    /// Builds a relation from tuples; order and duplicates are irrelevant.
    ///
    /// Panics if a tuple has the wrong length.
    pub fn from_tuples<I, T>(arity: usize, tuples: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[Elem]>,
    {
        let mut rows: Vec<Vec<Elem>> = tuples
            .into_iter()
            .map(|t| {
                let t = t.as_ref();
                assert_eq!(t.len(), arity, "tuple length does not match arity");
                t.to_vec()
            })
            .collect();
        rows.sort_unstable();
        rows.dedup();
        Relation {
            arity,
            data: rows.concat(),
        }
    }

    /// Builds from an unsorted flat list, sorting and deduplicating it.
    pub(crate) fn from_flat(arity: usize, data: Vec<Elem>) -> Self {
        if arity == 1 {
            let mut data = data;
            data.sort_unstable();
            data.dedup();
            return Relation { arity, data };
        }
        let mut rows: Vec<&[Elem]> = data.chunks(arity).collect();
        rows.sort_unstable();
        rows.dedup();
        let flat = rows.concat();
        Relation { arity, data: flat }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Elem]> + '_ {
        self.data.chunks(self.arity)
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        if tuple.len() != self.arity {
            return false;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            let row = &self.data[mid * self.arity..(mid + 1) * self.arity];
            match row.cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    fn max_elem(&self) -> Option<Elem> {
        self.data.iter().copied().max()
    }
}

/// A finite structure over a signature with universe `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    name: String,
    signature: Signature,
    size: usize,
    relations: Vec<Relation>,
    constants: Vec<Elem>,
}

impl Structure {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        relations: Vec<Relation>,
        constants: Vec<Elem>,
    ) -> Result<Self, ModelError> {
        if size < 2 {
            return Err(ModelError::TooSmall(size));
        }
        if relations.len() != signature.relations().len() {
            return Err(ModelError::SignatureMismatch);
        }
        for ((name, arity), rel) in signature.relations().iter().zip(&relations) {
            if rel.arity() != *arity {
                return Err(ModelError::ArityMismatch {
                    name: name.clone(),
                    expected: *arity,
                    got: rel.arity(),
                });
            }
            if let Some(m) = rel.max_elem() {
                if m as usize >= size {
                    return Err(ModelError::OutOfRange { elem: m, size });
                }
            }
        }
        if constants.len() != signature.constants().len() {
            let missing = signature.constants()[constants.len().min(signature.constants().len())..]
                .first()
                .cloned()
                .unwrap_or_default();
            return Err(ModelError::MissingConstant(missing));
        }
        for &c in &constants {
            if c as usize >= size {
                return Err(ModelError::OutOfRange { elem: c, size });
            }
        }
        Ok(Structure {
            name: name.into(),
            signature,
            size,
            relations,
            constants,
        })
    }

    /// Convenience constructor from tuple lists given in signature order.
    pub fn from_parts(
        name: &str,
        signature: Signature,
        size: usize,
        tuples: Vec<Vec<Vec<Elem>>>,
        constants: Vec<Elem>,
    ) -> Result<Self, ModelError> {
        let mut relations = Vec::with_capacity(tuples.len());
        for ((rname, arity), rows) in signature.relations().iter().zip(tuples) {
            if let Some(bad) = rows.iter().find(|t| t.len() != *arity) {
                return Err(ModelError::ArityMismatch {
                    name: rname.clone(),
                    expected: *arity,
                    got: bad.len(),
                });
            }
            relations.push(Relation::from_tuples(*arity, rows));
        }
        Structure::new(name, signature, size, relations, constants)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relation(&self, index: usize) -> &Relation {
        &self.relations[index]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&Relation> {
        self.signature
            .relation_index(name)
            .map(|i| &self.relations[i])
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn constant(&self, index: usize) -> Elem {
        self.constants[index]
    }

    pub fn constant_by_name(&self, name: &str) -> Option<Elem> {
        self.signature
            .constant_index(name)
            .map(|i| self.constants[i])
    }

    pub fn constants(&self) -> &[Elem] {
        &self.constants
    }

    pub fn holds(&self, rel: usize, tuple: &[Elem]) -> bool {
        self.relations[rel].contains(tuple)
    }

    /// Canonical text form; `parse_structure` inverts it exactly.
    pub fn to_document(&self) -> String {
        format::serialize(self)
    }

    /// True iff `self` is a substructure of `other` under the identity
    /// embedding of `0..self.size()` into `0..other.size()`.
    pub fn is_substructure_of(&self, other: &Structure) -> Result<bool, ModelError> {
        if self.signature != other.signature {
            return Err(ModelError::SignatureMismatch);
        }
        if self.size > other.size || self.constants != other.constants {
            return Ok(false);
        }
        let bound = self.size as Elem;
        for (mine, theirs) in self.relations.iter().zip(&other.relations) {
            let restricted = theirs.iter().filter(|t| t.iter().all(|&e| e < bound));
            if !restricted.eq(mine.iter()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The isomorphic copy obtained by renaming every element `e` to `perm[e]`.
    pub fn apply_permutation(&self, perm: &[Elem]) -> Result<Structure, ModelError> {
        check_permutation(perm, self.size)?;
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let flat = r.data.iter().map(|&e| perm[e as usize]).collect();
                Relation::from_flat(r.arity, flat)
            })
            .collect();
        let constants = self.constants.iter().map(|&c| perm[c as usize]).collect();
        Ok(Structure {
            name: self.name.clone(),
            signature: self.signature.clone(),
            size: self.size,
            relations,
            constants,
        })
    }

    /// Restriction to the elements of `keep`, renumbered in the given order.
    /// Constants must all lie in `keep`.
    pub fn induced(&self, keep: &[Elem]) -> Result<Structure, ModelError> {
        let mut index = vec![None; self.size];
        for (i, &e) in keep.iter().enumerate() {
            if e as usize >= self.size {
                return Err(ModelError::OutOfRange {
                    elem: e,
                    size: self.size,
                });
            }
            index[e as usize] = Some(i as Elem);
        }
        let mut constants = Vec::with_capacity(self.constants.len());
        for (name, &c) in self.signature.constants().iter().zip(&self.constants) {
            match index[c as usize] {
                Some(i) => constants.push(i),
                None => return Err(ModelError::MissingConstant(name.clone())),
            }
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let mut flat = Vec::new();
                for t in r.iter() {
                    if t.iter().all(|&e| index[e as usize].is_some()) {
                        flat.extend(t.iter().map(|&e| index[e as usize].unwrap()));
                    }
                }
                Relation::from_flat(r.arity, flat)
            })
            .collect();
        Structure::new(
            self.name.clone(),
            self.signature.clone(),
            keep.len(),
            relations,
            constants,
        )
    }
}

pub(crate) fn check_permutation(perm: &[Elem], n: usize) -> Result<(), ModelError> {
    if perm.len() != n {
        return Err(ModelError::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        let p = p as usize;
        if p >= n || seen[p] {
            return Err(ModelError::NotAPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given as an image list.
pub fn invert_permutation(perm: &[Elem]) -> Vec<Elem> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p as usize] = i as Elem;
    }
    inv
}

/// A structure expanded by values for some extra constant names (the free
/// variables of a scheme).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion<'a> {
    base: &'a Structure,
    bindings: Vec<(String, Elem)>,
}

impl<'a> Expansion<'a> {
    pub fn new(base: &'a Structure, bindings: Vec<(String, Elem)>) -> Result<Self, ModelError> {
        let mut seen = std::collections::HashSet::new();
        for (name, value) in &bindings {
            if *value as usize >= base.size() {
                return Err(ModelError::BadBinding(
                    name.clone(),
                    format!("value {value} out of range"),
                ));
            }
            if !seen.insert(name.as_str()) {
                return Err(ModelError::BadBinding(name.clone(), "bound twice".into()));
            }
            if base.signature().constant_index(name).is_some() {
                return Err(ModelError::BadBinding(
                    name.clone(),
                    "clashes with a signature constant".into(),
                ));
            }
        }
        Ok(Expansion { base, bindings })
    }

    pub fn plain(base: &'a Structure) -> Self {
        Expansion {
            base,
            bindings: Vec::new(),
        }
    }

    pub fn base(&self) -> &'a Structure {
        self.base
    }

    pub fn bindings(&self) -> &[(String, Elem)] {
        &self.bindings
    }

    pub fn get(&self, name: &str) -> Option<Elem> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_document())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: usize, edges: &[(Elem, Elem)]) -> Structure {
        Structure::from_parts(
            "g",
            Signature::of(&[("E", 2)], &[]),
            n,
            vec![edges.iter().map(|&(a, b)| vec![a, b]).collect()],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn signature_rejects_duplicates_and_zero_arity() {
        let dup = Signature::new([("E".to_string(), 2)], ["E".to_string()]);
        assert_eq!(dup, Err(ModelError::DuplicateSymbol("E".into())));
        let zero = Signature::new([("R".to_string(), 0)], []);
        assert_eq!(zero, Err(ModelError::ZeroArity("R".into())));
    }

    #[test]
    fn size_one_is_rejected() {
        let err = Structure::from_parts("s", Signature::of(&[], &[]), 1, vec![], vec![]);
        assert_eq!(err, Err(ModelError::TooSmall(1)));
    }

    #[test]
    fn relation_lookup() {
        let r = Relation::from_tuples(2, [[1, 2], [0, 1], [1, 2], [2, 0]]);
        assert_eq!(r.len(), 3);
        assert!(r.contains(&[0, 1]));
        assert!(r.contains(&[2, 0]));
        assert!(!r.contains(&[1, 0]));
        assert!(!r.contains(&[1]));
    }

    #[test]
    fn substructure_examples() {
        let a = digraph(2, &[]);
        let b = digraph(3, &[(0, 1)]);
        assert!(a.is_substructure_of(&a).unwrap());
        assert!(!a.is_substructure_of(&b).unwrap());
        let a2 = digraph(2, &[(0, 1)]);
        let b2 = digraph(3, &[(0, 1), (1, 2)]);
        assert!(a2.is_substructure_of(&b2).unwrap());
        assert!(!b2.is_substructure_of(&a2).unwrap());
    }

    #[test]
    fn substructure_signature_mismatch() {
        let a = digraph(2, &[]);
        let other = Structure::from_parts(
            "u",
            Signature::of(&[("U", 1)], &[]),
            2,
            vec![vec![]],
            vec![],
        )
        .unwrap();
        assert_eq!(
            a.is_substructure_of(&other),
            Err(ModelError::SignatureMismatch)
        );
    }

    #[test]
    fn constants_must_agree_for_substructure() {
        let sig = Signature::of(&[("E", 2)], &["C"]);
        let a = Structure::from_parts("a", sig.clone(), 2, vec![vec![]], vec![0]).unwrap();
        let b = Structure::from_parts("b", sig.clone(), 3, vec![vec![]], vec![1]).unwrap();
        let c = Structure::from_parts("c", sig, 3, vec![vec![]], vec![0]).unwrap();
        assert!(!a.is_substructure_of(&b).unwrap());
        assert!(a.is_substructure_of(&c).unwrap());
    }

    #[test]
    fn permutation_examples() {
        let g = digraph(3, &[(0, 1)]);
        assert_eq!(g.apply_permutation(&[0, 1, 2]).unwrap(), g);
        let swapped = g.apply_permutation(&[1, 0, 2]).unwrap();
        assert!(swapped.relation(0).contains(&[1, 0]));
        assert_eq!(swapped.relation(0).len(), 1);
        assert_eq!(
            g.apply_permutation(&[0, 0, 1]),
            Err(ModelError::NotAPermutation(3))
        );
    }

    #[test]
    fn induced_renumbers() {
        let g = digraph(4, &[(0, 3), (3, 2), (1, 2)]);
        let h = g.induced(&[3, 2]).unwrap();
        assert_eq!(h.size(), 2);
        assert_eq!(h.relation(0).iter().collect::<Vec<_>>(), vec![&[0, 1][..]]);
    }

    #[test]
    fn expansion_validation() {
        let g = digraph(3, &[]);
        assert!(Expansion::new(&g, vec![("z".into(), 2)]).is_ok());
        assert!(Expansion::new(&g, vec![("z".into(), 3)]).is_err());
        assert!(Expansion::new(&g, vec![("z".into(), 0), ("z".into(), 1)]).is_err());
    }
}
