//! Program schemes: syntax, validation and the rewriting passes.

pub mod ast;
mod desugar;
mod label;
mod lexer;
pub(crate) mod normalize;
mod parser;
mod printer;
mod validate;

pub use ast::*;
pub use desugar::desugar;
pub use label::{label, LabeledScheme, Line, LineOp};
pub use normalize::normalize_for_translation;
pub use parser::{parse_scheme, parse_scheme_with, ParseOptions};
pub use printer::print;
pub use validate::validate;

pub(crate) use parser::quantify;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("input list {input:?} differs from output list {output:?}")]
    IoMismatch {
        input: Vec<String>,
        output: Vec<String>,
    },
    #[error("a program needs at least one input-output variable")]
    EmptyIo,
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("free variable `{0}` is assigned or guessed")]
    FreeAssigned(String),
    #[error("`{0}` is used as a variable but never declared")]
    UnknownVariable(String),
    #[error("constant `{0}` clashes with a variable of the same name")]
    ConstantClash(String),
    #[error("array `{array}` may only be set to max in npsb mode")]
    IllegalArrayWrite { array: String },
    #[error("array `{0}` is not declared")]
    UnknownArray(String),
    #[error("array `{0}` declared twice")]
    DuplicateArray(String),
    #[error("array `{array}` has dimension {expected} but is indexed by {got} terms")]
    DimensionMismatch {
        array: String,
        expected: usize,
        got: usize,
    },
    #[error("quantified variable `{0}` is not free in the quantified program")]
    QuantifiedNotFree(String),
    #[error("forall must quantify at least one variable")]
    EmptyQuantifier,
    #[error("a nested test must be a universally quantified scheme")]
    TestNotQuantified,
    #[error("test scheme uses `{0}`, which is not a variable of the enclosing program")]
    TestFreeVariable(String),
    #[error("nested scheme disagrees with the enclosing mode or successor setting")]
    NestedModeMismatch,
    #[error("relation `succ` must have two arguments")]
    SuccArity,
    #[error("expected a level-1 scheme, found level {0}")]
    NotLevel1(usize),
    #[error("expected an npsb scheme")]
    NotNpsb,
    #[error("scheme still contains `if`; desugar it first")]
    NotDesugared,
    #[error("scheme is not in translation normal form: {0}")]
    NotNormalized(String),
    #[error("scheme is already in successor mode")]
    AlreadySuccessor,
    #[error("scheme is not in successor mode")]
    NotSuccessor,
}
