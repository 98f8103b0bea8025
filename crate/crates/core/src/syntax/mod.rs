//! Source language: names, terms, the concrete grammar, substitution and
//! alpha-equivalence.

mod alpha;
mod name;
mod parse;
mod print;
mod subst;
mod term;

use thiserror::Error;

pub use alpha::{alpha_equal, alpha_equal_up_to_binding_order};
pub use name::{fresh, Name, NameSet};
pub use parse::parse;
pub use print::{print, print_operand};
pub use subst::{free_vars, rename_all, subst, subst_many};
pub use term::{Prim, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Unexpected {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: duplicate letrec binding `{name}`")]
    DuplicateBinding { line: usize, col: usize, name: String },
    #[error("{line}:{col}: integer literal out of range: {text}")]
    IntOutOfRange { line: usize, col: usize, text: String },
    #[error("invalid name `{0}`")]
    InvalidName(String),
}
