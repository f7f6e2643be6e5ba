//! Abstract syntax, concrete grammar and printing for the modal language and
//! the first-order correspondence language.
//!
//! Modal grammar:
//!
//! ```text
//! f ::= false | p<digits> | f & f | f "|" f | f -> f | box f | dia f | ( f )
//! ```
//!
//! Correspondence grammar:
//!
//! ```text
//! f ::= false | P<digits>(v) | R(v,v) | Rb(v,v) | Rd(v,v)
//!     | forall v. f | exists v. f | f & f | f "|" f | f -> f | ( f )
//! ```
//!
//! Both printers emit text the parsers accept, so `parse(print(f)) == f`.

mod fol;
mod lexer;
mod modal;

use std::collections::BTreeSet;

use thiserror::Error;

pub use fol::{parse_fol, FolFormula, Rel, Var};
pub use modal::{parse_modal, ModalFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown token `{found}` at byte {pos}")]
    UnknownToken { pos: usize, found: char },
    #[error("`{symbol}` at byte {pos} takes {expected} argument(s), got {found}")]
    Arity {
        pos: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
}

/// The unary part of a vocabulary: which proposition letters are in play.
/// `R`, `R□` and `R◇` are always present.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    letters: BTreeSet<u32>,
}

impl Signature {
    pub fn new(letters: impl IntoIterator<Item = u32>) -> Self {
        let letters: BTreeSet<u32> = letters.into_iter().collect();
        assert!(!letters.contains(&0), "proposition letters are indexed from 1");
        Signature { letters }
    }

    /// `{p1, ..., pn}`.
    pub fn first(n: u32) -> Self {
        Signature::new(1..=n)
    }

    pub fn letters(&self) -> impl Iterator<Item = u32> + '_ {
        self.letters.iter().copied()
    }

    pub fn contains(&self, letter: u32) -> bool {
        self.letters.contains(&letter)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            letters: self.letters.union(&other.letters).copied().collect(),
        }
    }

    /// The letters a modal formula uses.
    pub fn of_modal(f: &ModalFormula) -> Signature {
        Signature {
            letters: f.letters(),
        }
    }

    /// The unary predicates a correspondence formula uses.
    pub fn of_fol(f: &FolFormula) -> Signature {
        Signature {
            letters: f.predicates(),
        }
    }
}
