//! Decision procedures for Kleene algebra with domain over pointed trees.

pub mod automata;
pub mod error;
pub mod exec;
pub mod freealg;
pub mod pdl;
pub mod relstruct;
pub mod selftest;
pub mod term;
pub mod tree;

pub use error::{Error, ParseErrorKind, Result};
pub use exec::Mode;
pub use freealg::Antichain;
pub use relstruct::{Counterexample, RelStruct, Relation};
pub use term::{Fragment, Label, Term};
pub use tree::Tree;
