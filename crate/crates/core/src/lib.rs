//! Computational group theory for finitely presented groups of moderate order.

pub mod aut;
pub mod constructors;
pub mod coset;
pub mod error;
pub mod finite;
pub mod gf2;
pub mod iso;
pub mod parser;
pub mod perm;
pub mod permgroup;
pub mod search;
pub mod structure;
pub mod word;

pub use error::{GroupError, Result};
pub use finite::FiniteGroup;
pub use parser::{parse_presentation, serialize, Presentation};
pub use perm::Perm;
pub use permgroup::PermGroup;
pub use word::Word;
