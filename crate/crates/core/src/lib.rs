//! Algebraic signatures with normalizing constructors.
//!
//! A `.gom` module declares sorts, operators (fixed-arity or variadic) and
//! hooks that rewrite terms as they are built. The [`hook_engine::Factory`]
//! compiled from a module is the only way to construct terms, so every term
//! in its maximally shared [`term_store::TermStore`] is a normal form of the
//! hooks. On top of that sit list matching ([`matcher`]), traversal
//! strategies ([`strategy_lib`]) and a proof search for system BV over the
//! shipped `Struct` module ([`bv_prover`]).

pub mod bv_prover;
pub mod cli;
pub mod corpus;
pub mod gom_parser;
pub mod hook_engine;
pub mod matcher;
pub mod signature_model;
pub mod strategy_lib;
pub mod term_store;

pub use hook_engine::{BuildError, Factory};
pub use matcher::{match_all, match_one, Pattern, Substitution, Template};
pub use term_store::{NodeRef, TermStore};

/// Runs `f` with enough stack for one more level of a deep recursion.
#[inline]
pub(crate) fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, f)
}
