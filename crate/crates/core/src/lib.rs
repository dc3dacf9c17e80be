//! Exact envelopes of homogeneous functions on finite ordered sets.
//!
//! The guide in `book/` walks through the modules; its code blocks run as
//! doctests of this crate.

pub mod action;
pub mod algebra;
pub mod demo;
pub mod envelope;
pub mod fixtures;
pub mod instance;
pub mod io;
pub mod order;
pub mod statements;
pub mod util;
pub mod verifier;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/instances.md")]
    mod instances {}
    #[doc = include_str!("../../../book/src/envelopes.md")]
    mod envelopes {}
    #[doc = include_str!("../../../book/src/statements.md")]
    mod statements {}
    #[doc = include_str!("../../../book/src/verifier.md")]
    mod verifier {}
    #[doc = include_str!("../../../book/src/continuum.md")]
    mod continuum {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
