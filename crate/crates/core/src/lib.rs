//! Exact constructions on threads, fat Cantor threads, Lipschitz maps between
//! threads, the diagonal `γ*` construction and finite skein truncations.
//!
//! All arithmetic is exact ([`exactnum::Rational`]); there are no floating
//! point tolerances anywhere in the library.

// Errors carry exact rational witnesses.
#![allow(clippy::result_large_err)]

pub mod cantor;
pub mod exactnum;
pub mod fixtures;
pub mod gammastar;
pub mod lipmap;
pub mod skein;
pub mod thread;

pub use exactnum::{q, OpenInterval, Rational};
pub use thread::{ExtendedInterval, Thread, ThreadPoint};
