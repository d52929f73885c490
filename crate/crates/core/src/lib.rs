//! Symbolic toolkit for the n-fold reduced bar construction over strict
//! n-fold monoidal categories: Δ^op rewriting, coloured shuffles, the χ
//! tables, computable models and the coherence checks built on them.

pub mod bar;
pub mod chi;
pub mod error;
pub mod model;
pub mod shuffle;
pub mod simplicial;
pub mod suites;

pub use error::{Error, Result};
