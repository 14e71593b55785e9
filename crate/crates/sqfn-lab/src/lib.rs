//! Numerical laboratory for intrinsic square functions on discretized `R^n`.
//!
//! The crate samples functions on a uniform grid over `[-L, L]^n` (n = 1 or 2),
//! evaluates intrinsic square functions built from a finite dictionary of
//! mean-zero, unit-ball-supported, Hölder-capped kernels, computes Muckenhoupt
//! weight constants and weighted (weak) Herz norms, and runs empirical
//! boundedness and scaling experiments over a deterministic test corpus.
//!
//! Everything is deterministic for a fixed configuration and seed: dictionary
//! construction, corpus generation, quadrature, and report emission all use
//! fixed traversal orders, so repeated runs produce byte-identical reports.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod herz;
pub mod kernels;
pub mod report;
pub mod sqfn;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
