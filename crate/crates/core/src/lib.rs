//! Fermat-Torricelli and Steiner-Weber points in real projective space under
//! the sine distance `d(P, Q) = sqrt(1 - (p.q)^2)`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod cli;
pub mod error;
pub mod io;
pub mod lemma_lab;
pub mod objective;
pub mod oracle;
pub mod projective;
pub mod solver;

pub use error::{Error, Result};
