//! Quantum stochastic walks on directed and undirected graphs.
//!
//! The crate builds GKSL evolution generators from graphs in the local,
//! global and nonmoralizing regimes, evolves density matrices with a dense
//! Padé exponential or a Krylov exponential action, and analyses the
//! resulting dynamics.

pub mod analysis;
pub mod cli;
pub mod demoral;
pub mod error;
pub mod evolve;
pub mod expaction;
pub mod generator;
pub mod graphio;
pub mod linalg;

pub use error::{Error, Result};
