//! Exact-diagonalization toolkit for ground-state quantum Fisher information
//! near critical and anti-critical points: Rabi-type oscillator models,
//! the LMG model and periodic Ising chains.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod models;
pub mod qfi;
pub mod settings;
pub mod spectral;
pub mod spin;
pub mod sweep;

pub use error::{Error, Result};
pub use models::{build, solve, Family, ModelInstance, ModelSpec, Solution};
pub use settings::Settings;
pub use spectral::{eigendecompose, HermitianOperator, QuantumState, SpectralDecomposition, C64};
