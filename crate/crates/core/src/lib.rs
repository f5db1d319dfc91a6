//! One-shot purity concentration and one-way local purity distillation.
//!
//! The crate works on explicit finite-dimensional states. It provides:
//!
//! - [`operator`]: multipartite complex linear algebra (states, partial traces,
//!   distances, purifications, seeded random generators).
//! - [`entropy`]: the one-shot entropic quantities behind the achievable rates
//!   (smoothed support max-entropy, hypothesis-testing relative entropy via an
//!   exact Neyman–Pearson solver, max-information, i.i.d. sweeps).
//! - [`concentration`]: the single-party protocol that extracts pure qubits
//!   from `ρ^A` with a borrowed ancilla.
//! - [`distillation`]: the two-party protocol with one-way dephased
//!   communication, permutation binning and sequential decoding.
//! - [`harness`]: state-file ingestion, reports and the command-line driver.
//!
//! All logarithms are base 2. Trace norms are unhalved (`‖ρ − σ‖₁ ∈ [0, 2]`).

#![forbid(unsafe_code)]

pub mod concentration;
pub mod distillation;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod operator;

pub use error::{Error, Result};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
