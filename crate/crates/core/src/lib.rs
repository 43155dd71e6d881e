//! Few-copy quantum verification toolkit.
//!
//! The crate bundles randomized single-copy entanglement detection, the
//! translation of entanglement witnesses into sampling tables, quantum state
//! verification, MUB-based selective state tomography and classical shadows.
//! Everything runs against the built-in simulators in [`simcore`] (dense
//! statevectors and block-product states) and [`stabsim`] (bit-packed
//! stabilizer tableaus).
//!
//! Qubit convention: qubit `0` is the most significant bit of an amplitude
//! index. A measurement outcome bit `0` corresponds to the `+1` eigenvalue.

pub mod detect;
pub mod error;
pub mod mub;
pub mod parallel;
pub mod shadow;
pub mod simcore;
pub mod stabsim;
pub mod stats;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version string, echoed into experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
