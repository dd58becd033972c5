//! Exact density-matrix simulation of noisy variational circuits together with
//! the metric tensors and update rules used to optimise them.
//!
//! The crate is organised bottom-up:
//!
//! - [`state`] and [`pauli`]: dense complex matrices, density operators,
//!   spectral decompositions and Pauli-sum observables.
//! - [`channels`]: parametric gates, depolarising noise, circuit execution and
//!   parameter derivatives of the output state.
//! - [`metric`]: quantum Fisher information (exact, vectorised and
//!   Hilbert–Schmidt approximation), Fubini–Study metric, the mixed-state
//!   McLachlan metric, classical Fisher information and regularised inverses.
//! - [`optim`]: gradient descent, natural gradient and the two imaginary-time
//!   update rules, plus trajectory recording.
//! - [`experiments`]: benchmark builders and the reproducible studies.
//!
//! Data-parallel loops (derivatives over parameters, metric rows, sweep
//! repetitions) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise. Results do not depend on the thread
//! count.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod metric;
pub mod optim;
pub mod par;
pub mod pauli;
pub mod state;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix used for operators and density matrices.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense real matrix used for metric tensors.
pub type RMatrix = nalgebra::DMatrix<f64>;
