//! Parametric gates, depolarising noise and circuit execution.

mod circuit;
pub(crate) mod kernels;
mod gate;

pub use circuit::{
    circuit_derivative, circuit_derivatives, evaluate, pure_derivatives, run_circuit, run_circuit_from,
    run_circuit_pure, CircuitEvaluation, CircuitSpec, DerivativeMethod, NoiseMode, PureEvaluation,
    DEFAULT_FD_STEP,
};
pub use gate::{apply_depolarizing, apply_gate, NoiseKind, NoiseSpec, ParametricGate};
