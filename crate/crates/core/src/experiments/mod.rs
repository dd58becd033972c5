//! Benchmark problems and the numerical studies built on them.

mod appendix;
mod benchmark;
mod landscape;
mod qfi_error;
mod reference;
mod scalability;
mod sweep;

pub use appendix::{
    appendix_checks, bound_trial, lemma_trial, random_unitary, trace_relation_residual, AppendixReport, AppendixSpec,
    BoundTrial, EpsMixedState, LemmaTrial, TraceRelationRow, KAPPA_STEP, MAX_EPSILON, BOUND_TOL_FACTOR,
};
pub use benchmark::{
    build_ansatz, build_heisenberg_ring, landscape_circuit, landscape_hamiltonian, AnsatzSpec, HeisenbergRingSpec,
    OmegaSource, DEFAULT_THETA_COEFFICIENT, DEFAULT_TWO_QUBIT_FACTOR,
};
pub use landscape::{landscape_scan, LandscapePoint, LandscapeResult, LandscapeRun, LandscapeSpec};
pub use qfi_error::{loglog_slope, qfi_error_study, QfiErrorRow, QfiErrorSpec};
pub use sweep::{
    noise_sweep, perturbed_start, SweepReference, SweepResult, SweepRun, SweepSpec, SweepSummary, LOG_FLOOR,
    MAX_SWEEP_ERROR, REFERENCE_TOL,
};
pub use reference::{locate_from, locate_optimum, random_points, LocateSpec, ReferenceOptimum};
pub use scalability::{round_significant, scalability, Bound, ScalabilityReport, ScalabilitySpec};

/// Mixes a master seed with two indices into an independent stream seed
/// (SplitMix64 finaliser applied per word).
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ a) ^ b)
}
