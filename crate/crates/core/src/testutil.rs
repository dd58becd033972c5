//! Shared fixtures for unit tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{CircuitSpec, NoiseSpec, ParametricGate};
use crate::pauli::Pauli;
use crate::state::{hermitian_part, trace, DensityMatrix};
use crate::CMatrix;

/// Random density matrix of the given rank (Wishart-style).
pub fn random_density(seed: u64, dim: usize, rank: usize) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, rank, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    DensityMatrix::new(hermitian_part(&m.unscale(tr))).unwrap()
}

/// Random Hermitian matrix with entries in the unit box.
pub fn random_hermitian(seed: u64, dim: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    hermitian_part(&g)
}

/// Random circuit of Pauli rotations and two-qubit couplings with depolarising
/// noise (`p` on single-qubit gates, `10 p` on couplings) and random angles.
pub fn random_circuit(seed: u64, n: usize, n_gates: usize, p: f64, c: f64) -> (CircuitSpec, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut gates = Vec::new();
    for k in 0..n_gates {
        let gate = if n > 1 && rng.gen_bool(0.4) {
            let a = rng.gen_range(0..n);
            let b = (a + 1 + rng.gen_range(0..n - 1)) % n;
            ParametricGate::coupling(paulis[rng.gen_range(0..3)], paulis[rng.gen_range(0..3)], a, b, k).unwrap()
        } else {
            ParametricGate::rotation(paulis[rng.gen_range(0..3)], rng.gen_range(0..n), k).unwrap()
        };
        let scale = if gate.targets.len() == 2 { 10.0 } else { 1.0 };
        gates.push(gate.with_noise(NoiseSpec::depolarizing((p * scale).min(1.0), c).unwrap()));
    }
    let theta = (0..n_gates).map(|_| rng.gen_range(-PI..PI)).collect();
    (CircuitSpec::new(n, gates).unwrap(), theta)
}
