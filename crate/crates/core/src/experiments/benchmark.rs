//! Benchmark Hamiltonians and ansätze.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{CircuitSpec, NoiseSpec, ParametricGate};
use crate::pauli::{Pauli, PauliString, PauliSumOperator};
use crate::{Error, Result};

/// Default error multiplier for two-qubit gates relative to single-qubit ones.
pub const DEFAULT_TWO_QUBIT_FACTOR: f64 = 10.0;
/// Default angle coefficient `c` in `p(θ) = p (1 + c|θ|)`.
pub const DEFAULT_THETA_COEFFICIENT: f64 = 0.1;

/// Source of the on-site fields `ω_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaSource {
    /// Uniform in `[−1, 1]` from a ChaCha8 stream.
    Seed(u64),
    List(Vec<f64>),
}

/// Heisenberg ring `J Σ (XX + YY + ZZ) + Σ ω_i Z_i` with the ring closed
/// between the first and last qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergRingSpec {
    pub n_qubits: usize,
    pub coupling: f64,
    pub omega: OmegaSource,
}

impl HeisenbergRingSpec {
    pub fn new(n_qubits: usize, omega: OmegaSource) -> Self {
        Self {
            n_qubits,
            coupling: 1.0,
            omega,
        }
    }

    /// Resolves the field strengths, checking `|ω_i| ≤ 1`.
    pub fn omegas(&self) -> Result<Vec<f64>> {
        match &self.omega {
            OmegaSource::Seed(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..self.n_qubits).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            }
            OmegaSource::List(w) => {
                if w.len() != self.n_qubits {
                    return Err(Error::DimensionMismatch {
                        expected: self.n_qubits,
                        found: w.len(),
                    });
                }
                if let Some(x) = w.iter().find(|x| !(x.abs() <= 1.0)) {
                    return Err(Error::InvalidArgument(format!("field strength {x} outside [-1, 1]")));
                }
                Ok(w.clone())
            }
        }
    }
}

pub fn build_heisenberg_ring(spec: &HeisenbergRingSpec) -> Result<PauliSumOperator> {
    let n = spec.n_qubits;
    if n < 2 {
        return Err(Error::InvalidArgument(format!("a ring needs at least 2 qubits, got {n}")));
    }
    if !spec.coupling.is_finite() {
        return Err(Error::NonFinite("coupling".into()));
    }
    let omegas = spec.omegas()?;
    // Open chain plus the closing bond; for two qubits the closure repeats the
    // single chain bond.
    let bonds = (0..n - 1).map(|i| (i, i + 1)).chain(std::iter::once((0, n - 1)));
    let mut terms = Vec::new();
    for (a, b) in bonds {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            terms.push((spec.coupling, PauliString::local(n, &[(a, p), (b, p)])?));
        }
    }
    for (i, w) in omegas.iter().enumerate() {
        terms.push((*w, PauliString::local(n, &[(i, Pauli::Z)])?));
    }
    PauliSumOperator::new(n, terms)
}

/// Layered hardware-efficient ansatz with depolarising noise after each gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub layers: usize,
    /// Single-qubit base error; couplings get `two_qubit_factor` times this.
    pub p_error: f64,
    pub two_qubit_factor: f64,
    pub theta_coefficient: f64,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, layers: usize, p_error: f64) -> Self {
        Self {
            n_qubits,
            layers,
            p_error,
            two_qubit_factor: DEFAULT_TWO_QUBIT_FACTOR,
            theta_coefficient: DEFAULT_THETA_COEFFICIENT,
        }
    }

    pub fn n_params(&self) -> usize {
        self.layers * (2 * self.n_qubits + 3 * self.n_qubits.saturating_sub(1))
    }
}

fn noise(p: f64, c: f64) -> Result<NoiseSpec> {
    NoiseSpec::depolarizing(p, c)
}

/// Per layer: `Rz`, `Rx` on every qubit, then `XX`, `YY`, `ZZ` couplings on
/// each open-chain neighbour pair.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<CircuitSpec> {
    let n = spec.n_qubits;
    if n < 2 || spec.layers < 1 {
        return Err(Error::InvalidArgument(format!(
            "ansatz needs at least 2 qubits and 1 layer, got {n} and {}",
            spec.layers
        )));
    }
    let p2 = spec.p_error * spec.two_qubit_factor;
    if !(0.0..=1.0).contains(&p2) {
        return Err(Error::ProbabilityOutOfRange(p2));
    }
    let single = noise(spec.p_error, spec.theta_coefficient)?;
    let double = noise(p2, spec.theta_coefficient)?;
    let mut gates = Vec::with_capacity(spec.n_params());
    let mut k = 0;
    let mut next = || {
        k += 1;
        k - 1
    };
    for _ in 0..spec.layers {
        for q in 0..n {
            gates.push(ParametricGate::rotation(Pauli::Z, q, next())?.with_noise(single));
            gates.push(ParametricGate::rotation(Pauli::X, q, next())?.with_noise(single));
        }
        for q in 0..n - 1 {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                gates.push(ParametricGate::coupling(p, p, q, q + 1, next())?.with_noise(double));
            }
        }
    }
    CircuitSpec::new(n, gates)
}

/// `Z⊗I + 0.1 X⊗X`.
pub fn landscape_hamiltonian() -> PauliSumOperator {
    PauliSumOperator::from_labels(2, &[(1.0, "ZI"), (0.1, "XX")]).expect("valid labels")
}

/// Two-parameter circuit for the landscape study: `Ry(θ₀)` on qubit 0 then
/// `exp(−iθ₁ X⊗Y)`. Its noiseless energy is `cos θ₀ cos 2θ₁ + 0.1 sin 2θ₁`,
/// which reaches the ground energy `−√1.01`.
pub fn landscape_circuit(p_error: f64, two_qubit_factor: f64, theta_coefficient: f64) -> Result<CircuitSpec> {
    let p2 = p_error * two_qubit_factor;
    CircuitSpec::new(
        2,
        vec![
            ParametricGate::rotation(Pauli::Y, 0, 0)?.with_noise(noise(p_error, theta_coefficient)?),
            ParametricGate::coupling(Pauli::X, Pauli::Y, 0, 1, 1)?.with_noise(noise(p2, theta_coefficient)?),
        ],
    )
}
