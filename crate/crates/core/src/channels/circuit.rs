use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gate::ParametricGate;
use super::kernels::{self, LocalLayout};
use crate::state::{hermitian_part, DensityMatrix, PureState};
use crate::{par, CMatrix, Error, Result};

/// Largest register the density-matrix simulator accepts.
pub const MAX_QUBITS: usize = 12;
/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Whether the per-gate noise channels are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    On,
    Off,
}

/// How `∂_k ρ` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    /// Exact commutator insertion; requires angle-independent noise on the gate.
    Analytic,
    /// `(ρ(θ + h e_k) - ρ(θ - h e_k)) / 2h`.
    CentralDifference { h: f64 },
    /// Analytic where allowed, central difference for gates whose noise
    /// depends on the angle.
    Auto { h: f64 },
}

impl Default for DerivativeMethod {
    fn default() -> Self {
        DerivativeMethod::Auto { h: DEFAULT_FD_STEP }
    }
}

#[derive(Debug, Clone)]
struct CompiledGate {
    layout: LocalLayout,
    generator: Vec<Complex64>,
}

/// Ordered list of parametric gates with attached noise: the map `Φ(θ)`.
#[derive(Debug, Clone)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<ParametricGate>,
    /// `owner[k]` is the position of the gate driven by parameter `k`.
    owner: Vec<usize>,
    compiled: Vec<CompiledGate>,
}

impl CircuitSpec {
    /// Validates qubit ranges and that every parameter `0..ν` drives exactly one gate.
    pub fn new(n_qubits: usize, gates: Vec<ParametricGate>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidCircuit(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let n_params = gates.len();
        let mut owner = vec![usize::MAX; n_params];
        for (pos, g) in gates.iter().enumerate() {
            g.check_range(n_qubits)?;
            if g.param >= n_params {
                return Err(Error::InvalidCircuit(format!(
                    "gate {pos} uses parameter {} but the circuit has {n_params} gates",
                    g.param
                )));
            }
            if owner[g.param] != usize::MAX {
                return Err(Error::InvalidCircuit(format!(
                    "parameter {} drives gates {} and {pos}",
                    g.param, owner[g.param]
                )));
            }
            owner[g.param] = pos;
        }
        let compiled = gates
            .iter()
            .map(|g| CompiledGate {
                layout: LocalLayout::new(n_qubits, &g.targets),
                generator: g.generator_local(),
            })
            .collect();
        Ok(Self {
            n_qubits,
            gates,
            owner,
            compiled,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.owner.len()
    }

    pub fn gates(&self) -> &[ParametricGate] {
        &self.gates
    }

    /// The gate driven by parameter `k`.
    pub fn gate_for_param(&self, k: usize) -> Result<&ParametricGate> {
        self.owner
            .get(k)
            .map(|&g| &self.gates[g])
            .ok_or(Error::ParameterIndexOutOfRange {
                index: k,
                n_params: self.n_params(),
            })
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::ParameterCountMismatch {
                expected: self.n_params(),
                found: theta.len(),
            });
        }
        if let Some(i) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(format!("theta[{i}]")));
        }
        Ok(())
    }

    /// Gate `pos` at angle `angle`, then its noise channel.
    fn apply_stage(&self, m: &mut CMatrix, pos: usize, angle: f64, noise: NoiseMode) {
        let gate = &self.gates[pos];
        let (u, u_adj) = gate.unitary_local(angle);
        kernels::conjugate(m, &self.compiled[pos].layout, &u, &u_adj);
        self.apply_noise(m, pos, angle, noise);
    }

    fn apply_noise(&self, m: &mut CMatrix, pos: usize, angle: f64, noise: NoiseMode) {
        if noise == NoiseMode::Off {
            return;
        }
        if let Some(spec) = &self.gates[pos].noise {
            kernels::depolarize(m, &self.compiled[pos].layout, spec.probability(angle));
        }
    }

    /// Pushes an operator through stages `from..` (linear in `m`).
    fn propagate(&self, m: &mut CMatrix, from: usize, theta: &[f64], noise: NoiseMode) {
        for pos in from..self.gates.len() {
            self.apply_stage(m, pos, theta[self.gates[pos].param], noise);
        }
    }

    /// Final state plus the state entering each gate.
    fn forward_with_prefix(&self, rho0: &CMatrix, theta: &[f64], noise: NoiseMode) -> (Vec<CMatrix>, CMatrix) {
        let mut before = Vec::with_capacity(self.gates.len());
        let mut m = rho0.clone();
        for pos in 0..self.gates.len() {
            before.push(m.clone());
            self.apply_stage(&mut m, pos, theta[self.gates[pos].param], noise);
        }
        (before, m)
    }

    fn derivative_from_prefix(
        &self,
        before: &CMatrix,
        k: usize,
        theta: &[f64],
        noise: NoiseMode,
        method: DerivativeMethod,
    ) -> Result<CMatrix> {
        let pos = self.owner[k];
        let gate = &self.gates[pos];
        let angle_dependent = noise == NoiseMode::On && gate.noise.is_some_and(|n| n.depends_on_angle());
        let fd_step = match method {
            DerivativeMethod::Analytic if angle_dependent => {
                return Err(Error::UnsupportedAnalyticDerivative(k));
            }
            DerivativeMethod::Analytic => None,
            DerivativeMethod::Auto { h } => angle_dependent.then_some(h),
            DerivativeMethod::CentralDifference { h } => Some(h),
        };
        let angle = theta[k];
        let mut x = match fd_step {
            None => {
                let mut rotated = before.clone();
                let (u, u_adj) = gate.unitary_local(angle);
                let layout = &self.compiled[pos].layout;
                kernels::conjugate(&mut rotated, layout, &u, &u_adj);
                let mut left = rotated.clone();
                kernels::apply_left(&mut left, layout, &self.compiled[pos].generator);
                kernels::apply_right(&mut rotated, layout, &self.compiled[pos].generator);
                // d/dθ (U ρ U†) = -i s [G, U ρ U†]
                let mut x = (left - rotated) * Complex64::new(0.0, -gate.scale);
                self.apply_noise(&mut x, pos, angle, noise);
                x
            }
            Some(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidArgument(format!("finite-difference step {h}")));
                }
                let mut plus = before.clone();
                self.apply_stage(&mut plus, pos, angle + h, noise);
                let mut minus = before.clone();
                self.apply_stage(&mut minus, pos, angle - h, noise);
                (plus - minus).unscale(2.0 * h)
            }
        };
        self.propagate(&mut x, pos + 1, theta, noise);
        Ok(hermitian_part(&x))
    }
}

/// `ρ(θ) = Φ(θ) |0…0⟩⟨0…0|`.
pub fn run_circuit(circuit: &CircuitSpec, theta: &[f64], noise: NoiseMode) -> Result<DensityMatrix> {
    run_circuit_from(circuit, theta, noise, &DensityMatrix::zero_state(circuit.n_qubits()))
}

/// `ρ(θ) = Φ(θ) ρ₀` for an explicit initial state.
pub fn run_circuit_from(
    circuit: &CircuitSpec,
    theta: &[f64],
    noise: NoiseMode,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    circuit.check_theta(theta)?;
    if rho0.dim() != circuit.dim() {
        return Err(Error::DimensionMismatch {
            expected: circuit.dim(),
            found: rho0.dim(),
        });
    }
    let mut m = rho0.matrix().clone();
    circuit.propagate(&mut m, 0, theta, noise);
    Ok(DensityMatrix::from_channel_output(m))
}

/// Noiseless state-vector execution `U(θ)|0…0⟩`.
pub fn run_circuit_pure(circuit: &CircuitSpec, theta: &[f64]) -> Result<PureState> {
    circuit.check_theta(theta)?;
    let mut v = PureState::zero_state(circuit.n_qubits()).amplitudes().clone();
    for (pos, gate) in circuit.gates.iter().enumerate() {
        let (u, _) = gate.unitary_local(theta[gate.param]);
        kernels::apply_vector(&mut v, &circuit.compiled[pos].layout, &u);
    }
    Ok(PureState::from_unitary_output(v))
}

/// `∂_k ρ(θ)` for a single parameter.
pub fn circuit_derivative(
    circuit: &CircuitSpec,
    theta: &[f64],
    k: usize,
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<CMatrix> {
    circuit.check_theta(theta)?;
    if k >= circuit.n_params() {
        return Err(Error::ParameterIndexOutOfRange {
            index: k,
            n_params: circuit.n_params(),
        });
    }
    let pos = circuit.owner[k];
    let mut before = DensityMatrix::zero_state(circuit.n_qubits()).into_matrix();
    for p in 0..pos {
        circuit.apply_stage(&mut before, p, theta[circuit.gates[p].param], noise);
    }
    circuit.derivative_from_prefix(&before, k, theta, noise, method)
}

/// Output state together with `∂_k ρ` for every parameter.
#[derive(Debug, Clone)]
pub struct CircuitEvaluation {
    pub rho: DensityMatrix,
    pub derivatives: Vec<CMatrix>,
}

/// Runs the circuit once and differentiates with respect to every parameter.
/// Derivatives are computed independently per parameter (in parallel when
/// enabled) from cached intermediate states.
pub fn evaluate(
    circuit: &CircuitSpec,
    theta: &[f64],
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<CircuitEvaluation> {
    circuit.check_theta(theta)?;
    let rho0 = DensityMatrix::zero_state(circuit.n_qubits()).into_matrix();
    let (before, out) = circuit.forward_with_prefix(&rho0, theta, noise);
    let derivatives = par::try_map_range(circuit.n_params(), |k| {
        circuit.derivative_from_prefix(&before[circuit.owner[k]], k, theta, noise, method)
    })?;
    Ok(CircuitEvaluation {
        rho: DensityMatrix::from_channel_output(out),
        derivatives,
    })
}

/// All `∂_k ρ`, discarding the state.
pub fn circuit_derivatives(
    circuit: &CircuitSpec,
    theta: &[f64],
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<Vec<CMatrix>> {
    evaluate(circuit, theta, noise, method).map(|e| e.derivatives)
}

/// Noiseless state vector with its parameter derivatives `|∂_k ψ⟩`.
#[derive(Debug, Clone)]
pub struct PureEvaluation {
    pub psi: PureState,
    pub derivatives: Vec<DVector<Complex64>>,
}

pub fn pure_derivatives(circuit: &CircuitSpec, theta: &[f64]) -> Result<PureEvaluation> {
    circuit.check_theta(theta)?;
    let mut v = PureState::zero_state(circuit.n_qubits()).amplitudes().clone();
    let mut after = Vec::with_capacity(circuit.gates.len());
    for (pos, gate) in circuit.gates.iter().enumerate() {
        let (u, _) = gate.unitary_local(theta[gate.param]);
        kernels::apply_vector(&mut v, &circuit.compiled[pos].layout, &u);
        after.push(v.clone());
    }
    let derivatives = par::map_range(circuit.n_params(), |k| {
        let pos = circuit.owner[k];
        let gate = &circuit.gates[pos];
        let mut d = after[pos].clone();
        kernels::apply_vector(&mut d, &circuit.compiled[pos].layout, &circuit.compiled[pos].generator);
        d *= Complex64::new(0.0, -gate.scale);
        for p in pos + 1..circuit.gates.len() {
            let g = &circuit.gates[p];
            let (u, _) = g.unitary_local(theta[g.param]);
            kernels::apply_vector(&mut d, &circuit.compiled[p].layout, &u);
        }
        d
    });
    Ok(PureEvaluation {
        psi: PureState::from_unitary_output(v),
        derivatives,
    })
}
