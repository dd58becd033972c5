use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::{self, LocalLayout};
use crate::pauli::{Pauli, PauliString};
use crate::state::DensityMatrix;
use crate::{CMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    Depolarizing,
}

/// Noise channel applied right after a gate, on the gate's qubits.
///
/// The error probability grows with the gate angle:
/// `p(θ) = min(1, p_base (1 + c |θ|))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p_base: f64,
    pub theta_coefficient: f64,
}

impl NoiseSpec {
    pub fn depolarizing(p_base: f64, theta_coefficient: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_base) {
            return Err(Error::ProbabilityOutOfRange(p_base));
        }
        if !(theta_coefficient >= 0.0 && theta_coefficient.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise angle coefficient must be finite and non-negative, got {theta_coefficient}"
            )));
        }
        Ok(Self {
            kind: NoiseKind::Depolarizing,
            p_base,
            theta_coefficient,
        })
    }

    pub fn probability(&self, theta: f64) -> f64 {
        (self.p_base * (1.0 + self.theta_coefficient * theta.abs())).clamp(0.0, 1.0)
    }

    /// Whether the channel varies with the gate angle.
    pub fn depends_on_angle(&self) -> bool {
        self.p_base > 0.0 && self.theta_coefficient > 0.0
    }
}

/// `exp(-i θ s G)` for a one- or two-qubit Pauli generator `G`, followed by an
/// optional noise channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricGate {
    pub generator: PauliString,
    pub targets: Vec<usize>,
    /// Angle multiplier `s`: 1/2 for rotations, 1 for coupling evolutions.
    pub scale: f64,
    /// Index of the circuit parameter driving this gate (0-based).
    pub param: usize,
    pub noise: Option<NoiseSpec>,
}

impl ParametricGate {
    pub fn new(generator: PauliString, targets: Vec<usize>, scale: f64, param: usize) -> Result<Self> {
        if targets.is_empty() || targets.len() > 2 {
            return Err(Error::InvalidGate(format!(
                "gates act on one or two qubits, got {}",
                targets.len()
            )));
        }
        if generator.len() != targets.len() {
            return Err(Error::InvalidGate(format!(
                "generator {generator} does not match {} targets",
                targets.len()
            )));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::InvalidGate("repeated target qubit".into()));
        }
        if generator.0.iter().all(|p| *p == Pauli::I) {
            return Err(Error::InvalidGate("identity generator".into()));
        }
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::InvalidGate(format!("invalid angle scale {scale}")));
        }
        Ok(Self {
            generator,
            targets,
            scale,
            param,
            noise: None,
        })
    }

    /// Single-qubit rotation `exp(-i θ σ/2)`.
    pub fn rotation(axis: Pauli, qubit: usize, param: usize) -> Result<Self> {
        Self::new(PauliString(vec![axis]), vec![qubit], 0.5, param)
    }

    /// Two-qubit coupling evolution `exp(-i θ σ_a ⊗ σ_b)`.
    pub fn coupling(a: Pauli, b: Pauli, q1: usize, q2: usize, param: usize) -> Result<Self> {
        Self::new(PauliString(vec![a, b]), vec![q1, q2], 1.0, param)
    }

    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = Some(noise);
        self
    }

    pub(crate) fn check_range(&self, n_qubits: usize) -> Result<()> {
        match self.targets.iter().find(|&&t| t >= n_qubits) {
            Some(&target) => Err(Error::TargetOutOfRange { target, n_qubits }),
            None => Ok(()),
        }
    }

    /// Local generator matrix, row-major.
    pub(crate) fn generator_local(&self) -> Vec<Complex64> {
        row_major(&self.generator.to_matrix())
    }

    /// Local unitary `cos(θs) I - i sin(θs) G`, row-major, and its adjoint.
    pub(crate) fn unitary_local(&self, theta: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let g = self.generator.to_matrix();
        let k = g.nrows();
        let phi = theta * self.scale;
        let (s, c) = phi.sin_cos();
        let u = CMatrix::identity(k, k).scale(c) - g.scale(s) * Complex64::new(0.0, 1.0);
        (row_major(&u), row_major(&u.adjoint()))
    }
}

pub(crate) fn row_major(m: &CMatrix) -> Vec<Complex64> {
    let k = m.nrows();
    (0..k * k).map(|i| m[(i / k, i % k)]).collect()
}

fn n_qubits_of(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")))
    }
}

/// `ρ → U ρ U†` with `U = exp(-i θ s G)`; the gate's noise is not applied.
pub fn apply_gate(rho: &DensityMatrix, gate: &ParametricGate, theta: f64) -> Result<DensityMatrix> {
    let n = n_qubits_of(rho.dim())?;
    gate.check_range(n)?;
    let layout = LocalLayout::new(n, &gate.targets);
    let (u, u_adj) = gate.unitary_local(theta);
    let mut m = rho.matrix().clone();
    kernels::conjugate(&mut m, &layout, &u, &u_adj);
    Ok(DensityMatrix::from_channel_output(m))
}

/// Depolarising channel with probability `p` on one or two target qubits.
pub fn apply_depolarizing(rho: &DensityMatrix, targets: &[usize], p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let n = n_qubits_of(rho.dim())?;
    if targets.is_empty() || targets.len() > 2 {
        return Err(Error::InvalidArgument(format!(
            "depolarising noise acts on one or two qubits, got {}",
            targets.len()
        )));
    }
    if let Some(&target) = targets.iter().find(|&&t| t >= n) {
        return Err(Error::TargetOutOfRange { target, n_qubits: n });
    }
    let layout = LocalLayout::new(n, targets);
    let mut m = rho.matrix().clone();
    kernels::depolarize(&mut m, &layout, p);
    Ok(DensityMatrix::from_channel_output(m))
}
