//! Accuracy of the Hilbert–Schmidt QFI approximation on noisy ansätze.

use serde::{Deserialize, Serialize};

use super::benchmark::{build_ansatz, build_heisenberg_ring, AnsatzSpec, HeisenbergRingSpec, OmegaSource};
use super::derive_seed;
use super::reference::{locate_optimum, LocateSpec};
use super::sweep::perturbed_start;
use crate::channels::{evaluate, run_circuit_pure, DerivativeMethod, NoiseMode};
use crate::metric::{qfi_approx_from, qfi_exact_from, FidelityMode, DEFAULT_FIDELITY_FLOOR};
use crate::state::{fidelity_pure, DEFAULT_RANK_THRESHOLD};
use crate::{Error, Result};

const LOCATE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiErrorSpec {
    pub n_qubits: Vec<usize>,
    pub p_errors: Vec<f64>,
    pub layers: usize,
    pub two_qubit_factor: f64,
    pub theta_coefficient: f64,
    /// Field seed of the Heisenberg ring used to place `θ_opt`.
    pub omega_seed: u64,
    /// Parameter points sampled per `(N, p_error)`.
    pub samples: usize,
    /// Samples are `θ_opt + U[−r, r]` per component.
    pub radius: f64,
    pub locate: LocateSpec,
    pub master_seed: u64,
}

impl QfiErrorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        if let Some(n) = self.n_qubits.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!("qubit count {n} below 2")));
        }
        if let Some(p) = self.p_errors.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ProbabilityOutOfRange(*p));
        }
        Ok(())
    }
}

/// One `(N, p_error)` cell averaged over the sampled parameter points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiErrorRow {
    pub n_qubits: usize,
    pub p_error: f64,
    pub one_minus_fidelity: f64,
    /// Mean over samples of the mean entrywise `|F_exact − F_approx|`.
    pub delta_avg: f64,
    /// Largest fidelity-normalised QFI entry seen, for scale.
    pub qfi_scale: f64,
}

pub fn qfi_error_study(spec: &QfiErrorSpec) -> Result<Vec<QfiErrorRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.n_qubits.len() * spec.p_errors.len());
    for &n in &spec.n_qubits {
        let ideal = build_ansatz(&AnsatzSpec {
            n_qubits: n,
            layers: spec.layers,
            p_error: 0.0,
            two_qubit_factor: spec.two_qubit_factor,
            theta_coefficient: spec.theta_coefficient,
        })?;
        let h = build_heisenberg_ring(&HeisenbergRingSpec::new(n, OmegaSource::Seed(spec.omega_seed)))?;
        let theta_opt = locate_optimum(
            &ideal,
            &h,
            NoiseMode::Off,
            &spec.locate,
            derive_seed(spec.master_seed, n as u64, LOCATE_STREAM),
        )?
        .theta;
        let points: Vec<Vec<f64>> = (0..spec.samples)
            .map(|s| perturbed_start(&theta_opt, spec.radius, derive_seed(spec.master_seed, n as u64, s as u64)))
            .collect();
        let cells = crate::par::try_map_range(spec.p_errors.len(), |i| -> Result<QfiErrorRow> {
            let p = spec.p_errors[i];
            let circuit = build_ansatz(&AnsatzSpec {
                n_qubits: n,
                layers: spec.layers,
                p_error: p,
                two_qubit_factor: spec.two_qubit_factor,
                theta_coefficient: spec.theta_coefficient,
            })?;
            let mut infidelity = 0.0;
            let mut delta = 0.0;
            let mut scale: f64 = 0.0;
            for theta in &points {
                let eval = evaluate(&circuit, theta, NoiseMode::On, DerivativeMethod::default())?;
                let psi = run_circuit_pure(&circuit, theta)?;
                let f = fidelity_pure(&eval.rho, &psi)?;
                let exact = qfi_exact_from(&eval.rho, &eval.derivatives, DEFAULT_RANK_THRESHOLD)?;
                let approx = qfi_approx_from(&eval.derivatives, f, FidelityMode::Divide, DEFAULT_FIDELITY_FLOOR)?;
                let diff = exact.entries() - approx.entries();
                infidelity += 1.0 - f;
                delta += diff.abs().mean();
                scale = scale.max(exact.entries().amax());
            }
            let m = points.len() as f64;
            Ok(QfiErrorRow {
                n_qubits: n,
                p_error: p,
                one_minus_fidelity: infidelity / m,
                delta_avg: delta / m,
                qfi_scale: scale,
            })
        })?;
        rows.extend(cells);
    }
    Ok(rows)
}

/// Least-squares slope of `log₁₀ y` against `log₁₀ x` over positive pairs.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.log10(), b.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}
