//! Locating the reference optimum `θ_opt` on a noisy landscape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{CircuitSpec, NoiseMode};
use crate::metric::InversionScheme;
use crate::optim::{optimize, MetricSource, OptimizationProblem, RuleConfig, UpdateRule};
use crate::pauli::PauliSumOperator;
use crate::{Error, Result};

/// Settings for the multi-start natural-gradient search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocateSpec {
    pub starts: usize,
    pub steps: usize,
    pub step_size: f64,
    /// Starts are drawn uniformly from `[−radius, radius]` per component.
    pub start_radius: f64,
    pub inversion: InversionScheme,
    /// Metric of the natural-gradient search; both share the same stationary points.
    pub metric: MetricSource,
}

impl Default for LocateSpec {
    fn default() -> Self {
        Self {
            starts: 4,
            steps: 500,
            step_size: 0.05,
            start_radius: std::f64::consts::PI,
            inversion: InversionScheme::default(),
            metric: MetricSource::QfiExact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptimum {
    pub theta: Vec<f64>,
    pub energy: f64,
}

/// `count` points uniform in `[−radius, radius]^n`.
pub fn random_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-radius..=radius)).collect())
        .collect()
}

/// Runs natural gradient from every start and keeps the lowest
/// endpoint. Starts whose run fails to complete are skipped.
pub fn locate_from(
    circuit: &CircuitSpec,
    hamiltonian: &PauliSumOperator,
    noise: NoiseMode,
    starts: &[Vec<f64>],
    spec: &LocateSpec,
) -> Result<ReferenceOptimum> {
    let cfg = RuleConfig::new(UpdateRule::NaturalGradient(spec.metric), spec.step_size).with_inversion(spec.inversion);
    let endpoints = crate::par::map_slice(starts, |theta0| -> Result<Option<ReferenceOptimum>> {
        let problem = OptimizationProblem::new(circuit.clone(), hamiltonian.clone(), theta0.clone(), noise)?;
        let traj = optimize(&problem, &cfg, spec.steps)?;
        Ok(traj.is_completed().then(|| ReferenceOptimum {
            theta: traj.last().theta.clone(),
            energy: traj.final_energy(),
        }))
    });
    let mut best: Option<ReferenceOptimum> = None;
    for e in endpoints {
        if let Some(r) = e? {
            if best.as_ref().is_none_or(|b| r.energy < b.energy) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::NonFinite("no start converged to a reference optimum".into()))
}

/// Multi-start search from `spec.starts` seeded random points.
pub fn locate_optimum(
    circuit: &CircuitSpec,
    hamiltonian: &PauliSumOperator,
    noise: NoiseMode,
    spec: &LocateSpec,
    seed: u64,
) -> Result<ReferenceOptimum> {
    if spec.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let starts = random_points(circuit.n_params(), spec.starts, spec.start_radius, seed);
    locate_from(circuit, hamiltonian, noise, &starts, spec)
}
