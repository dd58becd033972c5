//! Noise sweeps comparing update rules from shared random starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::benchmark::{build_ansatz, build_heisenberg_ring, AnsatzSpec, HeisenbergRingSpec};
use super::derive_seed;
use super::reference::{locate_from, locate_optimum, LocateSpec, ReferenceOptimum};
use crate::channels::NoiseMode;
use crate::metric::InversionScheme;
use crate::optim::{optimize, OptimizationProblem, RuleConfig, Trajectory, UpdateRule};
use crate::{Error, Result};

/// Largest single-qubit error accepted by a sweep.
pub const MAX_SWEEP_ERROR: f64 = 0.1;
/// `ΔE` values below this are clamped before taking `log₁₀`.
pub const LOG_FLOOR: f64 = 1e-16;
/// Tolerance below `E_opt` before the reference is refined.
pub const REFERENCE_TOL: f64 = 1e-9;
const LOCATE_STREAM: u64 = u64::MAX;
const MAX_REFINEMENTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_qubits: usize,
    pub layers: usize,
    pub two_qubit_factor: f64,
    pub theta_coefficient: f64,
    pub hamiltonian: HeisenbergRingSpec,
    pub p_errors: Vec<f64>,
    pub repetitions: usize,
    pub steps: usize,
    pub step_size: f64,
    pub init_radius: f64,
    pub rules: Vec<UpdateRule>,
    pub inversion: InversionScheme,
    pub locate: LocateSpec,
    pub master_seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidArgument("no update rules selected".into()));
        }
        if let Some(p) = self.p_errors.iter().find(|p| !(0.0..=MAX_SWEEP_ERROR).contains(*p)) {
            return Err(Error::InvalidArgument(format!("p_error {p} outside [0, {MAX_SWEEP_ERROR}]")));
        }
        if !(self.init_radius >= 0.0 && self.init_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("init radius {}", self.init_radius)));
        }
        for r in &self.rules {
            self.rule_config(*r).validate()?;
        }
        Ok(())
    }

    fn ansatz(&self, p_error: f64) -> AnsatzSpec {
        AnsatzSpec {
            n_qubits: self.n_qubits,
            layers: self.layers,
            p_error,
            two_qubit_factor: self.two_qubit_factor,
            theta_coefficient: self.theta_coefficient,
        }
    }

    fn rule_config(&self, rule: UpdateRule) -> RuleConfig {
        RuleConfig::new(rule, self.step_size).with_inversion(self.inversion)
    }
}

/// One optimisation run of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub p_index: usize,
    pub p_error: f64,
    pub repetition: usize,
    /// Seed of the stream that drew `θ₀` for this repetition.
    pub seed: u64,
    pub trajectory: Trajectory,
}

impl SweepRun {
    pub fn rule(&self) -> UpdateRule {
        self.trajectory.rule
    }

    pub fn diverged(&self) -> bool {
        !self.trajectory.is_completed()
    }

    pub fn final_delta_e(&self) -> f64 {
        self.trajectory.final_delta_e().unwrap_or(f64::NAN)
    }
}

/// `log₁₀ ΔE` statistics for one `(p_error, rule)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub p_error: f64,
    pub rule: UpdateRule,
    pub mean_log10_delta_e: f64,
    pub std_log10_delta_e: f64,
    pub completed: usize,
    pub diverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReference {
    pub p_error: f64,
    pub optimum: ReferenceOptimum,
    /// How many times a run found a lower energy and the optimum was re-polished.
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub references: Vec<SweepReference>,
    pub runs: Vec<SweepRun>,
    pub summaries: Vec<SweepSummary>,
}

impl SweepResult {
    pub fn summary(&self, p_error: f64, rule: UpdateRule) -> Option<&SweepSummary> {
        self.summaries.iter().find(|s| s.p_error == p_error && s.rule == rule)
    }
}

/// Mean and sample standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// `θ₀ = θ_opt + U[−r, r]` per component from the repetition's own stream.
pub fn perturbed_start(theta_opt: &[f64], radius: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    theta_opt
        .iter()
        .map(|t| if radius > 0.0 { t + rng.gen_range(-radius..=radius) } else { *t })
        .collect()
}

fn rebase(traj: &mut Trajectory, e_opt: f64) {
    for r in &mut traj.records {
        r.delta_e = Some(r.energy - e_opt);
    }
}

pub fn noise_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let hamiltonian = build_heisenberg_ring(&spec.hamiltonian)?;
    let circuits = spec
        .p_errors
        .iter()
        .map(|&p| build_ansatz(&spec.ansatz(p)))
        .collect::<Result<Vec<_>>>()?;

    let references = crate::par::try_map_range(spec.p_errors.len(), |i| {
        locate_optimum(
            &circuits[i],
            &hamiltonian,
            NoiseMode::On,
            &spec.locate,
            derive_seed(spec.master_seed, i as u64, LOCATE_STREAM),
        )
    })?;

    let jobs: Vec<(usize, usize)> = (0..spec.p_errors.len())
        .flat_map(|i| (0..spec.repetitions).map(move |r| (i, r)))
        .collect();
    let per_job = crate::par::map_slice(&jobs, |&(i, rep)| -> Result<Vec<SweepRun>> {
        let seed = derive_seed(spec.master_seed, i as u64, rep as u64);
        let theta0 = perturbed_start(&references[i].theta, spec.init_radius, seed);
        let problem = OptimizationProblem::new(circuits[i].clone(), hamiltonian.clone(), theta0, NoiseMode::On)?
            .with_reference_energy(references[i].energy);
        spec.rules
            .iter()
            .map(|&rule| {
                Ok(SweepRun {
                    p_index: i,
                    p_error: spec.p_errors[i],
                    repetition: rep,
                    seed,
                    trajectory: optimize(&problem, &spec.rule_config(rule), spec.steps)?,
                })
            })
            .collect()
    });
    let mut runs = Vec::with_capacity(jobs.len() * spec.rules.len());
    for r in per_job {
        runs.extend(r?);
    }

    // E_opt must be the lowest local minimum seen; if a run went below it,
    // polish from that run's best point and rebase every ΔE.
    let mut out_refs = Vec::with_capacity(references.len());
    for (i, mut reference) in references.into_iter().enumerate() {
        let mut refinements = 0;
        while refinements < MAX_REFINEMENTS {
            let lowest = runs
                .iter()
                .filter(|r| r.p_index == i)
                .flat_map(|r| r.trajectory.records.iter())
                .filter(|rec| rec.energy.is_finite())
                .min_by(|a, b| a.energy.total_cmp(&b.energy));
            let Some(lowest) = lowest else { break };
            if lowest.energy >= reference.energy - REFERENCE_TOL {
                break;
            }
            let polished = locate_from(
                &circuits[i],
                &hamiltonian,
                NoiseMode::On,
                &[lowest.theta.clone()],
                &spec.locate,
            )?;
            reference = if polished.energy < lowest.energy {
                polished
            } else {
                ReferenceOptimum {
                    theta: lowest.theta.clone(),
                    energy: lowest.energy,
                }
            };
            refinements += 1;
            for r in runs.iter_mut().filter(|r| r.p_index == i) {
                rebase(&mut r.trajectory, reference.energy);
            }
        }
        out_refs.push(SweepReference {
            p_error: spec.p_errors[i],
            optimum: reference,
            refinements,
        });
    }

    let mut summaries = Vec::new();
    for (i, &p) in spec.p_errors.iter().enumerate() {
        for &rule in &spec.rules {
            let cell: Vec<&SweepRun> = runs.iter().filter(|r| r.p_index == i && r.rule() == rule).collect();
            let logs: Vec<f64> = cell
                .iter()
                .filter(|r| !r.diverged())
                .map(|r| r.final_delta_e().max(LOG_FLOOR).log10())
                .collect();
            let (mean, std) = mean_std(&logs);
            summaries.push(SweepSummary {
                p_error: p,
                rule,
                mean_log10_delta_e: mean,
                std_log10_delta_e: std,
                completed: logs.len(),
                diverged: cell.iter().filter(|r| r.diverged()).count(),
            });
        }
    }
    Ok(SweepResult {
        references: out_refs,
        runs,
        summaries,
    })
}
