//! Parameter-update rules and trajectory recording.
//!
//! Step sizes follow a single convention: `step_size` is the natural-gradient
//! λ and the imaginary-time rules use `Δt = λ / 4`, so that with the exact QFI
//! on a noiseless circuit the natural-gradient and pure-state imaginary-time
//! updates coincide.

mod gradient;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::channels::{evaluate, pure_derivatives, CircuitSpec, DerivativeMethod, NoiseMode};
use crate::metric::{
    fubini_study_from, mixed_metric_from, qfi_approx_from, qfi_exact_from, regularized_inverse, FidelityMode,
    InversionScheme, MetricTensor, DEFAULT_FIDELITY_FLOOR,
};
use crate::pauli::PauliSumOperator;
use crate::state::{expectation, fidelity_pure, DEFAULT_RANK_THRESHOLD};
use crate::{Error, Result};

pub use gradient::{energy, gradient, gradient_from, y_vector, y_vector_from};

/// Default natural-gradient step size (`λ = 4Δt`).
pub const DEFAULT_STEP_SIZE: f64 = 0.2;
/// A run is declared diverged once `|E|` exceeds this multiple of `Σ|c_j|`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Metric used by the natural-gradient rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSource {
    QfiExact,
    QfiApprox,
}

/// The four parameter-evolution laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// `θ − λ g`.
    GradientDescent,
    /// `θ − λ T⁻¹ g` with `T` the exact or approximate QFI of the noisy state.
    NaturalGradient(MetricSource),
    /// `θ + 2Δt M⁻¹ Y` with the mixed-state metric and `Y` vector.
    ImagTimeMixed,
    /// `θ − Δt A⁻¹ g` with `A` and `g` from the noiseless circuit; energies
    /// are still tracked on the noisy circuit.
    ImagTimePureNaive,
}

impl UpdateRule {
    /// Short stable identifier used in output files.
    pub fn label(&self) -> &'static str {
        match self {
            UpdateRule::GradientDescent => "gradient-descent",
            UpdateRule::NaturalGradient(MetricSource::QfiExact) => "natural-gradient-exact",
            UpdateRule::NaturalGradient(MetricSource::QfiApprox) => "natural-gradient-approx",
            UpdateRule::ImagTimeMixed => "imag-time-mixed",
            UpdateRule::ImagTimePureNaive => "imag-time-pure-naive",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        ALL_RULES.iter().copied().find(|r| r.label() == label)
    }
}

pub const ALL_RULES: [UpdateRule; 5] = [
    UpdateRule::GradientDescent,
    UpdateRule::NaturalGradient(MetricSource::QfiExact),
    UpdateRule::NaturalGradient(MetricSource::QfiApprox),
    UpdateRule::ImagTimeMixed,
    UpdateRule::ImagTimePureNaive,
];

/// An update rule with its step size and inversion settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleConfig {
    pub rule: UpdateRule,
    /// λ; imaginary-time rules use `Δt = λ / 4`.
    pub step_size: f64,
    pub inversion: InversionScheme,
    pub fidelity_mode: FidelityMode,
}

impl RuleConfig {
    pub fn new(rule: UpdateRule, step_size: f64) -> Self {
        Self {
            rule,
            step_size,
            inversion: InversionScheme::default(),
            fidelity_mode: FidelityMode::Divide,
        }
    }

    pub fn with_inversion(mut self, inversion: InversionScheme) -> Self {
        self.inversion = inversion;
        self
    }

    pub fn time_step(&self) -> f64 {
        self.step_size / 4.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size {}", self.step_size)));
        }
        self.inversion.validate()
    }
}

/// Circuit, observable and starting point of a minimisation.
#[derive(Debug, Clone)]
pub struct OptimizationProblem {
    pub circuit: CircuitSpec,
    pub hamiltonian: PauliSumOperator,
    pub theta0: Vec<f64>,
    /// Energy of the reference optimum, used for `ΔE`.
    pub reference_energy: Option<f64>,
    pub noise: NoiseMode,
    pub derivative: DerivativeMethod,
    pub rank_threshold: f64,
}

impl OptimizationProblem {
    pub fn new(circuit: CircuitSpec, hamiltonian: PauliSumOperator, theta0: Vec<f64>, noise: NoiseMode) -> Result<Self> {
        if hamiltonian.n_qubits() != circuit.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: circuit.dim(),
                found: hamiltonian.dim(),
            });
        }
        if theta0.len() != circuit.n_params() {
            return Err(Error::ParameterCountMismatch {
                expected: circuit.n_params(),
                found: theta0.len(),
            });
        }
        Ok(Self {
            circuit,
            hamiltonian,
            theta0,
            reference_energy: None,
            noise,
            derivative: DerivativeMethod::default(),
            rank_threshold: DEFAULT_RANK_THRESHOLD,
        })
    }

    pub fn with_reference_energy(mut self, e_opt: f64) -> Self {
        self.reference_energy = Some(e_opt);
        self
    }

    /// Sets the reference to the energy at `theta_opt` on the same landscape.
    pub fn with_reference_point(self, theta_opt: &[f64]) -> Result<Self> {
        let e = energy(&self.circuit, theta_opt, &self.hamiltonian, self.noise)?;
        Ok(self.with_reference_energy(e))
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        energy(&self.circuit, theta, &self.hamiltonian, self.noise)
    }

    fn divergence_bound(&self) -> f64 {
        DIVERGENCE_FACTOR * self.hamiltonian.coefficient_norm().max(f64::MIN_POSITIVE)
    }
}

/// Outcome of a single update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub theta: Vec<f64>,
    /// Energy at the point the step started from.
    pub energy: f64,
    /// Condition number of the metric that was inverted (NaN for gradient descent).
    pub cond_number: f64,
    /// The metric had no invertible part and the plain gradient was used.
    pub fallback: bool,
}

fn preconditioned(
    metric: &MetricTensor,
    v: &[f64],
    scheme: InversionScheme,
) -> Result<(DVector<f64>, f64, bool)> {
    let inv = regularized_inverse(metric, scheme)?;
    Ok((&inv.matrix * DVector::from_column_slice(v), inv.condition_number, inv.fallback))
}

/// Applies one update of `cfg.rule` at `theta`.
pub fn step(cfg: &RuleConfig, problem: &OptimizationProblem, theta: &[f64]) -> Result<StepOutcome> {
    cfg.validate()?;
    let circuit = &problem.circuit;
    let h = &problem.hamiltonian;
    let lambda = cfg.step_size;
    let eval = evaluate(circuit, theta, problem.noise, problem.derivative)?;
    let e = expectation(&eval.rho, h)?;
    let current = DVector::from_column_slice(theta);

    let (direction, scale, cond_number, fallback) = match cfg.rule {
        UpdateRule::GradientDescent => {
            let g = gradient_from(&eval.derivatives, h);
            (DVector::from_vec(g), -lambda, f64::NAN, false)
        }
        UpdateRule::NaturalGradient(source) => {
            let g = gradient_from(&eval.derivatives, h);
            let metric = match source {
                MetricSource::QfiExact => qfi_exact_from(&eval.rho, &eval.derivatives, problem.rank_threshold)?,
                MetricSource::QfiApprox => {
                    let ideal = crate::channels::run_circuit_pure(circuit, theta)?;
                    let f = fidelity_pure(&eval.rho, &ideal)?;
                    qfi_approx_from(&eval.derivatives, f, cfg.fidelity_mode, DEFAULT_FIDELITY_FLOOR)?
                }
            };
            let (d, cond, fb) = preconditioned(&metric, &g, cfg.inversion)?;
            (d, -lambda, cond, fb)
        }
        UpdateRule::ImagTimeMixed => {
            let y = y_vector_from(&eval.rho, &eval.derivatives, h);
            let m = mixed_metric_from(&eval.derivatives);
            let (d, cond, fb) = preconditioned(&m, &y, cfg.inversion)?;
            (d, 2.0 * cfg.time_step(), cond, fb)
        }
        UpdateRule::ImagTimePureNaive => {
            let pe = pure_derivatives(circuit, theta)?;
            let psi = pe.psi.amplitudes();
            let h_psi = h.dense() * psi;
            let g: Vec<f64> = pe.derivatives.iter().map(|d| 2.0 * d.dotc(&h_psi).re).collect();
            let a = fubini_study_from(&pe);
            let (d, cond, fb) = preconditioned(&a, &g, cfg.inversion)?;
            (d, -cfg.time_step(), cond, fb)
        }
    };
    let next = current + direction * scale;
    Ok(StepOutcome {
        theta: next.iter().copied().collect(),
        energy: e,
        cond_number,
        fallback,
    })
}

/// One row of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub theta: Vec<f64>,
    pub energy: f64,
    /// `E − E_opt` when a reference is known.
    pub delta_e: Option<f64>,
    /// Condition number of the metric used for the step taken from this
    /// point; NaN for the final record and for gradient descent.
    pub cond_number: f64,
    pub fallback: bool,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TerminalStatus {
    Completed,
    /// `|E|` exceeded the divergence bound at this step.
    Diverged { step: usize },
    /// A parameter or energy became NaN or infinite at this step.
    NonFinite { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub rule: UpdateRule,
    pub records: Vec<StepRecord>,
    pub status: TerminalStatus,
}

impl Trajectory {
    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trajectory has at least the initial record")
    }

    pub fn final_energy(&self) -> f64 {
        self.last().energy
    }

    pub fn final_delta_e(&self) -> Option<f64> {
        self.last().delta_e
    }

    pub fn is_completed(&self) -> bool {
        self.status == TerminalStatus::Completed
    }

    /// First step index whose `ΔE` is below `threshold`.
    pub fn first_step_below(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.delta_e.is_some_and(|d| d < threshold))
            .map(|r| r.step)
    }
}

/// Runs `steps` updates from `problem.theta0`, recording `steps + 1` points.
/// A diverging or non-finite run stops early with the offending record last.
pub fn optimize(problem: &OptimizationProblem, cfg: &RuleConfig, steps: usize) -> Result<Trajectory> {
    cfg.validate()?;
    let bound = problem.divergence_bound();
    let delta = |e: f64| problem.reference_energy.map(|r| e - r);
    let mut records = Vec::with_capacity(steps + 1);
    let mut theta = problem.theta0.clone();
    let mut status = TerminalStatus::Completed;
    for t in 0..=steps {
        let last = t == steps;
        let (e, next, cond, fallback) = if last {
            (problem.energy(&theta)?, None, f64::NAN, false)
        } else {
            let out = step(cfg, problem, &theta)?;
            (out.energy, Some(out.theta), out.cond_number, out.fallback)
        };
        records.push(StepRecord {
            step: t,
            theta: theta.clone(),
            energy: e,
            delta_e: delta(e),
            cond_number: cond,
            fallback,
        });
        if !e.is_finite() {
            status = TerminalStatus::NonFinite { step: t };
            break;
        }
        if e.abs() > bound {
            status = TerminalStatus::Diverged { step: t };
            break;
        }
        if let Some(next) = next {
            if next.iter().any(|x| !x.is_finite()) {
                status = TerminalStatus::NonFinite { step: t + 1 };
                break;
            }
            theta = next;
        }
    }
    Ok(Trajectory {
        rule: cfg.rule,
        records,
        status,
    })
}
