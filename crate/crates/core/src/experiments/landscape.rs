//! Two-parameter energy landscape with trajectories of every update rule.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::benchmark::{landscape_circuit, landscape_hamiltonian, DEFAULT_THETA_COEFFICIENT, DEFAULT_TWO_QUBIT_FACTOR};
use super::derive_seed;
use super::reference::{locate_from, LocateSpec, ReferenceOptimum};
use super::sweep::perturbed_start;
use crate::channels::{run_circuit, NoiseMode};
use crate::metric::InversionScheme;
use crate::optim::{optimize, MetricSource, OptimizationProblem, RuleConfig, Trajectory, UpdateRule};
use crate::state::expectation;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub p_error: f64,
    pub two_qubit_factor: f64,
    pub theta_coefficient: f64,
    /// Points per axis of the energy lattice over `[−π, π]²`.
    pub grid: usize,
    /// Cell-centred starts per axis for locating `θ_opt`.
    pub locate_grid: usize,
    pub locate: LocateSpec,
    pub starts: usize,
    pub start_radius: f64,
    pub steps: usize,
    pub step_size: f64,
    pub rules: Vec<UpdateRule>,
    pub inversion: InversionScheme,
    pub master_seed: u64,
}

impl Default for LandscapeSpec {
    fn default() -> Self {
        Self {
            p_error: 0.03,
            two_qubit_factor: DEFAULT_TWO_QUBIT_FACTOR,
            theta_coefficient: DEFAULT_THETA_COEFFICIENT,
            grid: 41,
            locate_grid: 6,
            locate: LocateSpec::default(),
            starts: 10,
            start_radius: 1.0,
            steps: 30,
            step_size: 0.2,
            rules: vec![
                UpdateRule::NaturalGradient(MetricSource::QfiExact),
                UpdateRule::ImagTimeMixed,
                UpdateRule::GradientDescent,
                UpdateRule::ImagTimePureNaive,
            ],
            inversion: InversionScheme::default(),
            master_seed: 0,
        }
    }
}

impl LandscapeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_error) || !(0.0..=1.0).contains(&(self.p_error * self.two_qubit_factor)) {
            return Err(Error::InvalidArgument(format!(
                "error rates {} and {} must lie in [0, 1]",
                self.p_error,
                self.p_error * self.two_qubit_factor
            )));
        }
        if self.grid < 2 || self.locate_grid == 0 {
            return Err(Error::InvalidArgument("grid needs at least 2 points per axis".into()));
        }
        if self.rules.is_empty() {
            return Err(Error::InvalidArgument("no update rules selected".into()));
        }
        for r in &self.rules {
            RuleConfig::new(*r, self.step_size).with_inversion(self.inversion).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub theta_0: f64,
    pub theta_1: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRun {
    pub start: usize,
    pub seed: u64,
    pub trajectory: Trajectory,
}

impl LandscapeRun {
    pub fn rule(&self) -> UpdateRule {
        self.trajectory.rule
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeResult {
    pub grid: Vec<LandscapePoint>,
    pub reference: ReferenceOptimum,
    pub runs: Vec<LandscapeRun>,
}

impl LandscapeResult {
    /// Runs of one rule in start order.
    pub fn runs_for(&self, rule: UpdateRule) -> Vec<&LandscapeRun> {
        self.runs.iter().filter(|r| r.rule() == rule).collect()
    }
}

/// `n` evenly spaced points covering `[−π, π]` inclusive.
fn axis(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64).collect()
}

/// Energy lattice, noisy reference optimum and one trajectory per rule from
/// each shared start.
pub fn landscape_scan(spec: &LandscapeSpec) -> Result<LandscapeResult> {
    spec.validate()?;
    let circuit = landscape_circuit(spec.p_error, spec.two_qubit_factor, spec.theta_coefficient)?;
    let h = landscape_hamiltonian();

    let ax = axis(spec.grid);
    let grid = crate::par::try_map_range(spec.grid * spec.grid, |idx| -> Result<LandscapePoint> {
        let (t0, t1) = (ax[idx / spec.grid], ax[idx % spec.grid]);
        let rho = run_circuit(&circuit, &[t0, t1], NoiseMode::On)?;
        Ok(LandscapePoint {
            theta_0: t0,
            theta_1: t1,
            energy: expectation(&rho, &h)?,
        })
    })?;

    let width = 2.0 * PI / spec.locate_grid as f64;
    let centres: Vec<f64> = (0..spec.locate_grid).map(|i| -PI + (i as f64 + 0.5) * width).collect();
    let starts: Vec<Vec<f64>> = centres
        .iter()
        .flat_map(|&a| centres.iter().map(move |&b| vec![a, b]))
        .collect();
    let reference = locate_from(&circuit, &h, NoiseMode::On, &starts, &spec.locate)?;

    let jobs: Vec<(usize, UpdateRule)> = (0..spec.starts)
        .flat_map(|s| spec.rules.iter().map(move |&r| (s, r)))
        .collect();
    let runs = crate::par::map_slice(&jobs, |&(s, rule)| -> Result<LandscapeRun> {
        let seed = derive_seed(spec.master_seed, s as u64, 0);
        let theta0 = perturbed_start(&reference.theta, spec.start_radius, seed);
        let problem = OptimizationProblem::new(circuit.clone(), h.clone(), theta0, NoiseMode::On)?
            .with_reference_energy(reference.energy);
        let cfg = RuleConfig::new(rule, spec.step_size).with_inversion(spec.inversion);
        Ok(LandscapeRun {
            start: s,
            seed,
            trajectory: optimize(&problem, &cfg, spec.steps)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    Ok(LandscapeResult { grid, reference, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(p: f64) -> LandscapeSpec {
        LandscapeSpec {
            p_error: p,
            grid: 9,
            locate_grid: 2,
            locate: LocateSpec {
                steps: 150,
                step_size: 0.1,
                ..LocateSpec::default()
            },
            starts: 2,
            steps: 5,
            ..LandscapeSpec::default()
        }
    }

    #[test]
    fn grid_shape_and_bounds() {
        let r = landscape_scan(&small(0.0)).unwrap();
        assert_eq!(r.grid.len(), 81);
        let bound = 1.01f64.sqrt();
        assert!(r.grid.iter().all(|p| p.energy.abs() <= bound + 1e-12));
        assert_eq!(r.grid[0].theta_0, -PI);
        assert_eq!(r.grid[80].theta_1, PI);
    }

    #[test]
    fn noiseless_reference_is_ground_state() {
        let r = landscape_scan(&small(0.0)).unwrap();
        assert!((r.reference.energy + 1.01f64.sqrt()).abs() < 1e-8);
        let grid_min = r.grid.iter().map(|p| p.energy).fold(f64::INFINITY, f64::min);
        assert!(grid_min >= r.reference.energy - 1e-12);
    }

    #[test]
    fn rules_share_starts() {
        let spec = small(0.01);
        let r = landscape_scan(&spec).unwrap();
        assert_eq!(r.runs.len(), spec.starts * spec.rules.len());
        for s in 0..spec.starts {
            let firsts: Vec<&Vec<f64>> = r
                .runs
                .iter()
                .filter(|x| x.start == s)
                .map(|x| &x.trajectory.records[0].theta)
                .collect();
            assert!(firsts.windows(2).all(|w| w[0] == w[1]));
        }
        assert_eq!(r.runs_for(UpdateRule::GradientDescent).len(), spec.starts);
    }

    #[test]
    fn noise_raises_the_minimum() {
        let clean = landscape_scan(&small(0.0)).unwrap().reference.energy;
        let noisy = landscape_scan(&small(0.02)).unwrap().reference.energy;
        assert!(noisy > clean + 1e-3);
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(landscape_scan(&LandscapeSpec { p_error: 0.2, ..small(0.0) }).is_err());
        assert!(landscape_scan(&LandscapeSpec { grid: 1, ..small(0.0) }).is_err());
    }
}
