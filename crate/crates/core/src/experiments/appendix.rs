//! Numerical checks of the ε-mixed state identities: the `ρ²` residual, the
//! SLD trace relation and the QFI contraction bound.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::derive_seed;
use crate::metric::{qfi_exact_from, sld};
use crate::pauli::{Pauli, PauliString};
use crate::state::{eigendecompose, max_abs_diff, trace, DensityMatrix, DEFAULT_RANK_THRESHOLD};
use crate::{CMatrix, Error, Result};

/// Largest mixedness accepted: beyond it `ψ₁` need not be the dominant eigenvector.
pub const MAX_EPSILON: f64 = 0.5;
/// Step for the finite-difference estimate of `κ`.
pub const KAPPA_STEP: f64 = 1e-4;
/// Multiplier in the contraction-bound tolerance `c·ε·κ/d`.
pub const BOUND_TOL_FACTOR: f64 = 10.0;

const LEMMA_STREAM: u64 = 1;
const TRACE_STREAM: u64 = 2;
const BOUND_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixSpec {
    pub trials: usize,
    /// Largest register; dimensions run up to `2^max_qubits`.
    pub max_qubits: usize,
    pub epsilon_min: f64,
    pub epsilon_max: f64,
    /// Fixed mixedness of the dimension scan.
    pub scan_epsilon: f64,
    /// Parameters (random Pauli generators) per trial.
    pub generators: usize,
    /// `κ = kappa_scale · ε / √d` in the `κ > 0` variants.
    pub kappa_scale: f64,
    pub master_seed: u64,
}

impl Default for AppendixSpec {
    fn default() -> Self {
        Self {
            trials: 100,
            max_qubits: 6,
            epsilon_min: 0.01,
            epsilon_max: 0.3,
            scan_epsilon: 0.05,
            generators: 3,
            kappa_scale: 0.1,
            master_seed: 0,
        }
    }
}

impl AppendixSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.generators == 0 {
            return Err(Error::InvalidArgument("trials and generators must be at least 1".into()));
        }
        if !(3..=crate::pauli::MAX_DENSE_QUBITS).contains(&self.max_qubits) {
            return Err(Error::InvalidArgument(format!("max_qubits {} outside [3, 14]", self.max_qubits)));
        }
        check_epsilon(self.epsilon_min)?;
        check_epsilon(self.epsilon_max)?;
        check_epsilon(self.scan_epsilon)?;
        if self.epsilon_min > self.epsilon_max {
            return Err(Error::InvalidArgument("epsilon_min exceeds epsilon_max".into()));
        }
        if !(self.kappa_scale >= 0.0 && self.kappa_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa_scale {}", self.kappa_scale)));
        }
        Ok(())
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if (0.0..=MAX_EPSILON).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("epsilon {eps} outside [0, {MAX_EPSILON}]")))
    }
}

/// `ρ_ε = (1−ε)|ψ₁⟩⟨ψ₁| + ε Σ_{n≥2} p_n |ψ_n⟩⟨ψ_n|` with `ψ_n` the columns of
/// `basis` and `tail = (p_2, …, p_d)` summing to one.
#[derive(Debug, Clone)]
pub struct EpsMixedState {
    pub basis: CMatrix,
    pub epsilon: f64,
    pub tail: Vec<f64>,
}

impl EpsMixedState {
    pub fn new(basis: CMatrix, epsilon: f64, tail: Vec<f64>) -> Result<Self> {
        check_epsilon(epsilon)?;
        let d = basis.nrows();
        if basis.ncols() != d || tail.len() + 1 != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: tail.len() + 1,
            });
        }
        if tail.iter().any(|&p| p < 0.0) || (tail.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("tail probabilities must be a distribution".into()));
        }
        Ok(Self { basis, epsilon, tail })
    }

    /// Seeded random basis; the tail is uniform or perturbed by up to ±50 %.
    pub fn random(seed: u64, dim: usize, epsilon: f64, uniform_tail: bool) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument("dimension must be at least 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = random_unitary(&mut rng, dim);
        let mut tail: Vec<f64> = (1..dim)
            .map(|_| if uniform_tail { 1.0 } else { 1.0 + rng.gen_range(-0.5..0.5) })
            .collect();
        let s: f64 = tail.iter().sum();
        tail.iter_mut().for_each(|p| *p /= s);
        Self::new(basis, epsilon, tail)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Weighted sum of projectors `Σ w_n |ψ_n⟩⟨ψ_n|`.
    fn spectral_sum(&self, weights: impl Fn(usize) -> f64) -> CMatrix {
        let w: Vec<Complex64> = (0..self.dim()).map(|n| Complex64::new(weights(n), 0.0)).collect();
        let scaled = CMatrix::from_fn(self.dim(), self.dim(), |i, j| self.basis[(i, j)] * w[j]);
        scaled * self.basis.adjoint()
    }

    pub fn eigenvalues_at(&self, epsilon: f64) -> Vec<f64> {
        std::iter::once(1.0 - epsilon)
            .chain(self.tail.iter().map(|p| epsilon * p))
            .collect()
    }

    pub fn matrix_at(&self, epsilon: f64) -> CMatrix {
        let ev = self.eigenvalues_at(epsilon);
        self.spectral_sum(|n| ev[n])
    }

    pub fn matrix(&self) -> CMatrix {
        self.matrix_at(self.epsilon)
    }

    /// `R = Σ_{n≥2} [ε²p_n² − (1−ε)εp_n] |ψ_n⟩⟨ψ_n|`.
    pub fn lemma_residual_operator(&self) -> CMatrix {
        let e = self.epsilon;
        self.spectral_sum(|n| if n == 0 { 0.0 } else { let p = self.tail[n - 1]; e * e * p * p - (1.0 - e) * e * p })
    }

    /// `∂ρ` for `ρ(θ) = e^{−iθG} ρ_{ε+κθ} e^{iθG}` at `θ = 0`.
    pub fn derivative(&self, g: &CMatrix, kappa: f64) -> CMatrix {
        let rho = self.matrix();
        let comm = g * &rho - &rho * g;
        let shift = self.spectral_sum(|n| if n == 0 { -1.0 } else { self.tail[n - 1] });
        comm * Complex64::new(0.0, -1.0) + shift.scale(kappa)
    }

    /// `ρ(θ)` for the same family at finite `θ`; `G` must square to the identity.
    pub fn evolved(&self, g: &CMatrix, kappa: f64, theta: f64) -> CMatrix {
        let d = self.dim();
        let u = CMatrix::identity(d, d).scale(theta.cos()) - g * Complex64::new(0.0, theta.sin());
        &u * self.matrix_at(self.epsilon + kappa * theta) * u.adjoint()
    }

    /// QFI of the noiseless state `ψ₁` under generator `G`: `4 Var(G)`.
    pub fn pure_qfi(&self, g: &CMatrix) -> f64 {
        let psi = self.basis.column(0);
        let gpsi = g * psi;
        let mean = psi.dotc(&gpsi).re;
        4.0 * (gpsi.norm_squared() - mean * mean)
    }
}

/// QR of a seeded complex matrix with entries in the unit box.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

fn random_generator(rng: &mut ChaCha8Rng, n_qubits: usize) -> CMatrix {
    let ops = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    loop {
        let s: Vec<Pauli> = (0..n_qubits).map(|_| ops[rng.gen_range(0..4)]).collect();
        if s.iter().any(|&p| p != Pauli::I) {
            return PauliString(s).to_matrix();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaTrial {
    pub dim: usize,
    pub epsilon: f64,
    /// `max |ρ² − (1−ε)ρ − R|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRelationRow {
    pub dim: usize,
    pub epsilon: f64,
    pub kappa: f64,
    /// Mean over trials of `max_kl |LHS − RHS| / max_kl |LHS|`.
    pub mean_relative_residual: f64,
    pub max_relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrial {
    pub dim: usize,
    pub epsilon: f64,
    /// `κ` used to build the state.
    pub kappa: f64,
    /// Finite-difference estimate of `max_k |∂_k λ_max|`.
    pub kappa_estimate: f64,
    pub tolerance: f64,
    /// `max_k (F_kk − (1−ε)F^pure_kk − tol)`; the bound holds when ≤ 0.
    pub max_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub lemma: Vec<LemmaTrial>,
    pub trace_relation: Vec<TraceRelationRow>,
    pub bound: Vec<BoundTrial>,
}

impl AppendixReport {
    pub fn lemma_max_residual(&self) -> f64 {
        self.lemma.iter().map(|t| t.residual).fold(0.0, f64::max)
    }

    /// `κ = 0` rows of the dimension scan, in increasing dimension.
    pub fn scan_rows(&self) -> Vec<&TraceRelationRow> {
        self.trace_relation.iter().filter(|r| r.kappa == 0.0).collect()
    }

    /// Mean relative residual strictly decreases along the `κ = 0` scan.
    pub fn scan_is_decreasing(&self) -> bool {
        self.scan_rows().windows(2).all(|w| w[1].mean_relative_residual < w[0].mean_relative_residual)
    }

    pub fn bound_holds(&self) -> bool {
        self.bound.iter().all(|t| t.holds)
    }
}

/// `ρ² = (1−ε)ρ + R` on one random state with a non-uniform tail.
pub fn lemma_trial(state: &EpsMixedState) -> LemmaTrial {
    let rho = state.matrix();
    let lhs = &rho * &rho;
    let rhs = rho.scale(1.0 - state.epsilon) + state.lemma_residual_operator();
    LemmaTrial {
        dim: state.dim(),
        epsilon: state.epsilon,
        residual: max_abs_diff(&lhs, &rhs),
    }
}

/// Relative residual between `tr[ρ{L_k, L_l}]` and `4 tr[∂_kρ ∂_lρ]/(1−ε)`.
pub fn trace_relation_residual(state: &EpsMixedState, generators: &[CMatrix], kappa: f64) -> Result<f64> {
    let rho = DensityMatrix::new(state.matrix())?;
    let decomp = eigendecompose(&rho, DEFAULT_RANK_THRESHOLD)?;
    let drho: Vec<CMatrix> = generators.iter().map(|g| state.derivative(g, kappa)).collect();
    let slds = drho.iter().map(|x| sld(&decomp, x).map(|l| l.matrix)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..drho.len() {
        for l in k..drho.len() {
            let anti = &slds[k] * &slds[l] + &slds[l] * &slds[k];
            let lhs = trace(&(rho.matrix() * anti)).re;
            let rhs = 4.0 * trace(&(&drho[k] * &drho[l])).re / (1.0 - state.epsilon);
            worst = worst.max((lhs - rhs).abs());
            scale = scale.max(lhs.abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Checks `F_kk ≤ (1−ε) F^pure_kk + 10 ε κ / d` with `κ` estimated from the
/// top eigenvalue of `ρ(±h e_k)`.
pub fn bound_trial(state: &EpsMixedState, generators: &[CMatrix], kappa: f64) -> Result<BoundTrial> {
    let d = state.dim();
    let eps = state.epsilon;
    let rho = DensityMatrix::new(state.matrix())?;
    let drho: Vec<CMatrix> = generators.iter().map(|g| state.derivative(g, kappa)).collect();
    let f = qfi_exact_from(&rho, &drho, DEFAULT_RANK_THRESHOLD)?;
    let top = |g: &CMatrix, t: f64| -> Result<f64> {
        let r = DensityMatrix::new(state.evolved(g, kappa, t))?;
        Ok(eigendecompose(&r, 0.0)?.eigenvalues[0])
    };
    let mut kappa_estimate = 0.0f64;
    for g in generators {
        let slope = (top(g, KAPPA_STEP)? - top(g, -KAPPA_STEP)?) / (2.0 * KAPPA_STEP);
        kappa_estimate = kappa_estimate.max(slope.abs());
    }
    let tolerance = BOUND_TOL_FACTOR * eps * kappa_estimate / d as f64;
    let max_excess = generators
        .iter()
        .enumerate()
        .map(|(k, g)| f.entries()[(k, k)] - (1.0 - eps) * state.pure_qfi(g) - tolerance)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundTrial {
        dim: d,
        epsilon: eps,
        kappa,
        kappa_estimate,
        tolerance,
        max_excess,
        holds: max_excess <= 0.0,
    })
}

fn draw_epsilon(rng: &mut ChaCha8Rng, spec: &AppendixSpec) -> f64 {
    if spec.epsilon_max > spec.epsilon_min {
        rng.gen_range(spec.epsilon_min..=spec.epsilon_max)
    } else {
        spec.epsilon_min
    }
}

pub fn appendix_checks(spec: &AppendixSpec) -> Result<AppendixReport> {
    spec.validate()?;
    let lemma = crate::par::try_map_range(spec.trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.master_seed, LEMMA_STREAM, t as u64));
        let n = rng.gen_range(1..=spec.max_qubits);
        let eps = draw_epsilon(&mut rng, spec);
        let state = EpsMixedState::random(rng.gen(), 1 << n, eps, false)?;
        Ok(lemma_trial(&state))
    })?;

    let mut trace_relation = Vec::new();
    for n in 3..=spec.max_qubits {
        let d = 1usize << n;
        let kappa_pos = spec.kappa_scale * spec.scan_epsilon / (d as f64).sqrt();
        let kappas: Vec<f64> = if kappa_pos > 0.0 { vec![0.0, kappa_pos] } else { vec![0.0] };
        for kappa in kappas {
            let residuals = crate::par::try_map_range(spec.trials, |t| {
                let seed = derive_seed(spec.master_seed, TRACE_STREAM, ((n as u64) << 32) | t as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let gens: Vec<CMatrix> = (0..spec.generators).map(|_| random_generator(&mut rng, n)).collect();
                let state = EpsMixedState::random(rng.gen(), d, spec.scan_epsilon, true)?;
                trace_relation_residual(&state, &gens, kappa)
            })?;
            trace_relation.push(TraceRelationRow {
                dim: d,
                epsilon: spec.scan_epsilon,
                kappa,
                mean_relative_residual: residuals.iter().sum::<f64>() / residuals.len() as f64,
                max_relative_residual: residuals.iter().cloned().fold(0.0, f64::max),
            });
        }
    }

    let bound = crate::par::try_map_range(spec.trials, |t| -> Result<Vec<BoundTrial>> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.master_seed, BOUND_STREAM, t as u64));
        let n = rng.gen_range(2..=spec.max_qubits);
        let d = 1usize << n;
        let eps = draw_epsilon(&mut rng, spec);
        let gens: Vec<CMatrix> = (0..spec.generators).map(|_| random_generator(&mut rng, n)).collect();
        let state = EpsMixedState::random(rng.gen(), d, eps, true)?;
        let kappa_pos = spec.kappa_scale * eps / (d as f64).sqrt();
        let mut out = vec![bound_trial(&state, &gens, 0.0)?];
        if kappa_pos > 0.0 {
            out.push(bound_trial(&state, &gens, kappa_pos)?);
        }
        Ok(out)
    })?
    .into_iter()
    .flatten()
    .collect();

    Ok(AppendixReport {
        lemma,
        trace_relation,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> AppendixSpec {
        AppendixSpec {
            trials: 6,
            max_qubits: 4,
            ..AppendixSpec::default()
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 8);
        assert!(max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(8, 8)) < 1e-13);
    }

    #[test]
    fn lemma_example_residual() {
        let s = EpsMixedState::random(11, 16, 0.1, true).unwrap();
        assert!(lemma_trial(&s).residual < 1e-12);
        let rho = DensityMatrix::new(s.matrix()).unwrap();
        assert!((trace(rho.matrix()).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_state_has_zero_residual_operator() {
        let s = EpsMixedState::random(5, 8, 0.0, false).unwrap();
        assert!(s.lemma_residual_operator().iter().all(|z| z.norm() < 1e-15));
        assert!(lemma_trial(&s).residual < 1e-14);
    }

    #[test]
    fn epsilon_out_of_range_rejected() {
        assert!(EpsMixedState::random(1, 4, -0.1, true).is_err());
        assert!(EpsMixedState::random(1, 4, 0.6, true).is_err());
        let bad = AppendixSpec {
            epsilon_max: 0.7,
            ..AppendixSpec::default()
        };
        assert!(appendix_checks(&bad).is_err());
    }

    #[test]
    fn uniform_tail_relation_matches_closed_form() {
        // With κ = 0 and a uniform tail the two sides differ by exactly
        // b/(1−ε) relative, where b = ε/(d−1) is the tail eigenvalue.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (n, eps) in [(3usize, 0.05), (5, 0.2)] {
            let d = 1usize << n;
            let gens: Vec<CMatrix> = (0..3).map(|_| random_generator(&mut rng, n)).collect();
            let s = EpsMixedState::random(rng.gen(), d, eps, true).unwrap();
            let r = trace_relation_residual(&s, &gens, 0.0).unwrap();
            let expected = eps / ((d - 1) as f64 * (1.0 - eps));
            assert!((r - expected).abs() < 1e-9 * expected.max(1.0), "{r} vs {expected}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = random_generator(&mut rng, 3);
        let s = EpsMixedState::random(4, 8, 0.1, true).unwrap();
        let h = 1e-5;
        let fd = (s.evolved(&g, 0.01, h) - s.evolved(&g, 0.01, -h)).unscale(2.0 * h);
        assert!(max_abs_diff(&fd, &s.derivative(&g, 0.01)) < 1e-8);
    }

    #[test]
    fn kappa_estimate_recovers_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gens: Vec<CMatrix> = (0..2).map(|_| random_generator(&mut rng, 3)).collect();
        let s = EpsMixedState::random(9, 8, 0.1, true).unwrap();
        let t = bound_trial(&s, &gens, 0.004).unwrap();
        assert!((t.kappa_estimate - 0.004).abs() < 1e-8);
        assert!(bound_trial(&s, &gens, 0.0).unwrap().kappa_estimate < 1e-9);
    }

    #[test]
    fn uniform_tail_contracts_qfi() {
        // F = (a−b)²/(a+b) F_pure for a = 1−ε, b = ε/(d−1) when κ = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = random_generator(&mut rng, 3);
        let s = EpsMixedState::random(6, 8, 0.2, true).unwrap();
        let rho = DensityMatrix::new(s.matrix()).unwrap();
        let f = qfi_exact_from(&rho, &[s.derivative(&g, 0.0)], DEFAULT_RANK_THRESHOLD).unwrap();
        let (a, b) = (0.8, 0.2 / 7.0);
        let expected = (a - b) * (a - b) / (a + b) * s.pure_qfi(&g);
        assert!((f.entries()[(0, 0)] - expected).abs() < 1e-10);
    }

    #[test]
    fn small_study_passes_all_checks() {
        let r = appendix_checks(&small_spec()).unwrap();
        assert_eq!(r.lemma.len(), 6);
        assert!(r.lemma_max_residual() < 1e-12);
        assert_eq!(r.scan_rows().len(), 2);
        assert!(r.scan_is_decreasing());
        assert_eq!(r.bound.len(), 12);
        assert!(r.bound_holds());
    }

    #[test]
    fn study_is_deterministic() {
        let a = appendix_checks(&small_spec()).unwrap();
        let b = appendix_checks(&small_spec()).unwrap();
        assert_eq!(a, b);
    }
}
