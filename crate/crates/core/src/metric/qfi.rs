//! Quantum Fisher information: SLD operators, the eigen-decomposition
//! expression, the vectorised superoperator form and the Hilbert–Schmidt
//! approximation.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{symmetric_from_rows, MetricKind, MetricTensor};
use crate::channels::{evaluate, run_circuit, run_circuit_pure, CircuitSpec, DerivativeMethod, NoiseMode};
use crate::state::{
    decompose_hermitian, eigendecompose, fidelity_pure, hermitian_eigen, trace_product, DensityMatrix,
    SpectralDecomposition, DEFAULT_RANK_THRESHOLD,
};
use crate::{par, CMatrix, Error, RMatrix, Result};

/// Largest Hilbert-space dimension accepted by [`qfi_oracle`] (the
/// superoperator has `dim²×dim²` entries).
pub const MAX_ORACLE_DIM: usize = 32;
/// Fidelity below which the Hilbert–Schmidt approximation is flagged.
pub const DEFAULT_FIDELITY_FLOOR: f64 = 0.1;

/// Eigenvalue pairs closer than `max(GAP_ABS, GAP_REL (p_n + p_m))` are treated
/// as degenerate: their eigenvector derivatives are ill-conditioned and the
/// pair contributes through the SLD form instead.
const GAP_ABS: f64 = 1e-8;
const GAP_REL: f64 = 1e-3;
/// Superoperator eigenvalues at or below this are dropped from the pseudo-inverse.
const ORACLE_CUTOFF: f64 = 1e-12;

/// How `∂_k p_n` and `|∂_k ψ_n⟩` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenDerivative {
    /// First-order perturbation theory applied to the exact `∂_k ρ`.
    Perturbative,
    /// Central differences of the full spectral decomposition at `θ ± h e_k`,
    /// with eigenvectors matched by maximal overlap and phase-aligned.
    FiniteDifference { h: f64 },
}

/// Controls how the QFI of a circuit is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiOptions {
    pub rank_threshold: f64,
    pub noise: NoiseMode,
    pub derivative: DerivativeMethod,
    pub eigen: EigenDerivative,
    pub fidelity_floor: f64,
}

impl Default for QfiOptions {
    fn default() -> Self {
        Self {
            rank_threshold: DEFAULT_RANK_THRESHOLD,
            noise: NoiseMode::On,
            derivative: DerivativeMethod::default(),
            eigen: EigenDerivative::Perturbative,
            fidelity_floor: DEFAULT_FIDELITY_FLOOR,
        }
    }
}

/// Whether the Hilbert–Schmidt approximation divides by the fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityMode {
    Divide,
    Omit,
}

/// Symmetric logarithmic derivative `L` with `∂ρ = (Lρ + ρL)/2` on the support of ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct SldOperator {
    pub matrix: CMatrix,
}

impl SldOperator {
    /// Orthonormal eigenvectors of `L` as columns. Measuring in this basis
    /// attains the QFI.
    pub fn eigenbasis(&self) -> Result<CMatrix> {
        Ok(hermitian_decomposition(&self.matrix)?.eigenvectors)
    }
}

fn check_square(expected: usize, m: &CMatrix) -> Result<()> {
    if m.nrows() != expected || m.ncols() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: m.nrows(),
        });
    }
    Ok(())
}

/// Builds `L` from `⟨ψ_n|L|ψ_m⟩ = 2⟨ψ_n|∂ρ|ψ_m⟩ / (p_n + p_m)`. Entries between
/// two kernel vectors are zero.
pub fn sld(decomp: &SpectralDecomposition, drho: &CMatrix) -> Result<SldOperator> {
    if decomp.rank == 0 {
        return Err(Error::ZeroRank);
    }
    check_square(decomp.dim(), drho)?;
    let x = decomp.to_eigenbasis(drho);
    let d = decomp.dim();
    let l = CMatrix::from_fn(d, d, |n, m| {
        let s = decomp.retained_eigenvalue(n) + decomp.retained_eigenvalue(m);
        if s > 0.0 {
            x[(n, m)] * (2.0 / s)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SldOperator {
        matrix: decomp.from_eigenbasis(&l),
    })
}

/// Max-abs residual of `∂ρ − (Lρ + ρL)/2` outside the kernel–kernel block,
/// with ρ the rank-truncated reconstruction.
pub fn sld_residual(decomp: &SpectralDecomposition, drho: &CMatrix, l: &SldOperator) -> f64 {
    let x = decomp.to_eigenbasis(drho);
    let lp = decomp.to_eigenbasis(&l.matrix);
    let d = decomp.dim();
    let mut worst = 0.0f64;
    for n in 0..d {
        for m in 0..d {
            if n >= decomp.rank && m >= decomp.rank {
                continue;
            }
            let s = decomp.retained_eigenvalue(n) + decomp.retained_eigenvalue(m);
            worst = worst.max((x[(n, m)] - lp[(n, m)] * (s / 2.0)).norm());
        }
    }
    worst
}

/// Per-parameter ingredients of the eigen-decomposition expression.
struct ParamData {
    /// `∂_k ρ` in the eigenbasis of ρ.
    x: CMatrix,
    /// `∂_k p_n` for the retained eigenvalues.
    dp: Vec<f64>,
    /// `⟨ψ_m|∂_k ψ_n⟩` with `m` over the full basis and `n` over the retained set.
    overlaps: CMatrix,
}

struct Spectrum<'a> {
    decomp: &'a SpectralDecomposition,
    /// Retained eigenvalues, zero on the kernel.
    p: Vec<f64>,
}

impl<'a> Spectrum<'a> {
    fn new(decomp: &'a SpectralDecomposition) -> Self {
        let p = (0..decomp.dim()).map(|n| decomp.retained_eigenvalue(n)).collect();
        Self { decomp, p }
    }

    fn rank(&self) -> usize {
        self.decomp.rank
    }

    fn degenerate(&self, n: usize, m: usize) -> bool {
        let (pn, pm) = (self.p[n], self.p[m]);
        m != n && m < self.rank() && (pn - pm).abs() < GAP_ABS.max(GAP_REL * (pn + pm))
    }

    fn perturbative(&self, drho: &CMatrix) -> ParamData {
        let x = self.decomp.to_eigenbasis(drho);
        let r = self.rank();
        let d = self.decomp.dim();
        let dp = (0..r).map(|n| x[(n, n)].re).collect();
        let overlaps = CMatrix::from_fn(d, r, |m, n| {
            if m == n || self.degenerate(n, m) {
                Complex64::new(0.0, 0.0)
            } else {
                x[(m, n)] / (self.p[n] - self.p[m])
            }
        });
        ParamData { x, dp, overlaps }
    }

    /// One entry of the three-sum expression; degenerate pairs use the SLD pair term.
    fn entry(&self, a: &ParamData, b: &ParamData) -> f64 {
        let r = self.rank();
        let d = self.decomp.dim();
        let mut classical = 0.0;
        let mut overlap_sum = 0.0;
        let mut cross_sum = 0.0;
        let mut degenerate_sum = 0.0;
        for n in 0..r {
            let pn = self.p[n];
            classical += a.dp[n] * b.dp[n] / pn;
            for m in 0..d {
                if self.degenerate(n, m) {
                    let pm = self.p[m];
                    degenerate_sum += 2.0 * (a.x[(n, m)] * b.x[(m, n)]).re / (pn + pm);
                    continue;
                }
                let z = (a.overlaps[(m, n)].conj() * b.overlaps[(m, n)]).re;
                overlap_sum += 4.0 * pn * z;
                if m < r {
                    let pm = self.p[m];
                    cross_sum += 8.0 * pn * pm / (pn + pm) * z;
                }
            }
        }
        classical + overlap_sum - cross_sum + degenerate_sum
    }

    fn assemble(&self, data: &[ParamData]) -> RMatrix {
        let nu = data.len();
        symmetric_from_rows(nu, |k| (k..nu).map(|l| self.entry(&data[k], &data[l])).collect())
    }
}

/// QFI of `ρ` from its parameter derivatives via the eigen-decomposition
/// expression, with eigenvector derivatives from first-order perturbation
/// theory.
pub fn qfi_exact_from(rho: &DensityMatrix, drho: &[CMatrix], rank_threshold: f64) -> Result<MetricTensor> {
    for x in drho {
        check_square(rho.dim(), x)?;
    }
    let decomp = eigendecompose(rho, rank_threshold)?;
    if decomp.rank == 0 {
        return Err(Error::ZeroRank);
    }
    let spec = Spectrum::new(&decomp);
    let data = par::map_slice(drho, |x| spec.perturbative(x));
    Ok(MetricTensor::new(spec.assemble(&data), MetricKind::QfiExact))
}

/// Exact QFI of the circuit output `ρ(θ)`.
pub fn qfi_exact(circuit: &CircuitSpec, theta: &[f64], opts: &QfiOptions) -> Result<MetricTensor> {
    let eval = evaluate(circuit, theta, opts.noise, opts.derivative)?;
    match opts.eigen {
        EigenDerivative::Perturbative => qfi_exact_from(&eval.rho, &eval.derivatives, opts.rank_threshold),
        EigenDerivative::FiniteDifference { h } => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!("finite-difference step {h}")));
            }
            let decomp = eigendecompose(&eval.rho, opts.rank_threshold)?;
            if decomp.rank == 0 {
                return Err(Error::ZeroRank);
            }
            let spec = Spectrum::new(&decomp);
            let data = par::try_map_range(circuit.n_params(), |k| {
                let mut shifted = theta.to_vec();
                shifted[k] = theta[k] + h;
                let plus = eigendecompose(&run_circuit(circuit, &shifted, opts.noise)?, opts.rank_threshold)?;
                shifted[k] = theta[k] - h;
                let minus = eigendecompose(&run_circuit(circuit, &shifted, opts.noise)?, opts.rank_threshold)?;
                Ok(finite_difference_data(&spec, &eval.derivatives[k], &plus, &minus, h))
            })?;
            Ok(MetricTensor::new(spec.assemble(&data), MetricKind::QfiExact))
        }
    }
}

/// Eigenvector of `other` best matching `v`, rotated so the overlap is real and positive.
fn aligned_match(v: &DVector<Complex64>, other: &SpectralDecomposition) -> (f64, DVector<Complex64>) {
    let overlaps = other.eigenvectors.adjoint() * v;
    let (best, ov) = overlaps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, z)| (i, *z))
        .expect("non-empty spectrum");
    let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { Complex64::new(1.0, 0.0) };
    (other.eigenvalues[best], other.eigenvectors.column(best) * phase)
}

fn finite_difference_data(
    spec: &Spectrum<'_>,
    drho: &CMatrix,
    plus: &SpectralDecomposition,
    minus: &SpectralDecomposition,
    h: f64,
) -> ParamData {
    let decomp = spec.decomp;
    let r = decomp.rank;
    let mut dp = Vec::with_capacity(r);
    let mut dpsi = CMatrix::zeros(decomp.dim(), r);
    for n in 0..r {
        let v: DVector<Complex64> = decomp.eigenvectors.column(n).into_owned();
        let (pp, vp) = aligned_match(&v, plus);
        let (pm, vm) = aligned_match(&v, minus);
        dp.push((pp - pm) / (2.0 * h));
        dpsi.set_column(n, &((vp - vm) / Complex64::new(2.0 * h, 0.0)));
    }
    ParamData {
        x: decomp.to_eigenbasis(drho),
        dp,
        overlaps: decomp.eigenvectors.adjoint() * dpsi,
    }
}

/// Brute-force QFI `2 Re vec(∂_kρ)† [ρ*⊗I + I⊗ρ]⁺ vec(∂_lρ)` with an explicit
/// `dim²×dim²` superoperator and an eigenvalue pseudo-inverse.
pub fn qfi_oracle(rho: &DensityMatrix, drho: &[CMatrix]) -> Result<MetricTensor> {
    let d = rho.dim();
    if d > MAX_ORACLE_DIM {
        return Err(Error::InvalidArgument(format!(
            "oracle dimension {d} exceeds {MAX_ORACLE_DIM}"
        )));
    }
    for x in drho {
        check_square(d, x)?;
    }
    let id = CMatrix::identity(d, d);
    let s = rho.matrix().conjugate().kronecker(&id) + id.kronecker(rho.matrix());
    let (vals, vecs) = hermitian_eigen(&s)?;
    let keep = vals.iter().take_while(|&&v| v > ORACLE_CUTOFF).count();
    let basis = vecs.columns(0, keep);
    // Column-stacked vec(X) is the raw column-major storage.
    let coords: Vec<DVector<Complex64>> = drho
        .iter()
        .map(|x| basis.adjoint() * DVector::from_column_slice(x.as_slice()))
        .collect();
    let nu = drho.len();
    let m = symmetric_from_rows(nu, |k| {
        (k..nu)
            .map(|l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..keep {
                    acc += coords[k][j].conj() * coords[l][j] / vals[j];
                }
                2.0 * acc.re
            })
            .collect()
    });
    Ok(MetricTensor::new(m, MetricKind::QfiOracle))
}

/// Hilbert–Schmidt approximation `2 tr[∂_kρ ∂_lρ] / F` (or without the `1/F`
/// factor). The result carries a warning when `F` is below `floor`.
pub fn qfi_approx_from(drho: &[CMatrix], fidelity: f64, mode: FidelityMode, floor: f64) -> Result<MetricTensor> {
    if !(fidelity > 0.0 && fidelity.is_finite()) {
        return Err(Error::InvalidArgument(format!("fidelity {fidelity}")));
    }
    let factor = match mode {
        FidelityMode::Divide => 2.0 / fidelity,
        FidelityMode::Omit => 2.0,
    };
    let nu = drho.len();
    let m = symmetric_from_rows(nu, |k| {
        (k..nu).map(|l| factor * trace_product(&drho[k], &drho[l]).re).collect()
    });
    let t = MetricTensor::new(m, MetricKind::QfiApprox);
    Ok(if fidelity < floor {
        t.with_warning(format!("fidelity {fidelity:.3e} below {floor:.3e}: approximation regime violated"))
    } else {
        t
    })
}

/// Hilbert–Schmidt approximation for a circuit, with `F` measured against the
/// noiseless output of the same circuit.
pub fn qfi_approx(circuit: &CircuitSpec, theta: &[f64], mode: FidelityMode, opts: &QfiOptions) -> Result<MetricTensor> {
    let eval = evaluate(circuit, theta, opts.noise, opts.derivative)?;
    let ideal = run_circuit_pure(circuit, theta)?;
    let f = fidelity_pure(&eval.rho, &ideal)?;
    qfi_approx_from(&eval.derivatives, f, mode, opts.fidelity_floor)
}

/// Spectral decomposition of an arbitrary Hermitian matrix.
pub(crate) fn hermitian_decomposition(m: &CMatrix) -> Result<SpectralDecomposition> {
    decompose_hermitian(m, f64::NEG_INFINITY)
}
