//! Fubini–Study metric, the mixed-state metric `M` and classical Fisher information.

use super::{symmetric_from_rows, MetricKind, MetricTensor};
use crate::channels::{evaluate, pure_derivatives, CircuitSpec, DerivativeMethod, NoiseMode, PureEvaluation};
use crate::state::{trace_product, DensityMatrix};
use crate::{CMatrix, Error, Result};

/// Outcome probabilities at or below this are dropped from the classical Fisher sum.
pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// `A_kl = Re[⟨∂_kψ|∂_lψ⟩ − ⟨∂_kψ|ψ⟩⟨ψ|∂_lψ⟩]` from state-vector derivatives.
pub fn fubini_study_from(pe: &PureEvaluation) -> MetricTensor {
    let psi = pe.psi.amplitudes();
    let d = &pe.derivatives;
    let proj: Vec<_> = d.iter().map(|dk| psi.dotc(dk)).collect();
    let nu = d.len();
    let m = symmetric_from_rows(nu, |k| {
        (k..nu)
            .map(|l| (d[k].dotc(&d[l]) - proj[k].conj() * proj[l]).re)
            .collect()
    });
    MetricTensor::new(m, MetricKind::FubiniStudyA)
}

/// Fubini–Study metric of the noiseless circuit.
pub fn fubini_study_a(circuit: &CircuitSpec, theta: &[f64]) -> Result<MetricTensor> {
    Ok(fubini_study_from(&pure_derivatives(circuit, theta)?))
}

/// `M_kl = ½ tr[∂_kρ ∂_lρ]`.
pub fn mixed_metric_from(drho: &[CMatrix]) -> MetricTensor {
    let nu = drho.len();
    let m = symmetric_from_rows(nu, |k| {
        (k..nu).map(|l| 0.5 * trace_product(&drho[k], &drho[l]).re).collect()
    });
    MetricTensor::new(m, MetricKind::MixedM)
}

pub fn mixed_metric_m(
    circuit: &CircuitSpec,
    theta: &[f64],
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<MetricTensor> {
    Ok(mixed_metric_from(&evaluate(circuit, theta, noise, method)?.derivatives))
}

/// Classical Fisher information `Σ_n ∂_k p_n ∂_l p_n / p_n` for a projective
/// measurement in the orthonormal basis given by the columns of `basis`.
pub fn classical_fisher_from(
    rho: &DensityMatrix,
    drho: &[CMatrix],
    basis: &CMatrix,
    probability_floor: f64,
) -> Result<MetricTensor> {
    let d = rho.dim();
    if basis.nrows() != d || basis.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: basis.ncols(),
        });
    }
    let gram = basis.adjoint() * basis - CMatrix::identity(d, d);
    let err = gram.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if err > ORTHONORMAL_TOL {
        return Err(Error::NonOrthonormalBasis(err));
    }
    let outcome = |m: &CMatrix, n: usize| {
        let b = basis.column(n);
        (b.adjoint() * m * b)[(0, 0)].re
    };
    let probs: Vec<f64> = (0..d).map(|n| outcome(rho.matrix(), n)).collect();
    let dp: Vec<Vec<f64>> = drho.iter().map(|x| (0..d).map(|n| outcome(x, n)).collect()).collect();
    let nu = drho.len();
    let m = symmetric_from_rows(nu, |k| {
        (k..nu)
            .map(|l| {
                probs
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > probability_floor)
                    .map(|(n, &p)| dp[k][n] * dp[l][n] / p)
                    .sum()
            })
            .collect()
    });
    Ok(MetricTensor::new(m, MetricKind::ClassicalFc))
}

pub fn classical_fisher(
    circuit: &CircuitSpec,
    theta: &[f64],
    basis: &CMatrix,
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<MetricTensor> {
    let eval = evaluate(circuit, theta, noise, method)?;
    classical_fisher_from(&eval.rho, &eval.derivatives, basis, DEFAULT_PROBABILITY_FLOOR)
}
