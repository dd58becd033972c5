//! Metric tensors on parameter space and their regularised inverses.

mod geometry;
mod inverse;
mod qfi;

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::RMatrix;

pub use geometry::{
    classical_fisher, classical_fisher_from, fubini_study_a, fubini_study_from, mixed_metric_from,
    mixed_metric_m, DEFAULT_PROBABILITY_FLOOR,
};
pub use inverse::{regularized_inverse, InversionScheme, RegularizedInverse, DEFAULT_CUTOFF};
pub use qfi::{
    qfi_approx, qfi_approx_from, qfi_exact, qfi_exact_from, qfi_oracle, sld, sld_residual, EigenDerivative,
    FidelityMode, QfiOptions, SldOperator, DEFAULT_FIDELITY_FLOOR, MAX_ORACLE_DIM,
};

/// Which construction produced a [`MetricTensor`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    QfiExact,
    QfiOracle,
    QfiApprox,
    FubiniStudyA,
    MixedM,
    ClassicalFc,
}

/// Symmetry tolerance on metric outputs.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-8;

/// Real symmetric `ν×ν` matrix with its provenance and spectral range.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    entries: RMatrix,
    kind: MetricKind,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
    warning: Option<String>,
}

impl MetricTensor {
    /// Symmetrises `entries` and records its extreme eigenvalues.
    pub fn new(entries: RMatrix, kind: MetricKind) -> Self {
        assert!(entries.is_square(), "metric must be square");
        let sym = (&entries + entries.transpose()).scale(0.5);
        let (min_eigenvalue, max_eigenvalue) = if sym.nrows() == 0 {
            (0.0, 0.0)
        } else {
            let ev = SymmetricEigen::new(sym.clone()).eigenvalues;
            (ev.min(), ev.max())
        };
        Self {
            entries: sym,
            kind,
            min_eigenvalue,
            max_eigenvalue,
            warning: None,
        }
    }

    pub(crate) fn with_warning(mut self, warning: String) -> Self {
        self.warning = Some(warning);
        self
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> RMatrix {
        self.entries
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// `λ_max / λ_min`, infinite when the tensor is singular.
    pub fn condition_number(&self) -> f64 {
        if self.min_eigenvalue <= 0.0 {
            f64::INFINITY
        } else {
            self.max_eigenvalue / self.min_eigenvalue
        }
    }

    /// Set when the construction left its regime of validity.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// True when the minimum eigenvalue is at least `-PSD_TOL`.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }
}

/// Largest entrywise absolute difference between two real matrices.
pub fn max_abs_diff(a: &RMatrix, b: &RMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Fills a symmetric matrix from a row function that returns entries `l >= k`.
pub(crate) fn symmetric_from_rows<F>(n: usize, row: F) -> RMatrix
where
    F: Fn(usize) -> Vec<f64> + Sync + Send,
{
    let rows = crate::par::map_range(n, row);
    let mut m = RMatrix::zeros(n, n);
    for (k, r) in rows.iter().enumerate() {
        for (off, v) in r.iter().enumerate() {
            m[(k, k + off)] = *v;
            m[(k + off, k)] = *v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_range_and_condition() {
        let t = MetricTensor::new(RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 0.5])), MetricKind::MixedM);
        assert_eq!(t.max_eigenvalue(), 4.0);
        assert_eq!(t.min_eigenvalue(), 0.5);
        assert_eq!(t.condition_number(), 8.0);
        let z = MetricTensor::new(RMatrix::zeros(2, 2), MetricKind::QfiExact);
        assert!(z.condition_number().is_infinite());
        assert!(z.is_psd());
    }

    #[test]
    fn input_is_symmetrised() {
        let m = RMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.4, 1.0]);
        let t = MetricTensor::new(m, MetricKind::QfiApprox);
        assert!((t.entries()[(0, 1)] - 0.3).abs() < 1e-15);
        assert_eq!(t.entries()[(0, 1)], t.entries()[(1, 0)]);
    }

    #[test]
    fn rows_fill_both_triangles() {
        let m = symmetric_from_rows(3, |k| (k..3).map(|l| (10 * k + l) as f64).collect());
        assert_eq!(m[(2, 0)], 2.0);
        assert_eq!(m[(1, 2)], 12.0);
        assert_eq!(m[(2, 2)], 22.0);
    }
}
