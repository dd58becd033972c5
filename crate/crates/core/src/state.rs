//! Density operators, pure states and their spectral decomposition.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::pauli::PauliSumOperator;
use crate::{CMatrix, Error, Result};

/// Hermiticity tolerance for density matrices (max-abs entrywise).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Default absolute threshold below which eigenvalues are excluded from the rank.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// Max-abs entrywise distance between two matrices of equal shape.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let sym = hermitian_part(m);
    let eig = SymmetricEigen::try_new(sym, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenDecomposition(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// A Hermitian, unit-trace, positive semi-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates all three density-matrix invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(Self { matrix })
    }

    /// Wraps a matrix produced by a trace-preserving channel. The invariants
    /// are re-checked in debug builds only.
    pub(crate) fn from_channel_output(matrix: CMatrix) -> Self {
        let matrix = hermitian_part(&matrix);
        debug_assert!(
            validate_density(&matrix).is_ok(),
            "channel produced an invalid density matrix: {:?}",
            validate_density(&matrix)
        );
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self {
            matrix: v * v.adjoint(),
        }
    }

    /// `|0…0⟩⟨0…0|` on `n_qubits`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut m = CMatrix::zeros(d, d);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// `I / d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        }
    }

    /// Convex mixture `Σ w_i ρ_i` with non-negative weights summing to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, r)| r.dim())
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, r) in parts {
            check_dim(dim, r.dim())?;
            m += r.matrix.scale(*w);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn validate_density(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::InvalidDensityMatrix(format!(
            "shape {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidDensityMatrix("non-finite entry".into()));
    }
    let herm = hermiticity_error(m);
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "not Hermitian (deviation {herm:e})"
        )));
    }
    let tr = trace(m);
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
    }
    let (vals, _) = hermitian_eigen(m)?;
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPureState(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Normalises `amplitudes`; fails only for the zero vector.
    pub fn normalized(amplitudes: DVector<Complex64>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidPureState(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub(crate) fn from_unitary_output(amplitudes: DVector<Complex64>) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-10);
        Self { amplitudes }
    }

    pub fn zero_state(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        let mut v = DVector::zeros(d);
        v[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }
}

/// Eigen-decomposition `ρ = Σ p_n |ψ_n⟩⟨ψ_n|` with eigenvalues in descending
/// order. All `dim` eigenvectors are kept; the first `rank` span the support.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order as `eigenvalues`.
    pub eigenvectors: CMatrix,
    pub rank: usize,
    pub threshold: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalue with excluded (sub-threshold) entries reported as zero.
    pub fn retained_eigenvalue(&self, n: usize) -> f64 {
        if n < self.rank {
            self.eigenvalues[n]
        } else {
            0.0
        }
    }

    /// `Σ_{n<rank} p_n |ψ_n⟩⟨ψ_n|`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for n in 0..self.rank {
            let v = self.eigenvectors.column(n);
            m += (v * v.adjoint()).scale(self.eigenvalues[n]);
        }
        m
    }

    /// `V† A V`: an operator expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.eigenvectors.adjoint() * a * &self.eigenvectors
    }

    /// `V A V†`: inverse of [`Self::to_eigenbasis`].
    pub fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        &self.eigenvectors * a * self.eigenvectors.adjoint()
    }
}

/// Spectral decomposition of a density matrix. Eigenvalues at or below
/// `rank_threshold` are excluded from the rank.
pub fn eigendecompose(rho: &DensityMatrix, rank_threshold: f64) -> Result<SpectralDecomposition> {
    decompose_hermitian(rho.matrix(), rank_threshold)
}

pub(crate) fn decompose_hermitian(m: &CMatrix, rank_threshold: f64) -> Result<SpectralDecomposition> {
    let (eigenvalues, eigenvectors) = hermitian_eigen(m)?;
    let rank = eigenvalues.iter().take_while(|&&p| p > rank_threshold).count();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        rank,
        threshold: rank_threshold,
    })
}

/// `Re tr[ρ H]`.
pub fn expectation(rho: &DensityMatrix, h: &PauliSumOperator) -> Result<f64> {
    check_dim(h.dim(), rho.dim())?;
    Ok(expectation_matrix(rho.matrix(), h.dense()))
}

/// `Re tr[A B]` without dimension checks; callers guarantee equal shapes.
pub(crate) fn expectation_matrix(a: &CMatrix, b: &CMatrix) -> f64 {
    trace_product(a, b).re
}

/// `tr[A B]`.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    check_dim(rho.dim(), psi.dim())?;
    let v = psi.amplitudes();
    Ok((v.adjoint() * rho.matrix() * v)[(0, 0)].re)
}

/// Hilbert–Schmidt inner product `Re tr[A B]` of Hermitian matrices.
pub fn hilbert_schmidt(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    check_dim(a.nrows(), a.ncols())?;
    Ok(expectation_matrix(a, b))
}

/// `tr[ρ²]`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    m.iter().map(|z| z.norm_sqr()).sum()
}
