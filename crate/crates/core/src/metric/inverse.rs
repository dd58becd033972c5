use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::MetricTensor;
use crate::{Error, RMatrix, Result};

/// Default relative eigenvalue cutoff for the truncated pseudo-inverse.
pub const DEFAULT_CUTOFF: f64 = 1e-8;

/// How a possibly singular metric is inverted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InversionScheme {
    /// `(T + λ I)⁻¹`.
    Tikhonov { lambda: f64 },
    /// Inverts eigenvalues `≥ cutoff · λ_max` and drops the rest.
    TruncatedPseudo { cutoff: f64 },
}

impl Default for InversionScheme {
    fn default() -> Self {
        InversionScheme::TruncatedPseudo { cutoff: DEFAULT_CUTOFF }
    }
}

impl InversionScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InversionScheme::Tikhonov { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidArgument(format!("tikhonov lambda {lambda}")))
            }
            InversionScheme::TruncatedPseudo { cutoff } if !(cutoff > 0.0 && cutoff < 1.0) => {
                Err(Error::InvalidArgument(format!("pseudo-inverse cutoff {cutoff}")))
            }
            _ => Ok(()),
        }
    }
}

/// Result of [`regularized_inverse`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedInverse {
    pub matrix: RMatrix,
    /// No eigenvalue survived the cutoff; `matrix` is the identity so the
    /// update falls back to the plain gradient direction.
    pub fallback: bool,
    /// Condition number of the tensor that was inverted.
    pub condition_number: f64,
}

pub fn regularized_inverse(t: &MetricTensor, scheme: InversionScheme) -> Result<RegularizedInverse> {
    scheme.validate()?;
    let n = t.dim();
    let condition_number = t.condition_number();
    let fallback = || RegularizedInverse {
        matrix: RMatrix::identity(n, n),
        fallback: true,
        condition_number,
    };
    if n == 0 {
        return Ok(RegularizedInverse {
            matrix: RMatrix::zeros(0, 0),
            fallback: false,
            condition_number,
        });
    }
    if t.entries().iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("metric tensor".into()));
    }
    let eig = SymmetricEigen::new(t.entries().clone());
    let max = eig.eigenvalues.max();
    let inv_values: Vec<f64> = match scheme {
        InversionScheme::TruncatedPseudo { cutoff } => {
            if max <= 0.0 {
                return Ok(fallback());
            }
            eig.eigenvalues
                .iter()
                .map(|&v| if v >= cutoff * max { 1.0 / v } else { 0.0 })
                .collect()
        }
        InversionScheme::Tikhonov { lambda } => {
            let shifted: Vec<f64> = eig.eigenvalues.iter().map(|v| v + lambda).collect();
            if shifted.iter().any(|&v| v <= 0.0) {
                return Ok(fallback());
            }
            shifted.iter().map(|v| 1.0 / v).collect()
        }
    };
    let q = &eig.eigenvectors;
    let scaled = RMatrix::from_fn(n, n, |i, j| q[(i, j)] * inv_values[j]);
    let m = &scaled * q.transpose();
    Ok(RegularizedInverse {
        matrix: (&m + m.transpose()).scale(0.5),
        fallback: false,
        condition_number,
    })
}
