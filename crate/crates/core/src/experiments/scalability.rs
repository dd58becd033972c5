//! Closed-form limits on circuit size when the approximate QFI is estimated
//! with a fixed measurement budget under gate error `p`.
//!
//! With fidelity `F = (1−p)^{N_g}` and a shot overhead `N_s = F^{-4}`, the
//! largest gate count is `N_g = ln N_s / [−4 ln(1−p)]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A limit that is either a number or infinite (error-free gates).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> Bound {
        match self {
            Bound::Finite(v) => Bound::Finite(f(v)),
            Bound::Unbounded => Bound::Unbounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalabilitySpec {
    pub p_error: f64,
    /// Shot overhead `N_s` held fixed.
    #[serde(default = "default_overhead")]
    pub measurement_overhead: f64,
    /// `a` in the linear gate count `N_g = a N`.
    #[serde(default = "default_gates_per_qubit")]
    pub gates_per_qubit: f64,
    /// `a` in the log-depth gate count `N_g = a N ln N`.
    #[serde(default = "default_log_depth")]
    pub log_depth_coefficient: f64,
}

fn default_overhead() -> f64 {
    16.0
}

fn default_gates_per_qubit() -> f64 {
    3.0
}

fn default_log_depth() -> f64 {
    10.0
}

impl ScalabilitySpec {
    pub fn new(p_error: f64) -> Self {
        Self {
            p_error,
            measurement_overhead: default_overhead(),
            gates_per_qubit: default_gates_per_qubit(),
            log_depth_coefficient: default_log_depth(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p_error) {
            return Err(Error::InvalidArgument(format!("p_error {} outside [0, 1)", self.p_error)));
        }
        if !(self.measurement_overhead >= 1.0 && self.measurement_overhead.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "measurement overhead {} below 1",
                self.measurement_overhead
            )));
        }
        for (name, a) in [("gates_per_qubit", self.gates_per_qubit), ("log_depth_coefficient", self.log_depth_coefficient)] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} {a} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityReport {
    pub spec: ScalabilitySpec,
    /// `N_g^max = ln N_s / [−4 ln(1−p)]`.
    pub max_gate_count: Bound,
    /// `⌊N_g^max / a⌋` for a linear gate count.
    pub max_qubits: Bound,
    /// `−ln 2 / [2 ln(1−p)]`: the depth below which the relative error of the
    /// approximation vanishes as `N → ∞`.
    pub depth_bound: Bound,
    /// Largest integer depth strictly below [`Self::depth_bound`].
    pub max_depth: Bound,
    /// `exp{−ln 2 / [2a ln(1−p)] − 1}` for a log-depth circuit.
    pub log_depth_max_qubits: Bound,
    /// `log₁₀` of the log-depth optimum; finite even when the value overflows.
    pub log10_log_depth_max_qubits: Bound,
}

/// Evaluates the closed-form limits. `p = 0` makes every limit unbounded.
pub fn scalability(spec: &ScalabilitySpec) -> Result<ScalabilityReport> {
    spec.validate()?;
    // −ln(1−p) > 0 for p in (0, 1).
    let rate = if spec.p_error == 0.0 {
        Bound::Unbounded
    } else {
        Bound::Finite(1.0 / -(-spec.p_error).ln_1p())
    };
    let ln2 = std::f64::consts::LN_2;
    let max_gate_count = rate.map(|r| spec.measurement_overhead.ln() * r / 4.0);
    let depth_bound = rate.map(|r| ln2 * r / 2.0);
    let exponent = rate.map(|r| ln2 * r / (2.0 * spec.log_depth_coefficient) - 1.0);
    Ok(ScalabilityReport {
        spec: spec.clone(),
        max_gate_count,
        max_qubits: max_gate_count.map(|g| (g / spec.gates_per_qubit).floor()),
        depth_bound,
        max_depth: depth_bound.map(|a| a.ceil() - 1.0),
        log_depth_max_qubits: exponent.map(f64::exp),
        log10_log_depth_max_qubits: exponent.map(|x| x / std::f64::consts::LN_10),
    })
}

/// Rounds to `digits` significant figures.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(p: f64) -> ScalabilityReport {
        scalability(&ScalabilitySpec::new(p)).unwrap()
    }

    #[test]
    fn linear_examples() {
        assert_eq!(report(1e-3).max_qubits, Bound::Finite(230.0));
        assert_eq!(report(1e-4).max_qubits, Bound::Finite(2310.0));
        assert_eq!(report(1e-3).max_depth, Bound::Finite(346.0));
        assert_eq!(report(1e-4).max_depth, Bound::Finite(3465.0));
    }

    #[test]
    fn log_depth_examples() {
        let r = report(1e-3);
        assert_eq!(round_significant(r.log_depth_max_qubits.value().unwrap(), 2), 4.1e14);
        let spec = ScalabilitySpec {
            log_depth_coefficient: 50.0,
            ..ScalabilitySpec::new(1e-4)
        };
        let r = scalability(&spec).unwrap();
        assert_eq!(round_significant(r.log_depth_max_qubits.value().unwrap(), 2), 4.6e29);
        assert!((r.log10_log_depth_max_qubits.value().unwrap() - 29.667).abs() < 1e-3);
    }

    #[test]
    fn error_free_gates_are_unbounded() {
        let r = report(0.0);
        assert_eq!(r.max_qubits, Bound::Unbounded);
        assert_eq!(r.log_depth_max_qubits, Bound::Unbounded);
    }

    #[test]
    fn single_shot_allows_no_gates() {
        let spec = ScalabilitySpec {
            measurement_overhead: 1.0,
            ..ScalabilitySpec::new(1e-3)
        };
        assert_eq!(scalability(&spec).unwrap().max_qubits, Bound::Finite(0.0));
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(scalability(&ScalabilitySpec::new(1.0)).is_err());
        assert!(scalability(&ScalabilitySpec::new(-0.1)).is_err());
        let spec = ScalabilitySpec {
            measurement_overhead: 0.5,
            ..ScalabilitySpec::new(1e-3)
        };
        assert!(scalability(&spec).is_err());
    }

    #[test]
    fn significant_rounding() {
        assert_eq!(round_significant(3465.56, 3), 3470.0);
        assert_eq!(round_significant(0.012345, 2), 0.012);
        assert_eq!(round_significant(0.0, 3), 0.0);
    }
}
