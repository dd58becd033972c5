use crate::channels::{evaluate, run_circuit, CircuitSpec, DerivativeMethod, NoiseMode};
use crate::pauli::PauliSumOperator;
use crate::state::{expectation, expectation_matrix, trace_product, DensityMatrix};
use crate::{CMatrix, Error, Result};

fn check_observable(circuit: &CircuitSpec, h: &PauliSumOperator) -> Result<()> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: circuit.dim(),
            found: h.dim(),
        });
    }
    Ok(())
}

/// `E(θ) = tr[ρ(θ) H]`.
pub fn energy(circuit: &CircuitSpec, theta: &[f64], h: &PauliSumOperator, noise: NoiseMode) -> Result<f64> {
    check_observable(circuit, h)?;
    expectation(&run_circuit(circuit, theta, noise)?, h)
}

/// `g_k = tr[(∂_k ρ) H]` from precomputed derivatives.
pub fn gradient_from(drho: &[CMatrix], h: &PauliSumOperator) -> Vec<f64> {
    drho.iter().map(|d| expectation_matrix(d, h.dense())).collect()
}

/// `Y_k = −Re tr[(∂_k ρ) H ρ]` from precomputed derivatives.
pub fn y_vector_from(rho: &DensityMatrix, drho: &[CMatrix], h: &PauliSumOperator) -> Vec<f64> {
    let h_rho = h.dense() * rho.matrix();
    drho.iter().map(|d| -trace_product(d, &h_rho).re).collect()
}

pub fn gradient(
    circuit: &CircuitSpec,
    theta: &[f64],
    h: &PauliSumOperator,
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<Vec<f64>> {
    check_observable(circuit, h)?;
    Ok(gradient_from(&evaluate(circuit, theta, noise, method)?.derivatives, h))
}

pub fn y_vector(
    circuit: &CircuitSpec,
    theta: &[f64],
    h: &PauliSumOperator,
    noise: NoiseMode,
    method: DerivativeMethod,
) -> Result<Vec<f64>> {
    check_observable(circuit, h)?;
    let eval = evaluate(circuit, theta, noise, method)?;
    Ok(y_vector_from(&eval.rho, &eval.derivatives, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ParametricGate;
    use crate::pauli::{build_pauli_sum, Pauli};
    use crate::testutil::random_circuit;
    use proptest::prelude::*;

    /// Central difference of `f` along every coordinate.
    fn fd<F: Fn(&[f64]) -> f64>(theta: &[f64], h: f64, f: F) -> Vec<f64> {
        (0..theta.len())
            .map(|k| {
                let mut t = theta.to_vec();
                t[k] += h;
                let plus = f(&t);
                t[k] -= 2.0 * h;
                (plus - f(&t)) / (2.0 * h)
            })
            .collect()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_observable_has_zero_gradient_and_y() {
        let (c, theta) = random_circuit(1, 2, 6, 0.01, 0.1);
        let id = build_pauli_sum(2, &[(1.0, "II")]).unwrap();
        let g = gradient(&c, &theta, &id, NoiseMode::On, DerivativeMethod::default()).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8));
        let y = y_vector(&c, &theta, &id, NoiseMode::Off, DerivativeMethod::Analytic).unwrap();
        assert!(y.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn rz_on_zero_has_zero_gradient() {
        let c = CircuitSpec::new(1, vec![ParametricGate::rotation(Pauli::Z, 0, 0).unwrap()]).unwrap();
        let z = build_pauli_sum(1, &[(1.0, "Z")]).unwrap();
        let g = gradient(&c, &[0.8], &z, NoiseMode::Off, DerivativeMethod::Analytic).unwrap();
        assert_eq!(g, vec![0.0]);
        let y = y_vector(&c, &[0.8], &z, NoiseMode::Off, DerivativeMethod::Analytic).unwrap();
        assert_eq!(y, vec![0.0]);
    }

    #[test]
    fn pure_state_y_is_minus_half_gradient() {
        let (c, theta) = random_circuit(3, 3, 8, 0.0, 0.0);
        let h = build_pauli_sum(3, &[(1.0, "ZZI"), (0.5, "XIX"), (-0.3, "IYI")]).unwrap();
        let g = gradient(&c, &theta, &h, NoiseMode::Off, DerivativeMethod::Analytic).unwrap();
        let y = y_vector(&c, &theta, &h, NoiseMode::Off, DerivativeMethod::Analytic).unwrap();
        let half: Vec<f64> = g.iter().map(|x| -0.5 * x).collect();
        assert!(max_diff(&y, &half) < 1e-12);
    }

    #[test]
    fn mismatched_observable_rejected() {
        let (c, theta) = random_circuit(3, 2, 3, 0.0, 0.0);
        let h = build_pauli_sum(3, &[(1.0, "ZZZ")]).unwrap();
        assert!(gradient(&c, &theta, &h, NoiseMode::Off, DerivativeMethod::Analytic).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn gradient_and_y_match_finite_differences(seed in any::<u64>(), p in 0.0f64..0.02) {
            let (c, theta) = random_circuit(seed, 3, 8, p, 0.1);
            let h = build_pauli_sum(3, &[(1.0, "ZZI"), (0.7, "IXX"), (-0.4, "YIY"), (0.2, "IIZ")]).unwrap();
            let g = gradient(&c, &theta, &h, NoiseMode::On, DerivativeMethod::default()).unwrap();
            let g_fd = fd(&theta, 1e-4, |t| energy(&c, t, &h, NoiseMode::On).unwrap());
            prop_assert!(max_diff(&g, &g_fd) < 1e-6);
            // Y_k = −½ ∂_k tr[ρ H ρ]
            let y = y_vector(&c, &theta, &h, NoiseMode::On, DerivativeMethod::default()).unwrap();
            let y_fd = fd(&theta, 1e-4, |t| {
                let rho = run_circuit(&c, t, NoiseMode::On).unwrap();
                -0.5 * trace_product(rho.matrix(), &(h.dense() * rho.matrix())).re
            });
            prop_assert!(max_diff(&y, &y_fd) < 1e-6);
        }
    }
}
