//! Pauli strings and weighted Pauli sums with a cached dense realisation.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, Error, Result};

/// Hard cap on the qubit count of a dense Pauli-sum realisation.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidPauliLabel(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Does the operator flip the computational basis bit?
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Phase picked up when acting on basis bit `b`: `P|b⟩ = phase |b'⟩`.
    fn phase(self, bit: bool) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, false) => Complex64::new(1.0, 0.0),
            (Pauli::Z, true) => Complex64::new(-1.0, 0.0),
            (Pauli::Y, false) => Complex64::new(0.0, 1.0),
            (Pauli::Y, true) => Complex64::new(0.0, -1.0),
        }
    }
}

/// Tensor product of single-qubit Paulis; index 0 is the leftmost factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn parse(label: &str) -> Result<Self> {
        label.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>().map(Self)
    }

    /// Identity everywhere except `ops` at the given qubits.
    pub fn local(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = vec![Pauli::I; n_qubits];
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::TargetOutOfRange { target: q, n_qubits });
            }
            s[q] = p;
        }
        Ok(Self(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Dense `2^n x 2^n` matrix of the string.
    pub fn to_matrix(&self) -> CMatrix {
        let d = 1usize << self.len();
        let mut m = CMatrix::zeros(d, d);
        self.accumulate_into(&mut m, 1.0);
        m
    }

    /// `m += coeff * P`, touching only the `d` non-zero entries.
    fn accumulate_into(&self, m: &mut CMatrix, coeff: f64) {
        let n = self.len();
        let d = 1usize << n;
        let mut flip = 0usize;
        for (q, p) in self.0.iter().enumerate() {
            if p.flips() {
                flip |= 1 << (n - 1 - q);
            }
        }
        for col in 0..d {
            let mut phase = Complex64::new(coeff, 0.0);
            for (q, p) in self.0.iter().enumerate() {
                let bit = (col >> (n - 1 - q)) & 1 == 1;
                phase *= p.phase(bit);
            }
            m[(col ^ flip, col)] += phase;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

/// Hermitian observable `Σ_j c_j P_j` with real coefficients.
#[derive(Debug)]
pub struct PauliSumOperator {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
    dense: OnceLock<CMatrix>,
}

impl Clone for PauliSumOperator {
    fn clone(&self) -> Self {
        let dense = OnceLock::new();
        if let Some(m) = self.dense.get() {
            let _ = dense.set(m.clone());
        }
        Self {
            n_qubits: self.n_qubits,
            terms: self.terms.clone(),
            dense,
        }
    }
}

impl PauliSumOperator {
    /// Builds the operator; every string must have length `n_qubits`.
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits(n_qubits, MAX_DENSE_QUBITS));
        }
        for (index, (c, s)) in terms.iter().enumerate() {
            if s.len() != n_qubits {
                return Err(Error::InconsistentPauliLength {
                    index,
                    expected: n_qubits,
                    found: s.len(),
                });
            }
            if !c.is_finite() {
                return Err(Error::NonFinite(format!("coefficient of term {index}")));
            }
        }
        Ok(Self {
            n_qubits,
            terms,
            dense: OnceLock::new(),
        })
    }

    /// Convenience constructor from `(coefficient, "XZI…")` pairs.
    pub fn from_labels(n_qubits: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|(c, l)| Ok((*c, PauliString::parse(l)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_qubits, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// `Σ |c_j|`, an upper bound on the operator norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    /// Dense matrix, built on first use and cached.
    pub fn dense(&self) -> &CMatrix {
        self.dense.get_or_init(|| {
            let d = self.dim();
            let mut m = CMatrix::zeros(d, d);
            for (c, s) in &self.terms {
                s.accumulate_into(&mut m, *c);
            }
            m
        })
    }
}

/// Builds a Pauli sum from `(coefficient, string)` terms, inferring the qubit
/// count from the first string. An empty term list needs `n_qubits`.
pub fn build_pauli_sum(n_qubits: usize, terms: &[(f64, &str)]) -> Result<PauliSumOperator> {
    PauliSumOperator::from_labels(n_qubits, terms)
}
