//! In-place application of few-qubit operators to dense matrices and vectors.
//!
//! Qubit 0 is the most significant bit of a basis index, matching the
//! left-to-right order of tensor products.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::CMatrix;

/// Index bookkeeping for an operator acting on `targets` of an `n`-qubit register.
#[derive(Debug, Clone)]
pub(crate) struct LocalLayout {
    /// Basis indices with every target bit cleared.
    bases: Vec<usize>,
    /// Offset of local basis state `a` (targets[0] is the most significant local bit).
    offsets: Vec<usize>,
}

impl LocalLayout {
    pub(crate) fn new(n_qubits: usize, targets: &[usize]) -> Self {
        let dim = 1usize << n_qubits;
        let t = targets.len();
        let mut mask = 0usize;
        for &q in targets {
            mask |= 1 << (n_qubits - 1 - q);
        }
        let offsets = (0..1usize << t)
            .map(|a| {
                targets.iter().enumerate().fold(0usize, |acc, (j, &q)| {
                    if (a >> (t - 1 - j)) & 1 == 1 {
                        acc | (1 << (n_qubits - 1 - q))
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let bases = (0..dim).filter(|i| i & mask == 0).collect();
        Self { bases, offsets }
    }

    pub(crate) fn local_dim(&self) -> usize {
        self.offsets.len()
    }
}

/// `m ← U m` for a local operator `u` (row-major, `local_dim²` entries).
pub(crate) fn apply_left(m: &mut CMatrix, layout: &LocalLayout, u: &[Complex64]) {
    let k = layout.local_dim();
    let mut buf = [Complex64::new(0.0, 0.0); 4];
    let ncols = m.ncols();
    for col in 0..ncols {
        let mut column = m.column_mut(col);
        for &b in &layout.bases {
            for a in 0..k {
                buf[a] = column[b | layout.offsets[a]];
            }
            for r in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..k {
                    acc += u[r * k + a] * buf[a];
                }
                column[b | layout.offsets[r]] = acc;
            }
        }
    }
}

/// `m ← m U` for a local operator `u` (row-major).
pub(crate) fn apply_right(m: &mut CMatrix, layout: &LocalLayout, u: &[Complex64]) {
    let k = layout.local_dim();
    let mut buf = [Complex64::new(0.0, 0.0); 4];
    let nrows = m.nrows();
    for &b in &layout.bases {
        for row in 0..nrows {
            for a in 0..k {
                buf[a] = m[(row, b | layout.offsets[a])];
            }
            for c in 0..k {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..k {
                    acc += buf[a] * u[a * k + c];
                }
                m[(row, b | layout.offsets[c])] = acc;
            }
        }
    }
}

/// `v ← U v`.
pub(crate) fn apply_vector(v: &mut DVector<Complex64>, layout: &LocalLayout, u: &[Complex64]) {
    let k = layout.local_dim();
    let mut buf = [Complex64::new(0.0, 0.0); 4];
    for &b in &layout.bases {
        for a in 0..k {
            buf[a] = v[b | layout.offsets[a]];
        }
        for r in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..k {
                acc += u[r * k + a] * buf[a];
            }
            v[b | layout.offsets[r]] = acc;
        }
    }
}

/// `m ← U m U†`.
pub(crate) fn conjugate(m: &mut CMatrix, layout: &LocalLayout, u: &[Complex64], u_adj: &[Complex64]) {
    apply_left(m, layout, u);
    apply_right(m, layout, u_adj);
}

/// `m ← (1-p) m + p (I/k ⊗ tr_targets m)`. Linear in `m`, so it also acts on
/// derivatives and other traceless operators.
pub(crate) fn depolarize(m: &mut CMatrix, layout: &LocalLayout, p: f64) {
    if p == 0.0 {
        return;
    }
    let k = layout.local_dim();
    let keep = 1.0 - p;
    let spread = p / k as f64;
    let n = m.nrows();
    let mut traced = vec![Complex64::new(0.0, 0.0); layout.bases.len() * layout.bases.len()];
    for (jb, &cb) in layout.bases.iter().enumerate() {
        for (ib, &rb) in layout.bases.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for &o in &layout.offsets {
                s += m[(rb | o, cb | o)];
            }
            traced[jb * layout.bases.len() + ib] = s;
        }
    }
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] *= keep;
        }
    }
    for (jb, &cb) in layout.bases.iter().enumerate() {
        for (ib, &rb) in layout.bases.iter().enumerate() {
            let s = traced[jb * layout.bases.len() + ib] * spread;
            for &o in &layout.offsets {
                m[(rb | o, cb | o)] += s;
            }
        }
    }
}
