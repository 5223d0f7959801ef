//! Dense complex helpers shared by the state types.
//!
//! Every matrix function goes through a Hermitian eigendecomposition; nothing
//! here uses truncated series.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest entry modulus of `a - a†`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry modulus of `u†u - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let n = prod.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `(a + a†) / 2`
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigenvalues of a Hermitian matrix in ascending order with the matching
/// eigenvector columns.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn eigvalsh(a: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `V diag(f(λ)) V†` for the spectral decomposition of a Hermitian matrix.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (col, &v) in values.iter().enumerate() {
        let w = f(v);
        for r in 0..n {
            scaled[(r, col)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

pub fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let (values, vectors) = eigh(a);
    spectral_map(&values, &vectors, f)
}

pub fn diag(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { c(entries[i], 0.0) } else { ZERO })
}

pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Two-qubit SWAP in the computational basis.
pub fn swap_gate() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 3)] = ONE;
    m
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    diag(&[1.0, -1.0])
}

/// Applies a two-qubit `gate` to qubits `qa` and `qb` of an `n`-qubit
/// density matrix, in place: `rho ← G rho G†`. Qubit 0 is the most
/// significant tensor factor.
pub fn apply_two_qubit(rho: &mut CMatrix, n_qubits: usize, qa: usize, qb: usize, gate: &CMatrix) {
    assert!(qa != qb && qa < n_qubits && qb < n_qubits);
    let dim = 1usize << n_qubits;
    assert_eq!(rho.nrows(), dim);
    let ba = 1usize << (n_qubits - 1 - qa);
    let bb = 1usize << (n_qubits - 1 - qb);
    let bases: Vec<usize> = (0..dim).filter(|i| i & ba == 0 && i & bb == 0).collect();
    let slot = |base: usize, k: usize| -> usize {
        base | if k & 2 != 0 { ba } else { 0 } | if k & 1 != 0 { bb } else { 0 }
    };
    let gate_conj = gate.map(|z| z.conj());
    let mut buf = [ZERO; 4];
    // rows: rho ← G rho
    for col in 0..dim {
        for &base in &bases {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = rho[(slot(base, k), col)];
            }
            for k in 0..4 {
                let mut acc = ZERO;
                for (l, b) in buf.iter().enumerate() {
                    acc += gate[(k, l)] * b;
                }
                rho[(slot(base, k), col)] = acc;
            }
        }
    }
    // columns: rho ← rho G†
    for row in 0..dim {
        for &base in &bases {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = rho[(row, slot(base, k))];
            }
            for k in 0..4 {
                let mut acc = ZERO;
                for (l, b) in buf.iter().enumerate() {
                    acc += b * gate_conj[(k, l)];
                }
                rho[(row, slot(base, k))] = acc;
            }
        }
    }
}

/// `-Σ λ ln λ` with `0 ln 0 = 0`; assumes negatives were already screened.
pub fn shannon_nats(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}
