use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector, ONE, ZERO};
use crate::quantum::{BipartitionLayout, DensityOperator, UnitaryOperator};

use super::balance::{entropy_balance, EntropyBalanceReport};

/// `H₂(p)` in nats.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
    }
}

fn psi_plus() -> CVector {
    CVector::from_vec(alloc::vec![ZERO, c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), ZERO])
}

/// `(1-ε)|00⟩⟨00| + ε|Ψ⁺⟩⟨Ψ⁺|` with `|Ψ⁺⟩ = (|01⟩ + |10⟩)/√2`.
pub fn near_product_state(epsilon: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter { name: "epsilon", value: epsilon });
    }
    let plus = psi_plus();
    let m = DensityOperator::basis(4, 0).into_matrix().scale(1.0 - epsilon) + (&plus * plus.adjoint()).scale(epsilon);
    DensityOperator::new(m)
}

/// Fixes `|00⟩` and `|11⟩`, sends `|Ψ⁺⟩ → |01⟩` and `|Ψ⁻⟩ → |10⟩`.
pub fn decorrelating_unitary() -> UnitaryOperator {
    let s = c(FRAC_1_SQRT_2, 0.0);
    #[rustfmt::skip]
    let m = CMatrix::from_row_slice(4, 4, &[
        ONE,  ZERO, ZERO, ZERO,
        ZERO, s,    s,    ZERO,
        ZERO, s,    -s,   ZERO,
        ZERO, ZERO, ZERO, ONE,
    ]);
    UnitaryOperator::new(m).expect("real orthogonal matrix")
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`
pub fn classically_correlated_state() -> DensityOperator {
    DensityOperator::diagonal(&[0.5, 0.0, 0.0, 0.5]).expect("valid populations")
}

/// Permutation `|00⟩→|00⟩, |11⟩→|10⟩, |10⟩→|11⟩, |01⟩→|01⟩`.
pub fn classical_decorrelating_unitary() -> UnitaryOperator {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    UnitaryOperator::new(m).expect("permutation matrix")
}

/// Decorrelates two perfectly correlated fair bits into
/// `diag(½, ½) ⊗ |0⟩⟨0|`.
pub fn classical_correlated_demo() -> EntropyBalanceReport {
    entropy_balance(&classically_correlated_state(), BipartitionLayout::qubits(), &classical_decorrelating_unitary())
        .expect("2x2 demo dimensions are consistent")
}
