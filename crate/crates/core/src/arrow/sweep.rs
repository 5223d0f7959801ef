use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli_x, pauli_y, CMatrix};
use crate::quantum::{unitary_from_hamiltonian, BipartitionLayout, Hamiltonian};

use super::balance::entropy_balance;
use super::constructions::near_product_state;

/// Grid of coupling strengths `g`, correlation strengths `ε` and times `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    coupling_strengths: Vec<f64>,
    correlation_strengths: Vec<f64>,
    evolution_times: Vec<f64>,
}

impl SweepGrid {
    pub fn new(coupling_strengths: Vec<f64>, correlation_strengths: Vec<f64>, evolution_times: Vec<f64>) -> Result<Self> {
        for &v in coupling_strengths.iter().chain(&evolution_times) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { name: "grid", value: v });
            }
        }
        for &eps in &correlation_strengths {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::InvalidParameter { name: "epsilon", value: eps });
            }
        }
        Ok(Self { coupling_strengths, correlation_strengths, evolution_times })
    }

    pub fn coupling_strengths(&self) -> &[f64] {
        &self.coupling_strengths
    }

    pub fn correlation_strengths(&self) -> &[f64] {
        &self.correlation_strengths
    }

    pub fn evolution_times(&self) -> &[f64] {
        &self.evolution_times
    }

    pub fn planned_cells(&self) -> usize {
        self.coupling_strengths.len() * self.correlation_strengths.len() * self.evolution_times.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub coupling: f64,
    pub epsilon: f64,
    pub time: f64,
    /// `ΔS_S + ΔS_R`
    pub sum: f64,
}

/// `XX + YY`: hops an excitation between the two qubits.
pub fn exchange_interaction() -> Hamiltonian {
    let m: CMatrix = kron(&pauli_x(), &pauli_x()) + kron(&pauli_y(), &pauli_y());
    Hamiltonian::new(m).expect("Hermitian by construction")
}

/// Evolves the near-product state at each grid point under
/// `exp(-i(H_S ⊗ I + I ⊗ H_R + g H_int) t)`. Cells are ordered by coupling,
/// then `ε`, then time.
pub fn weak_coupling_sweep(
    h_local_s: &Hamiltonian,
    h_local_r: &Hamiltonian,
    h_int: &Hamiltonian,
    grid: &SweepGrid,
) -> Result<Vec<SweepCell>> {
    for (h, expected) in [(h_local_s, 2), (h_local_r, 2), (h_int, 4)] {
        if h.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: h.dim() });
        }
    }
    let layout = BipartitionLayout::qubits();
    let local = h_local_s.on_left(2)?.matrix() + h_local_r.on_right(2)?.matrix();
    let states: Vec<_> = grid.correlation_strengths.iter().map(|&e| near_product_state(e)).collect::<Result<_>>()?;
    let mut cells = Vec::with_capacity(grid.planned_cells());
    for &g in &grid.coupling_strengths {
        let h = Hamiltonian::new(&local + h_int.matrix().scale(g))?;
        for (&epsilon, rho) in grid.correlation_strengths.iter().zip(&states) {
            for &time in &grid.evolution_times {
                let u = unitary_from_hamiltonian(&h, time);
                let sum = entropy_balance(rho, layout, &u)?.sum;
                cells.push(SweepCell { coupling: g, epsilon, time, sum });
            }
        }
    }
    Ok(cells)
}
