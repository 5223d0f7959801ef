//! Search over the unitary group for evolutions that lower `ΔS_S + ΔS_R`.
//!
//! Candidates are `U(θ) = exp(-i Σ θ_k G_k) · A` where `G_k` runs over the
//! generalized Gell-Mann matrices plus the identity (orthonormal under the
//! trace inner product, so they span the whole Lie algebra) and `A` is a
//! fixed anchor chosen per restart. The coefficients are refined by
//! Nelder–Mead.
//!
//! Restart schedule, in index order:
//! - `0`: spectral alignment. The eigenvectors of the joint state, by
//!   descending eigenvalue, are sent to product basis states; the basis
//!   ordering with the lowest objective is kept (all orderings when the joint
//!   dimension is at most 6, otherwise the lexicographic one plus 64 seeded
//!   shuffles).
//! - `1`: the identity.
//! - `r >= 2`: a Haar-random unitary drawn from `seed` split by `r`.
//!
//! The lowest achieved sum wins; ties keep the lower restart index.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, eigvalsh, shannon_nats, spectral_map, CMatrix};
use crate::quantum::{
    mutual_information, partial_trace_matrix, BipartitionLayout, DensityOperator, Subsystem, UnitaryOperator,
};
use crate::random::{haar_random_unitary, RandomSource};

use super::balance::{entropy_balance, EntropyBalanceReport};
use super::nelder_mead::{minimize, NelderMeadOptions};

/// Inputs with mutual information at or below this are rejected.
pub const MIN_SEARCH_MUTUAL_INFORMATION: f64 = 1e-6;
const EXHAUSTIVE_PERMUTATION_DIM: usize = 6;
const SAMPLED_PERMUTATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarySearchConfig {
    /// Simplex iterations per restart.
    pub max_iterations: usize,
    /// Convergence tolerance on the objective spread.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    pub initial_step: f64,
}

impl Default for UnitarySearchConfig {
    fn default() -> Self {
        Self { max_iterations: 3000, tolerance: 1e-12, restarts: 4, seed: 0, initial_step: 0.25 }
    }
}

impl UnitarySearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidParameter { name: "max_iterations", value: self.max_iterations as f64 });
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter { name: "tolerance", value: self.tolerance });
        }
        if self.restarts < 1 {
            return Err(Error::InvalidParameter { name: "restarts", value: self.restarts as f64 });
        }
        Ok(())
    }

    /// Real coefficients per candidate: the squared joint dimension.
    pub fn parameter_count(layout: BipartitionLayout) -> usize {
        layout.joint_dim() * layout.joint_dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub unitary: UnitaryOperator,
    /// `entropy_balance(rho, layout, unitary).sum`
    pub achieved_sum: f64,
    pub report: EntropyBalanceReport,
    pub restart_index: usize,
    pub evaluations: usize,
    /// False when no restart got below zero. Finite search cannot rule out
    /// a decreasing unitary, so this is a warning rather than an error.
    pub decreased: bool,
}

/// Orthonormal Hermitian basis of `d × d` matrices: off-diagonal symmetric
/// and antisymmetric Gell-Mann matrices, the diagonal ones, then `I/√d`.
pub fn generator_basis(d: usize) -> Vec<CMatrix> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(s, 0.0);
            sym[(k, j)] = c(s, 0.0);
            basis.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, -s);
            anti[(k, j)] = c(0.0, s);
            basis.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for j in 0..l {
            g[(j, j)] = c(norm, 0.0);
        }
        g[(l, l)] = c(-(l as f64) * norm, 0.0);
        basis.push(g);
    }
    basis.push(CMatrix::identity(d, d).unscale((d as f64).sqrt()));
    basis
}

/// `exp(-i Σ θ_k G_k)`.
pub fn unitary_from_coefficients(basis: &[CMatrix], theta: &[f64]) -> CMatrix {
    let d = basis[0].nrows();
    let mut k = CMatrix::zeros(d, d);
    for (g, &t) in basis.iter().zip(theta) {
        k += g.scale(t);
    }
    let (values, vectors) = eigh(&k);
    spectral_map(&values, &vectors, |e| c((-e).cos(), (-e).sin()))
}

fn local_entropy_sum(m: &CMatrix, layout: BipartitionLayout) -> f64 {
    let entropy = |sub| {
        let reduced = partial_trace_matrix(m, layout, sub).expect("layout checked by caller");
        shannon_nats(eigvalsh(&reduced).into_iter().map(|v| v.max(0.0)))
    };
    entropy(Subsystem::System) + entropy(Subsystem::Rest)
}

fn permutation_anchor(descending_vectors: &CMatrix, perm: &[usize]) -> CMatrix {
    let d = perm.len();
    // row perm[k] of the anchor is the k-th eigenvector, conjugated
    CMatrix::from_fn(d, d, |row, col| {
        let k = perm.iter().position(|&p| p == row).expect("permutation");
        descending_vectors[(col, k)].conj()
    })
}

fn heap_permutations(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = alloc::vec![0usize; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

fn spectral_alignment_anchor(
    rho: &DensityOperator,
    layout: BipartitionLayout,
    rng: &mut RandomSource,
) -> CMatrix {
    let d = rho.dim();
    let (values, vectors) = eigh(rho.matrix());
    let descending = CMatrix::from_fn(d, d, |r, col| vectors[(r, d - 1 - col)]);
    let score = |perm: &[usize]| {
        // the aligned state is diagonal in the product basis
        let mut pops = alloc::vec![0.0; d];
        for (k, &p) in perm.iter().enumerate() {
            pops[p] = values[d - 1 - k].max(0.0);
        }
        let (ds, dr) = (layout.dim_s(), layout.dim_r());
        let s = shannon_nats((0..ds).map(|i| (0..dr).map(|j| pops[i * dr + j]).sum::<f64>()));
        let r = shannon_nats((0..dr).map(|j| (0..ds).map(|i| pops[i * dr + j]).sum::<f64>()));
        s + r
    };
    let mut best: Vec<usize> = (0..d).collect();
    let mut best_score = score(&best);
    let mut consider = |perm: &[usize]| {
        let s = score(perm);
        if s < best_score {
            best_score = s;
            best = perm.to_vec();
        }
    };
    if d <= EXHAUSTIVE_PERMUTATION_DIM {
        heap_permutations(d, &mut consider);
    } else {
        for _ in 0..SAMPLED_PERMUTATIONS {
            let mut perm: Vec<usize> = (0..d).collect();
            for i in (1..d).rev() {
                perm.swap(i, rng.below(i + 1));
            }
            consider(&perm);
        }
    }
    permutation_anchor(&descending, &best)
}

fn anchor_for_restart(
    index: usize,
    rho: &DensityOperator,
    layout: BipartitionLayout,
    seed: &RandomSource,
) -> Result<CMatrix> {
    let d = rho.dim();
    Ok(match index {
        0 => spectral_alignment_anchor(rho, layout, &mut seed.split(0)),
        1 => CMatrix::identity(d, d),
        r => haar_random_unitary(d, &mut seed.split(r as u64))?.matrix().clone(),
    })
}

pub fn search_entropy_decreasing_unitary(
    rho: &DensityOperator,
    layout: BipartitionLayout,
    config: &UnitarySearchConfig,
) -> Result<SearchOutcome> {
    config.validate()?;
    let mutual_information = mutual_information(rho, layout)?;
    if mutual_information <= MIN_SEARCH_MUTUAL_INFORMATION {
        return Err(Error::ProductInput { mutual_information });
    }
    let d = rho.dim();
    let basis = generator_basis(d);
    let root = RandomSource::new(config.seed);
    let options = NelderMeadOptions {
        initial_step: config.initial_step,
        max_iterations: config.max_iterations,
        tolerance: config.tolerance,
        ..NelderMeadOptions::default()
    };

    let mut best: Option<(f64, usize, CMatrix)> = None;
    let mut evaluations = 0;
    for restart in 0..config.restarts {
        let anchor = anchor_for_restart(restart, rho, layout, &root)?;
        let objective = |theta: &[f64]| {
            let u = unitary_from_coefficients(&basis, theta) * &anchor;
            local_entropy_sum(&(&u * rho.matrix() * u.adjoint()), layout)
        };
        let found = minimize(objective, &alloc::vec![0.0; basis.len()], &options);
        evaluations += found.evaluations;
        let u = unitary_from_coefficients(&basis, &found.point) * &anchor;
        if best.as_ref().is_none_or(|(value, _, _)| found.value < *value) {
            best = Some((found.value, restart, u));
        }
    }
    let (_, restart_index, matrix) = best.expect("at least one restart");
    let unitary = UnitaryOperator::new(matrix)?;
    let report = entropy_balance(rho, layout, &unitary)?;
    Ok(SearchOutcome {
        achieved_sum: report.sum,
        decreased: report.sum < 0.0,
        unitary,
        report,
        restart_index,
        evaluations,
    })
}
