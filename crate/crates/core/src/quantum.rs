//! State and operator types plus the quantum-information primitives built
//! on them.
//!
//! Basis convention: the computational basis is ordered lexicographically and
//! the system `S` is the left (slow) tensor factor, so joint index
//! `i = s * dim_r + r`. Entropies are in nats.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigh, eigvalsh, hermitian_part, hermiticity_defect, spectral_map, unitarity_defect,
    CMatrix, CVector, ONE, ZERO,
};

/// Entry tolerance for Hermiticity and unit trace.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues in `[-POSITIVITY_FLOOR, 0)` are roundoff and clamp to zero;
/// anything below is an invalid state.
pub const POSITIVITY_FLOOR: f64 = 1e-10;
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Eigenvalue threshold defining the support of a state.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

fn require_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn clamp_spectrum(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -POSITIVITY_FLOOR {
            return Err(Error::NegativeEigenvalue { value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        require_square(&matrix)?;
        let deviation = hermiticity_defect(&matrix);
        if deviation > STATE_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = linalg::trace(&matrix).re;
        if (trace - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::TraceNotUnity { trace });
        }
        let matrix = hermitian_part(&matrix);
        if let Some(&lowest) = eigvalsh(&matrix).first() {
            if lowest < -POSITIVITY_FLOOR {
                return Err(Error::NegativeEigenvalue { value: lowest });
            }
        }
        Ok(Self { matrix })
    }

    /// For results of operations that preserve validity by construction.
    pub(crate) fn from_valid(matrix: CMatrix) -> Self {
        Self { matrix: hermitian_part(&matrix) }
    }

    /// Projector onto `v / |v|`.
    pub fn pure(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter { name: "state vector norm", value: norm });
        }
        Ok(Self::from_valid(linalg::outer(&v.unscale(norm))))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = ONE;
        Self::from_valid(linalg::outer(&v))
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(linalg::diag(populations))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_valid(CMatrix::identity(dim, dim).unscale(dim as f64))
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

    /// Ascending eigenvalues, clamped to zero inside the positivity floor.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut values = eigvalsh(&self.matrix);
        clamp_spectrum(&mut values)?;
        Ok(values)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Population `⟨k|ρ|k⟩` in the computational basis.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    pub fn expectation(&self, observable: &CMatrix) -> Result<f64> {
        check_dims(self.dim(), observable.nrows())?;
        Ok(linalg::trace(&(&self.matrix * observable)).re)
    }
}

/// Matrix with `U†U = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        require_square(&matrix)?;
        let deviation = unitarity_defect(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { matrix: linalg::kron(&self.matrix, &other.matrix) }
    }
}

/// Hermitian operator together with its ascending spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Hamiltonian {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        require_square(&matrix)?;
        let deviation = hermiticity_defect(&matrix);
        if deviation > STATE_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = hermitian_part(&matrix);
        let (eigenvalues, eigenvectors) = eigh(&matrix);
        Ok(Self { matrix, eigenvalues, eigenvectors })
    }

    pub fn diagonal(energies: &[f64]) -> Self {
        // diagonal input: eigenvectors are the basis, no solver needed
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let n = energies.len();
        let eigenvectors = CMatrix::from_fn(n, n, |r, col| if r == order[col] { ONE } else { ZERO });
        Self {
            matrix: linalg::diag(energies),
            eigenvalues: order.iter().map(|&i| energies[i]).collect(),
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// `H ⊗ I_d`
    pub fn on_left(&self, d: usize) -> Result<Self> {
        Self::new(linalg::kron(&self.matrix, &CMatrix::identity(d, d)))
    }

    /// `I_d ⊗ H`
    pub fn on_right(&self, d: usize) -> Result<Self> {
        Self::new(linalg::kron(&CMatrix::identity(d, d), &self.matrix))
    }
}

/// How a joint space factors into system ⊗ rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartitionLayout {
    dim_s: usize,
    dim_r: usize,
}

impl BipartitionLayout {
    pub fn new(dim_s: usize, dim_r: usize) -> Result<Self> {
        if dim_s < 2 || dim_r < 2 {
            return Err(Error::InvalidLayout { dim_s, dim_r });
        }
        Ok(Self { dim_s, dim_r })
    }

    pub fn qubits() -> Self {
        Self { dim_s: 2, dim_r: 2 }
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn joint_dim(&self) -> usize {
        self.dim_s * self.dim_r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Rest,
}

pub fn tensor_product(a: &DensityOperator, b: &DensityOperator) -> DensityOperator {
    DensityOperator::from_valid(linalg::kron(a.matrix(), b.matrix()))
}

pub fn partial_trace_matrix(m: &CMatrix, layout: BipartitionLayout, keep: Subsystem) -> Result<CMatrix> {
    check_dims(layout.joint_dim(), m.nrows())?;
    let (ds, dr) = (layout.dim_s, layout.dim_r);
    Ok(match keep {
        Subsystem::System => CMatrix::from_fn(ds, ds, |i, j| (0..dr).map(|r| m[(i * dr + r, j * dr + r)]).sum()),
        Subsystem::Rest => CMatrix::from_fn(dr, dr, |i, j| (0..ds).map(|s| m[(s * dr + i, s * dr + j)]).sum()),
    })
}

pub fn partial_trace(rho: &DensityOperator, layout: BipartitionLayout, keep: Subsystem) -> Result<DensityOperator> {
    partial_trace_matrix(rho.matrix(), layout, keep).map(DensityOperator::from_valid)
}

/// `-Σ λ ln λ` in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    Ok(linalg::shannon_nats(rho.spectrum()?).max(0.0))
}

/// `S(ρ_S) + S(ρ_R) - S(ρ_SR)`.
pub fn mutual_information(rho: &DensityOperator, layout: BipartitionLayout) -> Result<f64> {
    let s = von_neumann_entropy(&partial_trace(rho, layout, Subsystem::System)?)?;
    let r = von_neumann_entropy(&partial_trace(rho, layout, Subsystem::Rest)?)?;
    Ok(s + r - von_neumann_entropy(rho)?)
}

/// Relative eigenvalue cutoff below which a PSD square root treats the
/// eigenvalue as an exact zero; `√` would otherwise inflate roundoff.
const SQRT_CUTOFF: f64 = 1e-14;

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (mut values, vectors) = eigh(m);
    clamp_spectrum(&mut values)?;
    let cutoff = SQRT_CUTOFF * values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(spectral_map(&values, &vectors, |x| c(if x > cutoff { x.sqrt() } else { 0.0 }, 0.0)))
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²` and Bures distance `√(2(1 - √F))`.
///
/// `tr √(√ρ σ √ρ)` is evaluated as the nuclear norm of `√ρ √σ`.
pub fn fidelity_and_bures(rho: &DensityOperator, sigma: &DensityOperator) -> Result<(f64, f64)> {
    check_dims(rho.dim(), sigma.dim())?;
    let overlap = psd_sqrt(rho.matrix())? * psd_sqrt(sigma.matrix())?;
    let root_fidelity = overlap.singular_values().iter().sum::<f64>().clamp(0.0, 1.0);
    let fidelity = root_fidelity * root_fidelity;
    let bures = (2.0 * (1.0 - root_fidelity)).max(0.0).sqrt();
    Ok((fidelity, bures))
}

/// `½ Σ |eig(ρ - σ)|`.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let diff = rho.matrix() - sigma.matrix();
    Ok(0.5 * eigvalsh(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

/// Canonical purification `Σ_j √ρ|j⟩ ⊗ |j⟩` on `d²`; tracing out the second
/// factor returns `ρ`.
pub fn purify(rho: &DensityOperator) -> Result<DensityOperator> {
    let d = rho.dim();
    let root = psd_sqrt(rho.matrix())?;
    let psi = CVector::from_fn(d * d, |k, _| root[(k / d, k % d)]);
    DensityOperator::pure(&psi)
}

/// `U ρ U†`.
pub fn evolve(rho: &DensityOperator, u: &UnitaryOperator) -> Result<DensityOperator> {
    check_dims(rho.dim(), u.dim())?;
    Ok(DensityOperator::from_valid(u.matrix() * rho.matrix() * u.matrix().adjoint()))
}

/// `exp(-iHt)` through the spectral decomposition.
pub fn unitary_from_hamiltonian(h: &Hamiltonian, t: f64) -> UnitaryOperator {
    let m = spectral_map(h.eigenvalues(), h.eigenvectors(), |e| {
        let phase = -e * t;
        c(phase.cos(), phase.sin())
    });
    UnitaryOperator { matrix: m }
}

/// Boltzmann populations in the ascending eigenbasis of `h` and `ln Z`.
/// Energies are shifted by the ground energy before exponentiating.
pub fn thermal_populations(h: &Hamiltonian, beta: f64) -> Result<(Vec<f64>, f64)> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter { name: "beta", value: beta });
    }
    let ground = h.eigenvalues()[0];
    let weights: Vec<f64> = h.eigenvalues().iter().map(|&e| (-beta * (e - ground)).exp()).collect();
    let shifted_z: f64 = weights.iter().sum();
    let ln_z = shifted_z.ln() - beta * ground;
    Ok((weights.into_iter().map(|w| w / shifted_z).collect(), ln_z))
}

/// `e^{-βH} / Z`.
pub fn gibbs_state(h: &Hamiltonian, beta: f64) -> Result<DensityOperator> {
    let (populations, _) = thermal_populations(h, beta)?;
    Ok(DensityOperator::from_valid(spectral_map(&populations, h.eigenvectors(), |p| c(p, 0.0))))
}

/// `tr ρ (ln ρ - ln σ)` in nats.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let mut rho_values = rho.spectrum()?;
    clamp_spectrum(&mut rho_values)?;
    let (sigma_values, sigma_vectors) = eigh(sigma.matrix());
    let mut cross = 0.0;
    for (k, &mu) in sigma_values.iter().enumerate() {
        let v = sigma_vectors.column(k);
        let weight = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
        if mu <= SUPPORT_THRESHOLD {
            if weight > SUPPORT_THRESHOLD {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        cross += weight * mu.ln();
    }
    let neg_entropy: f64 = rho_values.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum();
    Ok((neg_entropy - cross).max(0.0))
}
