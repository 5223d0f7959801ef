//! Seeded sampling: Haar unitaries, random states, random Hamiltonians.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_part, CMatrix, CVector};
use crate::quantum::{DensityOperator, Hamiltonian, UnitaryOperator};

/// Label written into experiment metadata so a run can be reproduced.
pub const RNG_ALGORITHM: &str =
    "xoshiro256++ (seed expanded by SplitMix64); split(i) = splitmix64(seed + 0x9E3779B97F4A7C15*(i+1))";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream. Identical seeds give bit-identical samples.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: Xoshiro256PlusPlus::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream for task `index`. Depends only on the parent
    /// seed, never on how much of the parent stream was consumed.
    pub fn split(&self, index: u64) -> Self {
        Self::new(splitmix64(self.seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1)))))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Complex Gaussian with `E|z|² = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        c(self.standard_normal() * s, self.standard_normal() * s)
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> CMatrix {
        // fill row-major so the stream order does not depend on storage layout
        let mut m = DMatrix::zeros(rows, cols);
        for r in 0..rows {
            for col in 0..cols {
                m[(r, col)] = self.complex_normal();
            }
        }
        m
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
/// R diagonal moved into Q.
pub fn haar_random_unitary(d: usize, rng: &mut RandomSource) -> Result<UnitaryOperator> {
    if d == 0 {
        return Err(Error::InvalidParameter { name: "dim", value: 0.0 });
    }
    let qr = rng.ginibre(d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for col in 0..d {
        let rii = r[(col, col)];
        let norm = rii.norm();
        let phase = if norm > 0.0 { rii / norm } else { c(1.0, 0.0) };
        for row in 0..d {
            q[(row, col)] *= phase;
        }
    }
    UnitaryOperator::new(q)
}

/// `G G† / tr(G G†)` with `G` a `d × rank` Ginibre matrix.
pub fn random_density_operator(d: usize, rank: usize, rng: &mut RandomSource) -> Result<DensityOperator> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::InvalidParameter { name: "rank", value: rank as f64 });
    }
    let g = rng.ginibre(d, rank);
    let gg = &g * g.adjoint();
    let tr = crate::linalg::trace(&gg).re;
    DensityOperator::new(hermitian_part(&gg).unscale(tr))
}

pub fn random_pure_vector(d: usize, rng: &mut RandomSource) -> CVector {
    let v = CVector::from_fn(d, |_, _| rng.complex_normal());
    let n = v.norm();
    v.unscale(n)
}

/// GUE-style Hermitian matrix with unit-variance entries.
pub fn random_hamiltonian(d: usize, rng: &mut RandomSource) -> Result<Hamiltonian> {
    let g = rng.ginibre(d, d);
    Hamiltonian::new(hermitian_part(&g))
}
