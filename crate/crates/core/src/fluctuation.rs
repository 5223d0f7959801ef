//! Two-point measurement statistics and the fluctuation relations they
//! satisfy, plus effective temperatures, heat flow and damping heat.
//!
//! Sign conventions: `W_nm = E'_m - E_n` and `δF = F_final - F_initial` with
//! `F = -ln Z / β`, so that `p_f(n,m) / p_b(n,m) = exp(β (W_nm - δF))` and the
//! per-outcome entropy production is `β (W_nm - δF)`.

use alloc::vec::Vec;

use crate::arrow::{entropy_balance_with_state, EntropyBalanceReport};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::quantum::{
    gibbs_state, partial_trace, relative_entropy, tensor_product, thermal_populations, unitary_from_hamiltonian,
    BipartitionLayout, DensityOperator, Hamiltonian, Subsystem, UnitaryOperator,
};

/// Eigenvalues closer than this share one projector.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Probabilities at or below this are excluded from ratio checks.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;
/// `ΔS` magnitude below which an effective temperature is undefined.
pub const MIN_ENTROPY_CHANGE: f64 = 1e-10;

/// Spectral projector of one eigenvalue cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub energy: f64,
    pub rank: usize,
    pub matrix: CMatrix,
}

/// Projectors onto the eigenspaces of `h`, ascending in energy.
pub fn eigen_projectors(h: &Hamiltonian) -> Vec<Projector> {
    let values = h.eigenvalues();
    let vectors = h.eigenvectors();
    let d = h.dim();
    let mut out = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && values[end] - values[end - 1] <= DEGENERACY_GAP {
            end += 1;
        }
        let mut matrix = CMatrix::zeros(d, d);
        for k in start..end {
            let v = vectors.column(k);
            matrix += v * v.adjoint();
        }
        let energy = values[start..end].iter().sum::<f64>() / (end - start) as f64;
        out.push(Projector { energy, rank: end - start, matrix });
        start = end;
    }
    out
}

/// Cluster populations of the Gibbs state of `h`, and `ln Z`.
fn cluster_populations(h: &Hamiltonian, projectors: &[Projector], beta: f64) -> Result<(Vec<f64>, f64)> {
    let (pops, ln_z) = thermal_populations(h, beta)?;
    let mut offset = 0;
    let clustered = projectors
        .iter()
        .map(|p| {
            let s = pops[offset..offset + p.rank].iter().sum();
            offset += p.rank;
            s
        })
        .collect();
    Ok((clustered, ln_z))
}

/// `F = -ln Z / β`
pub fn free_energy(h: &Hamiltonian, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter { name: "beta", value: beta });
    }
    Ok(-thermal_populations(h, beta)?.1 / beta)
}

/// Measure `H_i`, evolve by `U`, measure `H_f`; initial state Gibbs at `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointProtocol {
    h_initial: Hamiltonian,
    h_final: Hamiltonian,
    unitary: UnitaryOperator,
    beta: f64,
}

impl TwoPointProtocol {
    pub fn new(h_initial: Hamiltonian, h_final: Hamiltonian, unitary: UnitaryOperator, beta: f64) -> Result<Self> {
        let d = h_initial.dim();
        for found in [h_final.dim(), unitary.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter { name: "beta", value: beta });
        }
        Ok(Self { h_initial, h_final, unitary, beta })
    }

    pub fn h_initial(&self) -> &Hamiltonian {
        &self.h_initial
    }

    pub fn h_final(&self) -> &Hamiltonian {
        &self.h_final
    }

    pub fn unitary(&self) -> &UnitaryOperator {
        &self.unitary
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta_free_energy(&self) -> Result<f64> {
        Ok(free_energy(&self.h_final, self.beta)? - free_energy(&self.h_initial, self.beta)?)
    }
}

/// `p(n, m)` over initial cluster `n` and final cluster `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointOutcomeDistribution {
    probs: Vec<f64>,
    energies_initial: Vec<f64>,
    energies_final: Vec<f64>,
}

impl JointOutcomeDistribution {
    pub fn rows(&self) -> usize {
        self.energies_initial.len()
    }

    pub fn cols(&self) -> usize {
        self.energies_final.len()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.probs[n * self.cols() + m]
    }

    pub fn energies_initial(&self) -> &[f64] {
        &self.energies_initial
    }

    pub fn energies_final(&self) -> &[f64] {
        &self.energies_final
    }

    /// `W_nm = E'_m - E_n`
    pub fn work(&self, n: usize, m: usize) -> f64 {
        self.energies_final[m] - self.energies_initial[n]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ_m p(n, m)`
    pub fn initial_marginal(&self) -> Vec<f64> {
        (0..self.rows()).map(|n| (0..self.cols()).map(|m| self.get(n, m)).sum()).collect()
    }

    /// `Σ_n p(n, m)`
    pub fn final_marginal(&self) -> Vec<f64> {
        (0..self.cols()).map(|m| (0..self.rows()).map(|n| self.get(n, m)).sum()).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch { expected: self.probs.len(), found: other.probs.len() });
        }
        Ok(())
    }
}

fn overlap(a: &CMatrix, b: &CMatrix) -> f64 {
    // tr(A B) for Hermitian A, B without forming the product
    a.iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum::<f64>().max(0.0)
}

/// `p_f(n, m) = tr(Q^m U P^n U†) p_n / rank(P^n)`
pub fn forward_distribution(protocol: &TwoPointProtocol) -> Result<JointOutcomeDistribution> {
    let ps = eigen_projectors(&protocol.h_initial);
    let qs = eigen_projectors(&protocol.h_final);
    let (p_n, _) = cluster_populations(&protocol.h_initial, &ps, protocol.beta)?;
    let u = protocol.unitary.matrix();
    let mut probs = Vec::with_capacity(ps.len() * qs.len());
    for (p, &pop) in ps.iter().zip(&p_n) {
        let moved = u * &p.matrix * u.adjoint();
        for q in &qs {
            probs.push(overlap(&q.matrix, &moved) * pop / p.rank as f64);
        }
    }
    Ok(JointOutcomeDistribution {
        probs,
        energies_initial: ps.iter().map(|p| p.energy).collect(),
        energies_final: qs.iter().map(|q| q.energy).collect(),
    })
}

/// `p_b(n, m) = tr(P^n U† Q^m U) q_m / rank(Q^m)`, starting from the Gibbs
/// state of the final Hamiltonian and running `U†`.
pub fn backward_distribution(protocol: &TwoPointProtocol) -> Result<JointOutcomeDistribution> {
    let ps = eigen_projectors(&protocol.h_initial);
    let qs = eigen_projectors(&protocol.h_final);
    let (q_m, _) = cluster_populations(&protocol.h_final, &qs, protocol.beta)?;
    let u = protocol.unitary.matrix();
    let pulled: Vec<CMatrix> = qs.iter().map(|q| u.adjoint() * &q.matrix * u).collect();
    let mut probs = Vec::with_capacity(ps.len() * qs.len());
    for p in &ps {
        for ((q, moved), &pop) in qs.iter().zip(&pulled).zip(&q_m) {
            probs.push(overlap(&p.matrix, moved) * pop / q.rank as f64);
        }
    }
    Ok(JointOutcomeDistribution {
        probs,
        energies_initial: ps.iter().map(|p| p.energy).collect(),
        energies_final: qs.iter().map(|q| q.energy).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrooksEntry {
    pub n: usize,
    pub m: usize,
    pub forward: f64,
    pub backward: f64,
    pub work: f64,
    /// `p_f / p_b`, absent when `p_b` is negligible.
    pub ratio: Option<f64>,
    /// `exp(β (W - δF))`
    pub predicted: f64,
    /// `|ratio - predicted| / predicted`, zero when the ratio is absent.
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrooksReport {
    pub entries: Vec<CrooksEntry>,
    pub delta_f: f64,
    pub jarzynski_lhs: f64,
    /// `KL(p_f ‖ p_b)` in nats.
    pub entropy_production: f64,
    pub max_relative_deviation: f64,
}

pub fn crooks_check(protocol: &TwoPointProtocol) -> Result<CrooksReport> {
    let forward = forward_distribution(protocol)?;
    let backward = backward_distribution(protocol)?;
    let delta_f = protocol.delta_free_energy()?;
    let beta = protocol.beta;
    let mut entries = Vec::with_capacity(forward.probs.len());
    let mut max_relative_deviation = 0.0_f64;
    for n in 0..forward.rows() {
        for m in 0..forward.cols() {
            let (pf, pb) = (forward.get(n, m), backward.get(n, m));
            let work = forward.work(n, m);
            let predicted = (beta * (work - delta_f)).exp();
            if pb <= 0.0 && pf > NEGLIGIBLE_PROBABILITY {
                return Err(Error::ImpossibleEvent { n, m });
            }
            let ratio = (pb > NEGLIGIBLE_PROBABILITY).then(|| pf / pb);
            let relative_deviation = ratio.map_or(0.0, |r| (r - predicted).abs() / predicted);
            max_relative_deviation = max_relative_deviation.max(relative_deviation);
            entries.push(CrooksEntry { n, m, forward: pf, backward: pb, work, ratio, predicted, relative_deviation });
        }
    }
    let (jarzynski_lhs, _) = jarzynski_check(&forward, beta, delta_f);
    let (entropy_production, _) = entropy_production_identity(&forward, &backward, beta, delta_f)?;
    Ok(CrooksReport { entries, delta_f, jarzynski_lhs, entropy_production, max_relative_deviation })
}

/// `(Σ p_f e^{-βW}, e^{-βδF})`
pub fn jarzynski_check(forward: &JointOutcomeDistribution, beta: f64, delta_f: f64) -> (f64, f64) {
    let mut lhs = 0.0;
    for n in 0..forward.rows() {
        for m in 0..forward.cols() {
            lhs += forward.get(n, m) * (-beta * forward.work(n, m)).exp();
        }
    }
    (lhs, (-beta * delta_f).exp())
}

/// `(Σ p_f ln(p_f / p_b), Σ p_f β (W - δF))`
pub fn entropy_production_identity(
    forward: &JointOutcomeDistribution,
    backward: &JointOutcomeDistribution,
    beta: f64,
    delta_f: f64,
) -> Result<(f64, f64)> {
    forward.same_shape(backward)?;
    let (mut kl, mut sigma) = (0.0, 0.0);
    for n in 0..forward.rows() {
        for m in 0..forward.cols() {
            let (pf, pb) = (forward.get(n, m), backward.get(n, m));
            if pf <= 0.0 {
                continue;
            }
            if pb <= 0.0 {
                if pf > NEGLIGIBLE_PROBABILITY {
                    return Err(Error::SupportViolation);
                }
                continue;
            }
            kl += pf * (pf / pb).ln();
            sigma += pf * beta * (forward.work(n, m) - delta_f);
        }
    }
    Ok((kl, sigma))
}

/// `(tr(Q U P U†), tr(P U† Q U))`: equal by cyclicity of the trace.
pub fn measurement_symmetry_check(p: &CMatrix, q: &CMatrix, u: &UnitaryOperator) -> Result<(f64, f64)> {
    let d = u.dim();
    for m in [p, q] {
        if m.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
    }
    let um = u.matrix();
    let forward = linalg::trace(&(q * um * p * um.adjoint())).re;
    let backward = linalg::trace(&(p * um.adjoint() * q * um)).re;
    Ok((forward, backward))
}

/// `(|⟨m|P|n⟩|², |⟨n|P|m⟩|²)`
pub fn transition_symmetry(m: &linalg::CVector, n: &linalg::CVector, p: &CMatrix) -> (f64, f64) {
    let forward = (m.adjoint() * p * n)[(0, 0)].norm_sqr();
    let backward = (n.adjoint() * p * m)[(0, 0)].norm_sqr();
    (forward, backward)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTemperatures {
    /// `ΔU_S / ΔS_S`
    pub t_s: f64,
    pub t_r: f64,
    /// `ΔU_S / T_S + ΔU_R / T_R`, identically `ΔS_S + ΔS_R`.
    pub clausius_lhs: f64,
}

pub fn effective_temperatures(report: &EntropyBalanceReport, du_s: f64, du_r: f64) -> Result<EffectiveTemperatures> {
    if report.ds_s.abs() <= MIN_ENTROPY_CHANGE {
        return Err(Error::UndefinedTemperature { subsystem: "system", entropy_change: report.ds_s });
    }
    if report.ds_r.abs() <= MIN_ENTROPY_CHANGE {
        return Err(Error::UndefinedTemperature { subsystem: "rest", entropy_change: report.ds_r });
    }
    let t_s = du_s / report.ds_s;
    let t_r = du_r / report.ds_r;
    Ok(EffectiveTemperatures { t_s, t_r, clausius_lhs: du_s / t_s + du_r / t_r })
}

/// Product of Gibbs states evolved under `exp(-i(H_S + H_R + g H_int) t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatFlowSetup {
    pub h_s: Hamiltonian,
    pub h_r: Hamiltonian,
    pub h_int: Hamiltonian,
    pub beta_s: f64,
    pub beta_r: f64,
    pub coupling: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatFlowReport {
    pub balance: EntropyBalanceReport,
    pub du_s: f64,
    pub du_r: f64,
    /// Absent when either entropy change is below the threshold.
    pub temperatures: Option<EffectiveTemperatures>,
    /// Subsystem with the smaller initial `β`.
    pub hotter: Subsystem,
    pub hotter_energy_change: f64,
    /// Largest entry of `[H_int, H_S ⊗ I + I ⊗ H_R]`.
    pub interaction_commutator: f64,
    /// When both effective temperatures are defined and `T_R < T_S`:
    /// whether `ΔU_R > ΔU_S`.
    pub flows_to_colder: Option<bool>,
}

pub fn heat_flow(setup: &HeatFlowSetup) -> Result<HeatFlowReport> {
    let (ds, dr) = (setup.h_s.dim(), setup.h_r.dim());
    let layout = BipartitionLayout::new(ds, dr)?;
    if setup.h_int.dim() != layout.joint_dim() {
        return Err(Error::DimensionMismatch { expected: layout.joint_dim(), found: setup.h_int.dim() });
    }
    if setup.beta_s == setup.beta_r {
        return Err(Error::InvalidParameter { name: "beta_r", value: setup.beta_r });
    }
    let gamma_s = gibbs_state(&setup.h_s, setup.beta_s)?;
    let gamma_r = gibbs_state(&setup.h_r, setup.beta_r)?;
    let rho = tensor_product(&gamma_s, &gamma_r);
    let local = setup.h_s.on_left(dr)?.matrix() + setup.h_r.on_right(ds)?.matrix();
    let commutator = setup.h_int.matrix() * &local - &local * setup.h_int.matrix();
    let interaction_commutator = commutator.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let h = Hamiltonian::new(local + setup.h_int.matrix().scale(setup.coupling))?;
    let u = unitary_from_hamiltonian(&h, setup.time);
    let (balance, after) = entropy_balance_with_state(&rho, layout, &u)?;
    let du_s = partial_trace(&after, layout, Subsystem::System)?.expectation(setup.h_s.matrix())?
        - gamma_s.expectation(setup.h_s.matrix())?;
    let du_r = partial_trace(&after, layout, Subsystem::Rest)?.expectation(setup.h_r.matrix())?
        - gamma_r.expectation(setup.h_r.matrix())?;
    let temperatures = effective_temperatures(&balance, du_s, du_r).ok();
    let (hotter, hotter_energy_change) =
        if setup.beta_s < setup.beta_r { (Subsystem::System, du_s) } else { (Subsystem::Rest, du_r) };
    let flows_to_colder = temperatures.and_then(|t| (t.t_r < t.t_s).then_some(du_r > du_s));
    Ok(HeatFlowReport {
        balance,
        du_s,
        du_r,
        temperatures,
        hotter,
        hotter_energy_change,
        interaction_commutator,
        flows_to_colder,
    })
}

/// Heat released when `state` relaxes to the Gibbs state of `h_final`:
/// `S(state ‖ e^{-βH_f}/Z_f)`.
pub fn damping_heat(state: &DensityOperator, h_final: &Hamiltonian, beta: f64) -> Result<f64> {
    relative_entropy(state, &gibbs_state(h_final, beta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrow::entropy_balance;
    use crate::linalg::{c, diag, max_abs_diff, pauli_x, pauli_z};
    use crate::quantum::mutual_information;
    use crate::random::{haar_random_unitary, random_hamiltonian, random_pure_vector, RandomSource};
    use core::f64::consts::LN_2;

    fn pauli_x_protocol() -> TwoPointProtocol {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]);
        TwoPointProtocol::new(h.clone(), h, UnitaryOperator::new(pauli_x()).unwrap(), 3f64.ln()).unwrap()
    }

    fn random_protocol(seed: u64, beta: f64) -> TwoPointProtocol {
        let mut rng = RandomSource::new(seed);
        let hi = random_hamiltonian(4, &mut rng).unwrap();
        let hf = random_hamiltonian(4, &mut rng).unwrap();
        let u = haar_random_unitary(4, &mut rng).unwrap();
        TwoPointProtocol::new(hi, hf, u, beta).unwrap()
    }

    #[test]
    fn projector_examples() {
        let ps = eigen_projectors(&Hamiltonian::diagonal(&[0.0, 1.0]));
        assert_eq!(ps.len(), 2);
        assert!(max_abs_diff(&ps[0].matrix, &diag(&[1.0, 0.0])) < 1e-15);
        assert!(max_abs_diff(&ps[1].matrix, &diag(&[0.0, 1.0])) < 1e-15);

        let ps = eigen_projectors(&Hamiltonian::new(pauli_x()).unwrap());
        let half = c(0.5, 0.0);
        let minus = CMatrix::from_row_slice(2, 2, &[half, -half, -half, half]);
        let plus = CMatrix::from_row_slice(2, 2, &[half, half, half, half]);
        assert!(max_abs_diff(&ps[0].matrix, &minus) < 1e-14);
        assert!(max_abs_diff(&ps[1].matrix, &plus) < 1e-14);

        let ps = eigen_projectors(&Hamiltonian::new(CMatrix::identity(3, 3)).unwrap());
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].rank, 3);
        assert!(max_abs_diff(&ps[0].matrix, &CMatrix::identity(3, 3)) < 1e-14);
    }

    #[test]
    fn projectors_resolve_identity() {
        let mut rng = RandomSource::new(6);
        for d in [2, 4, 6] {
            let h = random_hamiltonian(d, &mut rng).unwrap();
            let ps = eigen_projectors(&h);
            assert_eq!(ps.len(), d);
            let sum = ps.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + &p.matrix);
            assert!(max_abs_diff(&sum, &CMatrix::identity(d, d)) <= 1e-12);
            for (i, a) in ps.iter().enumerate() {
                for (j, b) in ps.iter().enumerate() {
                    let prod = &a.matrix * &b.matrix;
                    let target = if i == j { a.matrix.clone() } else { CMatrix::zeros(d, d) };
                    assert!(max_abs_diff(&prod, &target) <= 1e-12);
                }
            }
        }
        // a degenerate spectrum: diag(0, 1, 1, 2) rotated
        let u = haar_random_unitary(4, &mut rng).unwrap();
        let h = Hamiltonian::new(u.matrix() * diag(&[0.0, 1.0, 1.0, 2.0]) * u.matrix().adjoint()).unwrap();
        let ps = eigen_projectors(&h);
        assert_eq!(ps.iter().map(|p| p.rank).collect::<Vec<_>>(), alloc::vec![1, 2, 1]);
        let sum = ps.iter().fold(CMatrix::zeros(4, 4), |acc, p| acc + &p.matrix);
        assert!(max_abs_diff(&sum, &CMatrix::identity(4, 4)) <= 1e-12);
    }

    #[test]
    fn identity_protocol_is_diagonal() {
        let mut rng = RandomSource::new(1);
        let h = random_hamiltonian(3, &mut rng).unwrap();
        let proto = TwoPointProtocol::new(h.clone(), h.clone(), UnitaryOperator::identity(3), 0.7).unwrap();
        let (pops, _) = thermal_populations(&h, 0.7).unwrap();
        let f = forward_distribution(&proto).unwrap();
        let b = backward_distribution(&proto).unwrap();
        for n in 0..3 {
            for m in 0..3 {
                let expected = if n == m { pops[n] } else { 0.0 };
                assert!((f.get(n, m) - expected).abs() < 1e-12);
                assert!((b.get(n, m) - expected).abs() < 1e-12);
            }
        }
        let report = crooks_check(&proto).unwrap();
        assert!(report.delta_f.abs() < 1e-14);
        for e in report.entries.iter().filter(|e| e.ratio.is_some()) {
            assert!((e.ratio.unwrap() - 1.0).abs() < 1e-9 && e.work.abs() < 1e-12);
        }
        let (lhs, rhs) = jarzynski_check(&f, 0.7, report.delta_f);
        assert!((lhs - 1.0).abs() < 1e-12 && (rhs - 1.0).abs() < 1e-12);
        let (kl, sigma) = entropy_production_identity(&f, &b, 0.7, report.delta_f).unwrap();
        assert!(kl.abs() < 1e-12 && sigma.abs() < 1e-12);
    }

    #[test]
    fn pauli_x_worked_example() {
        let proto = pauli_x_protocol();
        let f = forward_distribution(&proto).unwrap();
        let b = backward_distribution(&proto).unwrap();
        let expect_f = [[0.0, 0.75], [0.25, 0.0]];
        let expect_b = [[0.0, 0.25], [0.75, 0.0]];
        for n in 0..2 {
            for m in 0..2 {
                assert!((f.get(n, m) - expect_f[n][m]).abs() < 1e-15);
                assert!((b.get(n, m) - expect_b[n][m]).abs() < 1e-15);
            }
        }
        let report = crooks_check(&proto).unwrap();
        assert_eq!(report.delta_f, 0.0);
        let e01 = report.entries.iter().find(|e| e.n == 0 && e.m == 1).unwrap();
        assert!((e01.ratio.unwrap() - 3.0).abs() < 1e-14);
        assert!((e01.predicted - 3.0).abs() < 1e-14);
        let (lhs, rhs) = jarzynski_check(&f, proto.beta(), 0.0);
        assert!((lhs - 1.0).abs() < 1e-15 && rhs == 1.0);
        let (kl, sigma) = entropy_production_identity(&f, &b, proto.beta(), 0.0).unwrap();
        let expected = 0.5 * 3f64.ln();
        assert!((kl - expected).abs() < 1e-14 && (sigma - expected).abs() < 1e-14);
        assert!((expected - 0.5493061443340549).abs() < 1e-15);
    }

    #[test]
    fn marginals_match_gibbs_populations() {
        let proto = random_protocol(77, 1.0);
        let f = forward_distribution(&proto).unwrap();
        let b = backward_distribution(&proto).unwrap();
        let (p, _) = thermal_populations(proto.h_initial(), 1.0).unwrap();
        let (q, _) = thermal_populations(proto.h_final(), 1.0).unwrap();
        for (got, want) in f.initial_marginal().iter().zip(&p) {
            assert!((got - want).abs() <= 1e-12);
        }
        for (got, want) in b.final_marginal().iter().zip(&q) {
            assert!((got - want).abs() <= 1e-12);
        }
        assert!((f.total() - 1.0).abs() <= 1e-12 && (b.total() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn random_protocols_satisfy_fluctuation_relations() {
        for seed in 0..100 {
            let proto = random_protocol(seed, 1.0);
            let report = crooks_check(&proto).unwrap();
            assert!(report.max_relative_deviation <= 1e-9, "seed {seed}: {}", report.max_relative_deviation);
            assert_eq!(report.entries.iter().filter(|e| e.ratio.is_some()).count(), 16);
            let rhs = (-report.delta_f).exp();
            assert!((report.jarzynski_lhs - rhs).abs() / rhs <= 1e-9);
            let f = forward_distribution(&proto).unwrap();
            let b = backward_distribution(&proto).unwrap();
            let (kl, sigma) = entropy_production_identity(&f, &b, 1.0, report.delta_f).unwrap();
            assert!((kl - sigma).abs() <= 1e-9 && kl >= -1e-12 && sigma >= -1e-12);
        }
    }

    #[test]
    fn degenerate_spectra_still_satisfy_crooks() {
        let mut rng = RandomSource::new(404);
        let u = haar_random_unitary(4, &mut rng).unwrap();
        let w = haar_random_unitary(4, &mut rng).unwrap();
        let hi = Hamiltonian::new(w.matrix() * diag(&[0.0, 1.0, 1.0, 2.0]) * w.matrix().adjoint()).unwrap();
        let hf = Hamiltonian::diagonal(&[-0.5, 0.3, 0.3, 0.3]);
        let proto = TwoPointProtocol::new(hi, hf, u, 0.8).unwrap();
        let report = crooks_check(&proto).unwrap();
        assert!(report.max_relative_deviation <= 1e-9);
        let f = forward_distribution(&proto).unwrap();
        assert_eq!((f.rows(), f.cols()), (3, 2));
        assert!((f.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn support_violation_detected() {
        let proto = pauli_x_protocol();
        let f = forward_distribution(&proto).unwrap();
        let b = forward_distribution(
            &TwoPointProtocol::new(
                Hamiltonian::diagonal(&[0.0, 1.0]),
                Hamiltonian::diagonal(&[0.0, 1.0]),
                UnitaryOperator::identity(2),
                1.0,
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(entropy_production_identity(&f, &b, 1.0, 0.0), Err(Error::SupportViolation));
    }

    #[test]
    fn protocol_validation() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]);
        assert!(TwoPointProtocol::new(h.clone(), h.clone(), UnitaryOperator::identity(2), 0.0).is_err());
        assert!(TwoPointProtocol::new(h.clone(), Hamiltonian::diagonal(&[0.0, 1.0, 2.0]), UnitaryOperator::identity(2), 1.0).is_err());
    }

    #[test]
    fn product_final_state_has_positive_average_entropy_production() {
        // uncorrelated throughout: local unitary on a product Gibbs input, and a
        // quench on the local fields
        let hs = Hamiltonian::diagonal(&[0.0, 1.0]);
        let hr = Hamiltonian::diagonal(&[0.0, 2.0]);
        let hi = Hamiltonian::new(hs.on_left(2).unwrap().matrix() + hr.on_right(2).unwrap().matrix()).unwrap();
        let hf = Hamiltonian::new(hs.on_left(2).unwrap().matrix().scale(1.5) + hr.on_right(2).unwrap().matrix()).unwrap();
        let mut rng = RandomSource::new(13);
        let local = haar_random_unitary(2, &mut rng).unwrap().tensor(&haar_random_unitary(2, &mut rng).unwrap());
        let proto = TwoPointProtocol::new(hi.clone(), hf, local.clone(), 1.0).unwrap();
        let report = crooks_check(&proto).unwrap();
        assert!(report.entropy_production > 1e-3);
        let start = gibbs_state(&hi, 1.0).unwrap();
        let end = crate::quantum::evolve(&start, &local).unwrap();
        assert!(mutual_information(&end, BipartitionLayout::qubits()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn measurement_statistics_are_time_symmetric() {
        let mut rng = RandomSource::new(55);
        for _ in 0..1000 {
            let p = linalg::outer(&random_pure_vector(4, &mut rng));
            let q = linalg::outer(&random_pure_vector(4, &mut rng));
            let u = haar_random_unitary(4, &mut rng).unwrap();
            let (f, b) = measurement_symmetry_check(&p, &q, &u).unwrap();
            assert!((f - b).abs() <= 1e-12);
        }
        let p = linalg::outer(&random_pure_vector(3, &mut rng));
        let q = linalg::outer(&random_pure_vector(3, &mut rng));
        let (f, b) = measurement_symmetry_check(&p, &q, &UnitaryOperator::identity(3)).unwrap();
        let direct = linalg::trace(&(&q * &p)).re;
        assert!((f - direct).abs() < 1e-14 && (b - direct).abs() < 1e-14);
        for _ in 0..100 {
            let m = random_pure_vector(3, &mut rng);
            let n = random_pure_vector(3, &mut rng);
            let h = random_hamiltonian(3, &mut rng).unwrap();
            let (a, b) = transition_symmetry(&m, &n, h.matrix());
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn temperature_arithmetic() {
        let report = EntropyBalanceReport {
            ds_s: -0.2,
            ds_r: 0.4,
            sum: 0.2,
            mutual_info_initial: 0.0,
            mutual_info_final: 0.2,
            schrodinger_product: -0.08,
            product_input: true,
        };
        let t = effective_temperatures(&report, -0.1, 0.1).unwrap();
        assert!((t.t_s - 0.5).abs() < 1e-15);
        assert!((t.t_r - 0.25).abs() < 1e-15);
        assert!((t.clausius_lhs - 0.2).abs() < 1e-15);
        let rho = tensor_product(&DensityOperator::maximally_mixed(2), &DensityOperator::basis(2, 0));
        let idle = entropy_balance(&rho, BipartitionLayout::qubits(), &UnitaryOperator::identity(4)).unwrap();
        assert!(matches!(effective_temperatures(&idle, 0.0, 0.0), Err(Error::UndefinedTemperature { .. })));
    }

    #[test]
    fn resonant_exchange_moves_energy_out_of_hotter_qubit() {
        let h = Hamiltonian::new(pauli_z().scale(0.5)).unwrap();
        let setup = HeatFlowSetup {
            h_s: h.clone(),
            h_r: h,
            h_int: crate::arrow::exchange_interaction(),
            beta_s: 0.3,
            beta_r: 2.0,
            coupling: 0.4,
            time: 1.3,
        };
        let r = heat_flow(&setup).unwrap();
        assert!(r.interaction_commutator < 1e-14);
        assert_eq!(r.hotter, Subsystem::System);
        assert!(r.du_s < 0.0 && r.du_r > 0.0);
        assert!((r.du_s + r.du_r).abs() < 1e-12);
        let t = r.temperatures.unwrap();
        assert!((t.clausius_lhs - r.balance.sum).abs() < 1e-12);
        assert!(r.balance.sum >= -1e-9);
    }

    #[test]
    fn damping_heat_examples() {
        let h = Hamiltonian::diagonal(&[0.0, 1.0]);
        let beta = 3f64.ln();
        let thermal = gibbs_state(&h, beta).unwrap();
        assert!(damping_heat(&thermal, &h, beta).unwrap().abs() < 1e-14);
        let mixed = damping_heat(&DensityOperator::maximally_mixed(2), &h, beta).unwrap();
        assert!((mixed - 0.14384103622589042).abs() < 1e-12);
        let excited = damping_heat(&DensityOperator::basis(2, 1), &h, beta).unwrap();
        assert!((excited - 2.0 * LN_2).abs() < 1e-12);
    }
}
