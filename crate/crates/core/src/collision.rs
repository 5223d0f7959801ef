//! Thermalizing collision machine: a system qubit meets a fresh reservoir
//! qubit at every step.
//!
//! Two simulation modes share one trajectory format. [`SimulationMode::Reduced`]
//! keeps only the system qubit, which is exact because each incoming ancilla
//! is uncorrelated with it. [`SimulationMode::Joint`] keeps the full state of
//! the system and every ancilla used so far; only then can the transcript be
//! replayed backwards to recover the initial system state.
//!
//! Joint-mode qubit order: the system is qubit 0 (left factor), ancilla `k`
//! is qubit `k + 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{apply_two_qubit, c, eigvalsh, kron, shannon_nats, swap_gate, CMatrix};
use crate::quantum::{
    partial_trace, tensor_product, trace_distance, von_neumann_entropy, BipartitionLayout, DensityOperator, Subsystem,
    UnitaryOperator,
};

/// Default cap on the joint dimension in joint mode (12 qubits).
pub const DEFAULT_JOINT_DIM_CAP: usize = 1 << 12;
/// Distances at or below this are treated as converged in rate fits.
pub const CONVERGED_DISTANCE: f64 = 1e-14;

/// `cos θ · I + i sin θ · SWAP`
pub fn partial_swap_unitary(theta: f64) -> UnitaryOperator {
    let m = CMatrix::identity(4, 4).scale(theta.cos()) + swap_gate() * c(0.0, theta.sin());
    UnitaryOperator::new(m).expect("partial swap is unitary for every angle")
}

/// The ancillas met by the system, in collision order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSpec {
    ancillas: Vec<DensityOperator>,
    joint_dim_cap: usize,
}

impl ReservoirSpec {
    /// `count` identical copies of `ancilla`.
    pub fn homogeneous(ancilla: DensityOperator, count: usize) -> Result<Self> {
        if count < 1 {
            return Err(Error::InvalidParameter { name: "count", value: 0.0 });
        }
        Self::from_ancillas(alloc::vec![ancilla; count])
    }

    pub fn from_ancillas(ancillas: Vec<DensityOperator>) -> Result<Self> {
        if ancillas.is_empty() {
            return Err(Error::InvalidParameter { name: "count", value: 0.0 });
        }
        for a in &ancillas {
            if a.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: a.dim() });
            }
        }
        Ok(Self { ancillas, joint_dim_cap: DEFAULT_JOINT_DIM_CAP })
    }

    pub fn with_joint_dim_cap(mut self, cap: usize) -> Self {
        self.joint_dim_cap = cap;
        self
    }

    pub fn count(&self) -> usize {
        self.ancillas.len()
    }

    pub fn ancilla(&self, k: usize) -> &DensityOperator {
        &self.ancillas[k]
    }

    pub fn joint_dim_cap(&self) -> usize {
        self.joint_dim_cap
    }

    pub fn is_homogeneous(&self) -> bool {
        self.ancillas.windows(2).all(|w| w[0] == w[1])
    }

    fn check_joint_dim(&self, collisions: usize) -> Result<()> {
        let required = 1usize.checked_shl((collisions + 1) as u32).unwrap_or(usize::MAX);
        if collisions + 1 >= usize::BITS as usize || required > self.joint_dim_cap {
            return Err(Error::JointDimensionCap { required, cap: self.joint_dim_cap });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionStep {
    pub index: usize,
    pub unitary: UnitaryOperator,
}

/// Ordered record of what happened, enough to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionTranscript {
    pub system_initial: DensityOperator,
    pub steps: Vec<CollisionStep>,
    /// Final state of system and all ancillas, retained in joint mode.
    pub joint_final: Option<DensityOperator>,
}

impl CollisionTranscript {
    /// Copy with the steps listed in a different order; `order[i]` is the
    /// position in `self.steps` of the new `i`-th step.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            system_initial: self.system_initial.clone(),
            steps: order.iter().map(|&i| self.steps[i].clone()).collect(),
            joint_final: self.joint_final.clone(),
        }
    }

    fn indices_are_contiguous(&self) -> bool {
        let mut seen = alloc::vec![false; self.steps.len()];
        for s in &self.steps {
            match seen.get_mut(s.index) {
                Some(flag) if !*flag => *flag = true,
                _ => return false,
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub system_state: DensityOperator,
    pub entropy: f64,
    /// Distance to the most recent ancilla (the first one for the initial
    /// point).
    pub trace_distance_to_ancilla: f64,
    /// Joint mode with entropy tracking only: entropy of system plus all
    /// ancillas, counting untouched ones at their own entropy.
    pub joint_entropy: Option<f64>,
    /// Same bookkeeping, summing single-qubit marginal entropies.
    pub marginal_entropy_sum: Option<f64>,
}

/// One point per collision plus the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub points: Vec<TrajectoryPoint>,
    pub homogeneous: bool,
}

impl TrajectoryRecord {
    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.trace_distance_to_ancilla)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    Reduced,
    Joint { track_entropies: bool },
}

/// 2×2 marginal of qubit `q` from an `n`-qubit density matrix.
fn qubit_marginal(m: &CMatrix, n_qubits: usize, q: usize) -> CMatrix {
    let bit = 1usize << (n_qubits - 1 - q);
    let mut out = CMatrix::zeros(2, 2);
    for i in 0..m.nrows() {
        if i & bit != 0 {
            continue;
        }
        out[(0, 0)] += m[(i, i)];
        out[(0, 1)] += m[(i, i | bit)];
        out[(1, 0)] += m[(i | bit, i)];
        out[(1, 1)] += m[(i | bit, i | bit)];
    }
    out
}

fn matrix_entropy(m: &CMatrix) -> f64 {
    shannon_nats(eigvalsh(m).into_iter().map(|v| v.max(0.0)))
}

fn point(
    system: DensityOperator,
    ancilla: &DensityOperator,
    joint_entropy: Option<f64>,
    marginal_entropy_sum: Option<f64>,
) -> Result<TrajectoryPoint> {
    Ok(TrajectoryPoint {
        entropy: von_neumann_entropy(&system)?,
        trace_distance_to_ancilla: trace_distance(&system, ancilla)?,
        system_state: system,
        joint_entropy,
        marginal_entropy_sum,
    })
}

/// Iterates `ρ_{k+1} = tr_anc[G (ρ_k ⊗ ξ_k) G†]` over the reservoir.
pub fn run_collisions(
    system_init: &DensityOperator,
    spec: &ReservoirSpec,
    gate: &UnitaryOperator,
    mode: SimulationMode,
) -> Result<(TrajectoryRecord, CollisionTranscript)> {
    if system_init.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: system_init.dim() });
    }
    if gate.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: gate.dim() });
    }
    let n = spec.count();
    let steps: Vec<CollisionStep> = (0..n).map(|index| CollisionStep { index, unitary: gate.clone() }).collect();
    let mut points = Vec::with_capacity(n + 1);
    let joint_final = match mode {
        SimulationMode::Reduced => {
            points.push(point(system_init.clone(), spec.ancilla(0), None, None)?);
            let layout = BipartitionLayout::qubits();
            let mut system = system_init.clone();
            for k in 0..n {
                let joint = tensor_product(&system, spec.ancilla(k));
                let evolved = DensityOperator::from_valid(gate.matrix() * joint.matrix() * gate.matrix().adjoint());
                system = partial_trace(&evolved, layout, Subsystem::System)?;
                points.push(point(system.clone(), spec.ancilla(k), None, None)?);
            }
            None
        }
        SimulationMode::Joint { track_entropies } => {
            spec.check_joint_dim(n)?;
            let fresh: Vec<f64> =
                (0..n).map(|k| von_neumann_entropy(spec.ancilla(k))).collect::<Result<_>>()?;
            let untouched = |from: usize| fresh[from..].iter().sum::<f64>();
            let s0 = von_neumann_entropy(system_init)?;
            let (je, me) = if track_entropies { (Some(s0 + untouched(0)), Some(s0 + untouched(0))) } else { (None, None) };
            points.push(point(system_init.clone(), spec.ancilla(0), je, me)?);
            let mut joint = system_init.matrix().clone();
            for k in 0..n {
                joint = kron(&joint, spec.ancilla(k).matrix());
                let n_qubits = k + 2;
                apply_two_qubit(&mut joint, n_qubits, 0, k + 1, gate.matrix());
                let system = DensityOperator::from_valid(qubit_marginal(&joint, n_qubits, 0));
                let (je, me) = if track_entropies {
                    let marginals: f64 = (0..n_qubits).map(|q| matrix_entropy(&qubit_marginal(&joint, n_qubits, q))).sum();
                    (Some(matrix_entropy(&joint) + untouched(k + 1)), Some(marginals + untouched(k + 1)))
                } else {
                    (None, None)
                };
                points.push(point(system, spec.ancilla(k), je, me)?);
            }
            Some(DensityOperator::from_valid(joint))
        }
    };
    let record = TrajectoryRecord { points, homogeneous: spec.is_homogeneous() };
    let transcript = CollisionTranscript { system_initial: system_init.clone(), steps, joint_final };
    Ok((record, transcript))
}

/// Undoes the collisions on the retained joint state, applying inverse gates
/// in reverse transcript order, and returns the recovered system state.
pub fn reverse_collisions(transcript: &CollisionTranscript, spec: &ReservoirSpec) -> Result<DensityOperator> {
    let n = transcript.steps.len();
    if n == 0 {
        return Ok(transcript.system_initial.clone());
    }
    spec.check_joint_dim(n)?;
    if !transcript.indices_are_contiguous() {
        return Err(Error::InvalidParameter { name: "transcript index", value: n as f64 });
    }
    let joint = transcript.joint_final.as_ref().ok_or(Error::MissingJointState)?;
    let n_qubits = n + 1;
    if joint.dim() != 1 << n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: joint.dim() });
    }
    let mut m = joint.matrix().clone();
    for step in transcript.steps.iter().rev() {
        apply_two_qubit(&mut m, n_qubits, 0, step.index + 1, step.unitary.adjoint().matrix());
    }
    Ok(DensityOperator::from_valid(qubit_marginal(&m, n_qubits, 0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContractionRate {
    /// Least-squares slope of `ln(distance)` against collision index.
    Fitted { rate: f64, residual: f64 },
    /// Fewer than two distances above the convergence floor.
    Exact,
    /// Inhomogeneous reservoir: no common target to contract towards.
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceSummary {
    pub final_distance: f64,
    pub rate: ContractionRate,
}

pub fn convergence_report(trajectory: &TrajectoryRecord) -> Result<ConvergenceSummary> {
    let len = trajectory.points.len();
    if len < 3 {
        return Err(Error::TrajectoryTooShort { len, min: 3 });
    }
    let final_distance = trajectory.points[len - 1].trace_distance_to_ancilla;
    if !trajectory.homogeneous {
        return Ok(ConvergenceSummary { final_distance, rate: ContractionRate::Skipped });
    }
    let samples: Vec<(f64, f64)> = trajectory
        .distances()
        .enumerate()
        .filter(|&(_, d)| d > CONVERGED_DISTANCE)
        .map(|(k, d)| (k as f64, d.ln()))
        .collect();
    if samples.len() < 2 {
        return Ok(ConvergenceSummary { final_distance, rate: ContractionRate::Exact });
    }
    let m = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / m;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / m;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_x).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_x) * (s.1 - mean_y)).sum();
    let rate = sxy / sxx;
    let intercept = mean_y - rate * mean_x;
    let residual = (samples.iter().map(|s| (s.1 - intercept - rate * s.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(ConvergenceSummary { final_distance, rate: ContractionRate::Fitted { rate, residual } })
}
