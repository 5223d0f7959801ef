//! Acceptance criteria 1 to 9. Each prints one PASS/FAIL line; the binary
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, LN_2};
use std::process::Command;

use arrowlab::experiments::{correlated_search_input, pauli_x_protocol, random_heat_flow_setup, random_protocol};
use arrowlab_core::arrow::{
    classically_correlated_state, decorrelating_unitary, entropy_balance, near_product_state, schrodinger_check,
    search_entropy_decreasing_unitary, RelativeArrow, UnitarySearchConfig,
};
use arrowlab_core::collision::{
    convergence_report, partial_swap_unitary, reverse_collisions, run_collisions, ContractionRate, ReservoirSpec,
    SimulationMode,
};
use arrowlab_core::fluctuation::{
    backward_distribution, crooks_check, entropy_production_identity, forward_distribution, heat_flow,
    measurement_symmetry_check,
};
use arrowlab_core::linalg::CMatrix;
use arrowlab_core::quantum::{tensor_product, trace_distance};
use arrowlab_core::random::{haar_random_unitary, random_density_operator, RandomSource};
use arrowlab_core::{BipartitionLayout, DensityOperator};
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// Independent binary entropy in nats.
fn h2(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn entropy_balance_identity() -> Outcome {
    let root = RandomSource::new(1001);
    let (mut worst_identity, mut worst_sum) = (0.0_f64, f64::INFINITY);
    for i in 0..1000u64 {
        let d = 2 + (i % 3) as usize;
        let mut rng = root.split(i);
        let layout = BipartitionLayout::new(d, d).unwrap();
        let rho = tensor_product(
            &random_density_operator(d, d, &mut rng).unwrap(),
            &random_density_operator(d, d, &mut rng).unwrap(),
        );
        let u = haar_random_unitary(d * d, &mut rng).unwrap();
        let r = entropy_balance(&rho, layout, &u).unwrap();
        worst_identity = worst_identity.max((r.sum - r.mutual_info_final).abs());
        worst_sum = worst_sum.min(r.sum);
    }
    outcome(
        worst_identity <= 1e-9 && worst_sum >= -1e-9,
        format!("1000 products, max |sum - I'| = {worst_identity:.3e}, min sum = {worst_sum:.3e}"),
    )
}

fn main_result_construction() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in [0.01, 0.05, 0.1, 0.3] {
        let r = entropy_balance(&near_product_state(eps).unwrap(), BipartitionLayout::qubits(), &decorrelating_unitary())
            .unwrap();
        let predicted = -(2.0 * h2(eps / 2.0) - h2(eps));
        let err = (r.sum - predicted).abs();
        ok &= r.mutual_info_final <= 1e-10 && err <= 1e-9;
        if eps == 0.1 {
            ok &= (r.sum + 0.071947).abs() <= 1e-6;
        }
        parts.push(format!("eps={eps}: sum={:.6} I'={:.1e} err={err:.1e}", r.sum, r.mutual_info_final));
    }
    outcome(ok, parts.join("; "))
}

fn corollary_via_optimizer() -> Outcome {
    let layout = BipartitionLayout::qubits();
    let root = RandomSource::new(3003);
    let random: Vec<bool> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let trial = root.split(i);
            let rho = correlated_search_input(layout, &mut trial.clone()).unwrap();
            let config = UnitarySearchConfig { seed: trial.split(0).seed(), ..UnitarySearchConfig::default() };
            search_entropy_decreasing_unitary(&rho, layout, &config).unwrap().achieved_sum < 0.0
        })
        .collect();
    let decreased = random.iter().filter(|&&d| d).count();

    let near = near_product_state(0.1).unwrap();
    let near_feasible = -(2.0 * h2(0.05) - h2(0.1));
    let analytic = [(classically_correlated_state(), -LN_2), (near, near_feasible)];
    let analytic_hits: Vec<usize> = analytic
        .iter()
        .map(|(rho, feasible)| {
            (0..100u64)
                .into_par_iter()
                .filter(|&seed| {
                    let config = UnitarySearchConfig { seed, ..UnitarySearchConfig::default() };
                    let s = search_entropy_decreasing_unitary(rho, layout, &config).unwrap().achieved_sum;
                    s < 0.0 && s <= feasible + 1e-6
                })
                .count()
        })
        .collect();
    outcome(
        decreased >= 95 && analytic_hits.iter().all(|&h| h == 100),
        format!(
            "random decreased {decreased}/100; classical reached -ln2 {}/100; near-product reached {near_feasible:.6} {}/100",
            analytic_hits[0], analytic_hits[1]
        ),
    )
}

fn schrodinger_violation() -> Outcome {
    let r = entropy_balance(&near_product_state(0.1).unwrap(), BipartitionLayout::qubits(), &decorrelating_unitary())
        .unwrap();
    let arrow = schrodinger_check(&r);
    outcome(
        r.ds_s < 0.0 && r.ds_r > 0.0 && arrow == RelativeArrow::AntiAligned,
        format!("dS_S = {:.6}, dS_R = {:.6}, {}", r.ds_s, r.ds_r, arrow.label()),
    )
}

fn crooks_and_jarzynski() -> Outcome {
    let root = RandomSource::new(5005);
    let (mut ratio, mut jarzynski, mut kl) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..100u64 {
        let proto = random_protocol(4, 1.0, &mut root.split(i)).unwrap();
        let report = crooks_check(&proto).unwrap();
        ratio = ratio.max(report.max_relative_deviation);
        // Z_f / Z_i straight from the spectra
        let z = |e: &[f64]| e.iter().map(|x| (-x).exp()).sum::<f64>();
        let expected = z(proto.h_final().eigenvalues()) / z(proto.h_initial().eigenvalues());
        jarzynski = jarzynski.max((report.jarzynski_lhs - expected).abs() / expected);
        let forward = forward_distribution(&proto).unwrap();
        let backward = backward_distribution(&proto).unwrap();
        let (divergence, sigma) = entropy_production_identity(&forward, &backward, 1.0, report.delta_f).unwrap();
        kl = kl.max((divergence - sigma).abs());
    }
    let example = crooks_check(&pauli_x_protocol()).unwrap();
    let x_ratio = example.entries.iter().find(|e| e.n == 0 && e.m == 1).and_then(|e| e.ratio).unwrap();
    let x_production = example.entropy_production;
    outcome(
        ratio <= 1e-9
            && jarzynski <= 1e-9
            && kl <= 1e-9
            && (x_ratio - 3.0).abs() <= 1e-12
            && (x_production - 0.5 * 3f64.ln()).abs() <= 1e-12
            && (x_production - 0.549306).abs() <= 5e-7,
        format!(
            "ratio dev {ratio:.1e}, Jarzynski dev {jarzynski:.1e}, KL dev {kl:.1e}; Pauli-X ratio {x_ratio}, production {x_production:.6}"
        ),
    )
}

/// Rank-`k` projector onto the span of the first `k` columns of a Haar
/// unitary.
fn random_projector(d: usize, k: usize, rng: &mut RandomSource) -> CMatrix {
    let u = haar_random_unitary(d, rng).unwrap();
    let cols = u.matrix().columns(0, k);
    cols * cols.adjoint()
}

fn measurement_symmetry() -> Outcome {
    let root = RandomSource::new(6006);
    let mut worst = 0.0_f64;
    for i in 0..1000u64 {
        let mut rng = root.split(i);
        let d = 2 + (i % 3) as usize;
        let kp = 1 + rng.below(d);
        let kq = 1 + rng.below(d);
        let p = random_projector(d, kp, &mut rng);
        let q = random_projector(d, kq, &mut rng);
        let u = haar_random_unitary(d, &mut rng).unwrap();
        let (f, b) = measurement_symmetry_check(&p, &q, &u).unwrap();
        worst = worst.max((f - b).abs());
    }
    outcome(worst <= 1e-12, format!("1000 instances, max |tr(QUPU†) - tr(PU†QU)| = {worst:.1e}"))
}

fn collision_machine() -> Outcome {
    let system = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
    let spec = ReservoirSpec::homogeneous(DensityOperator::diagonal(&[0.8, 0.2]).unwrap(), 8).unwrap();
    let gate = partial_swap_unitary(FRAC_PI_4);
    let (trajectory, _) = run_collisions(&system, &spec, &gate, SimulationMode::Reduced).unwrap();
    let rate = match convergence_report(&trajectory).unwrap().rate {
        ContractionRate::Fitted { rate, .. } => rate,
        other => panic!("expected a fitted rate, got {other:?}"),
    };
    let (_, transcript) =
        run_collisions(&system, &spec, &gate, SimulationMode::Joint { track_entropies: false }).unwrap();
    let recovered = trace_distance(&reverse_collisions(&transcript, &spec).unwrap(), &system).unwrap();
    let order = [3, 0, 6, 1, 7, 2, 5, 4];
    let shuffled =
        trace_distance(&reverse_collisions(&transcript.reordered(&order), &spec).unwrap(), &system).unwrap();
    outcome(
        (rate - 0.5f64.ln()).abs() <= 1e-6 && recovered <= 1e-9 && shuffled > 0.01,
        format!("rate {rate:.9} (ln 1/2 = {:.9}), reversal {recovered:.1e}, shuffled {shuffled:.3}", 0.5f64.ln()),
    )
}

fn heat_flow_direction() -> Outcome {
    let root = RandomSource::new(8008);
    let (mut hotter, mut clausius, mut sum, mut commutator) = (f64::NEG_INFINITY, 0.0_f64, f64::INFINITY, 0.0_f64);
    let mut undefined = 0;
    for i in 0..50u64 {
        let setup = random_heat_flow_setup(&mut root.split(i)).unwrap();
        assert_ne!(setup.beta_s, setup.beta_r);
        let r = heat_flow(&setup).unwrap();
        hotter = hotter.max(r.hotter_energy_change);
        sum = sum.min(r.balance.sum);
        commutator = commutator.max(r.interaction_commutator);
        match r.temperatures {
            Some(t) => clausius = clausius.max((t.clausius_lhs - r.balance.sum).abs()),
            None => undefined += 1,
        }
    }
    outcome(
        hotter <= 0.0 && clausius <= 1e-9 && sum >= -1e-9 && commutator <= 1e-12,
        format!(
            "50 trials, max hotter dU = {hotter:.3e}, max |dU/T sum - dS sum| = {clausius:.1e}, min dS sum = {sum:.3e}, undefined T in {undefined}"
        ),
    )
}

fn cli_rows(args: &[&str], dir: &std::path::Path, tag: &str) -> Vec<u8> {
    let out = dir.join(format!("{tag}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_arrowlab"))
        .args(args)
        .args(["--format", "csv", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(out).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["crooks", "--seed", "7", "--beta", "1.0"],
        &["balance", "--trials", "100", "--dims", "2x2", "--seed", "1"],
        &["collide", "--seed", "4"],
    ];
    let mut ok = true;
    for (k, args) in runs.iter().enumerate() {
        let a = cli_rows(args, dir.path(), &format!("{k}a"));
        let b = cli_rows(args, dir.path(), &format!("{k}b"));
        ok &= a == b && !a.is_empty();
    }
    let other = cli_rows(&["crooks", "--seed", "8", "--beta", "1.0"], dir.path(), "other");
    ok &= other != cli_rows(runs[0], dir.path(), "again");
    outcome(ok, "crooks, balance and collide rows byte-identical across repeated runs".to_string())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 entropy-balance identity", entropy_balance_identity),
        ("2 main-result construction", main_result_construction),
        ("3 corollary via optimizer", corollary_via_optimizer),
        ("4 Schrodinger violation exhibit", schrodinger_violation),
        ("5 Crooks/Jarzynski", crooks_and_jarzynski),
        ("6 measurement symmetry", measurement_symmetry),
        ("7 collision machine", collision_machine),
        ("8 heat flow", heat_flow_direction),
        ("9 determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, criterion) in criteria {
        let o = criterion();
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
