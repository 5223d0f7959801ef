use std::f64::consts::FRAC_PI_4;

use arrowlab_core::arrow::{entropy_balance, near_product_state, search_entropy_decreasing_unitary, UnitarySearchConfig};
use arrowlab_core::collision::{partial_swap_unitary, run_collisions, ReservoirSpec, SimulationMode};
use arrowlab_core::fluctuation::{crooks_check, damping_heat, TwoPointProtocol};
use arrowlab_core::quantum::{
    gibbs_state, mutual_information, partial_trace, purify, tensor_product, von_neumann_entropy,
};
use arrowlab_core::random::{haar_random_unitary, random_density_operator, random_hamiltonian, RandomSource};
use arrowlab_core::{BipartitionLayout, DensityOperator, Hamiltonian, Subsystem};

#[test]
fn purification_entropy_matches_marginal() {
    let mut rng = RandomSource::new(21);
    for d in [2, 3, 4] {
        let rho = random_density_operator(d, d, &mut rng).unwrap();
        let psi = purify(&rho).unwrap();
        let layout = BipartitionLayout::new(d, d).unwrap();
        let s = von_neumann_entropy(&rho).unwrap();
        assert!(von_neumann_entropy(&psi).unwrap().abs() < 1e-10);
        assert!((mutual_information(&psi, layout).unwrap() - 2.0 * s).abs() < 1e-10);
        let back = partial_trace(&psi, layout, Subsystem::System).unwrap();
        assert!((von_neumann_entropy(&back).unwrap() - s).abs() < 1e-10);
    }
}

#[test]
fn product_inputs_never_lower_local_entropy() {
    let root = RandomSource::new(99);
    let layout = BipartitionLayout::new(2, 3).unwrap();
    for i in 0..200 {
        let mut rng = root.split(i);
        let rho = tensor_product(
            &random_density_operator(2, 1 + rng.below(2), &mut rng).unwrap(),
            &random_density_operator(3, 1 + rng.below(3), &mut rng).unwrap(),
        );
        let u = haar_random_unitary(6, &mut rng).unwrap();
        let r = entropy_balance(&rho, layout, &u).unwrap();
        assert!(r.product_input);
        assert!(r.sum >= -1e-9 && (r.sum - r.mutual_info_final).abs() <= 1e-9);
    }
}

#[test]
fn optimizer_output_reproduces_through_balance() {
    let rho = near_product_state(0.3).unwrap();
    let layout = BipartitionLayout::qubits();
    let found = search_entropy_decreasing_unitary(&rho, layout, &UnitarySearchConfig { seed: 5, ..Default::default() })
        .unwrap();
    let again = entropy_balance(&rho, layout, &found.unitary).unwrap();
    assert!(found.decreased);
    assert!((again.sum - found.achieved_sum).abs() <= 1e-12);
}

#[test]
fn collisions_thermalize_to_gibbs_ancilla() {
    let h = Hamiltonian::diagonal(&[0.0, 1.0]);
    let ancilla = gibbs_state(&h, 0.5).unwrap();
    let spec = ReservoirSpec::homogeneous(ancilla.clone(), 10).unwrap();
    let (trajectory, _) = run_collisions(
        &DensityOperator::basis(2, 1),
        &spec,
        &partial_swap_unitary(FRAC_PI_4),
        SimulationMode::Reduced,
    )
    .unwrap();
    let last = &trajectory.points.last().unwrap().system_state;
    let heat = damping_heat(last, &h, 0.5).unwrap();
    let first = damping_heat(&DensityOperator::basis(2, 1), &h, 0.5).unwrap();
    assert!(heat < 1e-5 && first > heat);
    assert!(trajectory.distances().collect::<Vec<_>>().windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn undriven_protocol_produces_no_entropy() {
    let mut rng = RandomSource::new(4);
    let h = random_hamiltonian(3, &mut rng).unwrap();
    let id = arrowlab_core::UnitaryOperator::identity(3);
    let report = crooks_check(&TwoPointProtocol::new(h.clone(), h, id, 2.0).unwrap()).unwrap();
    assert!(report.entropy_production.abs() < 1e-12);
    assert!((report.jarzynski_lhs - 1.0).abs() < 1e-12);
    assert!(report.entries.iter().all(|e| e.forward < 1e-14 || e.work.abs() < 1e-12));
}
