use std::f64::consts::{FRAC_PI_2, PI};

use spinpair_core::encoding::{
    dfs_basis, effective_qubit_field, leakage_witness, logical_operators_from_restriction, logical_product_basis,
    logical_qubit_basis,
};
use spinpair_core::gates::{
    build_cnot_from_nand, build_nand_encoded, build_nand_encoded_with, build_nand_physical, build_u0, calibration,
    cnot_matrix, nand_matrix, two_spin_basis, verify_controlled_phase, GateSequence,
};
use spinpair_core::linalg::{compare_up_to_global_phase, wrap_angle, ComplexMatrix};
use spinpair_core::spin::{exchange_gate, heisenberg, zeeman, DeviceConfig, SpinAxis};
use spinpair_core::{leakage, Error};

fn product_basis() -> spinpair_core::SubspaceBasis {
    logical_product_basis(4, &[(1, 2), (3, 4)]).unwrap()
}

#[test]
fn physical_nand_matches_target() {
    let u = build_nand_physical();
    assert!(u.is_unitary(1e-12));
    assert!(compare_up_to_global_phase(&nand_matrix(), &u).unwrap().fidelity >= 1.0 - 1e-10);
    let sq = &u * &u;
    assert!(
        compare_up_to_global_phase(&ComplexMatrix::identity(4), &sq)
            .unwrap()
            .fidelity
            >= 1.0 - 1e-10
    );
}

#[test]
fn cnot_from_ideal_nand() {
    let c = build_cnot_from_nand(&nand_matrix()).unwrap();
    assert!(c.is_unitary(1e-12));
    assert!(compare_up_to_global_phase(&cnot_matrix(), &c).unwrap().fidelity >= 1.0 - 1e-10);
    let from_eq = build_cnot_from_nand(&build_nand_physical()).unwrap();
    assert!(compare_up_to_global_phase(&cnot_matrix(), &from_eq).unwrap().fidelity >= 1.0 - 1e-10);
}

#[test]
fn free_evolution_sets_relative_phase() {
    let device = DeviceConfig::demo();
    assert!(
        build_u0(&device, 0.0)
            .unwrap()
            .max_abs_diff(&ComplexMatrix::identity(16))
            < 1e-14
    );
    for phi in [0.3, FRAC_PI_2, PI, -2.0, 5.0] {
        let r = product_basis().restrict(&build_u0(&device, phi).unwrap()).unwrap();
        let off: f64 = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| r.get(i, j).norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-12);
        // |0⟩_Q runs ahead of |1⟩_Q by φ on each qubit.
        for k in [1, 2] {
            let rel = (r.get(0, 0) / r.get(k, k)).arg();
            assert!(wrap_angle(rel - phi).abs() < 1e-10, "φ = {phi}, state {k}: {rel}");
        }
    }
}

#[test]
fn free_evolution_needs_zeeman_difference() {
    let device = DeviceConfig::demo().with_delta_g(0.0).unwrap();
    assert_eq!(build_u0(&device, 1.0).unwrap_err(), Error::DegenerateZeeman);
    assert!(build_u0(&device, 0.0).is_ok());
}

#[test]
fn encoded_nand_two_exchanges_exact() {
    let seq = GateSequence::encoded_nand((2, 3));
    assert_eq!(seq.total_exchange_ops(), 2);
    assert!(seq.total_exchange_ops() < 19);
    let u = build_nand_encoded(&DeviceConfig::demo()).unwrap();
    let report = verify_controlled_phase(&u, &product_basis()).unwrap();
    assert!(report.is_block_diagonal);
    assert!(report.leakage <= 1e-10);
    assert!(report.fidelity_vs_nand >= 1.0 - 1e-10, "{report:?}");
    assert!(report.residual_local_z.0.abs() < 1e-9 && report.residual_local_z.1.abs() < 1e-9);
}

#[test]
fn encoded_nand_stays_in_zero_magnetization_sector() {
    let u = build_nand_encoded(&DeviceConfig::si_ge()).unwrap();
    let sector = dfs_basis(4, 0.0).unwrap();
    assert_eq!(sector.dim(), 6);
    assert!(leakage(&u, &sector).unwrap() < 1e-12);
}

#[test]
fn encoded_nand_bond_choice() {
    let device = DeviceConfig::demo();
    let cal = calibration();
    let good = build_nand_encoded_with(&device, (1, 4), cal).unwrap();
    assert!(
        verify_controlled_phase(&good, &product_basis())
            .unwrap()
            .fidelity_vs_nand
            >= 1.0 - 1e-10
    );
    let bad = build_nand_encoded_with(&device, (1, 3), cal).unwrap();
    let report = verify_controlled_phase(&bad, &product_basis()).unwrap();
    assert!(report.fidelity_vs_nand < 0.99, "{report:?}");
}

#[test]
fn physical_and_encoded_reports_agree() {
    let phys = verify_controlled_phase(&build_nand_physical(), &two_spin_basis()).unwrap();
    let enc = verify_controlled_phase(&build_nand_encoded(&DeviceConfig::demo()).unwrap(), &product_basis()).unwrap();
    assert!((phys.z_corrected_fidelity - enc.z_corrected_fidelity).abs() < 1e-10);
    assert!((phys.fidelity_vs_nand - enc.fidelity_vs_nand).abs() < 1e-10);
}

#[test]
fn identity_is_half_of_nand() {
    let report = verify_controlled_phase(&ComplexMatrix::identity(16), &product_basis()).unwrap();
    assert!(report.is_block_diagonal);
    assert!((report.fidelity_vs_nand - 0.5).abs() < 1e-12);
}

#[test]
fn product_basis_lies_in_dfs() {
    let sector = dfs_basis(4, 0.0).unwrap();
    let basis = product_basis();
    assert_eq!(basis.labels(), ["0101", "0110", "1001", "1010"]);
    assert!(basis.labels().iter().all(|l| sector.contains_label(l)));
    assert_eq!(
        logical_product_basis(2, &[(1, 2)]).unwrap().labels(),
        logical_qubit_basis(2, (1, 2)).unwrap().labels()
    );
}

#[test]
fn leakage_witnesses() {
    let w = leakage_witness((2, 3), "1010").unwrap();
    assert_eq!(w.out_label(), Some("1100"));
    assert!((w.amplitude().re - 0.5).abs() < 1e-12 && w.amplitude().im.abs() < 1e-12);
    assert!(leakage_witness((1, 2), "0110").unwrap().dominant().is_none());
    assert_eq!(leakage_witness((2, 3), "0101").unwrap().out_label(), Some("0011"));
    let h23 = exchange_gate(4, 2, 3, 0.8).unwrap();
    assert!(leakage(&h23, &product_basis()).unwrap() > 0.1);
}

#[test]
fn effective_field_against_eigen_splitting() {
    for (g1, g2, b, j) in [
        (1.0, 1.5, 1.0, 0.0),
        (1.3, 1.3, 2.0, 0.7),
        (1.565, 2.0, 1.2, 0.4),
        (2.0, 1.1, 0.5, -0.9),
    ] {
        let f = effective_qubit_field(g1, g2, b, j).unwrap();
        assert!((f.h_x - j).abs() < 1e-12);
        assert!((f.h_z - (g1 - g2) * b).abs() < 1e-12);
        let device = DeviceConfig::single_qubit(g1, g2, b);
        let h = &zeeman(&device) + &heisenberg(2, 1, 2).unwrap().scale_real(j);
        let r = logical_qubit_basis(2, (1, 2)).unwrap().restrict(&h).unwrap();
        let tr = r.trace().re / 2.0;
        let det = (r.get(0, 0) * r.get(1, 1) - r.get(0, 1) * r.get(1, 0)).re;
        let split = 2.0 * (tr * tr - det).max(0.0).sqrt();
        assert!((split - f.magnitude()).abs() < 1e-10);
    }
}

#[test]
fn uniform_g_gives_commuting_single_axis_control() {
    let device = DeviceConfig::single_qubit(1.4, 1.4, 1.0);
    let basis = logical_qubit_basis(2, (1, 2)).unwrap();
    let z = basis.restrict(&zeeman(&device)).unwrap();
    assert!((z.get(0, 0) - z.get(1, 1)).norm() < 1e-12 && z.get(0, 1).norm() < 1e-12);
    let gens: Vec<ComplexMatrix> = [0.3, 1.1, 2.5, -0.8]
        .iter()
        .map(|&t| {
            let e = exchange_gate(2, 1, 2, t).unwrap();
            let free = spinpair_core::expm_hermitian(&zeeman(&device), t).unwrap();
            basis.restrict(&(&free * &e)).unwrap()
        })
        .collect();
    for a in &gens {
        for b in &gens {
            assert!(a.commutator(b).max_abs() < 1e-12);
        }
    }
    let exchange = logical_operators_from_restriction(2, (1, 2), &heisenberg(2, 1, 2).unwrap()).unwrap();
    assert_eq!(exchange.axis, Some(SpinAxis::X));
}
