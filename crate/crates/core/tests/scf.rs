mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qembed::basis::build_basis;
use qembed::integrals::IntegralSet;
use qembed::linalg::{frobenius, trace_product};
use qembed::scf::{density_matrix, electronic_energy, run_rhf, DenseEri, ScfOptions};
use qembed::{Error, Molecule, ScfResult};

use common::reference;

fn rhf(mol: &Molecule) -> (IntegralSet, ScfResult) {
    let ints = IntegralSet::compute(&build_basis(mol).unwrap(), mol).unwrap();
    let scf = run_rhf(mol, &ints, &ScfOptions::default()).unwrap();
    (ints, scf)
}

#[test]
fn total_energies_match_reference() {
    for name in common::SUITE {
        let f = common::full(name);
        let want = reference::lookup(&reference::E_RHF, name);
        assert!((f.scf.energy_total - want).abs() < 1e-9, "{name}: {} vs {want}", f.scf.energy_total);
        assert!(f.scf.converged);
    }
    let he = Molecule::from_bohr(&[("He", [0.0; 3])], 0).unwrap();
    for (mol, want) in [
        (he, reference::HE_RHF),
        (common::heh_cation(), reference::HEH_CATION_RHF),
        (common::h3_cation(), reference::H3_CATION_RHF),
    ] {
        let e = rhf(&mol).1.energy_total;
        assert!((e - want).abs() < 1e-9, "{e} vs {want}");
    }
}

#[test]
fn water_density_and_orbital_energies() {
    let f = common::full("h2o");
    for i in 0..7 {
        for j in 0..7 {
            let d = f.scf.density[(i, j)] - reference::H2O_DENSITY[i][j];
            assert!(d.abs() < 1e-6, "γ[{i},{j}] off by {d:e}");
        }
        let de = f.scf.orbital_energies[i] - reference::H2O_ORBITAL_ENERGIES[i];
        assert!(de.abs() < 1e-6, "ε[{i}] off by {de:e}");
    }
}

#[test]
fn hydrogen_molecule_orbitals() {
    let f = common::full("h2");
    let eps = &f.scf.orbital_energies;
    assert!(eps[0] < 0.0 && eps[1] > 0.0);
    for (e, want) in eps.iter().zip(reference::H2_ORBITAL_ENERGIES) {
        assert!((e - want).abs() < 1e-8);
    }
}

#[test]
fn converged_invariants() {
    for name in common::SUITE {
        let f = common::full(name);
        let (s, scf) = (&f.integrals.overlap, &f.scf);
        let c = &scf.coefficients;
        let n = s.nrows();
        let ortho = c.transpose() * s * c - DMatrix::identity(n, n);
        assert!(ortho.amax() < 1e-10, "{name} orthonormality");

        let n_el = f.molecule.n_electrons() as f64;
        assert!((trace_product(&scf.density, s) - n_el).abs() < 1e-10, "{name} trace");

        let idem = &scf.density * s * &scf.density - &scf.density * 2.0;
        assert!(idem.amax() < 1e-10, "{name} idempotency");

        let comm = &scf.fock * &scf.density * s - s * &scf.density * &scf.fock;
        assert!(frobenius(&comm) < 1e-6, "{name} commutator {}", frobenius(&comm));

        let eps = DMatrix::from_diagonal(&scf.orbital_energies);
        let resid = &scf.fock * c - s * c * eps;
        assert!(resid.amax() < 1e-6, "{name} Roothaan residual");

        assert_eq!(scf.energy_total, scf.energy_electronic + scf.energy_nuclear);
        let e = electronic_energy(&scf.density, &f.integrals.h_core, &scf.fock);
        assert!((e - scf.energy_electronic).abs() < 1e-12);

        let t = &scf.trace;
        assert!(t.len() >= 3);
        let tail: Vec<f64> = t[t.len() - 3..].iter().map(|r| r.energy).collect();
        assert!(tail.iter().all(|e| (e - tail[2]).abs() < 1e-9), "{name} {tail:?}");
    }
}

#[test]
fn core_override_with_bare_core_is_identical() {
    let mol = common::molecule("h2o");
    let (ints, plain) = rhf(&mol);
    let opts = ScfOptions {
        h_override: Some(ints.h_core.clone()),
        ..ScfOptions::default()
    };
    let over = run_rhf(&mol, &ints, &opts).unwrap();
    assert_eq!(plain.energy_total, over.energy_total);
    assert_eq!(plain.density, over.density);
    assert_eq!(plain.iterations, over.iterations);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let mol = common::molecule("h2o");
    let ints = IntegralSet::compute(&build_basis(&mol).unwrap(), &mol).unwrap();
    let opts = ScfOptions {
        max_iterations: 2,
        ..ScfOptions::default()
    };
    assert!(matches!(run_rhf(&mol, &ints, &opts), Err(Error::ScfNotConverged { iterations: 2, .. })));
}

fn sym(n: usize, v: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_row_slice(n, n, &v[..n * n]);
    (&m + m.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn two_electron_matrix_is_linear(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        v1 in prop::collection::vec(-1.0f64..1.0, 49),
        v2 in prop::collection::vec(-1.0f64..1.0, 49),
    ) {
        let f = common::full("h2o");
        let (g1, g2) = (sym(7, &v1), sym(7, &v2));
        let eri = DenseEri::new(&f.integrals.eri);
        let lhs = eri.two_electron(&(&g1 * a + &g2 * b));
        let rhs = eri.two_electron(&g1) * a + eri.two_electron(&g2) * b;
        prop_assert!((&lhs - &rhs).amax() < 1e-11);
        prop_assert!((&lhs - lhs.transpose()).amax() == 0.0);
    }

    #[test]
    fn density_trace_counts_electrons(
        raw in prop::collection::vec(-1.0f64..1.0, 49),
        n_occ in 1usize..=7,
    ) {
        let f = common::full("h2o");
        let s = &f.integrals.overlap;
        let m = DMatrix::from_row_slice(7, 7, &raw) + DMatrix::identity(7, 7) * 3.0;
        // S-orthonormalize the columns by Löwdin: C = M (MᵀSM)^{-1/2}
        let c = &m * qembed::linalg::sym_power(&(m.transpose() * s * &m), -0.5);
        let gamma = density_matrix(&c.columns(0, n_occ).into_owned());
        prop_assert!((trace_product(&gamma, s) - 2.0 * n_occ as f64).abs() < 1e-9);
        prop_assert!((&gamma * s * &gamma - &gamma * 2.0).amax() < 1e-9);
    }
}
