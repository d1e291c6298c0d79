#![allow(dead_code)]

use std::path::PathBuf;

use qembed::geometry::{parse_xyz, BOHR_IN_ANGSTROM};
use qembed::pipeline::FullSystem;
use qembed::Molecule;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn molecule(name: &str) -> Molecule {
    let text = std::fs::read_to_string(data_path(&format!("{name}.xyz"))).unwrap();
    parse_xyz(&text).unwrap()
}

pub fn full(name: &str) -> FullSystem {
    FullSystem::new(molecule(name)).unwrap()
}

/// He–H⁺ at 0.772 Å, a two-orbital two-electron system.
pub fn heh_cation() -> Molecule {
    let r = 0.772 / BOHR_IN_ANGSTROM;
    Molecule::from_bohr(&[("He", [0.0; 3]), ("H", [0.0, 0.0, r])], 1).unwrap()
}

/// Linear H₃⁺: three orbitals, six qubits.
pub fn h3_cation() -> Molecule {
    let r = 0.85 / BOHR_IN_ANGSTROM;
    Molecule::from_bohr(&[("H", [0.0; 3]), ("H", [0.0, 0.0, r]), ("H", [0.0, 0.0, 2.0 * r])], 1).unwrap()
}

pub const SUITE: [&str; 4] = ["h2", "lih", "h2o", "ch4"];

/// Reference values from an independent PySCF 2.14 run (same geometries,
/// Cartesian STO-3G, `conv_tol = 1e-12`).
pub mod reference {
    pub const E_NUC: [(&str, f64); 4] = [
        ("h2", 0.713753993688),
        ("lih", 0.995380044366),
        ("h2o", 9.189533762935),
        ("ch4", 13.472463920203),
    ];
    pub const E_RHF: [(&str, f64); 4] = [
        ("h2", -1.116684387085),
        ("lih", -7.862026959394),
        ("h2o", -74.963023138463),
        ("ch4", -39.726810102864),
    ];
    pub const E_FCI: [(&str, f64); 4] = [
        ("h2", -1.137270174661),
        ("lih", -7.882403410336),
        ("h2o", -75.012578241091),
        ("ch4", -39.805680876781),
    ];
    pub const HE_RHF: f64 = -2.807783957540;
    pub const HEH_CATION_RHF: f64 = -2.841382489834;
    pub const HEH_CATION_FCI: f64 = -2.851024029977;
    pub const H3_CATION_RHF: f64 = -1.205549797600;
    pub const H3_CATION_FCI: f64 = -1.234701960036;
    pub const H_ATOM_HCORE: f64 = -0.466581849557;
    pub const H2_ORBITAL_ENERGIES: [f64; 2] = [-0.577974807208, 0.669698669415];
    pub const H2O_ORBITAL_ENERGIES: [f64; 7] = [
        -20.241863045046, -1.268161902882, -0.617564542702, -0.453021688222, -0.391236770272, 0.605171883414,
        0.741597532772,
    ];
    /// Converged RHF density matrix of H₂O.
    pub const H2O_DENSITY: [[f64; 7]; 7] = [
        [2.10627783585, -0.446153553876, 0.0, 0.0, -0.1085881916, -0.028356551514, -0.028356551514],
        [-0.446153553876, 1.967805339165, 0.0, 0.0, 0.617578522359, -0.034313614884, -0.034313614884],
        [0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.735631663229, 0.0, 0.539841973437, -0.539841973437],
        [-0.1085881916, 0.617578522359, 0.0, 0.0, 1.239425215931, -0.472915725931, -0.472915725931],
        [-0.028356551514, -0.034313614884, 0.0, 0.539841973437, -0.472915725931, 0.601271650359, -0.191052472846],
        [-0.028356551514, -0.034313614884, 0.0, -0.539841973437, -0.472915725931, -0.191052472846, 0.601271650359],
    ];

    pub fn lookup(table: &[(&str, f64)], name: &str) -> f64 {
        table.iter().find(|(n, _)| *n == name).unwrap().1
    }
}
