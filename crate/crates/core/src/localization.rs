//! Occupied-orbital localization and the active/environment split.
//!
//! Two routes are provided:
//!
//! * [`spade_partition`] rotates the occupied orbitals by the right singular
//!   vectors of their active-atom block (in the Löwdin-orthogonalized AO basis)
//!   and cuts at the largest gap between successive singular values.
//! * [`population_localize`] followed by [`assign_by_population`]: Pipek–Mezey
//!   localization with Löwdin charges, then a population threshold on the
//!   active atoms.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::BasisSet;
use crate::error::{Error, Result};
use crate::geometry::Molecule;
use crate::linalg::{eigh, select_columns, sym_power};
use crate::scf::{density_matrix, ScfResult};

const GAP_TIE_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 1000;
pub const SWEEP_ANGLE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Localizer {
    Spade,
    Population,
}

impl std::str::FromStr for Localizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spade" => Ok(Self::Spade),
            "population" | "pm" => Ok(Self::Population),
            _ => Err(Error::Config(format!("unknown localizer `{s}` (expected spade or population)"))),
        }
    }
}

/// Occupied orbitals split into active (`K`) and environment (`L`) sets.
#[derive(Clone, Debug)]
pub struct Partition {
    /// Localized occupied coefficients, `K_ao × n_occ`.
    pub c_lmo: DMatrix<f64>,
    pub active: Vec<usize>,
    pub environment: Vec<usize>,
    pub gamma_act: DMatrix<f64>,
    pub gamma_env: DMatrix<f64>,
    pub active_atoms: Vec<usize>,
    pub active_aos: Vec<usize>,
    /// Fraction of each localized orbital's Löwdin population on the active atoms.
    pub active_populations: Vec<f64>,
    /// SPADE singular values (descending); empty for the population route.
    pub singular_values: Vec<f64>,
}

impl Partition {
    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn n_environment(&self) -> usize {
        self.environment.len()
    }

    pub fn gamma_total(&self) -> DMatrix<f64> {
        &self.gamma_act + &self.gamma_env
    }

    fn assemble(
        c_lmo: DMatrix<f64>,
        active: Vec<usize>,
        environment: Vec<usize>,
        active_atoms: Vec<usize>,
        active_aos: Vec<usize>,
        active_populations: Vec<f64>,
        singular_values: Vec<f64>,
    ) -> Self {
        let gamma_act = density_matrix(&select_columns(&c_lmo, &active));
        let gamma_env = density_matrix(&select_columns(&c_lmo, &environment));
        Self {
            c_lmo,
            active,
            environment,
            gamma_act,
            gamma_env,
            active_atoms,
            active_aos,
            active_populations,
            singular_values,
        }
    }
}

/// Sorted, deduplicated active atoms; must be a nonempty proper subset.
pub fn validate_active_atoms(active_atoms: &[usize], n_atoms: usize) -> Result<Vec<usize>> {
    let mut atoms = active_atoms.to_vec();
    atoms.sort_unstable();
    atoms.dedup();
    if atoms.is_empty() {
        return Err(Error::InvalidActiveAtoms("no active atoms given".into()));
    }
    if let Some(&bad) = atoms.iter().find(|&&a| a >= n_atoms) {
        return Err(Error::InvalidActiveAtoms(format!(
            "atom index {bad} out of range for a {n_atoms}-atom molecule"
        )));
    }
    if atoms.len() == n_atoms {
        return Err(Error::InvalidActiveAtoms(
            "all atoms are active, the environment would be empty".into(),
        ));
    }
    Ok(atoms)
}

/// Makes the largest-magnitude coefficient of every column positive.
fn fix_signs(c: &mut DMatrix<f64>) {
    for mut col in c.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
}

/// Löwdin populations `q_{A,i} = Σ_{μ∈A} (S^{1/2} C)_{μi}²`, atoms × orbitals.
pub fn lowdin_populations(c: &DMatrix<f64>, s: &DMatrix<f64>, basis: &BasisSet, n_atoms: usize) -> DMatrix<f64> {
    let cbar = sym_power(s, 0.5) * c;
    let mut q = DMatrix::zeros(n_atoms, c.ncols());
    for (mu, f) in basis.functions.iter().enumerate() {
        for i in 0..c.ncols() {
            q[(f.atom, i)] += cbar[(mu, i)].powi(2);
        }
    }
    q
}

fn active_fractions(q: &DMatrix<f64>, active_atoms: &[usize]) -> Vec<f64> {
    (0..q.ncols())
        .map(|i| {
            let total: f64 = q.column(i).sum();
            let act: f64 = active_atoms.iter().map(|&a| q[(a, i)]).sum();
            act / total
        })
        .collect()
}

/// Number of active orbitals at the largest gap between successive singular
/// values. `sigma` is descending with one entry per occupied orbital (entries
/// beyond the rank of the active block are zero). A single orbital is active.
pub fn spade_cut(sigma: &[f64]) -> Result<usize> {
    match sigma.len() {
        0 => return Err(Error::AmbiguousPartition("no occupied orbitals".into())),
        1 => return Ok(1),
        _ => {}
    }
    let max = sigma.iter().copied().fold(f64::MIN, f64::max);
    let min = sigma.iter().copied().fold(f64::MAX, f64::min);
    if max - min < GAP_TIE_TOL {
        return Err(Error::AmbiguousPartition(
            "all singular values are equal, the gap is undefined".into(),
        ));
    }
    let gaps: Vec<f64> = sigma.windows(2).map(|w| w[0] - w[1]).collect();
    let best = gaps.iter().copied().fold(f64::MIN, f64::max);
    let winners: Vec<usize> = (0..gaps.len()).filter(|&i| best - gaps[i] < GAP_TIE_TOL).collect();
    if winners.len() > 1 {
        return Err(Error::AmbiguousPartition(format!(
            "largest singular-value gap {best:.3e} is shared by cuts {:?}",
            winners.iter().map(|i| i + 1).collect::<Vec<_>>()
        )));
    }
    Ok(winners[0] + 1)
}

/// SPADE partition of the occupied space for the given active atoms.
pub fn spade_partition(
    scf: &ScfResult,
    s: &DMatrix<f64>,
    mol: &Molecule,
    basis: &BasisSet,
    active_atoms: &[usize],
) -> Result<Partition> {
    let active_atoms = validate_active_atoms(active_atoms, mol.n_atoms())?;
    let active_aos = basis.aos_on_atoms(&active_atoms);
    let c_occ = scf.occupied();
    let n_occ = c_occ.ncols();

    let cbar = sym_power(s, 0.5) * &c_occ;
    let mut block = DMatrix::zeros(active_aos.len(), n_occ);
    for (r, &mu) in active_aos.iter().enumerate() {
        block.set_row(r, &cbar.row(mu));
    }
    // Right singular vectors and σ² from the n_occ × n_occ Gram matrix; this
    // yields a complete rotation even when the block has fewer rows than columns.
    let (lambda, v) = eigh(&(block.transpose() * &block));
    let order: Vec<usize> = (0..n_occ).rev().collect();
    let sigma: Vec<f64> = order.iter().map(|&i| lambda[i].max(0.0).sqrt()).collect();
    let rotation = select_columns(&v, &order);

    let n_act = spade_cut(&sigma)?;
    let mut c_lmo = &c_occ * &rotation;
    fix_signs(&mut c_lmo);

    let q = lowdin_populations(&c_lmo, s, basis, mol.n_atoms());
    let fractions = active_fractions(&q, &active_atoms);
    Ok(Partition::assemble(
        c_lmo,
        (0..n_act).collect(),
        (n_act..n_occ).collect(),
        active_atoms,
        active_aos,
        fractions,
        sigma,
    ))
}

/// Pipek–Mezey objective `Σ_i Σ_A q_{A,i}²` with Löwdin charges.
pub fn pipek_mezey_objective(c: &DMatrix<f64>, s: &DMatrix<f64>, basis: &BasisSet, n_atoms: usize) -> f64 {
    lowdin_populations(c, s, basis, n_atoms).iter().map(|q| q * q).sum()
}

/// Localizes the occupied orbitals by Jacobi sweeps maximizing the sum of
/// squared Löwdin atomic populations. Virtual orbitals are not touched.
pub fn population_localize(
    scf: &ScfResult,
    s: &DMatrix<f64>,
    mol: &Molecule,
    basis: &BasisSet,
) -> Result<DMatrix<f64>> {
    let c_occ = scf.occupied();
    let n_occ = c_occ.ncols();
    let n_atoms = mol.n_atoms();
    let mut cbar = sym_power(s, 0.5) * &c_occ;
    let mut u = DMatrix::<f64>::identity(n_occ, n_occ);

    let atom_aos: Vec<Vec<usize>> = (0..n_atoms).map(|a| basis.aos_on_atoms(&[a])).collect();
    let q = |cbar: &DMatrix<f64>, aos: &[usize], i: usize, j: usize| -> f64 {
        aos.iter().map(|&mu| cbar[(mu, i)] * cbar[(mu, j)]).sum()
    };

    let mut converged = n_occ < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut max_angle: f64 = 0.0;
        for i in 0..n_occ {
            for j in (i + 1)..n_occ {
                let (mut a, mut b) = (0.0, 0.0);
                for aos in &atom_aos {
                    let qij = q(&cbar, aos, i, j);
                    let d = q(&cbar, aos, i, i) - q(&cbar, aos, j, j);
                    a += qij * qij - 0.25 * d * d;
                    b += qij * d;
                }
                if a * a + b * b < 1e-30 {
                    continue;
                }
                let angle = 0.25 * b.atan2(-a);
                max_angle = max_angle.max(angle.abs());
                let (sn, cs) = angle.sin_cos();
                for m in [&mut cbar, &mut u] {
                    for r in 0..m.nrows() {
                        let (x, y) = (m[(r, i)], m[(r, j)]);
                        m[(r, i)] = cs * x + sn * y;
                        m[(r, j)] = -sn * x + cs * y;
                    }
                }
            }
        }
        converged = max_angle < SWEEP_ANGLE_TOL;
    }
    if !converged {
        return Err(Error::LocalizationNotConverged(MAX_SWEEPS));
    }
    let mut c_lmo = c_occ * u;
    fix_signs(&mut c_lmo);
    Ok(c_lmo)
}

/// Assigns localized orbitals whose active-atom population fraction exceeds
/// `threshold` to the active set.
pub fn assign_by_population(
    c_lmo: &DMatrix<f64>,
    s: &DMatrix<f64>,
    mol: &Molecule,
    basis: &BasisSet,
    active_atoms: &[usize],
    threshold: f64,
) -> Result<Partition> {
    let active_atoms = validate_active_atoms(active_atoms, mol.n_atoms())?;
    let active_aos = basis.aos_on_atoms(&active_atoms);
    let q = lowdin_populations(c_lmo, s, basis, mol.n_atoms());
    let fractions = active_fractions(&q, &active_atoms);
    let (active, environment): (Vec<usize>, Vec<usize>) =
        (0..c_lmo.ncols()).partition(|&i| fractions[i] > threshold);
    if active.is_empty() {
        return Err(Error::EmptyActiveSet(threshold));
    }
    Ok(Partition::assemble(
        c_lmo.clone(),
        active,
        environment,
        active_atoms,
        active_aos,
        fractions,
        Vec::new(),
    ))
}

/// Runs the chosen localizer end to end.
pub fn partition(
    localizer: Localizer,
    scf: &ScfResult,
    s: &DMatrix<f64>,
    mol: &Molecule,
    basis: &BasisSet,
    active_atoms: &[usize],
    threshold: f64,
) -> Result<Partition> {
    match localizer {
        Localizer::Spade => spade_partition(scf, s, mol, basis, active_atoms),
        Localizer::Population => {
            validate_active_atoms(active_atoms, mol.n_atoms())?;
            let c_lmo = population_localize(scf, s, mol, basis)?;
            assign_by_population(&c_lmo, s, mol, basis, active_atoms, threshold)
        }
    }
}
