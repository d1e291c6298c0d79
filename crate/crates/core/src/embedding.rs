//! Embedded core Hamiltonian, environment projectors, the embedded SCF and the
//! classical energy terms that accompany an embedded calculation.
//!
//! With `G(γ)` the closed-shell Coulomb/exchange build, the pieces are
//!
//! * `V_emb = G(γ_act + γ_env) − G(γ_act)`
//! * `P_μ = μ S γ_env S` or `P_huz = −½ (F γ_env S + S γ_env F)`
//! * `h_emb = h_core + V_emb + P`
//!
//! The Huzinaga projector depends on the Fock matrix, so it is rebuilt from the
//! live Fock matrix every SCF iteration; the μ projector is fixed.

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{nuclear_repulsion, Molecule};
use crate::integrals::IntegralSet;
use crate::linalg::trace_product;
use crate::localization::Partition;
use crate::scf::{run_rhf, DenseEri, ScfOptions, ScfResult};

pub const DEFAULT_MU: f64 = 1e6;
/// Occupied embedded orbitals with more environment population than this are
/// a hard failure.
pub const PROJECTION_FAILURE: f64 = 0.1;
/// Expected ceiling on environment population of occupied embedded orbitals.
pub const PROJECTION_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorKind {
    Mu,
    Huzinaga,
}

impl std::str::FromStr for ProjectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mu" => Ok(Self::Mu),
            "huzinaga" => Ok(Self::Huzinaga),
            _ => Err(Error::Config(format!("unknown projector `{s}` (expected huzinaga or mu)"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EmbeddingOptions {
    pub projector: ProjectorKind,
    pub mu: f64,
    /// Keep the first-order density correction in the same-level energy.
    /// Turning it off is only useful to see how large the term is.
    pub first_order_correction: bool,
}

impl Default for EmbeddingOptions {
    fn default() -> Self {
        Self {
            projector: ProjectorKind::Huzinaga,
            mu: DEFAULT_MU,
            first_order_correction: true,
        }
    }
}

/// `V_emb = G(γ_act + γ_env) − G(γ_act)`
pub fn embedding_potential(gamma_act: &DMatrix<f64>, gamma_env: &DMatrix<f64>, eri: &DenseEri) -> DMatrix<f64> {
    eri.two_electron(&(gamma_act + gamma_env)) - eri.two_electron(gamma_act)
}

/// `μ S γ_env S`
pub fn mu_projector(gamma_env: &DMatrix<f64>, s: &DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    s * gamma_env * s * mu
}

/// `−½ (F γ_env S + S γ_env F)`
pub fn huzinaga_projector(f: &DMatrix<f64>, gamma_env: &DMatrix<f64>, s: &DMatrix<f64>) -> DMatrix<f64> {
    (f * gamma_env * s + s * gamma_env * f) * -0.5
}

/// HF two-electron energy `g(γ) = ½ tr(γ G(γ))`.
fn g_energy(gamma: &DMatrix<f64>, eri: &DenseEri) -> f64 {
    0.5 * trace_product(gamma, &eri.two_electron(gamma))
}

/// Environment population `½ cᵀ S γ_env S c` of each column of `c`.
pub fn environment_populations(c: &DMatrix<f64>, gamma_env: &DMatrix<f64>, s: &DMatrix<f64>) -> Vec<f64> {
    let m = s * gamma_env * s;
    c.column_iter()
        .map(|col| 0.5 * (col.transpose() * &m * col)[(0, 0)])
        .collect()
}

/// Same-level energy with its components.
#[derive(Clone, Debug, Serialize)]
pub struct SameLevelEnergy {
    /// `tr(γ_emb h_core) + g(γ_emb)`
    pub active: f64,
    pub e_env: f64,
    pub g_cross: f64,
    /// `tr((γ_emb − γ_act)(V_emb + P))`
    pub first_order_correction: f64,
    pub e_nuc: f64,
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct EmbeddedProblem {
    pub h_core: DMatrix<f64>,
    /// `h_core + V_emb + P`
    pub h_emb: DMatrix<f64>,
    pub projector: DMatrix<f64>,
    pub v_emb: DMatrix<f64>,
    pub gamma_act: DMatrix<f64>,
    pub gamma_env: DMatrix<f64>,
    pub n_act_electrons: usize,
    pub n_env_orbitals: usize,
    /// `tr(γ_env h) + g(γ_env)`
    pub e_env: f64,
    /// Nonadditive `g(γ_act, γ_env) = g(γ_act + γ_env) − g(γ_act) − g(γ_env)`.
    pub g_cross: f64,
    /// `tr(γ_act (V_emb + P))`
    pub e_correction: f64,
    pub e_nuc: f64,
    pub projector_kind: ProjectorKind,
    pub mu: f64,
    pub first_order_correction: bool,
}

impl EmbeddedProblem {
    pub fn new(mol: &Molecule, ints: &IntegralSet, partition: &Partition, opts: &EmbeddingOptions) -> Result<Self> {
        let eri = DenseEri::new(&ints.eri);
        Self::with_eri(mol, ints, &eri, partition, opts)
    }

    pub fn with_eri(
        mol: &Molecule,
        ints: &IntegralSet,
        eri: &DenseEri,
        partition: &Partition,
        opts: &EmbeddingOptions,
    ) -> Result<Self> {
        let s = &ints.overlap;
        let h = &ints.h_core;
        let gamma_act = partition.gamma_act.clone();
        let gamma_env = partition.gamma_env.clone();

        let n_act_f = trace_product(s, &gamma_act);
        let n_act = n_act_f.round();
        if (n_act_f - n_act).abs() > 1e-6 || n_act as i64 % 2 != 0 {
            return Err(Error::ProjectionFailure(format!(
                "active density holds {n_act_f:.8} electrons, not an even integer"
            )));
        }

        let v_emb = embedding_potential(&gamma_act, &gamma_env, eri);
        let projector = match opts.projector {
            ProjectorKind::Mu => mu_projector(&gamma_env, s, opts.mu),
            ProjectorKind::Huzinaga => {
                let f = h + eri.two_electron(&(&gamma_act + &gamma_env));
                huzinaga_projector(&f, &gamma_env, s)
            }
        };
        let e_env = trace_product(&gamma_env, h) + g_energy(&gamma_env, eri);
        let g_cross = g_energy(&(&gamma_act + &gamma_env), eri) - g_energy(&gamma_act, eri) - g_energy(&gamma_env, eri);

        let mut problem = Self {
            h_core: h.clone(),
            h_emb: h.clone(),
            projector,
            v_emb,
            gamma_act,
            gamma_env,
            n_act_electrons: n_act as usize,
            n_env_orbitals: partition.n_environment(),
            e_env,
            g_cross,
            e_correction: 0.0,
            e_nuc: nuclear_repulsion(mol)?,
            projector_kind: opts.projector,
            mu: opts.mu,
            first_order_correction: opts.first_order_correction,
        };
        problem.refresh_derived();
        Ok(problem)
    }

    fn refresh_derived(&mut self) {
        let vp = &self.v_emb + &self.projector;
        self.h_emb = &self.h_core + &vp;
        self.e_correction = trace_product(&self.gamma_act, &vp);
    }

    /// `tr(γ_emb h) + g(γ_emb) + E_env + g_cross + tr((γ_emb − γ_act)(V_emb + P)) + E_nuc`
    pub fn same_level_energy(&self, gamma_emb: &DMatrix<f64>, eri: &DenseEri) -> f64 {
        self.same_level_breakdown(gamma_emb, eri).total
    }

    pub fn same_level_breakdown(&self, gamma_emb: &DMatrix<f64>, eri: &DenseEri) -> SameLevelEnergy {
        let active = trace_product(gamma_emb, &self.h_core) + g_energy(gamma_emb, eri);
        let first_order_correction = if self.first_order_correction {
            trace_product(&(gamma_emb - &self.gamma_act), &(&self.v_emb + &self.projector))
        } else {
            0.0
        };
        SameLevelEnergy {
            active,
            e_env: self.e_env,
            g_cross: self.g_cross,
            first_order_correction,
            e_nuc: self.e_nuc,
            total: active + self.e_env + self.g_cross + first_order_correction + self.e_nuc,
        }
    }

    /// Constant added to `⟨Ψ|H_emb|Ψ⟩` to give the total energy:
    /// `E_env + g_cross − tr(γ_act (V_emb + P)) + E_nuc`.
    pub fn wf_in_lowlevel_constant(&self) -> f64 {
        self.e_env + self.g_cross - self.e_correction + self.e_nuc
    }
}

/// Self-consistent solution of the active system in the embedded core
/// Hamiltonian, starting from `γ_act`. For the Huzinaga projector the final
/// projector (from the converged Fock matrix) is written back into `problem`.
pub fn run_embedded_scf(problem: &mut EmbeddedProblem, mol: &Molecule, ints: &IntegralSet) -> Result<ScfResult> {
    let s = ints.overlap.clone();
    let gamma_env = problem.gamma_env.clone();
    let huzinaga = move |f: &DMatrix<f64>| huzinaga_projector(f, &gamma_env, &s);

    let h_base = &problem.h_core + &problem.v_emb;
    let opts = match problem.projector_kind {
        ProjectorKind::Mu => ScfOptions {
            h_override: Some(&h_base + &problem.projector),
            n_electrons_override: Some(problem.n_act_electrons),
            initial_density: Some(problem.gamma_act.clone()),
            ..Default::default()
        },
        ProjectorKind::Huzinaga => ScfOptions {
            h_override: Some(h_base.clone()),
            n_electrons_override: Some(problem.n_act_electrons),
            initial_density: Some(problem.gamma_act.clone()),
            f_extra: Some(&huzinaga),
            ..Default::default()
        },
    };
    let result = run_rhf(mol, ints, &opts)?;

    if problem.projector_kind == ProjectorKind::Huzinaga {
        // `result.fock` already contains P; rebuild h_base + G(γ_emb).
        let g = DenseEri::new(&ints.eri).two_electron(&result.density);
        problem.projector = huzinaga(&(&h_base + g));
        problem.refresh_derived();
    }

    let pops = environment_populations(&result.occupied(), &problem.gamma_env, &ints.overlap);
    let worst = pops.iter().copied().fold(0.0_f64, f64::max);
    if worst > PROJECTION_FAILURE {
        return Err(Error::ProjectionFailure(format!(
            "occupied embedded orbital carries environment population {worst:.4}"
        )));
    }
    if worst > PROJECTION_TOLERANCE {
        warn!("occupied embedded orbital carries environment population {worst:.2e}");
    }
    Ok(result)
}

/// Embedded MOs with the environment-dominated orbitals removed.
#[derive(Clone, Debug)]
pub struct ReducedOrbitals {
    /// `K × M_act` coefficients, occupied first.
    pub coefficients: DMatrix<f64>,
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub removed_populations: Vec<f64>,
    pub n_occ: usize,
}

/// Drops the `n_env` embedded orbitals with the largest environment population.
pub fn drop_environment_orbitals(
    scf_emb: &ScfResult,
    gamma_env: &DMatrix<f64>,
    s: &DMatrix<f64>,
    n_env: usize,
) -> Result<ReducedOrbitals> {
    let c = &scf_emb.coefficients;
    let pops = environment_populations(c, gamma_env, s);
    let mut order: Vec<usize> = (0..c.ncols()).collect();
    order.sort_by(|&a, &b| pops[b].total_cmp(&pops[a]));
    let mut removed: Vec<usize> = order[..n_env].to_vec();
    removed.sort_unstable();
    if let Some(&i) = removed.iter().find(|&&i| pops[i] < 0.5) {
        return Err(Error::ProjectionFailure(format!(
            "orbital {i} selected for removal has environment population {:.4} < 0.5",
            pops[i]
        )));
    }
    if let Some(&i) = removed.iter().find(|&&i| i < scf_emb.n_occ) {
        return Err(Error::ProjectionFailure(format!(
            "occupied embedded orbital {i} looks like an environment orbital"
        )));
    }
    let kept: Vec<usize> = (0..c.ncols()).filter(|i| !removed.contains(i)).collect();
    Ok(ReducedOrbitals {
        coefficients: crate::linalg::select_columns(c, &kept),
        removed_populations: removed.iter().map(|&i| pops[i]).collect(),
        kept,
        removed,
        n_occ: scf_emb.n_occ,
    })
}
