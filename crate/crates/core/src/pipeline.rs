//! End-to-end drivers: full-system reference and embedded calculations.

use std::fmt;

use serde::Serialize;

use crate::basis::{build_basis, BasisSet};
use crate::embedding::{
    drop_environment_orbitals, environment_populations, run_embedded_scf, EmbeddedProblem, EmbeddingOptions,
    ReducedOrbitals, SameLevelEnergy,
};
use crate::error::Error;
use crate::geometry::Molecule;
use crate::integrals::IntegralSet;
use crate::localization::{partition, Localizer, Partition};
use crate::qubit::{jordan_wigner, mo_transform, second_quantize, term_count, MOIntegrals, QubitHamiltonian};
use crate::scf::{run_rhf, DenseEri, ScfOptions, ScfResult};
use crate::solver::{fci_oracle, ground_state, GroundState, Sector, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Geometry,
    Basis,
    Integrals,
    Scf,
    Partition,
    Embedding,
    Qubit,
    Solver,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit enum serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub type StageResult<T> = std::result::Result<T, StageError>;

trait AtStage<T> {
    fn at(self, stage: Stage) -> StageResult<T>;
}

impl<T> AtStage<T> for crate::error::Result<T> {
    fn at(self, stage: Stage) -> StageResult<T> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Global RHF reference and everything derived from the geometry alone.
pub struct FullSystem {
    pub molecule: Molecule,
    pub basis: BasisSet,
    pub integrals: IntegralSet,
    pub eri: DenseEri,
    pub scf: ScfResult,
}

impl FullSystem {
    pub fn new(molecule: Molecule) -> StageResult<Self> {
        let basis = build_basis(&molecule).at(Stage::Basis)?;
        let integrals = IntegralSet::compute(&basis, &molecule).at(Stage::Integrals)?;
        let eri = DenseEri::new(&integrals.eri);
        let scf = run_rhf(&molecule, &integrals, &ScfOptions::default()).at(Stage::Scf)?;
        Ok(Self {
            molecule,
            basis,
            integrals,
            eri,
            scf,
        })
    }

    pub fn n_ao(&self) -> usize {
        self.basis.len()
    }

    /// All canonical MOs, bare core Hamiltonian, nuclear repulsion as constant.
    pub fn mo_integrals(&self) -> MOIntegrals {
        mo_transform(
            &self.integrals.h_core,
            &self.integrals.eri,
            &self.scf.coefficients,
            self.scf.energy_nuclear,
        )
    }

    pub fn hamiltonian(&self) -> StageResult<QubitHamiltonian> {
        jordan_wigner(&second_quantize(&self.mo_integrals())).at(Stage::Qubit)
    }

    /// Exact ground state of the whole molecule through the qubit route.
    pub fn exact_ground_state(&self) -> StageResult<GroundState> {
        let h = self.hamiltonian()?;
        ground_state(&h, Some(Sector::singlet(self.molecule.n_electrons()))).at(Stage::Solver)
    }

    /// Determinant-space FCI, available for at most eight orbitals.
    pub fn fci(&self) -> StageResult<f64> {
        fci_oracle(&self.molecule, &self.basis, &self.integrals).at(Stage::Solver)
    }

    pub fn partition(&self, localizer: Localizer, active_atoms: &[usize], threshold: f64) -> StageResult<Partition> {
        partition(
            localizer,
            &self.scf,
            &self.integrals.overlap,
            &self.molecule,
            &self.basis,
            active_atoms,
            threshold,
        )
        .at(Stage::Partition)
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddingConfig {
    pub active_atoms: Vec<usize>,
    pub localizer: Localizer,
    pub threshold: f64,
    pub embedding: EmbeddingOptions,
    /// Diagonalize the embedded qubit Hamiltonian.
    pub solve: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            active_atoms: vec![0],
            localizer: Localizer::Spade,
            threshold: 0.95,
            embedding: EmbeddingOptions::default(),
            solve: true,
        }
    }
}

pub struct EmbeddingRun {
    pub partition: Partition,
    pub problem: EmbeddedProblem,
    pub scf: ScfResult,
    pub reduced: ReducedOrbitals,
    pub mo: MOIntegrals,
    pub hamiltonian: QubitHamiltonian,
    pub same_level: SameLevelEnergy,
    pub ground_state: Option<GroundState>,
}

impl EmbeddingRun {
    /// Classical constant added to the active-region expectation value.
    pub fn e_cls(&self) -> f64 {
        self.problem.wf_in_lowlevel_constant()
    }

    /// WF-in-HF total (the identity term of the Hamiltonian already carries `E_cls`).
    pub fn wf_total(&self) -> Option<f64> {
        self.ground_state.as_ref().map(|g| g.energy)
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits
    }

    pub fn term_count(&self) -> usize {
        term_count(&self.hamiltonian)
    }
}

pub fn run_embedding(full: &FullSystem, cfg: &EmbeddingConfig) -> StageResult<EmbeddingRun> {
    let partition = full.partition(cfg.localizer, &cfg.active_atoms, cfg.threshold)?;
    let mut problem = EmbeddedProblem::with_eri(&full.molecule, &full.integrals, &full.eri, &partition, &cfg.embedding)
        .at(Stage::Embedding)?;
    let scf = run_embedded_scf(&mut problem, &full.molecule, &full.integrals).at(Stage::Embedding)?;
    let same_level = problem.same_level_breakdown(&scf.density, &full.eri);
    let reduced = drop_environment_orbitals(&scf, &problem.gamma_env, &full.integrals.overlap, problem.n_env_orbitals)
        .at(Stage::Embedding)?;

    let mo = mo_transform(
        &problem.h_emb,
        &full.integrals.eri,
        &reduced.coefficients,
        problem.wf_in_lowlevel_constant(),
    );
    let hamiltonian = jordan_wigner(&second_quantize(&mo)).at(Stage::Qubit)?;
    let ground_state = if cfg.solve {
        if hamiltonian.n_qubits > MAX_QUBITS {
            return Err(StageError {
                stage: Stage::Solver,
                source: Error::SpaceTooLarge(format!("{} qubits", hamiltonian.n_qubits)),
            });
        }
        Some(ground_state(&hamiltonian, Some(Sector::singlet(problem.n_act_electrons))).at(Stage::Solver)?)
    } else {
        None
    };
    Ok(EmbeddingRun {
        partition,
        problem,
        scf,
        reduced,
        mo,
        hamiltonian,
        same_level,
        ground_state,
    })
}

/// Environment population of each occupied embedded orbital.
pub fn occupied_environment_populations(run: &EmbeddingRun, full: &FullSystem) -> Vec<f64> {
    environment_populations(&run.scf.occupied(), &run.problem.gamma_env, &full.integrals.overlap)
}
