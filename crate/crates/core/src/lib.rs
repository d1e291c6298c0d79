//! Projection-based embedding of a wave-function active region inside a
//! restricted Hartree-Fock environment.
//!
//! The pipeline runs a global RHF calculation in the STO-3G basis, localizes
//! and partitions the occupied orbitals, builds the embedded core Hamiltonian
//! (embedding potential plus a mu-shift or Huzinaga projector), solves the
//! embedded SCF, and emits the active-region Hamiltonian as Jordan-Wigner
//! qubit operators together with the classical energy corrections.

pub mod basis;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod integrals;
pub mod linalg;
pub mod localization;
pub mod pipeline;
pub mod qubit;
pub mod scf;
pub mod solver;

pub use basis::BasisSet;
pub use embedding::{EmbeddedProblem, ProjectorKind};
pub use error::{Error, Result};
pub use geometry::Molecule;
pub use integrals::IntegralSet;
pub use localization::Partition;
pub use qubit::QubitHamiltonian;
pub use scf::ScfResult;
pub use solver::GroundState;
