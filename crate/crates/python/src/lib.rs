//! Python bindings: molecules, the RHF reference, projection embedding and
//! qubit Hamiltonians.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qembed_core::cli::exit_code;
use qembed_core::embedding::EmbeddingOptions;
use qembed_core::geometry::{parse_xyz, BOHR_IN_ANGSTROM};
use qembed_core::localization::Localizer;
use qembed_core::pipeline::{run_embedding, EmbeddingConfig, EmbeddingRun, FullSystem, StageError};
use qembed_core::qubit::term_count;
use qembed_core::solver::{ground_state, Sector};
use qembed_core::{Error, ProjectorKind};

fn py_err(err: Error) -> PyErr {
    let msg = err.to_string();
    if exit_code(&err) == 2 {
        PyValueError::new_err(msg)
    } else {
        PyRuntimeError::new_err(msg)
    }
}

fn stage_err(err: StageError) -> PyErr {
    let msg = err.to_string();
    if exit_code(&err.source) == 2 {
        PyValueError::new_err(msg)
    } else {
        PyRuntimeError::new_err(msg)
    }
}

#[pyclass(name = "Molecule", module = "qembed", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMolecule {
    inner: qembed_core::Molecule,
}

#[pymethods]
impl PyMolecule {
    /// `atoms` is a list of `(symbol, (x, y, z))`; `unit` is "angstrom" or "bohr".
    #[new]
    #[pyo3(signature = (atoms, charge = 0, unit = "angstrom"))]
    fn new(atoms: Vec<(String, [f64; 3])>, charge: i32, unit: &str) -> PyResult<Self> {
        let scale = match unit.to_ascii_lowercase().as_str() {
            "angstrom" => 1.0 / BOHR_IN_ANGSTROM,
            "bohr" => 1.0,
            other => return Err(PyValueError::new_err(format!("unknown unit {other:?}"))),
        };
        let scaled: Vec<(&str, [f64; 3])> = atoms.iter().map(|(s, p)| (s.as_str(), p.map(|x| x * scale))).collect();
        let inner = qembed_core::Molecule::from_bohr(&scaled, charge).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, charge = 0))]
    fn from_xyz(text: &str, charge: i32) -> PyResult<Self> {
        let mol = parse_xyz(text).map_err(py_err)?;
        let inner = if charge == 0 { mol } else { mol.with_charge(charge).map_err(py_err)? };
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (path, charge = 0))]
    fn read_xyz(path: &str, charge: i32) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Self::from_xyz(&text, charge)
    }

    #[getter]
    fn n_atoms(&self) -> usize {
        self.inner.n_atoms()
    }

    #[getter]
    fn n_electrons(&self) -> usize {
        self.inner.n_electrons()
    }

    #[getter]
    fn charge(&self) -> i32 {
        self.inner.charge()
    }

    #[getter]
    fn symbols(&self) -> Vec<String> {
        self.inner.atoms().iter().map(|a| a.symbol.clone()).collect()
    }

    /// Positions in Bohr.
    #[getter]
    fn positions(&self) -> Vec<[f64; 3]> {
        self.inner.atoms().iter().map(|a| a.position).collect()
    }

    fn bond_length(&self, a: usize, b: usize) -> PyResult<f64> {
        let n = self.inner.n_atoms();
        if a >= n || b >= n {
            return Err(PyValueError::new_err(format!("atom index out of range for {n} atoms")));
        }
        Ok(self.inner.bond_length(a, b))
    }

    /// Copy with atom `moving` placed `r_angstrom` from atom `fixed`.
    fn with_bond_length(&self, fixed: usize, moving: usize, r_angstrom: f64) -> PyResult<Self> {
        let inner = self
            .inner
            .with_bond_length(fixed, moving, r_angstrom / BOHR_IN_ANGSTROM)
            .map_err(py_err)?;
        Ok(Self { inner })
    }

    #[pyo3(signature = (comment = ""))]
    fn to_xyz(&self, comment: &str) -> String {
        self.inner.to_xyz(comment)
    }

    fn __repr__(&self) -> String {
        format!(
            "Molecule({} atoms, charge {}, {} electrons)",
            self.inner.n_atoms(),
            self.inner.charge(),
            self.inner.n_electrons()
        )
    }
}

#[pyclass(name = "QubitHamiltonian", module = "qembed", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyQubitHamiltonian {
    inner: qembed_core::QubitHamiltonian,
}

#[pymethods]
impl PyQubitHamiltonian {
    #[staticmethod]
    fn from_labels(n_qubits: usize, terms: Vec<(String, f64)>) -> PyResult<Self> {
        let refs: Vec<(&str, f64)> = terms.iter().map(|(l, c)| (l.as_str(), *c)).collect();
        let inner = qembed_core::QubitHamiltonian::from_labels(n_qubits, &refs).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = qembed_core::QubitHamiltonian::from_json(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    /// Coefficient of the identity term.
    #[getter]
    fn constant(&self) -> f64 {
        self.inner.constant()
    }

    /// Pauli term count, identity included.
    #[getter]
    fn term_count(&self) -> usize {
        term_count(&self.inner)
    }

    /// `(label, coefficient)` pairs sorted by label.
    #[getter]
    fn terms(&self) -> Vec<(String, f64)> {
        let n = self.inner.n_qubits;
        self.inner.terms.iter().map(|(p, c)| (p.label(n), *c)).collect()
    }

    /// Lowest eigenvalue, optionally restricted to the singlet-like
    /// `S_z = 0` sector with `n_electrons` electrons.
    #[pyo3(signature = (n_electrons = None))]
    fn ground_state_energy(&self, n_electrons: Option<usize>) -> PyResult<f64> {
        let g = ground_state(&self.inner, n_electrons.map(Sector::singlet)).map_err(py_err)?;
        Ok(g.energy)
    }

    fn __len__(&self) -> usize {
        self.inner.terms.len()
    }

    fn __repr__(&self) -> String {
        format!("QubitHamiltonian({} qubits, {} terms)", self.inner.n_qubits, self.inner.terms.len())
    }
}

#[pyclass(name = "Embedding", module = "qembed", frozen)]
struct PyEmbedding {
    run: EmbeddingRun,
}

#[pymethods]
impl PyEmbedding {
    #[getter]
    fn n_active_orbitals(&self) -> usize {
        self.run.partition.n_active()
    }

    #[getter]
    fn n_environment_orbitals(&self) -> usize {
        self.run.partition.n_environment()
    }

    #[getter]
    fn n_active_electrons(&self) -> usize {
        self.run.problem.n_act_electrons
    }

    #[getter]
    fn singular_values(&self) -> Vec<f64> {
        self.run.partition.singular_values.clone()
    }

    /// HF-in-HF total energy.
    #[getter]
    fn same_level_energy(&self) -> f64 {
        self.run.same_level.total
    }

    /// Classical constant carried by the identity term.
    #[getter]
    fn e_cls(&self) -> f64 {
        self.run.e_cls()
    }

    /// WF-in-HF total energy, or `None` when the solver was skipped.
    #[getter]
    fn wf_energy(&self) -> Option<f64> {
        self.run.wf_total()
    }

    #[getter]
    fn embedded_scf_iterations(&self) -> usize {
        self.run.scf.iterations
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.run.n_qubits()
    }

    #[getter]
    fn term_count(&self) -> usize {
        self.run.term_count()
    }

    #[getter]
    fn hamiltonian(&self) -> PyQubitHamiltonian {
        PyQubitHamiltonian {
            inner: self.run.hamiltonian.clone(),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Embedding(|K|={}, |L|={}, {} qubits)",
            self.n_active_orbitals(),
            self.n_environment_orbitals(),
            self.n_qubits()
        )
    }
}

/// A molecule with its integrals and converged RHF reference.
#[pyclass(name = "System", module = "qembed", frozen)]
struct PySystem {
    full: FullSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    fn new(molecule: &PyMolecule) -> PyResult<Self> {
        let full = FullSystem::new(molecule.inner.clone()).map_err(stage_err)?;
        Ok(Self { full })
    }

    #[getter]
    fn molecule(&self) -> PyMolecule {
        PyMolecule {
            inner: self.full.molecule.clone(),
        }
    }

    #[getter]
    fn n_ao(&self) -> usize {
        self.full.n_ao()
    }

    #[getter]
    fn n_occupied(&self) -> usize {
        self.full.scf.n_occ
    }

    #[getter]
    fn rhf_energy(&self) -> f64 {
        self.full.scf.energy_total
    }

    #[getter]
    fn nuclear_repulsion(&self) -> f64 {
        self.full.scf.energy_nuclear
    }

    #[getter]
    fn orbital_energies(&self) -> Vec<f64> {
        self.full.scf.orbital_energies.iter().copied().collect()
    }

    #[getter]
    fn scf_iterations(&self) -> usize {
        self.full.scf.iterations
    }

    /// Full-molecule Jordan–Wigner Hamiltonian over canonical MOs.
    fn hamiltonian(&self) -> PyResult<PyQubitHamiltonian> {
        let inner = self.full.hamiltonian().map_err(stage_err)?;
        Ok(PyQubitHamiltonian { inner })
    }

    /// Determinant-space FCI energy (at most eight orbitals).
    fn fci_energy(&self) -> PyResult<f64> {
        self.full.fci().map_err(stage_err)
    }

    /// Exact ground state through the qubit Hamiltonian.
    fn exact_energy(&self) -> PyResult<f64> {
        Ok(self.full.exact_ground_state().map_err(stage_err)?.energy)
    }

    #[pyo3(signature = (
        active_atoms,
        localizer = "spade",
        threshold = 0.95,
        projector = "huzinaga",
        mu = 1e6,
        first_order_correction = true,
        solve = true,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn embed(
        &self,
        active_atoms: Vec<usize>,
        localizer: &str,
        threshold: f64,
        projector: &str,
        mu: f64,
        first_order_correction: bool,
        solve: bool,
    ) -> PyResult<PyEmbedding> {
        let cfg = EmbeddingConfig {
            active_atoms,
            localizer: localizer.parse::<Localizer>().map_err(py_err)?,
            threshold,
            embedding: EmbeddingOptions {
                projector: projector.parse::<ProjectorKind>().map_err(py_err)?,
                mu,
                first_order_correction,
            },
            solve,
        };
        let run = run_embedding(&self.full, &cfg).map_err(stage_err)?;
        Ok(PyEmbedding { run })
    }
}

#[pymodule]
#[pyo3(name = "qembed")]
fn qembed_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMolecule>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_class::<PyQubitHamiltonian>()?;
    m.add("BOHR_IN_ANGSTROM", BOHR_IN_ANGSTROM)?;
    Ok(())
}
