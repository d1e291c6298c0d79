use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown element symbol `{0}`")]
    UnknownElement(String),

    #[error("atom-count header says {expected} atoms but {found} were read")]
    AtomCountMismatch { expected: usize, found: usize },

    #[error("no STO-3G parameters for element `{0}` (supported: H through Ar)")]
    UnsupportedElement(String),

    #[error("nuclei {0} and {1} coincide")]
    CoincidentNuclei(usize, usize),

    #[error("closed-shell treatment needs an even electron count, got {0}")]
    OddElectronCount(i64),

    #[error("Boys function called with negative argument {0}")]
    NegativeBoysArgument(f64),

    #[error("overlap matrix is numerically singular (all eigenvalues below {0:e})")]
    SingularOverlap(f64),

    #[error("SCF did not converge after {iterations} iterations (|FDS-SDF| = {error:e}, dE = {delta_e:e})")]
    ScfNotConverged {
        iterations: usize,
        error: f64,
        delta_e: f64,
    },

    #[error("invalid active atom selection: {0}")]
    InvalidActiveAtoms(String),

    #[error("ambiguous partition: {0}")]
    AmbiguousPartition(String),

    #[error("no occupied orbital exceeds the active population threshold {0}; try a lower threshold")]
    EmptyActiveSet(f64),

    #[error("orbital localization did not converge after {0} sweeps")]
    LocalizationNotConverged(usize),

    #[error("projection failure: {0}")]
    ProjectionFailure(String),

    #[error("invalid fermion operator: {0}")]
    InvalidOperator(String),

    #[error("operator is not Hermitian: imaginary residue {0:e} on Pauli term {1}")]
    NonHermitian(f64, String),

    #[error("Hamiltonian has complex matrix elements (Pauli term {0} carries an odd number of Y factors)")]
    ComplexHamiltonian(String),

    #[error("requested sector (n = {n_electrons}, sz = {sz}) is empty on {n_qubits} qubits")]
    EmptySector {
        n_qubits: usize,
        n_electrons: usize,
        sz: i32,
    },

    #[error("eigensolver did not converge (residual {0:e})")]
    EigensolverNotConverged(f64),

    #[error("problem too large: {0}")]
    SpaceTooLarge(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
