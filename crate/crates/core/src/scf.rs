//! Closed-shell Roothaan–Hall SCF with DIIS extrapolation.

use std::collections::VecDeque;

use log::debug;
use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{nuclear_repulsion, Molecule};
use crate::integrals::{EriTensor, IntegralSet};
use crate::linalg::{eigh, frobenius, trace_product};

/// Overlap eigenvalues below this are dropped by canonical orthogonalization.
pub const CANONICAL_DROP: f64 = 1e-7;

/// Callback adding a density- or Fock-dependent term to the Fock matrix.
/// It receives `h + G(γ)` for the current iterate and returns the extra term.
pub type FockExtra<'a> = dyn Fn(&DMatrix<f64>) -> DMatrix<f64> + Sync + 'a;

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub error_norm: f64,
}

#[derive(Clone, Debug)]
pub struct ScfResult {
    /// MO coefficients, one column per orbital.
    pub coefficients: DMatrix<f64>,
    /// Orbital energies, ascending.
    pub orbital_energies: DVector<f64>,
    /// `γ = 2 C_occ C_occᵀ`
    pub density: DMatrix<f64>,
    /// Fock matrix built from `density`, including any extra term.
    pub fock: DMatrix<f64>,
    /// Core Hamiltonian the run used (after any override).
    pub h_core: DMatrix<f64>,
    pub energy_electronic: f64,
    pub energy_nuclear: f64,
    pub energy_total: f64,
    pub n_occ: usize,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

impl ScfResult {
    pub fn occupied(&self) -> DMatrix<f64> {
        self.coefficients.columns(0, self.n_occ).into_owned()
    }
}

pub struct ScfOptions<'a> {
    pub max_iterations: usize,
    pub energy_tol: f64,
    pub error_tol: f64,
    pub diis_size: usize,
    /// Virtual-orbital level shift in Hartree; off when `None`.
    pub level_shift: Option<f64>,
    /// Replaces `h_core` (the embedded core Hamiltonian goes here).
    pub h_override: Option<DMatrix<f64>>,
    pub n_electrons_override: Option<usize>,
    pub f_extra: Option<&'a FockExtra<'a>>,
    /// Starting density; the core-Hamiltonian guess is used otherwise.
    pub initial_density: Option<DMatrix<f64>>,
}

impl Default for ScfOptions<'_> {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            energy_tol: 1e-10,
            error_tol: 1e-8,
            diis_size: 8,
            level_shift: None,
            h_override: None,
            n_electrons_override: None,
            f_extra: None,
            initial_density: None,
        }
    }
}

/// `γ = 2 C_occ C_occᵀ`
pub fn density_matrix(c_occ: &DMatrix<f64>) -> DMatrix<f64> {
    c_occ * c_occ.transpose() * 2.0
}

/// Dense `n⁴` ERI copy used by the Fock builds of one SCF run.
pub struct DenseEri {
    n: usize,
    data: Vec<f64>,
}

impl DenseEri {
    pub fn new(eri: &EriTensor) -> Self {
        Self {
            n: eri.n(),
            data: eri.to_dense(),
        }
    }

    /// `G_{μν} = Σ_{λσ} γ_{λσ} [(μν|σλ) − ½ (μλ|σν)]`
    pub fn two_electron(&self, gamma: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut g = DMatrix::zeros(n, n);
        for mu in 0..n {
            for nu in 0..=mu {
                let mut coulomb = 0.0;
                let mut exchange = 0.0;
                let base_j = (mu * n + nu) * n * n;
                for lam in 0..n {
                    let base_k = (mu * n + lam) * n * n;
                    for sig in 0..n {
                        let d = gamma[(lam, sig)];
                        coulomb += d * self.data[base_j + sig * n + lam];
                        exchange += d * self.data[base_k + sig * n + nu];
                    }
                }
                let v = coulomb - 0.5 * exchange;
                g[(mu, nu)] = v;
                g[(nu, mu)] = v;
            }
        }
        g
    }
}

/// Two-electron part `G(γ)` of the closed-shell Fock matrix.
pub fn two_electron_matrix(gamma: &DMatrix<f64>, eri: &EriTensor) -> DMatrix<f64> {
    DenseEri::new(eri).two_electron(gamma)
}

/// `F = h + G(γ)`
pub fn fock_build(gamma: &DMatrix<f64>, h: &DMatrix<f64>, eri: &EriTensor) -> DMatrix<f64> {
    h + two_electron_matrix(gamma, eri)
}

/// `½ tr(γ (h + F))`
pub fn electronic_energy(gamma: &DMatrix<f64>, h: &DMatrix<f64>, f: &DMatrix<f64>) -> f64 {
    0.5 * (trace_product(gamma, h) + trace_product(gamma, f))
}

/// Orthogonalizer `X` with `Xᵀ S X = I`: symmetric `S^{-1/2}` when `S` is well
/// conditioned, canonical (dropping near-null directions) otherwise.
pub fn orthogonalizer(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (w, u) = eigh(s);
    if w[0] >= CANONICAL_DROP {
        let d = DVector::from_iterator(w.len(), w.iter().map(|x| x.powf(-0.5)));
        return Ok(&u * DMatrix::from_diagonal(&d) * u.transpose());
    }
    let keep: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= CANONICAL_DROP).collect();
    if keep.is_empty() {
        return Err(Error::SingularOverlap(CANONICAL_DROP));
    }
    let mut x = DMatrix::zeros(s.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        x.set_column(c, &(u.column(i) / w[i].sqrt()));
    }
    Ok(x)
}

/// Solves `F C = S C ε`, returning `(C, ε)` with ε ascending.
pub fn solve_roothaan(f: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let x = orthogonalizer(s)?;
    Ok(solve_with(f, &x))
}

fn solve_with(f: &DMatrix<f64>, x: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let fp = x.transpose() * f * x;
    let (eps, cp) = eigh(&fp);
    (x * cp, eps)
}

struct Diis {
    capacity: usize,
    focks: VecDeque<DMatrix<f64>>,
    errors: VecDeque<DMatrix<f64>>,
}

impl Diis {
    fn new(capacity: usize) -> Self {
        Self {
            capacity,
            focks: VecDeque::new(),
            errors: VecDeque::new(),
        }
    }

    fn push(&mut self, fock: DMatrix<f64>, error: DMatrix<f64>) {
        self.focks.push_back(fock);
        self.errors.push_back(error);
        while self.focks.len() > self.capacity {
            self.focks.pop_front();
            self.errors.pop_front();
        }
    }

    /// Extrapolated Fock matrix. Oldest vectors are discarded while the
    /// B matrix stays numerically singular.
    fn extrapolate(&mut self) -> DMatrix<f64> {
        loop {
            let m = self.focks.len();
            if m == 1 {
                return self.focks[0].clone();
            }
            let mut b = DMatrix::zeros(m + 1, m + 1);
            for i in 0..m {
                for j in 0..=i {
                    let v = trace_product(&self.errors[i], &self.errors[j].transpose());
                    b[(i, j)] = v;
                    b[(j, i)] = v;
                }
                b[(i, m)] = -1.0;
                b[(m, i)] = -1.0;
            }
            let mut rhs = DVector::zeros(m + 1);
            rhs[m] = -1.0;
            let scale = (0..m).map(|i| b[(i, i)]).fold(0.0_f64, f64::max);
            let solved = if scale > 0.0 {
                let mut bs = b.clone();
                for i in 0..m {
                    for j in 0..m {
                        bs[(i, j)] /= scale;
                    }
                }
                bs.lu().solve(&rhs).filter(|c| c.iter().all(|x| x.is_finite()))
            } else {
                None
            };
            match solved {
                Some(c) if c.iter().take(m).map(|x| x.abs()).sum::<f64>() < 1e8 => {
                    let mut f = DMatrix::zeros(self.focks[0].nrows(), self.focks[0].ncols());
                    for i in 0..m {
                        f += &self.focks[i] * c[i];
                    }
                    return f;
                }
                _ => {
                    self.focks.pop_front();
                    self.errors.pop_front();
                }
            }
        }
    }
}

/// Restricted Hartree–Fock driver.
pub fn run_rhf(mol: &Molecule, ints: &IntegralSet, opts: &ScfOptions<'_>) -> Result<ScfResult> {
    let s = &ints.overlap;
    let h = opts.h_override.as_ref().unwrap_or(&ints.h_core);
    let n_electrons = opts.n_electrons_override.unwrap_or(mol.n_electrons());
    if n_electrons % 2 != 0 {
        return Err(Error::OddElectronCount(n_electrons as i64));
    }
    let n_occ = n_electrons / 2;
    let e_nuc = nuclear_repulsion(mol)?;
    let x = orthogonalizer(s)?;
    let eri = DenseEri::new(&ints.eri);

    let occupied_density = |c: &DMatrix<f64>| density_matrix(&c.columns(0, n_occ).into_owned());

    let mut gamma = match &opts.initial_density {
        Some(g) => g.clone(),
        None => {
            let h_guess = match opts.f_extra {
                Some(extra) => h + extra(h),
                None => h.clone(),
            };
            occupied_density(&solve_with(&h_guess, &x).0)
        }
    };

    let mut diis = Diis::new(opts.diis_size.max(1));
    let mut trace = Vec::new();
    let mut e_old: Option<f64> = None;
    let mut last_error = f64::INFINITY;
    let mut last_delta = f64::INFINITY;

    for iteration in 1..=opts.max_iterations {
        let (f, energy) = fock_and_energy(&gamma, h, &eri, opts.f_extra);
        let comm = &f * &gamma * s - s * &gamma * &f;
        let error_norm = frobenius(&comm);
        let delta = e_old.map_or(f64::INFINITY, |e| (energy - e).abs());
        debug!("scf iter {iteration:3}  E = {:.12}  |FDS-SDF| = {error_norm:.3e}", energy + e_nuc);
        trace.push(IterationRecord {
            iteration,
            energy: energy + e_nuc,
            error_norm,
        });
        let plateau = delta < opts.energy_tol && last_delta < opts.energy_tol;
        last_error = error_norm;
        last_delta = delta;

        if error_norm < opts.error_tol && plateau {
            let (c, eps) = solve_with(&f, &x);
            let density = occupied_density(&c);
            let (fock, energy_electronic) = fock_and_energy(&density, h, &eri, opts.f_extra);
            return Ok(ScfResult {
                coefficients: c,
                orbital_energies: eps,
                density,
                fock,
                h_core: h.clone(),
                energy_electronic,
                energy_nuclear: e_nuc,
                energy_total: energy_electronic + e_nuc,
                n_occ,
                converged: true,
                iterations: iteration,
                trace,
            });
        }

        diis.push(f.clone(), x.transpose() * &comm * &x);
        let mut f_next = diis.extrapolate();
        if let Some(shift) = opts.level_shift {
            f_next += (s - s * &gamma * s * 0.5) * shift;
        }
        let (c, _) = solve_with(&f_next, &x);
        gamma = occupied_density(&c);
        e_old = Some(energy);
    }
    Err(Error::ScfNotConverged {
        iterations: opts.max_iterations,
        error: last_error,
        delta_e: last_delta,
    })
}

/// Fock matrix (with any extra term) and the matching electronic energy
/// `tr(γ(h + P)) + ½ tr(γ G(γ))`.
fn fock_and_energy(
    gamma: &DMatrix<f64>,
    h: &DMatrix<f64>,
    eri: &DenseEri,
    extra: Option<&FockExtra<'_>>,
) -> (DMatrix<f64>, f64) {
    let g = eri.two_electron(gamma);
    let f0 = h + &g;
    let mut energy = trace_product(gamma, h) + 0.5 * trace_product(gamma, &g);
    let f = match extra {
        Some(extra) => {
            let p = extra(&f0);
            energy += trace_product(gamma, &p);
            f0 + p
        }
        None => f0,
    };
    (f, energy)
}
