//! Molecular geometry: XYZ ingestion and nuclear repulsion.

use crate::error::{Error, Result};

/// Bohr radius in Ångström.
pub const BOHR_IN_ANGSTROM: f64 = 0.529_177_210_92;

const ELEMENTS: [&str; 36] = [
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr",
];

/// Atomic number for an element symbol (case-insensitive).
pub fn atomic_number(symbol: &str) -> Option<u32> {
    ELEMENTS
        .iter()
        .position(|e| e.eq_ignore_ascii_case(symbol))
        .map(|i| i as u32 + 1)
}

pub fn element_symbol(z: u32) -> Option<&'static str> {
    ELEMENTS.get((z as usize).checked_sub(1)?).copied()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub symbol: String,
    pub z: u32,
    /// Position in Bohr.
    pub position: [f64; 3],
}

/// Closed-shell molecule. Positions are stored in Bohr.
#[derive(Clone, Debug, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    charge: i32,
    n_electrons: usize,
}

impl Molecule {
    pub fn new(atoms: Vec<Atom>, charge: i32) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "molecule has no atoms".into(),
            });
        }
        for a in 0..atoms.len() {
            for b in 0..a {
                if distance(&atoms[a].position, &atoms[b].position) <= 1e-6 {
                    return Err(Error::CoincidentNuclei(b, a));
                }
            }
        }
        let total_z: i64 = atoms.iter().map(|a| a.z as i64).sum();
        let n = total_z - charge as i64;
        if n < 0 || n % 2 != 0 {
            return Err(Error::OddElectronCount(n));
        }
        Ok(Self {
            atoms,
            charge,
            n_electrons: n as usize,
        })
    }

    /// Build from `(symbol, position in Bohr)` pairs.
    pub fn from_bohr(atoms: &[(&str, [f64; 3])], charge: i32) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|&(sym, position)| {
                let z = atomic_number(sym).ok_or_else(|| Error::UnknownElement(sym.into()))?;
                Ok(Atom {
                    symbol: element_symbol(z).unwrap().to_string(),
                    z,
                    position,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, charge)
    }

    pub fn with_charge(self, charge: i32) -> Result<Self> {
        Self::new(self.atoms, charge)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn charge(&self) -> i32 {
        self.charge
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn n_occupied(&self) -> usize {
        self.n_electrons / 2
    }

    /// Rigid translation by `shift` (Bohr).
    pub fn translated(&self, shift: [f64; 3]) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            for k in 0..3 {
                a.position[k] += shift[k];
            }
        }
        out
    }

    /// Applies a 3×3 rotation (row-major) about the origin.
    pub fn rotated(&self, rot: [[f64; 3]; 3]) -> Self {
        let mut out = self.clone();
        for a in &mut out.atoms {
            let p = a.position;
            a.position = [0, 1, 2].map(|i| rot[i][0] * p[0] + rot[i][1] * p[1] + rot[i][2] * p[2]);
        }
        out
    }

    /// Distance between two atoms in Bohr.
    pub fn bond_length(&self, a: usize, b: usize) -> f64 {
        distance(&self.atoms[a].position, &self.atoms[b].position)
    }

    /// Moves atom `moving` along the `fixed → moving` axis so that the bond
    /// length becomes `r_bohr`. All other atoms stay in place.
    pub fn with_bond_length(&self, fixed: usize, moving: usize, r_bohr: f64) -> Result<Self> {
        let n = self.atoms.len();
        if fixed >= n || moving >= n || fixed == moving {
            return Err(Error::Config(format!(
                "scan atoms ({fixed}, {moving}) are not two distinct atoms of a {n}-atom molecule"
            )));
        }
        let p0 = self.atoms[fixed].position;
        let p1 = self.atoms[moving].position;
        let d = distance(&p0, &p1);
        let mut out = self.atoms.clone();
        out[moving].position = [0, 1, 2].map(|k| p0[k] + (p1[k] - p0[k]) / d * r_bohr);
        Self::new(out, self.charge)
    }

    /// Serializes as XYZ text (Ångström).
    pub fn to_xyz(&self, comment: &str) -> String {
        let mut s = format!("{}\n{}\n", self.atoms.len(), comment);
        for a in &self.atoms {
            let p = a.position.map(|x| x * BOHR_IN_ANGSTROM);
            s.push_str(&format!("{} {:.10} {:.10} {:.10}\n", a.symbol, p[0], p[1], p[2]));
        }
        s
    }
}

pub fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Parses standard XYZ text (coordinates in Ångström) into a neutral molecule.
pub fn parse_xyz(text: &str) -> Result<Molecule> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let expected: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: 1,
        msg: format!("expected atom count, found `{}`", header.trim()),
    })?;
    // comment line may be absent only when there are no atoms
    lines.next();

    let mut atoms = Vec::with_capacity(expected);
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected `symbol x y z`, found `{line}`"),
            });
        }
        let z = atomic_number(fields[0]).ok_or_else(|| Error::UnknownElement(fields[0].into()))?;
        let mut position = [0.0; 3];
        for k in 0..3 {
            let v: f64 = fields[k + 1].parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad coordinate `{}`", fields[k + 1]),
            })?;
            position[k] = v / BOHR_IN_ANGSTROM;
        }
        atoms.push(Atom {
            symbol: element_symbol(z).unwrap().to_string(),
            z,
            position,
        });
    }
    if atoms.len() != expected {
        return Err(Error::AtomCountMismatch {
            expected,
            found: atoms.len(),
        });
    }
    Molecule::new(atoms, 0)
}

/// Σ_{A<B} Z_A Z_B / |R_A − R_B| in Hartree.
pub fn nuclear_repulsion(mol: &Molecule) -> Result<f64> {
    let atoms = mol.atoms();
    let mut e = 0.0;
    for a in 0..atoms.len() {
        for b in 0..a {
            let r = distance(&atoms[a].position, &atoms[b].position);
            if r <= 1e-6 {
                return Err(Error::CoincidentNuclei(b, a));
            }
            e += (atoms[a].z * atoms[b].z) as f64 / r;
        }
    }
    Ok(e)
}
