//! Contracted Cartesian Gaussian basis sets (STO-3G, s and p shells).

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Molecule;

const STO3G_DATA: &str = include_str!("../data/sto-3g.basis");

/// One contracted shell as read from a basis file: angular momentum plus
/// `(exponent, coefficient)` rows for normalized primitives.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellTemplate {
    pub l: u8,
    pub primitives: Vec<(f64, f64)>,
}

/// Per-element shell templates keyed by atomic number.
#[derive(Clone, Debug, Default)]
pub struct BasisLibrary {
    elements: HashMap<u32, Vec<ShellTemplate>>,
}

impl BasisLibrary {
    /// The embedded STO-3G table (H through Ar).
    pub fn sto3g() -> Self {
        Self::parse(STO3G_DATA).expect("embedded STO-3G table is well formed")
    }

    /// Parses the plain-text format: an element header `<symbol> <Z>`, then
    /// shell blocks `<S|P> <n>` each followed by `n` rows of
    /// `<exponent> <coefficient>`, closed by `end`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elements = HashMap::new();
        let mut current: Option<(u32, Vec<ShellTemplate>)> = None;
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };

        while let Some((ln, line)) = lines.next() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (&mut current, fields.as_slice()) {
                (None, [_sym, z]) => {
                    let z: u32 = z.parse().map_err(|_| bad(ln, "expected `<symbol> <Z>`"))?;
                    current = Some((z, Vec::new()));
                }
                (Some((z, shells)), ["end"]) => {
                    elements.insert(*z, std::mem::take(shells));
                    current = None;
                }
                (Some((_, shells)), [kind, n]) => {
                    let l = match *kind {
                        "S" | "s" => 0,
                        "P" | "p" => 1,
                        _ => return Err(bad(ln, "only S and P shells are supported")),
                    };
                    let n: usize = n.parse().map_err(|_| bad(ln, "bad primitive count"))?;
                    let mut primitives = Vec::with_capacity(n);
                    for _ in 0..n {
                        let (pl, row) = lines.next().ok_or_else(|| bad(ln, "truncated shell"))?;
                        let cols: Vec<f64> = row
                            .split_whitespace()
                            .map(|t| t.parse::<f64>())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|_| bad(pl, "expected `<exponent> <coefficient>`"))?;
                        match cols.as_slice() {
                            [a, c] if *a > 0.0 => primitives.push((*a, *c)),
                            _ => return Err(bad(pl, "expected positive exponent and coefficient")),
                        }
                    }
                    shells.push(ShellTemplate { l, primitives });
                }
                _ => return Err(bad(ln, "unexpected line")),
            }
        }
        if current.is_some() {
            return Err(bad(text.lines().count(), "missing `end`"));
        }
        Ok(Self { elements })
    }

    pub fn shells_for(&self, z: u32) -> Option<&[ShellTemplate]> {
        self.elements.get(&z).map(|v| v.as_slice())
    }
}

/// A contracted shell placed on an atom. Coefficients already include the
/// primitive normalization and the contraction renormalization.
#[derive(Clone, Debug)]
pub struct Shell {
    pub atom: usize,
    pub center: [f64; 3],
    pub l: u8,
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

/// A single Cartesian atomic orbital `x^i y^j z^k Σ c_p exp(-α_p r²)`.
#[derive(Clone, Debug)]
pub struct BasisFunction {
    pub atom: usize,
    pub center: [f64; 3],
    pub powers: [u8; 3],
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BasisSet {
    pub shells: Vec<Shell>,
    pub functions: Vec<BasisFunction>,
}

impl BasisSet {
    /// Total number of atomic orbitals.
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// AO indices centred on any atom of `atoms`.
    pub fn aos_on_atoms(&self, atoms: &[usize]) -> Vec<usize> {
        self.functions
            .iter()
            .enumerate()
            .filter(|(_, f)| atoms.contains(&f.atom))
            .map(|(i, _)| i)
            .collect()
    }

    /// Atom index of every AO.
    pub fn ao_atoms(&self) -> Vec<usize> {
        self.functions.iter().map(|f| f.atom).collect()
    }
}

fn cartesian_components(l: u8) -> Vec<[u8; 3]> {
    match l {
        0 => vec![[0, 0, 0]],
        1 => vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        _ => unreachable!("only s and p shells"),
    }
}

/// Normalization of the primitive `x^l exp(-α r²)` (l ≤ 1 on each axis).
fn primitive_norm(alpha: f64, l: u8) -> f64 {
    (2.0 * alpha / PI).powf(0.75) * (4.0 * alpha).powf(l as f64 / 2.0)
}

fn contracted_self_overlap(l: u8, exps: &[f64], coefs: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, ca) in exps.iter().zip(coefs) {
        for (b, cb) in exps.iter().zip(coefs) {
            let p = a + b;
            s += ca * cb * (PI / p).powf(1.5) / (2.0 * p).powi(l as i32);
        }
    }
    s
}

/// Places the embedded STO-3G shells on every atom.
pub fn build_basis(mol: &Molecule) -> Result<BasisSet> {
    build_basis_with(mol, &BasisLibrary::sto3g())
}

pub fn build_basis_with(mol: &Molecule, library: &BasisLibrary) -> Result<BasisSet> {
    let mut shells = Vec::new();
    let mut functions = Vec::new();
    for (atom, a) in mol.atoms().iter().enumerate() {
        let templates = library
            .shells_for(a.z)
            .ok_or_else(|| Error::UnsupportedElement(a.symbol.clone()))?;
        for t in templates {
            let exponents: Vec<f64> = t.primitives.iter().map(|p| p.0).collect();
            let mut coefficients: Vec<f64> = t
                .primitives
                .iter()
                .map(|&(alpha, c)| c * primitive_norm(alpha, t.l))
                .collect();
            let norm = contracted_self_overlap(t.l, &exponents, &coefficients).sqrt();
            coefficients.iter_mut().for_each(|c| *c /= norm);

            for powers in cartesian_components(t.l) {
                functions.push(BasisFunction {
                    atom,
                    center: a.position,
                    powers,
                    exponents: exponents.clone(),
                    coefficients: coefficients.clone(),
                });
            }
            shells.push(Shell {
                atom,
                center: a.position,
                l: t.l,
                exponents,
                coefficients,
            });
        }
    }
    Ok(BasisSet { shells, functions })
}
