//! Command-line front end: `embed` single points and `scan` bond scans.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingOptions, ProjectorKind, SameLevelEnergy, DEFAULT_MU};
use crate::error::Error;
use crate::geometry::{parse_xyz, Molecule, BOHR_IN_ANGSTROM};
use crate::localization::Localizer;
use crate::pipeline::{run_embedding, EmbeddingConfig, FullSystem, Stage, StageError, StageResult};
use crate::qubit::term_count;
use crate::scf::IterationRecord;
use crate::solver::Sector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_PROJECTION: i32 = 4;

/// Largest orbital count for which a scan also runs full-molecule FCI.
pub const SCAN_FCI_MAX_ORBITALS: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "qembed", version, about = "Projection-based embedding with Jordan-Wigner export")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Single-point embedded calculation with JSON report and Hamiltonian export.
    Embed(EmbedArgs),
    /// Bond-length scan written as a TSV (or CSV) table.
    Scan(ScanArgs),
}

/// Options shared by both commands. Anything given here overrides the config file.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// XYZ geometry (Ångström).
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub charge: Option<i32>,
    /// Active atom indices, comma separated (0-based).
    #[arg(long)]
    pub active: Option<String>,
    /// spade or population
    #[arg(long)]
    pub localizer: Option<String>,
    /// Active-population threshold for the population localizer.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// huzinaga or mu
    #[arg(long)]
    pub projector: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// none (export only) or exact
    #[arg(long)]
    pub solver: Option<String>,
    /// Drop the first-order density correction from the same-level energy.
    #[arg(long)]
    pub no_first_order_correction: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Embedded qubit Hamiltonian file (defaults next to the report).
    #[arg(long)]
    pub hamiltonian_out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `fixed,moving` atom pair; the moving atom is displaced along the bond.
    #[arg(long)]
    pub atoms: Option<String>,
    /// Distances in Ångström: `start:stop:step` or a comma-separated list.
    #[arg(long)]
    pub distances: Option<String>,
    /// Number of scan points computed concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    None,
    Exact,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "exact" => Ok(Self::Exact),
            _ => Err(Error::Config(format!("unknown solver `{s}` (expected none or exact)"))),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub geometry: Option<PathBuf>,
    pub charge: Option<i32>,
    pub active_atoms: Option<Vec<usize>>,
    pub localizer: Option<String>,
    pub threshold: Option<f64>,
    pub projector: Option<String>,
    pub mu: Option<f64>,
    pub solver: Option<String>,
    pub first_order_correction: Option<bool>,
    pub output: Option<PathBuf>,
    pub hamiltonian_output: Option<PathBuf>,
    pub scan: Option<ScanFileConfig>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFileConfig {
    pub atoms: Option<[usize; 2]>,
    pub distances: Option<Vec<f64>>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Relative paths in a config file are relative to the file itself.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.geometry, &mut cfg.output, &mut cfg.hamiltonian_output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub geometry: PathBuf,
    pub charge: i32,
    pub active_atoms: Vec<usize>,
    pub localizer: Localizer,
    pub threshold: f64,
    pub projector: ProjectorKind,
    pub mu: f64,
    pub solver: SolverChoice,
    pub first_order_correction: bool,
    pub output: PathBuf,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, file: &FileConfig, default_out: &str) -> Result<Self, Error> {
        let geometry = args
            .geometry
            .clone()
            .or_else(|| file.geometry.clone())
            .ok_or_else(|| Error::Config("no geometry given (--geometry or `geometry` in the config)".into()))?;
        let active_atoms = match &args.active {
            Some(s) => parse_index_list(s)?,
            None => file
                .active_atoms
                .clone()
                .ok_or_else(|| Error::Config("no active atoms given (--active or `active_atoms`)".into()))?,
        };
        if active_atoms.is_empty() {
            return Err(Error::Config("active atom list is empty".into()));
        }
        let pick = |flag: &Option<String>, file: &Option<String>| flag.clone().or_else(|| file.clone());
        let localizer = pick(&args.localizer, &file.localizer).map_or(Ok(Localizer::Spade), |s| s.parse())?;
        let projector = pick(&args.projector, &file.projector).map_or(Ok(ProjectorKind::Huzinaga), |s| s.parse())?;
        let solver = pick(&args.solver, &file.solver).map_or(Ok(SolverChoice::Exact), |s| s.parse())?;
        let threshold = args.threshold.or(file.threshold).unwrap_or(0.95);
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Config(format!("threshold {threshold} is outside (0, 1]")));
        }
        let mu = args.mu.or(file.mu).unwrap_or(DEFAULT_MU);
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!("mu must be positive, got {mu}")));
        }
        Ok(Self {
            geometry,
            charge: args.charge.or(file.charge).unwrap_or(0),
            active_atoms,
            localizer,
            threshold,
            projector,
            mu,
            solver,
            first_order_correction: !args.no_first_order_correction && file.first_order_correction.unwrap_or(true),
            output: args
                .out
                .clone()
                .or_else(|| file.output.clone())
                .unwrap_or_else(|| PathBuf::from(default_out)),
        })
    }

    pub fn embedding_config(&self) -> EmbeddingConfig {
        EmbeddingConfig {
            active_atoms: self.active_atoms.clone(),
            localizer: self.localizer,
            threshold: self.threshold,
            embedding: EmbeddingOptions {
                projector: self.projector,
                mu: self.mu,
                first_order_correction: self.first_order_correction,
            },
            solve: self.solver == SolverChoice::Exact,
        }
    }

    pub fn load_molecule(&self) -> StageResult<Molecule> {
        let stage = |source| StageError {
            stage: Stage::Geometry,
            source,
        };
        let text = fs::read_to_string(&self.geometry).map_err(|e| stage(e.into()))?;
        parse_xyz(&text)
            .and_then(|m| m.with_charge(self.charge))
            .map_err(stage)
    }
}

pub fn parse_index_list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Config(format!("`{t}` is not an atom index")))
        })
        .collect()
}

/// `start:stop:step` (inclusive) or a comma list, deduplicated and sorted.
pub fn parse_distances(s: &str) -> Result<Vec<f64>, Error> {
    let bad = |t: &str| Error::Config(format!("`{t}` is not a distance"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(t));
    let raw: Vec<f64> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts.as_slice() else {
            return Err(Error::Config(format!("range `{s}` must be start:stop:step")));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(Error::Config(format!("range `{s}` needs start <= stop and a positive step")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * step).collect()
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<_, _>>()?
    };
    canonical_distances(raw)
}

pub fn canonical_distances(mut d: Vec<f64>) -> Result<Vec<f64>, Error> {
    if let Some(x) = d.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::Config(format!("distance {x} must be positive")));
    }
    d.sort_by(f64::total_cmp);
    d.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if d.len() < 2 {
        return Err(Error::Config("a scan needs at least two distinct distances".into()));
    }
    Ok(d)
}

pub fn exit_code(err: &Error) -> i32 {
    use Error::*;
    match err {
        Config(_) | Parse { .. } | UnknownElement(_) | AtomCountMismatch { .. } | UnsupportedElement(_)
        | CoincidentNuclei(..) | OddElectronCount(_) | InvalidActiveAtoms(_) | AmbiguousPartition(_)
        | EmptyActiveSet(_) | SpaceTooLarge(_) | Io(_) | Json(_) => EXIT_CONFIG,
        ScfNotConverged { .. } | LocalizationNotConverged(_) | EigensolverNotConverged(_) => EXIT_CONVERGENCE,
        ProjectionFailure(_) => EXIT_PROJECTION,
        _ => EXIT_FAILURE,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomEcho {
    pub symbol: String,
    pub angstrom: [f64; 3],
    pub bohr: [f64; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryEcho {
    pub path: String,
    pub charge: i32,
    pub n_electrons: usize,
    pub atoms: Vec<AtomEcho>,
}

impl GeometryEcho {
    fn new(path: &Path, mol: &Molecule) -> Self {
        Self {
            path: path.display().to_string(),
            charge: mol.charge(),
            n_electrons: mol.n_electrons(),
            atoms: mol
                .atoms()
                .iter()
                .map(|a| AtomEcho {
                    symbol: a.symbol.clone(),
                    angstrom: a.position.map(|x| x * BOHR_IN_ANGSTROM),
                    bohr: a.position,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub n_active_orbitals: usize,
    pub n_environment_orbitals: usize,
    pub active_orbitals: Vec<usize>,
    pub environment_orbitals: Vec<usize>,
    pub singular_values: Vec<f64>,
    pub active_populations: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Energies {
    pub rhf_total: f64,
    pub same_level_embedded: f64,
    pub wf_in_hf_total: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalTerms {
    pub e_env: f64,
    pub g_cross: f64,
    /// `tr(γ_act (V_emb + P))`, subtracted in `e_cls`.
    pub active_embedding_energy: f64,
    pub e_nuc: f64,
    /// `e_env + g_cross − active_embedding_energy + e_nuc`
    pub e_cls: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WfReport {
    /// Ground-state expectation of the embedded Hamiltonian without `e_cls`.
    pub active_electronic: f64,
    pub e_cls: f64,
    pub total: f64,
    pub sector: Option<Sector>,
    pub dimension: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Resources {
    pub n_ao: usize,
    pub n_active_electrons: usize,
    pub n_active_mos: usize,
    pub n_qubits_full: usize,
    pub n_qubits_embedded: usize,
    pub term_count_full: usize,
    pub term_count_embedded: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddedScfReport {
    pub iterations: usize,
    pub energy: f64,
    pub orbital_energies: Vec<f64>,
    pub trace: Vec<IterationRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemovedOrbital {
    pub index: usize,
    pub environment_population: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedReport {
    pub geometry: GeometryEcho,
    pub settings: RunConfig,
    pub partition: PartitionReport,
    pub energies: Energies,
    pub same_level: SameLevelEnergy,
    pub classical: ClassicalTerms,
    pub wf: Option<WfReport>,
    pub resources: Resources,
    pub embedded_scf: EmbeddedScfReport,
    pub removed_orbitals: Vec<RemovedOrbital>,
    pub hamiltonian_file: Option<String>,
}

/// Everything `embed` computes; the caller decides what to write.
pub struct EmbedOutcome {
    pub report: EmbedReport,
    pub hamiltonian_json: String,
}

pub fn run_embed(cfg: &RunConfig) -> StageResult<EmbedOutcome> {
    let mol = cfg.load_molecule()?;
    let full = FullSystem::new(mol)?;
    let run = run_embedding(&full, &cfg.embedding_config())?;
    let full_h = full.hamiltonian()?;

    let p = &run.problem;
    let e_cls = run.e_cls();
    let wf = run.ground_state.as_ref().map(|g| WfReport {
        active_electronic: g.energy - e_cls,
        e_cls,
        total: g.energy,
        sector: g.sector,
        dimension: g.dimension,
        iterations: g.iterations,
    });
    let report = EmbedReport {
        geometry: GeometryEcho::new(&cfg.geometry, &full.molecule),
        settings: cfg.clone(),
        partition: PartitionReport {
            n_active_orbitals: run.partition.n_active(),
            n_environment_orbitals: run.partition.n_environment(),
            active_orbitals: run.partition.active.clone(),
            environment_orbitals: run.partition.environment.clone(),
            singular_values: run.partition.singular_values.clone(),
            active_populations: run.partition.active_populations.clone(),
        },
        energies: Energies {
            rhf_total: full.scf.energy_total,
            same_level_embedded: run.same_level.total,
            wf_in_hf_total: run.wf_total(),
        },
        same_level: run.same_level.clone(),
        classical: ClassicalTerms {
            e_env: p.e_env,
            g_cross: p.g_cross,
            active_embedding_energy: p.e_correction,
            e_nuc: p.e_nuc,
            e_cls,
        },
        wf,
        resources: Resources {
            n_ao: full.n_ao(),
            n_active_electrons: p.n_act_electrons,
            n_active_mos: run.reduced.coefficients.ncols(),
            n_qubits_full: full_h.n_qubits,
            n_qubits_embedded: run.n_qubits(),
            term_count_full: term_count(&full_h),
            term_count_embedded: run.term_count(),
        },
        embedded_scf: EmbeddedScfReport {
            iterations: run.scf.iterations,
            energy: run.scf.energy_total,
            orbital_energies: run.scf.orbital_energies.iter().copied().collect(),
            trace: run.scf.trace.clone(),
        },
        removed_orbitals: run
            .reduced
            .removed
            .iter()
            .zip(&run.reduced.removed_populations)
            .map(|(&index, &environment_population)| RemovedOrbital {
                index,
                environment_population,
            })
            .collect(),
        hamiltonian_file: None,
    };
    let hamiltonian_json = run.hamiltonian.to_json().map_err(|source| StageError {
        stage: Stage::Qubit,
        source,
    })?;
    Ok(EmbedOutcome {
        report,
        hamiltonian_json,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub r_angstrom: f64,
    pub r_bohr: f64,
    pub e_rhf: Option<f64>,
    pub e_fci: Option<f64>,
    pub e_embed: Option<f64>,
    pub error: Option<String>,
}

impl ScanRow {
    pub fn log10_error(&self) -> Option<f64> {
        Some((self.e_embed? - self.e_fci?).abs().log10())
    }
}

#[derive(Clone, Debug)]
pub struct ScanSpec {
    pub fixed: usize,
    pub moving: usize,
    /// Ångström, sorted and distinct.
    pub distances: Vec<f64>,
    pub jobs: usize,
}

/// One scan point. Failures are recorded in the row rather than returned.
pub fn scan_point(base: &Molecule, cfg: &EmbeddingConfig, spec: &ScanSpec, r_angstrom: f64) -> ScanRow {
    let r_bohr = r_angstrom / BOHR_IN_ANGSTROM;
    let mut row = ScanRow {
        r_angstrom,
        r_bohr,
        e_rhf: None,
        e_fci: None,
        e_embed: None,
        error: None,
    };
    let result = (|| -> StageResult<()> {
        let mol = base.with_bond_length(spec.fixed, spec.moving, r_bohr).map_err(|source| StageError {
            stage: Stage::Geometry,
            source,
        })?;
        let full = FullSystem::new(mol)?;
        row.e_rhf = Some(full.scf.energy_total);
        if full.n_ao() <= SCAN_FCI_MAX_ORBITALS {
            row.e_fci = Some(full.fci()?);
        }
        let run = run_embedding(&full, cfg)?;
        row.e_embed = Some(run.wf_total().unwrap_or(run.same_level.total));
        Ok(())
    })();
    if let Err(e) = result {
        warn!("scan point r = {r_angstrom} Å failed: {e}");
        row.error = Some(e.to_string());
    }
    row
}

pub fn run_scan(base: &Molecule, cfg: &EmbeddingConfig, spec: &ScanSpec) -> Result<Vec<ScanRow>, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} scan workers: {e}", spec.jobs)))?;
    Ok(pool.install(|| {
        spec.distances
            .par_iter()
            .map(|&r| scan_point(base, cfg, spec, r))
            .collect()
    }))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.10}"))
}

/// Tab-separated (or comma-separated) table with 10-decimal energies.
pub fn format_scan_table(rows: &[ScanRow], sep: char) -> String {
    let mut out = String::new();
    let header = ["r_angstrom", "r_bohr", "e_rhf", "e_fci", "e_embed", "log10_abs_err", "status"];
    out.push_str(&header.join(&sep.to_string()));
    out.push('\n');
    for r in rows {
        let status = r.error.as_deref().unwrap_or("ok").replace([sep, '\n'], " ");
        let cols = [
            format!("{:.6}", r.r_angstrom),
            format!("{:.6}", r.r_bohr),
            fmt_opt(r.e_rhf),
            fmt_opt(r.e_fci),
            fmt_opt(r.e_embed),
            r.log10_error().map_or_else(|| "NA".to_string(), |v| format!("{v:.4}")),
            status,
        ];
        let _ = writeln!(out, "{}", cols.join(&sep.to_string()));
    }
    out
}

fn default_hamiltonian_path(report: &Path) -> PathBuf {
    let stem = report.file_stem().map_or_else(|| "report".into(), |s| s.to_string_lossy().into_owned());
    report.with_file_name(format!("{stem}.hamiltonian.json"))
}

fn load_file_config(common: &CommonArgs) -> Result<FileConfig, Error> {
    common.config.as_deref().map_or(Ok(FileConfig::default()), FileConfig::load)
}

fn fail(stage: &str, err: &Error) -> i32 {
    eprintln!("error [{stage}]: {err}");
    exit_code(err)
}

fn cmd_embed(args: &EmbedArgs) -> i32 {
    let setup = (|| -> Result<(RunConfig, PathBuf), Error> {
        let file = load_file_config(&args.common)?;
        let cfg = RunConfig::resolve(&args.common, &file, "report.json")?;
        let ham = args
            .hamiltonian_out
            .clone()
            .or(file.hamiltonian_output)
            .unwrap_or_else(|| default_hamiltonian_path(&cfg.output));
        Ok((cfg, ham))
    })();
    let (cfg, ham_path) = match setup {
        Ok(x) => x,
        Err(e) => return fail("config", &e),
    };
    let mut outcome = match run_embed(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e.stage.to_string(), &e.source),
    };
    outcome.report.hamiltonian_file = Some(ham_path.display().to_string());
    let write = || -> Result<(), Error> {
        fs::write(&ham_path, &outcome.hamiltonian_json)?;
        let mut json = serde_json::to_string_pretty(&outcome.report)?;
        json.push('\n');
        fs::write(&cfg.output, json)?;
        Ok(())
    };
    if let Err(e) = write() {
        return fail("output", &e);
    }

    let r = &outcome.report;
    println!("E(RHF)              {:.10}", r.energies.rhf_total);
    println!("E(HF-in-HF)         {:.10}", r.energies.same_level_embedded);
    if let Some(e) = r.energies.wf_in_hf_total {
        println!("E(FCI-in-HF)        {e:.10}");
    }
    println!(
        "active orbitals     {} (environment {})",
        r.partition.n_active_orbitals, r.partition.n_environment_orbitals
    );
    println!(
        "qubits              {} -> {}",
        r.resources.n_qubits_full, r.resources.n_qubits_embedded
    );
    println!(
        "Pauli terms         {} -> {}",
        r.resources.term_count_full, r.resources.term_count_embedded
    );
    info!("report written to {}", cfg.output.display());
    EXIT_OK
}

fn cmd_scan(args: &ScanArgs) -> i32 {
    let setup = (|| -> Result<(RunConfig, ScanSpec), Error> {
        let file = load_file_config(&args.common)?;
        let cfg = RunConfig::resolve(&args.common, &file, "scan.tsv")?;
        let scan_file = file.scan.clone().unwrap_or_default();
        let (fixed, moving) = match &args.atoms {
            Some(s) => match parse_index_list(s)?.as_slice() {
                [a, b] => (*a, *b),
                _ => return Err(Error::Config("--atoms needs exactly two indices".into())),
            },
            None => scan_file
                .atoms
                .map(|[a, b]| (a, b))
                .ok_or_else(|| Error::Config("no scan atoms given (--atoms or [scan].atoms)".into()))?,
        };
        let distances = match &args.distances {
            Some(s) => parse_distances(s)?,
            None => canonical_distances(
                scan_file
                    .distances
                    .clone()
                    .ok_or_else(|| Error::Config("no scan distances given (--distances or [scan].distances)".into()))?,
            )?,
        };
        let jobs = args
            .jobs
            .or(scan_file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);
        Ok((
            cfg,
            ScanSpec {
                fixed,
                moving,
                distances,
                jobs,
            },
        ))
    })();
    let (cfg, spec) = match setup {
        Ok(x) => x,
        Err(e) => return fail("config", &e),
    };
    let mol = match cfg.load_molecule() {
        Ok(m) => m,
        Err(e) => return fail("geometry", &e.source),
    };
    if let Err(e) = mol.with_bond_length(spec.fixed, spec.moving, 1.0) {
        return fail("config", &e);
    }
    let rows = match run_scan(&mol, &cfg.embedding_config(), &spec) {
        Ok(r) => r,
        Err(e) => return fail("scan", &e),
    };
    let sep = match cfg.output.extension().and_then(|e| e.to_str()) {
        Some("csv") => ',',
        _ => '\t',
    };
    let table = format_scan_table(&rows, sep);
    if let Err(e) = fs::write(&cfg.output, &table) {
        return fail("output", &e.into());
    }
    print!("{table}");
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        warn!("{failed} of {} scan points failed", rows.len());
    }
    EXIT_OK
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match &cli.command {
        Command::Embed(a) => cmd_embed(a),
        Command::Scan(a) => cmd_scan(a),
    }
}
