//! `fuzzobs` command-line interface.
//!
//! Every command prints one JSON report on stdout. Exit codes: 0 ok,
//! 2 schema violation, 3 invariant violation, 4 failed precondition,
//! 5 resource cap.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coarsegrain::{self, CoarseError};
use crate::group::ProbabilityMeasure;
use crate::io::{self, DocError};
use crate::linalg::C64;
use crate::povm::{self, PovmError, StateVector, DEFAULT_MAX_SUBSET_ORDER};
use crate::sterngerlach;
use crate::torus::{self, Arc, Reconstruction, TorusError, TorusMeasure};

/// Environment override for the brute-force subset cap.
pub const MAX_N_ENV: &str = "FUZZOBS_MAX_N";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource cap: {0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Precondition(_) => 4,
            CliError::Resource(_) => 5,
        }
    }
}

impl From<DocError> for CliError {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Schema(s) => CliError::Schema(s),
            DocError::Invariant(s) => CliError::Invariant(s),
        }
    }
}

impl From<PovmError> for CliError {
    fn from(e: PovmError) -> Self {
        match e {
            PovmError::TooLarge { .. } => CliError::Resource(format!(
                "{e} (set {MAX_N_ENV} to raise the cap, default {DEFAULT_MAX_SUBSET_ORDER})"
            )),
            PovmError::NonVanishingTransform { .. } | PovmError::NotCanonical => {
                CliError::Precondition(e.to_string())
            }
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<CoarseError> for CliError {
    fn from(e: CoarseError) -> Self {
        match e {
            CoarseError::NotCovariant(_)
            | CoarseError::FactorizationFailed(_)
            | CoarseError::NotCanonical => CliError::Precondition(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::NotToeplitz(_)
            | TorusError::RankDeficiencyAmbiguous { .. }
            | TorusError::GridTooSmall { .. } => CliError::Precondition(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fuzzobs", version, about = "Covariant fuzzy observables: constructors and property checks")]
pub struct Cli {
    /// Also print a human-readable summary on stderr.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(flatten)]
    pub tol: Tolerances,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    /// Covariance deviation threshold.
    #[arg(long = "tol-covariance", global = true, default_value_t = 1e-10)]
    pub tol_covariance: f64,
    /// Norm threshold for the norm-1 scan.
    #[arg(long = "tol-norm", global = true, default_value_t = 1e-9)]
    pub tol_norm: f64,
    /// Margin around 1/2 for the regularity scan.
    #[arg(long = "tol-regular", global = true, default_value_t = 1e-9)]
    pub tol_regular: f64,
    /// A transform value at or below this counts as zero.
    #[arg(long = "tol-transform", global = true, default_value_t = 1e-9)]
    pub tol_transform: f64,
    /// Spectrum slack when validating loaded effects.
    #[arg(long = "tol-effect", global = true, default_value_t = crate::linalg::EFFECT_TOL)]
    pub tol_effect: f64,
}

impl Tolerances {
    fn to_json(&self) -> Value {
        json!({
            "covariance": self.tol_covariance,
            "norm": self.tol_norm,
            "regular": self.tol_regular,
            "transform": self.tol_transform,
            "effect": self.tol_effect,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smear the canonical sharp observable by a probability measure.
    Smear {
        #[arg(long)]
        measure: PathBuf,
        /// Expected group order; must match the measure document.
        #[arg(long = "n")]
        order: Option<usize>,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run property checks on an observable document (all checks when no
    /// flag is given).
    Check {
        #[arg(long)]
        observable: PathBuf,
        /// Translation covariance
        #[arg(long)]
        covariance: bool,
        /// Norm-1 property over all nonempty subsets
        #[arg(long)]
        norm1: bool,
        /// Regularity over all nontrivial subsets
        #[arg(long)]
        regular: bool,
        /// Coarse-graining kernel relative to the sharp observable
        #[arg(long)]
        coarsen: bool,
        /// Informational equivalence with the sharp observable
        #[arg(long)]
        equiv: bool,
    },
    /// Smear by a confidence kernel and analyse the resulting coarse-graining.
    Kernel {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Circle-covariant coefficient matrices.
    Torus {
        #[command(subcommand)]
        command: TorusCommand,
    },
    /// Stern-Gerlach spin observable from its two overlap probabilities.
    Sg {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// States separating the sharp observable but not its smearing.
    Witness {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 1)]
        multiplicity: usize,
        /// Character with vanishing transform; defaults to the first nonzero one.
        #[arg(long)]
        character: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Fejer,
    Caratheodory,
}

#[derive(Debug, Subcommand)]
pub enum TorusCommand {
    /// Unit diagonal, Hermiticity, |c| <= 1 and nested positivity.
    Validate {
        #[arg(long)]
        cmatrix: PathBuf,
    },
    /// Toeplitz test (commutation with the sharp localization).
    Toeplitz {
        #[arg(long)]
        cmatrix: PathBuf,
    },
    /// Moment sequence and reconstructed smearing measure.
    Herglotz {
        #[arg(long)]
        cmatrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Caratheodory)]
        mode: Mode,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Commutative but non-Toeplitz coefficient matrix.
    Toigo {
        #[arg(long = "k")]
        half_width: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Truncated arc-commutator diagnostics.
    Commutator {
        #[arg(long)]
        cmatrix: PathBuf,
        #[arg(long, default_value_t = 8)]
        arcs: usize,
        /// Central window compared; defaults to K/2.
        #[arg(long)]
        inner: Option<usize>,
    },
    /// Coefficient matrix of the smearing by a circle measure.
    FromMeasure {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long = "k")]
        half_width: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

struct Report {
    command: String,
    inputs: BTreeMap<String, String>,
    results: Map<String, Value>,
    started: Instant,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            results: Map::new(),
            started: Instant::now(),
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path)
            .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(
            path.display().to_string(),
            hex::encode(Sha256::digest(&bytes)),
        );
        String::from_utf8(bytes)
            .map_err(|e| CliError::Schema(format!("{} is not UTF-8: {e}", path.display())))
    }

    fn put(&mut self, name: &str, operation: &str, value: Value) {
        self.results.insert(
            name.to_string(),
            json!({ "operation": operation, "value": value }),
        );
    }

    fn finish(self, tol: &Tolerances) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "tolerances": tol.to_json(),
            "timing_ms": self.started.elapsed().as_secs_f64() * 1e3,
        })
    }
}

fn write_output(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Schema(format!("cannot write {}: {e}", path.display())))
}

fn subset_cap() -> usize {
    std::env::var(MAX_N_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_SUBSET_ORDER)
}

fn amplitudes_json(v: &StateVector) -> Value {
    json!(v.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn complex_json(values: &[C64]) -> Value {
    json!(values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn set_json(set: &Option<Vec<usize>>) -> Value {
    match set {
        Some(s) => json!(s),
        None => Value::Null,
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    match run(&cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            if pretty {
                eprint!("{}", summarize(&report));
            }
            0
        }
        Err(e) => {
            eprintln!("fuzzobs: {e}");
            e.exit_code()
        }
    }
}

/// Human-readable one-line-per-result summary.
pub fn summarize(report: &Value) -> String {
    let mut out = format!("{}\n", report["command"].as_str().unwrap_or("?"));
    if let Some(results) = report["results"].as_object() {
        for (name, r) in results {
            out.push_str(&format!(
                "  {name:<28} {}  [{}]\n",
                r["value"],
                r["operation"].as_str().unwrap_or("")
            ));
        }
    }
    out
}

pub fn run(cli: &Cli) -> Result<Value, CliError> {
    let tol = &cli.tol;
    match &cli.command {
        Command::Smear {
            measure,
            order,
            multiplicity,
            output,
        } => cmd_smear(measure, *order, *multiplicity, output, tol),
        Command::Check {
            observable,
            covariance,
            norm1,
            regular,
            coarsen,
            equiv,
        } => {
            let any = *covariance || *norm1 || *regular || *coarsen || *equiv;
            let flags = CheckFlags {
                covariance: *covariance || !any,
                norm1: *norm1 || !any,
                regular: *regular || !any,
                coarsen: *coarsen || !any,
                equiv: *equiv || !any,
            };
            cmd_check(observable, flags, tol)
        }
        Command::Kernel {
            kernel,
            multiplicity,
            output,
        } => cmd_kernel(kernel, *multiplicity, output.as_deref(), tol),
        Command::Torus { command } => cmd_torus(command, tol),
        Command::Sg { a, b } => cmd_sg(*a, *b, tol),
        Command::Witness {
            measure,
            multiplicity,
            character,
        } => cmd_witness(measure, *multiplicity, *character, tol),
    }
}

fn cmd_smear(
    measure: &Path,
    order: Option<usize>,
    multiplicity: usize,
    output: &Path,
    tol: &Tolerances,
) -> Result<Value, CliError> {
    let mut report = Report::new("smear");
    let rho = io::parse_measure(&report.read(measure)?)?;
    if let Some(n) = order {
        if n != rho.order() {
            return Err(CliError::Schema(format!(
                "--n {n} does not match the measure document (N = {})",
                rho.order()
            )));
        }
    }
    let (p, _) = povm::canonical_system(rho.order(), multiplicity)?;
    let e = povm::smear_by_measure(&p, &rho)?;
    write_output(output, &io::observable_to_json(&e))?;
    report.put("N", "canonical_system", json!(rho.order()));
    report.put("dim", "canonical_system", json!(e.dim()));
    report.put("multiplicity", "canonical_system", json!(multiplicity));
    report.put(
        "normalization_defect",
        "smear_by_measure",
        json!(e.normalization_defect()),
    );
    report.put("output", "smear_by_measure", json!(output.display().to_string()));
    Ok(report.finish(tol))
}

#[derive(Debug, Clone, Copy)]
struct CheckFlags {
    covariance: bool,
    norm1: bool,
    regular: bool,
    coarsen: bool,
    equiv: bool,
}

fn cmd_check(path: &Path, flags: CheckFlags, tol: &Tolerances) -> Result<Value, CliError> {
    let mut report = Report::new("check");
    let text = report.read(path)?;
    let doc: io::ObservableDoc =
        serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))?;
    let group = crate::group::CyclicGroup::new(doc.n).map_err(|e| CliError::Schema(e.to_string()))?;
    let e = {
        let parsed = io::parse_observable(&text)?;
        povm::Observable::new_with_tol(
            group,
            parsed.atoms().to_vec(),
            tol.tol_effect,
            povm::NORMALIZATION_TOL,
        )?
    };
    let n = e.order();
    let canonical = || -> Result<_, CliError> {
        if !e.dim().is_multiple_of(n) {
            return Err(CliError::Precondition(format!(
                "dimension {} is not a multiple of N = {n}; no canonical system",
                e.dim()
            )));
        }
        Ok(povm::canonical_system(n, e.dim() / n)?)
    };
    let cap = subset_cap();

    if flags.covariance {
        let (_, u) = canonical()?;
        let r = povm::check_covariance(&e, &u, tol.tol_covariance)?;
        report.put("covariant", "check_covariance", json!(r.covariant));
        report.put("covariance_deviation", "check_covariance", json!(r.max_deviation));
    }
    if flags.norm1 {
        let r = povm::has_norm_one_property_capped(&e, tol.tol_norm, cap)?;
        report.put("norm_one", "has_norm_one_property", json!(r.holds));
        report.put("norm_one_worst_set", "has_norm_one_property", set_json(&r.worst_set));
        report.put("norm_one_worst_norm", "has_norm_one_property", json!(r.worst_norm));
    }
    if flags.regular {
        let r = povm::is_regular_capped(&e, tol.tol_regular, cap)?;
        report.put("regular", "is_regular", json!(r.regular));
        report.put("regular_witness", "is_regular", set_json(&r.witness));
        report.put(
            "regular_witness_spectrum",
            "is_regular",
            match r.witness_spectrum {
                Some((lo, hi)) => json!([lo, hi]),
                None => Value::Null,
            },
        );
    }

    let mut extracted: Option<ProbabilityMeasure> = None;
    let mut covariant_kernel = false;
    if flags.coarsen || flags.equiv {
        let (p, _) = canonical()?;
        match coarsegrain::solve_coarsening(&e, &p) {
            Ok(w) => {
                let commutes = coarsegrain::translation_commutes(&w, coarsegrain::CIRCULANT_TOL);
                covariant_kernel = commutes;
                if flags.coarsen {
                    report.put("coarsening_exists", "solve_coarsening", json!(true));
                    report.put(
                        "coarse_kernel",
                        "solve_coarsening",
                        json!(w.matrix().to_vec()),
                    );
                    report.put("kernel_circulant", "translation_commutes", json!(commutes));
                }
                if commutes {
                    let rho = coarsegrain::extract_smearing_measure(&w)?;
                    let rebuilt = povm::smear_by_measure(&p, &rho)?;
                    if flags.coarsen {
                        report.put(
                            "smearing_measure",
                            "extract_smearing_measure",
                            json!(rho.weights()),
                        );
                        report.put(
                            "rebuild_deviation",
                            "smear_by_measure",
                            json!(rebuilt.max_atom_diff(&e)),
                        );
                    }
                    extracted = Some(rho);
                }
            }
            Err(CoarseError::FactorizationFailed(residual)) => {
                if flags.coarsen {
                    report.put("coarsening_exists", "solve_coarsening", json!(false));
                    report.put("factorization_residual", "solve_coarsening", json!(residual));
                }
            }
            Err(other) => return Err(other.into()),
        }
    }
    if flags.equiv {
        let rho = extracted.ok_or_else(|| {
            CliError::Precondition(if covariant_kernel {
                "smearing measure unavailable".into()
            } else {
                "observable is not a covariant smearing; --equiv needs the smearing measure".into()
            })
        })?;
        let r = povm::informationally_equivalent(&rho, tol.tol_transform);
        report.put("info_equivalent", "informationally_equivalent", json!(r.equivalent));
        report.put(
            "zero_characters",
            "informationally_equivalent",
            json!(r.zero_characters),
        );
        report.put(
            "min_abs_transform",
            "informationally_equivalent",
            json!(r.min_abs_transform),
        );
        if let Some(&k0) = r.zero_characters.iter().find(|&&k| k != 0) {
            let (p, _) = canonical()?;
            match povm::inequivalence_witness(&p, &rho, k0) {
                Ok((psi, phi)) => {
                    report.put("witness_character", "inequivalence_witness", json!(k0));
                    report.put("witness_psi", "inequivalence_witness", amplitudes_json(&psi));
                    report.put("witness_phi", "inequivalence_witness", amplitudes_json(&phi));
                }
                // the character passed the decision threshold but not the
                // stricter witness one
                Err(PovmError::NonVanishingTransform { .. }) => {}
                Err(other) => return Err(other.into()),
            }
        }
    }
    Ok(report.finish(tol))
}

fn cmd_kernel(
    path: &Path,
    multiplicity: usize,
    output: Option<&Path>,
    tol: &Tolerances,
) -> Result<Value, CliError> {
    let mut report = Report::new("kernel");
    let nu = io::parse_kernel(&report.read(path)?)?;
    let (p, u) = povm::canonical_system(nu.group().order(), multiplicity)?;
    let e = povm::smear(&p, &nu)?;
    let w = coarsegrain::kernel_from_confidence(&nu);
    let commutes = coarsegrain::translation_commutes(&w, coarsegrain::CIRCULANT_TOL);
    report.put("kernel_circulant", "translation_commutes", json!(commutes));
    report.put(
        "translation_defect",
        "translation_commutes",
        json!(coarsegrain::translation_defect(&w)),
    );
    let cov = povm::check_covariance(&e, &u, tol.tol_covariance)?;
    report.put("covariant", "check_covariance", json!(cov.covariant));
    report.put("covariance_deviation", "check_covariance", json!(cov.max_deviation));
    if commutes {
        let rho = coarsegrain::extract_smearing_measure(&w)?;
        report.put("smearing_measure", "extract_smearing_measure", json!(rho.weights()));
    }
    if let Some(out) = output {
        write_output(out, &io::observable_to_json(&e))?;
        report.put("output", "smear", json!(out.display().to_string()));
    }
    Ok(report.finish(tol))
}

fn cmd_torus(command: &TorusCommand, tol: &Tolerances) -> Result<Value, CliError> {
    match command {
        TorusCommand::Validate { cmatrix } => {
            let mut report = Report::new("torus validate");
            let c = io::parse_cmatrix(&report.read(cmatrix)?)?;
            let v = torus::validate_cmatrix(&c);
            report.put("K", "validate_cmatrix", json!(c.half_width()));
            report.put("valid", "validate_cmatrix", json!(v.valid));
            report.put(
                "violation",
                "validate_cmatrix",
                match v.violation {
                    Some(v) => json!(format!("{v:?}")),
                    None => Value::Null,
                },
            );
            Ok(report.finish(tol))
        }
        TorusCommand::Toeplitz { cmatrix } => {
            let mut report = Report::new("torus toeplitz");
            let c = io::parse_cmatrix(&report.read(cmatrix)?)?;
            let t = torus::commutes_with_sharp(&c);
            report.put("K", "commutes_with_sharp", json!(c.half_width()));
            report.put("toeplitz", "commutes_with_sharp", json!(t.toeplitz));
            report.put(
                "counterexample",
                "commutes_with_sharp",
                match t.first_violation {
                    Some((n, m, k)) => json!([n, m, k]),
                    None => Value::Null,
                },
            );
            report.put(
                "unit_shift_violations",
                "commutes_with_sharp",
                json!(t
                    .unit_shift_violations
                    .iter()
                    .map(|&(n, m, k)| [n, m, k])
                    .collect::<Vec<_>>()),
            );
            Ok(report.finish(tol))
        }
        TorusCommand::Herglotz {
            cmatrix,
            mode,
            grid,
            output,
        } => {
            let mut report = Report::new("torus herglotz");
            let c = io::parse_cmatrix(&report.read(cmatrix)?)?;
            let phi = torus::herglotz_sequence(&c)?;
            report.put("K", "herglotz_sequence", json!(c.half_width()));
            report.put("sequence", "herglotz_sequence", complex_json(phi.values()));
            let (mode_name, rec) = match mode {
                Mode::Fejer => ("fejer", Reconstruction::Fejer { grid: *grid }),
                Mode::Caratheodory => ("caratheodory", Reconstruction::Caratheodory),
            };
            let rho = torus::herglotz_reconstruct(&phi, rec)?;
            let k = phi.half_width();
            let residual = match rec {
                Reconstruction::Caratheodory => torus::moment_residual(&rho, &phi),
                Reconstruction::Fejer { .. } => (-(k as i64)..=k as i64)
                    .map(|j| {
                        let damp = 1.0 - j.unsigned_abs() as f64 / (k + 1) as f64;
                        (rho.moment(j) - phi.get(j) * damp).norm()
                    })
                    .fold(0.0, f64::max),
            };
            report.put("mode", "herglotz_reconstruct", json!(mode_name));
            report.put(
                "measure",
                "herglotz_reconstruct",
                serde_json::to_value(io::torus_measure_to_doc(&rho)).expect("serializes"),
            );
            report.put("moment_residual", "herglotz_reconstruct", json!(residual));
            if let TorusMeasure::Grid(d) = &rho {
                report.put(
                    "min_density",
                    "herglotz_reconstruct",
                    json!(d.iter().copied().fold(f64::INFINITY, f64::min)),
                );
            }
            if let Some(out) = output {
                write_output(out, &io::torus_measure_to_json(&rho))?;
                report.put("output", "herglotz_reconstruct", json!(out.display().to_string()));
            }
            Ok(report.finish(tol))
        }
        TorusCommand::Toigo { half_width, output } => {
            let mut report = Report::new("torus toigo");
            if *half_width == 0 {
                return Err(CliError::Schema("--k must be at least 1".into()));
            }
            let c = torus::toigo_cmatrix(*half_width);
            let v = torus::validate_cmatrix(&c);
            let t = torus::commutes_with_sharp(&c);
            report.put("K", "toigo_cmatrix", json!(half_width));
            report.put("valid", "validate_cmatrix", json!(v.valid));
            report.put("toeplitz", "commutes_with_sharp", json!(t.toeplitz));
            if let Some(out) = output {
                write_output(out, &io::cmatrix_to_json(&c))?;
                report.put("output", "toigo_cmatrix", json!(out.display().to_string()));
            }
            Ok(report.finish(tol))
        }
        TorusCommand::Commutator {
            cmatrix,
            arcs,
            inner,
        } => {
            let mut report = Report::new("torus commutator");
            let c = io::parse_cmatrix(&report.read(cmatrix)?)?;
            if *arcs == 0 {
                return Err(CliError::Schema("--arcs must be positive".into()));
            }
            let parts = Arc::partition(*arcs);
            let inner = inner.unwrap_or_else(|| torus::default_inner(c.half_width()));
            let with_p = torus::commutator_diagnostic(&c, &parts, inner);
            let with_self = torus::self_commutator_diagnostic(&c, &parts, inner);
            report.put("K", "commutator_diagnostic", json!(with_p.half_width));
            report.put("inner", "commutator_diagnostic", json!(with_p.inner));
            report.put("arcs", "commutator_diagnostic", json!(arcs));
            report.put("commutator_with_sharp", "commutator_diagnostic", json!(with_p.value));
            report.put(
                "self_commutator",
                "self_commutator_diagnostic",
                json!(with_self.value),
            );
            Ok(report.finish(tol))
        }
        TorusCommand::FromMeasure {
            measure,
            half_width,
            output,
        } => {
            let mut report = Report::new("torus from-measure");
            let rho = io::parse_torus_measure(&report.read(measure)?)?;
            let c = torus::cmatrix_from_measure(&rho, *half_width);
            report.put("K", "cmatrix_from_measure", json!(half_width));
            report.put("valid", "validate_cmatrix", json!(torus::validate_cmatrix(&c).valid));
            report.put(
                "toeplitz",
                "commutes_with_sharp",
                json!(torus::commutes_with_sharp(&c).toeplitz),
            );
            if let Some(out) = output {
                write_output(out, &io::cmatrix_to_json(&c))?;
                report.put("output", "cmatrix_from_measure", json!(out.display().to_string()));
            }
            Ok(report.finish(tol))
        }
    }
}

fn cmd_sg(a: f64, b: f64, tol: &Tolerances) -> Result<Value, CliError> {
    let mut report = Report::new("sg");
    let m = sterngerlach::build_sg(a, b).map_err(|e| CliError::Invariant(e.to_string()))?;
    let r = sterngerlach::analyze_sg(&m, tol.tol_norm);
    report.put("a", "build_sg", json!(a));
    report.put("b", "build_sg", json!(b));
    report.put("sharp", "analyze_sg", json!(r.is_sharp));
    report.put("norm_one", "analyze_sg", json!(r.has_norm_one));
    report.put("regular", "analyze_sg", json!(r.is_regular));
    report.put("info_equivalent", "analyze_sg", json!(r.is_info_equivalent));
    report.put("trivial", "analyze_sg", json!(r.is_trivial));
    report.put("norms", "analyze_sg", json!([r.norms.0, r.norms.1]));
    Ok(report.finish(tol))
}

fn cmd_witness(
    path: &Path,
    multiplicity: usize,
    character: Option<usize>,
    tol: &Tolerances,
) -> Result<Value, CliError> {
    let mut report = Report::new("witness");
    let rho = io::parse_measure(&report.read(path)?)?;
    let eq = povm::informationally_equivalent(&rho, tol.tol_transform);
    let k0 = match character {
        Some(k) => k,
        None => *eq.zero_characters.iter().find(|&&k| k != 0).ok_or_else(|| {
            CliError::Precondition(
                "transform vanishes nowhere: the smearing is informationally equivalent".into(),
            )
        })?,
    };
    let (p, _) = povm::canonical_system(rho.order(), multiplicity)?;
    let (psi, phi) = povm::inequivalence_witness(&p, &rho, k0)?;
    let e = povm::smear_by_measure(&p, &rho)?;
    let sharp_gap = povm::distribution(p.observable(), &psi)?
        .total_variation(&povm::distribution(p.observable(), &phi)?)?;
    let smeared_gap =
        povm::distribution(&e, &psi)?.total_variation(&povm::distribution(&e, &phi)?)?;
    report.put("character", "inequivalence_witness", json!(k0));
    report.put("psi", "inequivalence_witness", amplitudes_json(&psi));
    report.put("phi", "inequivalence_witness", amplitudes_json(&phi));
    report.put("sharp_tv_gap", "distribution", json!(sharp_gap));
    report.put("smeared_tv_gap", "distribution", json!(smeared_gap));
    Ok(report.finish(tol))
}

impl From<crate::group::GroupError> for CliError {
    fn from(e: crate::group::GroupError) -> Self {
        CliError::Invariant(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn tolerance_flags_parse_alongside_check_flags() {
        let cli = Cli::try_parse_from([
            "fuzzobs",
            "check",
            "--observable",
            "e.json",
            "--covariance",
            "--tol-covariance",
            "1e-6",
        ])
        .unwrap();
        assert_eq!(cli.tol.tol_covariance, 1e-6);
        assert!(matches!(cli.command, Command::Check { covariance: true, norm1: false, .. }));
    }
}
