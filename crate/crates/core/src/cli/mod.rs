//! The `xree` command line: `compute`, `selftest`, `oracle` and `scan`.
//!
//! State documents are JSON lines (see `schemas/state_input.schema.json`);
//! results are JSON lines too, except `scan`, which writes CSV. Exit codes are
//! 0 on success, 1 on invalid input and 2 when the CSS ansatz fails.

pub mod input;
pub mod scan;
pub mod selftest;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{oracle_ree_from, OracleConfig, ProductTerm, StructureFingerprint};
use crate::qmath::relative_entropy;
use crate::ree::{compute_ree_with, Branch, CssSolution, ReeResult};
use crate::tolerances::Tolerances;

pub use input::{ParamsDoc, ResolvedState, StateInput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ANSATZ_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "xree", version, about = "Relative entropy of entanglement for two-qubit X-like states")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the oracle and scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// REE and closest separable state of each input state.
    Compute {
        #[command(flatten)]
        source: SourceArgs,
        /// Also run the brute-force oracle.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        oracle_args: OracleArgs,
        /// Also report the REE in bits.
        #[arg(long)]
        bits: bool,
    },
    /// Reproduce the reference values and print a pass/fail table.
    Selftest,
    /// Brute-force REE by minimizing over product-state mixtures.
    Oracle {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        oracle_args: OracleArgs,
        #[arg(long)]
        bits: bool,
    },
    /// Evaluate the solver over a parameter grid and write CSV.
    Scan {
        #[arg(long, value_enum, default_value = "theorem3")]
        space: scan::Space,
        /// Straight line FROM:TO, each five comma-separated coordinates.
        #[arg(long, conflicts_with = "axis")]
        line: Option<String>,
        /// Number of points on --line, ends included.
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// name=value or name=start:stop:step; repeat per coordinate. One
        /// simplex coordinate may be omitted and is then the complement.
        #[arg(long)]
        axis: Vec<String>,
        /// Refuse grids larger than this.
        #[arg(long, default_value_t = 1_000_000)]
        max_points: usize,
    },
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// JSON-lines file of state documents (`-` for stdin).
    #[arg(long, conflicts_with_all = ["params", "family"])]
    pub input: Option<PathBuf>,
    /// a1,a2,a3,a4,d[,phi]
    #[arg(long, conflicts_with = "family", allow_hyphen_values = true)]
    pub params: Option<String>,
    /// NAME:w1,w2,...  e.g. rains or vp:0.5,0.3,0.2
    #[arg(long)]
    pub family: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = OracleConfig::default().restarts)]
    pub restarts: usize,
    /// Product terms in the mixture.
    #[arg(long, default_value_t = OracleConfig::default().num_product_terms)]
    pub terms: usize,
    /// Objective evaluations per start.
    #[arg(long, default_value_t = OracleConfig::default().max_iterations)]
    pub max_iterations: usize,
}

impl OracleArgs {
    pub fn config(&self) -> OracleConfig {
        OracleConfig {
            num_product_terms: self.terms,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            rng_seed: self.seed,
            ..OracleConfig::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CssDoc {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub y: f64,
    pub phi: f64,
    pub x: f64,
}

impl From<&CssSolution> for CssDoc {
    fn from(c: &CssSolution) -> Self {
        Self { r1: c.r1, r2: c.r2, r3: c.r3, r4: c.r4, y: c.y, phi: c.phi, x: c.x }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeDoc {
    pub ree_nats: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ree_bits: Option<f64>,
    pub branch: Branch,
    pub css: Option<CssDoc>,
    pub css_matrix: Option<Vec<Vec<[f64; 2]>>>,
    pub residual_max: Option<f64>,
    pub edge_min_eig: Option<f64>,
    pub elapsed: f64,
    pub diagnostics: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleDoc {
    pub ree_upper_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ree_upper_bound_bits: Option<f64>,
    pub sigma: Vec<Vec<[f64; 2]>>,
    pub terms: Vec<ProductTerm>,
    pub converged: bool,
    pub iterations_used: usize,
    pub restart_best_index: usize,
    pub cold_start_best: f64,
    pub warm_started: bool,
    pub fingerprint: StructureFingerprint,
    pub closed_branch: Option<Branch>,
    pub closed_ree: Option<f64>,
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorDoc {
    pub error: ErrorBody,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<(usize, usize, f64)>,
}

impl From<&Error> for ErrorDoc {
    fn from(e: &Error) -> Self {
        let kind = match e {
            Error::NoConvergence { .. } => "no_convergence",
            Error::InvalidState(_) => "invalid_state",
            Error::SingularPhase { .. } => "singular_phase",
            Error::NotInFamily { .. } => "not_in_family",
            Error::Domain(_) => "domain",
            Error::WrongBranch(_) => "wrong_branch",
            Error::LogDomain(_) => "log_domain",
            Error::InfiniteDivergence { .. } => "infinite_divergence",
            Error::Internal(_) => "internal",
            Error::Parse(_) => "parse",
        };
        let entries = match e {
            Error::NotInFamily { entries } => entries.clone(),
            _ => Vec::new(),
        };
        Self { error: ErrorBody { kind, message: e.to_string(), entries } }
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn to_bits(v: f64) -> f64 {
    v / std::f64::consts::LN_2
}

pub fn compute_doc(r: &ReeResult, elapsed: f64, bits: bool) -> ComputeDoc {
    ComputeDoc {
        ree_nats: r.ree,
        ree_bits: if bits { r.ree.map(to_bits) } else { None },
        branch: r.branch,
        css: r.css.as_ref().map(CssDoc::from),
        css_matrix: r.css.as_ref().map(|c| input::matrix_doc(&c.matrix())),
        residual_max: finite(r.residual_max),
        edge_min_eig: r.edge_min_eig,
        elapsed,
        diagnostics: r.diagnostics.clone(),
        oracle: None,
    }
}

pub fn oracle_doc(state: &ResolvedState, closed: Option<&ReeResult>, cfg: &OracleConfig, bits: bool) -> Result<OracleDoc> {
    let warm = closed.filter(|r| r.branch != Branch::AnsatzFailure).and_then(|r| r.css);
    let out = oracle_ree_from(&state.rho, cfg, warm.as_ref())?;
    let sigma = out.sigma.to_matrix();
    // recomputed from the reported sigma
    let value = relative_entropy(&state.rho, &out.sigma())?;
    let closed_ree = closed.and_then(|r| r.ree);
    Ok(OracleDoc {
        ree_upper_bound: value,
        ree_upper_bound_bits: bits.then(|| to_bits(value)),
        sigma: input::matrix_doc(&sigma),
        terms: out.terms,
        converged: out.converged,
        iterations_used: out.iterations_used,
        restart_best_index: out.restart_best_index,
        cold_start_best: out.cold_start_best,
        warm_started: out.warm_started,
        fingerprint: StructureFingerprint::of(&sigma),
        closed_branch: closed.map(|r| r.branch),
        closed_ree,
        difference: closed_ree.map(|c| (c - value).abs()),
    })
}

fn collect_inputs(src: &SourceArgs) -> Result<Vec<Result<StateInput>>> {
    match (&src.input, &src.params, &src.family) {
        (Some(path), None, None) => {
            if path.as_os_str() == "-" {
                input::read_documents(std::io::stdin().lock())
            } else {
                let f = File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                input::read_documents(BufReader::new(f))
            }
        }
        (None, Some(p), None) => Ok(vec![input::parse_params_flag(p)]),
        (None, None, Some(f)) => Ok(vec![input::parse_family_flag(f)]),
        _ => Err(Error::Parse("give exactly one of --input, --params, --family".into())),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let line = serde_json::to_string(v).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(out, "{line}").map_err(|e| Error::Internal(format!("write: {e}")))
}

fn report_error(out: &mut dyn Write, err: &mut dyn Write, e: &Error) -> Result<()> {
    let _ = writeln!(err, "xree: {e}");
    write_json(out, &ErrorDoc::from(e))
}

fn in_pool<R: Send>(pool: Option<&rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_compute(
    src: &SourceArgs,
    with_oracle: bool,
    oa: &OracleArgs,
    bits: bool,
    tol: &Tolerances,
    pool: Option<&rayon::ThreadPool>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mut code = EXIT_OK;
    let cfg = oa.config();
    for doc in collect_inputs(src)? {
        let t = Instant::now();
        let solved = doc.and_then(|d| d.resolve()).and_then(|s| {
            let r = compute_ree_with(&s.params.clone()?, tol)?;
            Ok((s, r))
        });
        match solved {
            Ok((state, r)) => {
                let mut d = compute_doc(&r, t.elapsed().as_secs_f64(), bits);
                if with_oracle {
                    match in_pool(pool, || oracle_doc(&state, Some(&r), &cfg, bits)) {
                        Ok(o) => d.oracle = Some(o),
                        Err(e) => {
                            let _ = writeln!(err, "xree: oracle failed: {e}");
                        }
                    }
                }
                if r.branch == Branch::AnsatzFailure && code == EXIT_OK {
                    code = EXIT_ANSATZ_FAILURE;
                }
                write_json(out, &d)?;
            }
            Err(e) => {
                report_error(out, err, &e)?;
                code = EXIT_INVALID;
            }
        }
    }
    Ok(code)
}

fn cmd_oracle(
    src: &SourceArgs,
    oa: &OracleArgs,
    bits: bool,
    tol: &Tolerances,
    pool: Option<&rayon::ThreadPool>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mut code = EXIT_OK;
    let cfg = oa.config();
    cfg.validate()?;
    for doc in collect_inputs(src)? {
        let done = doc.and_then(|d| d.resolve()).and_then(|s| {
            let closed = s.params.as_ref().ok().map(|p| compute_ree_with(p, tol)).transpose()?;
            in_pool(pool, || oracle_doc(&s, closed.as_ref(), &cfg, bits))
        });
        match done {
            Ok(d) => write_json(out, &d)?,
            Err(e) => {
                report_error(out, err, &e)?;
                code = EXIT_INVALID;
            }
        }
    }
    Ok(code)
}

fn dispatch(
    cli: &Cli,
    tol: &Tolerances,
    pool: Option<&rayon::ThreadPool>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    match &cli.command {
        Command::Compute { source, oracle, oracle_args, bits } => {
            cmd_compute(source, *oracle, oracle_args, *bits, tol, pool, out, err)
        }
        Command::Oracle { source, oracle_args, bits } => cmd_oracle(source, oracle_args, *bits, tol, pool, out, err),
        Command::Selftest => {
            let rows = selftest::rows(tol);
            write!(out, "{}", selftest::render(&rows)).map_err(|e| Error::Internal(format!("write: {e}")))?;
            Ok(if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Scan { space, line, points, axis, max_points } => {
            let grid = match line {
                Some(l) => {
                    let (from, to) = scan::parse_line(l)?;
                    scan::Grid::Line { from, to, points: *points }
                }
                None => scan::Grid::Axes(axis.iter().map(|a| scan::parse_axis(a)).collect::<Result<_>>()?),
            };
            let rows = in_pool(pool, || scan::evaluate(*space, &grid, *max_points, tol))?;
            let skipped = scan::write_csv(*space, rows, out)?;
            if skipped > 0 {
                let _ = writeln!(err, "xree: warning: skipped {skipped} infeasible grid points");
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "xree: REE_TOL_OVERRIDE: {e}");
            return EXIT_INVALID;
        }
    };

    let mut file;
    let out: &mut dyn Write = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file = std::io::BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let _ = writeln!(stderr, "xree: {}: {e}", path.display());
                return EXIT_INVALID;
            }
        },
        None => stdout,
    };

    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => dispatch(&cli, &tol, Some(&pool), out, stderr),
            Err(e) => Err(Error::Domain(format!("--threads {n}: {e}"))),
        },
        None => dispatch(&cli, &tol, None, out, stderr),
    };
    let code = match result {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "xree: {e}");
            EXIT_INVALID
        }
    };
    if out.flush().is_err() {
        return EXIT_INVALID;
    }
    code
}
