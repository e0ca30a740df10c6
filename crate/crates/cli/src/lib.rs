//! Command-line front end for `adelic-core`.

use std::fmt::Write as _;
use std::path::PathBuf;

use adelic_core::dynamics::Horizon;
use adelic_core::finiteness::{DEFAULT_N_MAX, DEFAULT_WINDOW};
use adelic_core::mu::{tail_member_mu, tail_mu_sum};
use adelic_core::rational::parse_rational;
use adelic_core::{
    canonical_green, canonical_height_checks, check_eigen, deg_plus, decide_dirichlet,
    decide_pseudoeffective, filtration, finiteness_probe, is_big, lambda_max_asy, lambda_max_n, mu_tot,
    mu_x, section_norm, volume, AdelicDivisor, BranchProfile, Error as CoreError, Extended,
    FormalRationalFunction, Rational, TreePoint,
};
use clap::{Args, Subcommand};
use num_traits::One;
use thiserror::Error;

pub mod problem;

pub use problem::{Dynamics, Options, ProblemFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Precondition(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::Input(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Precondition(_) | CoreError::NonzeroDegree(_) | CoreError::TailCollision(_) => {
                CliError::Precondition(e.to_string())
            }
            CoreError::Internal(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Parse errors in command-line arguments carry no file position.
fn arg_error(what: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Parse { message, .. } => CliError::Input(format!("{what}: {message}")),
        other => CliError::Input(format!("{what}: {other}")),
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the problem file and report the divisor.
    Validate,
    /// `mu_x` on every exceptional branch and the generic value.
    Mu,
    /// Total `mu` over all closed points.
    Mutot,
    /// Decide the Dirichlet property and print a witness.
    Dirichlet,
    /// Decide pseudo-effectivity (requires `deg D > 0`).
    Pseff,
    /// Essential minimum of the height.
    Essmin,
    /// Height at a tree point.
    Height {
        /// `root` or `<cluster>:<t>`, with `t` rational or `inf`.
        #[arg(long)]
        at: String,
    },
    /// `-log ||s||` of a section of `nD`.
    Norm {
        #[arg(short = 'n', long = "level")]
        n: u64,
        #[arg(short = 's', long = "section")]
        s: String,
    },
    /// The norm filtration of `H0(nD)`.
    Filtration {
        #[arg(short = 'n', long = "level")]
        n: u64,
    },
    /// `lambda_max` at level `n`, or the asymptotic value.
    LambdaMax(LambdaMaxArgs),
    /// `deg_+` at level `n`.
    Degplus {
        #[arg(short = 'n', long = "level")]
        n: u64,
    },
    /// The volume sweep `2 deg_+(nD) / n^2` and the exact volume.
    Volume {
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// Bigness with a witness section.
    Big,
    /// Canonical Green function of the eigen-divisor in `[dynamics]`.
    CanonicalGreen(CanonicalArgs),
    /// Check `f^*(D) = d D + (phi)`.
    CheckEigen,
    /// Divisor-level finiteness probe of the `phi_n` sequence.
    Finiteness {
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Write the branch profiles as CSV (`-` for standard output).
    Profiles {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        resolution: Option<u64>,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct LambdaMaxArgs {
    #[arg(short = 'n', long = "level")]
    pub n: Option<u64>,
    #[arg(long)]
    pub asy: bool,
}

#[derive(Debug, Clone, Args)]
#[group(multiple = false)]
pub struct CanonicalArgs {
    #[arg(long)]
    pub steps: Option<u32>,
    #[arg(long)]
    pub tol: Option<String>,
}

pub const DEFAULT_N_SWEEP: u64 = 16;
pub const DEFAULT_RESOLUTION: u64 = 4;
pub const DEFAULT_STEPS: u32 = 8;

/// Runs `cmd` on the problem and returns the report. `profiles` writes its
/// CSV and reports the row count.
pub fn run(cmd: &Command, p: &ProblemFile, jobs: Option<usize>) -> Result<String, CliError> {
    let a = &p.adelic;
    let jobs = jobs.or(p.options.jobs).unwrap_or(1);
    let n_sweep = p.options.n_sweep.unwrap_or(DEFAULT_N_SWEEP);
    let mut out = String::new();
    match cmd {
        Command::Validate => {
            let _ = writeln!(out, "valid");
            let _ = writeln!(out, "D = {}", a.divisor());
            let _ = writeln!(out, "deg D = {}", a.degree());
            let _ = write!(out, "g(root) = {}", a.v0());
        }
        Command::Mu => out = mu_report(a)?,
        Command::Mutot => out = mu_tot(a).to_string(),
        Command::Dirichlet => out = decide_dirichlet(a)?.to_string(),
        Command::Pseff => out = decide_pseudoeffective(a)?.to_string(),
        Command::Essmin => out = a.essential_minimum().to_string(),
        Command::Height { at } => {
            let pt = TreePoint::parse(at).map_err(|e| arg_error("--at", e))?;
            out = a.height(&pt)?.to_string();
        }
        Command::Norm { n, s } => {
            check_level(*n)?;
            let f = FormalRationalFunction::parse(s).map_err(|e| arg_error("-s", e))?;
            out = section_norm(a, &f, *n)?.to_string();
        }
        Command::Filtration { n } => {
            check_level(*n)?;
            out = filtration(a, *n).to_string();
        }
        Command::LambdaMax(args) => {
            if let Some(n) = args.n {
                check_level(n)?;
                out = lambda_max_n(a, n).to_string();
            } else {
                let r = lambda_max_asy(a, n_sweep, jobs)?;
                out.push_str("n,lambda_max_n/n\n");
                for (n, l) in &r.lower_bounds {
                    let _ = writeln!(out, "{n},{l}");
                }
                let _ = write!(out, "exact: {}", r.exact);
            }
        }
        Command::Degplus { n } => {
            check_level(*n)?;
            out = deg_plus(a, *n).to_string();
        }
        Command::Volume { nmax } => {
            let n = nmax.unwrap_or(n_sweep);
            check_level(n)?;
            out = volume(a, n, jobs).report();
        }
        Command::Big => {
            let r = is_big(a)?;
            let _ = write!(out, "big: {}", r.big);
            if let Some((n, s)) = &r.witness {
                let _ = write!(out, "\nwitness: n = {n}, s = {s}");
            }
        }
        Command::CanonicalGreen(args) => {
            let e = p.eigen()?;
            let horizon = match (&args.steps, &args.tol) {
                (_, Some(t)) => Horizon::Tolerance(parse_rational(t).map_err(|e| arg_error("--tol", e))?),
                (Some(m), None) => Horizon::Steps(*m),
                (None, None) => Horizon::Steps(DEFAULT_STEPS),
            };
            let res = canonical_green(&e, a.green(), &horizon)?;
            let _ = writeln!(out, "steps: {}", res.steps);
            let _ = writeln!(out, "lambda_sup: {}", res.lambda_sup);
            let _ = writeln!(out, "error_bound: {}", res.error_bound);
            let exact: Vec<String> = res.exact_branches.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "exact branches: {}", if exact.is_empty() { "none".into() } else { exact.join(", ") });
            let _ = writeln!(out, "v0 = {}", res.green.v0());
            for (x, prof) in res.green.exceptional() {
                let _ = writeln!(out, "branch {x} = {prof}");
            }
            let _ = write!(out, "{}", canonical_height_checks(&e, &res)?);
        }
        Command::CheckEigen => {
            let d = p
                .dynamics
                .as_ref()
                .ok_or_else(|| CliError::Input("problem file has no [dynamics] section".into()))?;
            out = check_eigen(&d.f, a.divisor(), &d.eigenvalue, &d.phi).to_string();
        }
        Command::Finiteness { nmax, window } => {
            let e = p.eigen()?;
            let r = finiteness_probe(&e, nmax.unwrap_or(DEFAULT_N_MAX), window.unwrap_or(DEFAULT_WINDOW))?;
            out = r.to_string();
        }
        Command::Profiles { csv, resolution } => {
            let res = resolution.or(p.options.resolution).unwrap_or(DEFAULT_RESOLUTION);
            let text = emit_profiles(a, res)?;
            if csv.as_os_str() == "-" {
                out = text.trim_end().to_string();
            } else {
                std::fs::write(csv, &text)
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", csv.display())))?;
                let _ = write!(out, "wrote {} rows to {}", text.lines().count() - 1, csv.display());
            }
        }
    }
    Ok(out)
}

fn check_level(n: u64) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Input("level n must be >= 1".into()));
    }
    Ok(())
}

/// Members of each tail listed individually by `mu`.
const LISTED_TAIL_MEMBERS: u64 = 5;

fn mu_report(a: &AdelicDivisor) -> Result<String, CliError> {
    let mut out = String::new();
    for x in a.green().exceptional().keys() {
        let _ = writeln!(out, "{x}: {}", mu_x(a, x)?);
    }
    for (i, t) in a.green().tails().iter().enumerate() {
        for n in t.n0..t.n0 + LISTED_TAIL_MEMBERS {
            let _ = writeln!(out, "{}: {}", t.cluster(n), tail_member_mu(a.v0(), t, n));
        }
        let total = tail_mu_sum(a.v0(), t).map_or(Extended::NegInf, Extended::Finite);
        let _ = writeln!(out, "tail {} total: {total}", i + 1);
    }
    let _ = write!(out, "default: {}", BranchProfile::constant(a.v0().clone()).mu());
    Ok(out)
}

/// CSV rows `branch,t,g,h`: the root, then every exceptional branch (and the
/// first members of each tail) at its breakpoints plus `resolution` interior
/// samples per segment, continuing one unit past the last breakpoint.
pub fn emit_profiles(a: &AdelicDivisor, resolution: u64) -> Result<String, CliError> {
    let mut out = String::from("branch,t,g,h\n");
    let v0 = a.v0();
    let _ = writeln!(out, "root,0,{v0},{v0}");
    let mut branches: Vec<(String, BranchProfile)> = a
        .green()
        .exceptional()
        .iter()
        .map(|(x, p)| (x.to_string(), p.clone()))
        .collect();
    for t in a.green().tails() {
        for n in t.n0..t.n0 + 3 {
            branches.push((t.cluster(n).to_string(), t.member_profile(v0, n)));
        }
    }
    let steps = Rational::from_integer((resolution + 1).into());
    for (name, prof) in &branches {
        let mut ts: Vec<Rational> = prof.points().iter().map(|(t, _)| t.clone()).collect();
        ts.push(ts.last().expect("nonempty") + Rational::one());
        let mut samples = Vec::new();
        for w in ts.windows(2) {
            for k in 0..=resolution {
                samples.push(&w[0] + (&w[1] - &w[0]) * Rational::from_integer(k.into()) / &steps);
            }
        }
        samples.push(ts.last().expect("nonempty").clone());
        let name = if name.contains(',') { format!("\"{name}\"") } else { name.clone() };
        for t in samples {
            let g = prof.value(&t);
            let h = &g - &t * prof.final_slope();
            let _ = writeln!(out, "{name},{t},{g},{h}");
        }
    }
    Ok(out)
}
