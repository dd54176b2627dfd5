//! `lu3`: local-unitary invariants and equivalence tests for three-qubit states.
//!
//! Exit codes: 0 success or `Equivalent`, 1 `Inequivalent` or a failed orbit
//! test, 2 `EquivalentUpToSign` or `Inconclusive`, 3 any error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lu3_core::canonical::{canonicalize, equivalent, Tolerances, Verdict};
use lu3_core::harness::orbit_test;
use lu3_core::invariants::full_fingerprint;
use lu3_core::io::{
    bloch_to_json, density_to_json, fingerprint_to_json, parse_state, recovery_to_json,
    report_to_json, to_json_string, StateInput,
};
use lu3_core::reconstruction::{recover, ReconstructionTol};
use lu3_core::zoo::example_state;
use lu3_core::decompose;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const EXIT_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "lu3", version, about = "Local-unitary invariants of three-qubit mixed states")]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalFlags {
    /// Absolute tolerance of invariant comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_abs: f64,
    /// Relative tolerance of invariant comparisons.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rel: f64,
    /// Canonical vector components at or below this count as zero.
    #[arg(long, global = true, default_value_t = 1e-7)]
    zero_tol: f64,
    /// Relative eigenvalue gap treated as a tie.
    #[arg(long, global = true, default_value_t = 1e-7)]
    deg_tol: f64,
    /// Seed of the random local unitaries drawn by `orbit-test`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random local unitaries drawn by `orbit-test`.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bloch tensor of a density matrix.
    Decompose { input: PathBuf },
    /// Orbit class and the invariants that class needs.
    Fingerprint { input: PathBuf },
    /// Local-unitary equivalence of two states.
    Compare { first: PathBuf, second: PathBuf },
    /// Random local unitaries against the invariants and the conjugation oracle.
    OrbitTest {
        input: PathBuf,
        #[arg(long, hide = true)]
        corrupt_action: bool,
    },
    /// Components of the canonical tensor recovered from the invariants.
    Reconstruct { input: PathBuf },
    /// Density matrix of the three-parameter example family.
    Example {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
    },
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone)]
struct RunConfig {
    tolerances: Tolerances,
    seed: u64,
    trials: usize,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn from_flags(g: &GlobalFlags) -> Result<Self> {
        for (name, v) in [
            ("--tol-abs", g.tol_abs),
            ("--tol-rel", g.tol_rel),
            ("--zero-tol", g.zero_tol),
            ("--deg-tol", g.deg_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive, got {v}");
            }
        }
        if g.trials == 0 {
            bail!("--trials must be at least 1");
        }
        Ok(RunConfig {
            tolerances: Tolerances {
                abs: g.tol_abs,
                rel: g.tol_rel,
                zero: g.zero_tol,
                deg: g.deg_tol,
            },
            seed: g.seed,
            trials: g.trials,
            out: g.out.clone(),
        })
    }

    fn emit(&self, value: &Value) -> Result<()> {
        let text = to_json_string(value);
        match &self.out {
            Some(path) => {
                fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
            }
            None => match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.context("writing to stdout"),
            },
        }
    }
}

fn read_state(path: &Path) -> Result<StateInput> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_state(&text).with_context(|| format!("parsing {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = RunConfig::from_flags(&cli.global)?;
    let tols = &cfg.tolerances;
    match cli.command {
        Command::Decompose { input } => {
            let rho = read_state(&input)?.density();
            cfg.emit(&bloch_to_json(&decompose(&rho)))?;
            Ok(0)
        }
        Command::Fingerprint { input } => {
            let b = decompose(&read_state(&input)?.density());
            let cf = canonicalize(&b, tols.zero, tols.deg);
            cfg.emit(&fingerprint_to_json(&full_fingerprint(&b, &cf.class.kind)))?;
            Ok(0)
        }
        Command::Compare { first, second } => {
            let (a, b) = (read_state(&first)?.density(), read_state(&second)?.density());
            let report = equivalent(&a, &b, tols)?;
            cfg.emit(&report_to_json(&report))?;
            Ok(match report.verdict {
                Verdict::Equivalent => 0,
                Verdict::Inequivalent { .. } => 1,
                Verdict::EquivalentUpToSign | Verdict::Inconclusive { .. } => 2,
            })
        }
        Command::OrbitTest { input, corrupt_action } => {
            let rho = read_state(&input)?.density();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let rep = orbit_test(&rho, cfg.trials, &mut rng, &tols.compare(), corrupt_action)?;
            cfg.emit(&json!({
                "trials": rep.trials,
                "seed": cfg.seed,
                "max_deviation": rep.max_deviation,
                "max_oracle_mismatch": rep.max_oracle_mismatch,
                "failed_trials": rep.failed_trials,
                "first_failing_invariant": rep.worst,
                "passed": rep.passed(),
            }))?;
            Ok(if rep.passed() { 0 } else { 1 })
        }
        Command::Reconstruct { input } => {
            let b = decompose(&read_state(&input)?.density());
            let cf = canonicalize(&b, tols.zero, tols.deg);
            let fp = full_fingerprint(&b, &cf.class.kind);
            let rec = recover(&fp, &cf, &ReconstructionTol::default())?;
            cfg.emit(&recovery_to_json(&rec, &cf))?;
            Ok(0)
        }
        Command::Example { a, b, c } => {
            cfg.emit(&density_to_json(&example_state(a, b, c)?))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
