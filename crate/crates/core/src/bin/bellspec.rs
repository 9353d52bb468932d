//! Command-line front end: build operators from spec files, dump spectra,
//! run identity verification suites, sweep phi, and compute the three-qubit
//! bounds table.
//!
//! Exit codes: 0 success, 1 bad input (malformed file, unsupported n,
//! unknown suite), 2 verification failure.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bellspec::io::{
    bounds_csv, csv_float, load_operator_spec, load_state, spectrum_csv, spectrum_rows, sweep_csv,
};
use bellspec::optimize::SimplexOptions;
use bellspec::verify::run_suite;
use bellspec::violation::{
    bound_lower, bound_upper, ghz_state, optimize_expectation, sweep_phi, table1_states,
    OperatorFamily, OptimizeConfig,
};
use bellspec::{full_spectrum, hermitian_eig, QuantumState};

/// Thread-count environment variable consulted before touching rayon.
const THREADS_ENV: &str = "BELLSPEC_THREADS";

#[derive(Parser)]
#[command(
    name = "bellspec",
    about = "N-qubit Bell operators: closed-form GHZ spectra, MK identities, violation numerics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Base seed for every randomized search.
    #[arg(long, default_value_t = 0xB311)]
    seed: u64,
    /// Random restarts per optimization (0 selects the per-n default).
    #[arg(long, default_value_t = 0)]
    restarts: usize,
    /// Simplex convergence tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format where both are supported.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl RunOpts {
    fn config(&self) -> OptimizeConfig {
        OptimizeConfig {
            seed: self.seed,
            restarts: self.restarts,
            simplex: SimplexOptions {
                diameter_tol: self.tol,
                ..SimplexOptions::default()
            },
        }
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("writing {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form GHZ spectrum of an operator spec file.
    Spectrum {
        /// Operator spec (JSON: n, beta, alpha, alpha_prime[, axes]).
        #[arg(long = "spec", value_name = "FILE")]
        spec: PathBuf,
        /// Cross-check the closed form against the numeric eigensolver.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Randomized verification of the operator identities.
    Verify {
        /// Suite name.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Sweep S_N(phi) over [0, pi/4] and locate the violation threshold.
    Sweep {
        #[arg(long)]
        n: usize,
        /// Number of phi grid points.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        run: RunOpts,
    },
    /// Lower bound, direct optimum and upper bound for a three-qubit state.
    Bounds {
        /// State file (JSON: n plus amplitudes or rho).
        #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
        state: Option<PathBuf>,
        /// Builtin state: ghz3, w, w-mix, asym, biseparable.
        #[arg(long)]
        builtin: Option<String>,
        #[command(flatten)]
        run: RunOpts,
    },
    /// The full four-row bounds table.
    Table1 {
        #[command(flatten)]
        run: RunOpts,
    },
}

fn builtin_state(name: &str) -> anyhow::Result<QuantumState> {
    if name == "ghz3" {
        return Ok(ghz_state(3));
    }
    table1_states()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| s)
        .ok_or_else(|| {
            anyhow!("unknown builtin {name:?}; available: ghz3, w, w-mix, asym, biseparable")
        })
}

fn bounds_row(
    name: &str,
    state: &QuantumState,
    config: &OptimizeConfig,
) -> anyhow::Result<(String, f64, f64, f64)> {
    let s_minus = bound_lower(state, config)?.value;
    let s_rho = optimize_expectation(state, &OperatorFamily::MerminKlyshko, config)?.value;
    let s_plus = bound_upper(state, config)?.value;
    Ok((name.to_string(), s_minus, s_rho, s_plus))
}

fn cmd_spectrum(spec: PathBuf, verify: bool, run: RunOpts) -> anyhow::Result<u8> {
    let op = load_operator_spec(&spec)
        .with_context(|| format!("loading operator spec {}", spec.display()))?;
    let spectrum = full_spectrum(&op).context("computing the closed-form spectrum")?;
    match run.format {
        Format::Csv => run.emit(&spectrum_csv(&spectrum))?,
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&spectrum_rows(&spectrum))?;
            text.push('\n');
            run.emit(&text)?;
        }
    }
    if verify {
        let closed = spectrum.eigenvalues_sorted();
        let (numeric, _) = hermitian_eig(op.matrix())?;
        let worst = closed
            .iter()
            .zip(&numeric)
            .map(|(c, e)| (c - e).abs())
            .fold(0.0, f64::max);
        eprintln!("verify: max eigenvalue residual vs numeric oracle = {}", csv_float(worst));
        if worst >= 1e-9 {
            eprintln!("verify: FAILED (tolerance 1e-9)");
            return Ok(2);
        }
        eprintln!("verify: ok");
    }
    Ok(0)
}

fn cmd_verify(
    suite: String,
    n_min: usize,
    n_max: usize,
    trials: usize,
    run: RunOpts,
) -> anyhow::Result<u8> {
    let reports = run_suite(&suite, n_min, n_max, trials, run.seed)?;
    let mut text = serde_json::to_string_pretty(&reports)?;
    text.push('\n');
    run.emit(&text)?;
    Ok(if reports.iter().all(|r| r.verdict) { 0 } else { 2 })
}

fn cmd_sweep(n: usize, grid: usize, run: RunOpts) -> anyhow::Result<u8> {
    if n < 3 {
        return Err(anyhow!(
            "sweep needs n >= 3; n = 2 has the exact closed form S_2 = sqrt(1 + sin^2 2 phi)"
        ));
    }
    let sweep = sweep_phi(n, grid, &run.config())?;
    run.emit(&sweep_csv(&sweep))?;
    Ok(0)
}

fn cmd_bounds(
    state: Option<PathBuf>,
    builtin: Option<String>,
    run: RunOpts,
) -> anyhow::Result<u8> {
    let (name, state) = match (state, builtin) {
        (Some(path), None) => {
            let loaded =
                load_state(&path).with_context(|| format!("loading state {}", path.display()))?;
            if loaded.normalization_defect > 1e-6 {
                eprintln!(
                    "warning: input state renormalized (defect {})",
                    csv_float(loaded.normalization_defect)
                );
            }
            (
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "state".to_string()),
                loaded.state,
            )
        }
        (None, Some(name)) => {
            let state = builtin_state(&name)?;
            (name, state)
        }
        _ => return Err(anyhow!("pass exactly one of --state or --builtin")),
    };
    if state.n() != 3 {
        return Err(anyhow!(
            "bounds are defined for three-qubit states, got n = {}",
            state.n()
        ));
    }
    let row = bounds_row(&name, &state, &run.config())?;
    run.emit(&bounds_csv(&[row]))?;
    Ok(0)
}

fn cmd_table1(run: RunOpts) -> anyhow::Result<u8> {
    let config = run.config();
    let mut rows = Vec::new();
    for (name, state) in table1_states() {
        rows.push(bounds_row(name, &state, &config)?);
    }
    run.emit(&bounds_csv(&rows))?;
    Ok(0)
}

fn configure_threads() {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum { spec, verify, run } => cmd_spectrum(spec, verify, run),
        Command::Verify {
            suite,
            n_min,
            n_max,
            trials,
            run,
        } => cmd_verify(suite, n_min, n_max, trials, run),
        Command::Sweep { n, grid, run } => cmd_sweep(n, grid, run),
        Command::Bounds {
            state,
            builtin,
            run,
        } => cmd_bounds(state, builtin, run),
        Command::Table1 { run } => cmd_table1(run),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
