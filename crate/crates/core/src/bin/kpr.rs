//! Command-line front end: `kpr simulate|bounds|verify|sweep`.
//!
//! Exit codes: 0 success, 1 failed verification, 2 I/O error, 64 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kaczmarz_phase::harness::{
    compute_bounds, read_signal_file, run_suite, simulate, sweep, BoundsOptions, ExperimentConfig,
    InitKind, Suite, VerifyParams,
};
use kaczmarz_phase::{Error, ModeTag};

const EXIT_FAIL: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "kpr",
    version,
    about = "Randomized Kaczmarz phase retrieval experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write a per-iteration CSV summary.
    Simulate(SimulateArgs),
    /// Print theory constants for one (alpha, n, error ratio) as JSON.
    Bounds(BoundsArgs),
    /// Monte Carlo checks of the concentration lemmas and step identities.
    Verify(VerifyArgs),
    /// Simulate both modes over a list of alphas.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Finite,
    Online,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Spectral,
    Zero,
    Given,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Lemma2,
    Lemma3,
    Lemma4,
    Step,
    Expectation,
    All,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "KPR_SEED", default_value_t = 0)]
    seed: u64,
    /// Iterations per trial (default 40 n).
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, value_enum, default_value = "spectral")]
    init: InitArg,
    /// Initial point for `--init given`, as n little-endian f64 values.
    #[arg(long)]
    init_file: Option<PathBuf>,
    /// Fixed ground truth for every trial, same format as `--init-file`.
    #[arg(long)]
    signal_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    trace_stride: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV destination (stdout when absent); metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    #[arg(long, required_unless_present = "m")]
    alpha: Option<f64>,
    /// Pool size; overrides `round(alpha n)`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value = "finite")]
    mode: ModeArg,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Comma-separated list, e.g. `4,6,8,12`.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    n: usize,
    /// `||x0 - x*|| / ||x*||`.
    #[arg(long, default_value_t = 0.0)]
    err_ratio: f64,
    #[arg(long, default_value_t = 0.5)]
    eps1: f64,
    #[arg(long, default_value_t = 0.5)]
    eps2: f64,
    #[arg(long, default_value_t = 0.5)]
    eps3: f64,
    #[arg(long, default_value_t = 0.0)]
    delta_beta: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, env = "KPR_SEED", default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Io(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => Failure::Io(io.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Io(msg)) => {
            eprintln!("kpr: i/o error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("kpr: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn base_config(c: &ExperimentArgs, m: usize, mode: ModeTag) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::new(c.n, 1.0, mode)
        .seed(c.seed)
        .stride(c.trace_stride);
    cfg.m = m;
    if let Some(t) = c.trials {
        cfg = cfg.trials(t);
    }
    if let Some(t) = c.iters {
        cfg = cfg.iterations(t);
    }
    if let Some(w) = c.workers {
        cfg = cfg.workers(w);
    }
    cfg.init = match (c.init, &c.init_file) {
        (InitArg::Given, Some(path)) => InitKind::Given(read_input(path, c.n)?),
        (InitArg::Given, None) => {
            return Err(Failure::Usage("--init given requires --init-file".into()))
        }
        (_, Some(_)) => {
            return Err(Failure::Usage(
                "--init-file is only used with --init given".into(),
            ))
        }
        (InitArg::Spectral, None) => InitKind::Spectral,
        (InitArg::Zero, None) => InitKind::Zero,
    };
    if let Some(path) = &c.signal_file {
        cfg.signal = Some(read_input(path, c.n)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_input(path: &Path, n: usize) -> Result<kaczmarz_phase::Signal, Failure> {
    read_signal_file(path, n).map_err(|e| match e {
        Error::Io(io) => Failure::Io(format!("{}: {io}", path.display())),
        other => Failure::Usage(other.to_string()),
    })
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let n = a.common.n;
    let m = match (a.m, a.alpha) {
        (Some(m), _) => m,
        (None, Some(alpha)) if alpha > 0.0 && alpha.is_finite() => {
            kaczmarz_phase::harness::pool_size(alpha, n)
        }
        (None, alpha) => {
            return Err(Failure::Usage(format!(
                "alpha must be positive, got {alpha:?}"
            )))
        }
    };
    let mode = match a.mode {
        ModeArg::Finite => ModeTag::Finite,
        ModeArg::Online => ModeTag::Online,
    };
    let cfg = base_config(&a.common, m, mode)?;
    let summary = simulate(&cfg)?;
    let mut out = open_out(&a.common.out)?;
    summary.write_csv(&mut out, None, true)?;
    out.flush()?;
    if let Some(path) = &a.common.out {
        let meta = serde_json::to_string_pretty(&summary.metadata).expect("metadata serializes");
        std::fs::write(meta_path(path), meta + "\n")?;
    }
    if summary.metadata.nonconverged_inits > 0 {
        eprintln!(
            "kpr: warning: spectral initialization did not converge in {} of {} trials",
            summary.metadata.nonconverged_inits, summary.metadata.trials
        );
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let base = base_config(&a.common, a.common.n.max(1), ModeTag::Finite)?;
    let report = sweep(&a.alphas, &base)?;
    let mut out = open_out(&a.common.out)?;
    report.write_csv(&mut out)?;
    out.flush()?;
    for mode in [ModeTag::Finite, ModeTag::Online] {
        let medians: Vec<String> = report
            .final_medians(mode)
            .iter()
            .map(|(alpha, v)| format!("alpha={alpha}: {v:.3e}"))
            .collect();
        eprintln!("{mode} final median sq. error: {}", medians.join(", "));
    }
    let verdict = if report.strictly_decreasing(ModeTag::Finite) {
        "strictly decreasing"
    } else {
        "NOT strictly decreasing"
    };
    eprintln!("finite-mode final median error vs alpha: {verdict}");
    Ok(())
}

fn cmd_bounds(a: BoundsArgs) -> Result<(), Failure> {
    let opts = BoundsOptions {
        eps1: a.eps1,
        eps2: a.eps2,
        eps3: a.eps3,
        delta_beta: a.delta_beta,
    };
    let (bounds, warnings) = compute_bounds(a.alpha, a.n, a.err_ratio, &opts)?;
    for w in &warnings {
        eprintln!("kpr: warning: {w}");
    }
    println!("{}", bounds.to_json());
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let suite = match a.suite {
        SuiteArg::Lemma2 => Suite::Lemma2,
        SuiteArg::Lemma3 => Suite::Lemma3,
        SuiteArg::Lemma4 => Suite::Lemma4,
        SuiteArg::Step => Suite::Step,
        SuiteArg::Expectation => Suite::Expectation,
        SuiteArg::All => Suite::All,
    };
    let params = VerifyParams {
        n: a.n,
        m: a.m,
        p: a.p,
        t: a.t,
        eps: a.eps,
        alpha: a.alpha,
        trials: a.trials,
        draws: a.draws,
        seed: a.seed,
    };
    let reports = run_suite(suite, &params)?;
    let mut all_ok = true;
    for r in &reports {
        println!("{r}");
        all_ok &= r.passed();
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
