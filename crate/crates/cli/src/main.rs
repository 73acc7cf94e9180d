use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use ocd_core::fxp::FixedPointFormat;
use ocd_core::{
    emit_csv, multiplication_count_cd, multiplication_count_ocd, run_sweep, verify, Detector, Error, Scheme,
    SimConfig, SimReport,
};

/// Simulation harness for coordinate-descent MIMO detectors
#[derive(Parser, Debug)]
#[command(name = "ocd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a Monte-Carlo error-rate sweep and write a CSV report
    Simulate(Box<SimulateArgs>),
    /// Run the fast self-check suite
    Verify,
    /// Print real-valued multiplication counts of CD and OCD
    Count {
        #[arg(long)]
        b: u64,
        #[arg(long)]
        u: u64,
        /// Iteration counts, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4])]
        k: Vec<u64>,
    },
}

#[derive(Args, Debug, Default)]
struct SimulateArgs {
    /// TOML file with the same keys as the flags; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base-station antennas
    #[arg(long)]
    b: Option<usize>,
    /// Users
    #[arg(long)]
    u: Option<usize>,
    /// bpsk, qpsk, qam16 or qam64
    #[arg(long = "mod")]
    modulation: Option<String>,
    /// Detector name; several may be given, comma separated
    #[arg(long)]
    detector: Option<String>,
    /// Iterations of the coordinate-descent detectors
    #[arg(long)]
    k: Option<usize>,
    /// Eb/N0 grid in dB as start:step:stop, or a single value
    #[arg(long, allow_hyphen_values = true)]
    ebn0: Option<String>,
    /// Trials per grid point
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed-point datapath format as total:frac
    #[arg(long)]
    fxp: Option<String>,
    /// Worker threads (defaults to the number of CPUs)
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fill the wall_seconds column (makes the report non-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    b: Option<usize>,
    u: Option<usize>,
    #[serde(rename = "mod")]
    modulation: Option<String>,
    detector: Option<String>,
    k: Option<usize>,
    ebn0: Option<String>,
    trials: Option<u64>,
    seed: Option<u64>,
    fxp: Option<String>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    timing: Option<bool>,
}

/// Errors split by exit status: bad input versus failures while running.
enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Configuration(_) | Error::Parameter(_) | Error::InputShape(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Config(format!("missing --{flag} (flag or config file)")))
}

fn resolve(args: SimulateArgs) -> Result<(Vec<SimConfig>, PathBuf), Failure> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let b = required(args.b.or(file.b), "b")?;
    let u = required(args.u.or(file.u), "u")?;
    let scheme: Scheme = required(args.modulation.or(file.modulation), "mod")?.parse()?;
    let detectors = required(args.detector.or(file.detector), "detector")?
        .split(',')
        .map(|d| d.trim().parse::<Detector>())
        .collect::<Result<Vec<_>, _>>()?;
    let k = args.k.or(file.k).unwrap_or(3);
    let ebn0_grid = SimConfig::parse_grid(&required(args.ebn0.or(file.ebn0), "ebn0")?)?;
    let trials = required(args.trials.or(file.trials), "trials")?;
    let seed = required(args.seed.or(file.seed), "seed")?;
    let fxp_format = args
        .fxp
        .or(file.fxp)
        .map(|s| s.parse::<FixedPointFormat>())
        .transpose()?;
    let workers = args
        .workers
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = required(args.out.or(file.out), "out")?;
    let record_wall_time = args.timing || file.timing.unwrap_or(false);

    let configs = detectors
        .into_iter()
        .map(|detector| SimConfig {
            b,
            u,
            scheme,
            detector,
            k,
            ebn0_grid: ebn0_grid.clone(),
            trials_per_point: trials,
            master_seed: seed,
            fxp_format,
            workers,
            record_wall_time,
        })
        .collect::<Vec<_>>();
    for cfg in &configs {
        cfg.validate()?;
    }
    Ok((configs, out))
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let (configs, out) = resolve(args)?;
    let mut reports = Vec::with_capacity(configs.len());
    for cfg in &configs {
        let report = run_sweep(cfg)?;
        for row in &report.rows {
            eprintln!(
                "{:<13} K={} Eb/N0 {:>6.2} dB  BER {:.3e}  SER {:.3e}",
                row.detector, row.k, row.ebn0_db, row.ber, row.ser
            );
        }
        reports.push(report);
    }
    emit_csv(&SimReport::merge(reports), &out)?;
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn run_verify() -> Result<(), Failure> {
    let checks = verify::run_fast()?;
    let mut failed = 0;
    for c in &checks {
        println!("{} {:<20} {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} of {} checks failed", checks.len())));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn count(b: u64, u: u64, ks: &[u64]) -> Result<(), Failure> {
    if u == 0 || b < u {
        return Err(Failure::Config(format!("need B >= U >= 1, got B = {b}, U = {u}")));
    }
    println!("B = {b}, U = {u}");
    println!("{:>4} {:>14} {:>14} {:>8}", "K", "CD", "OCD", "CD/OCD");
    for &k in ks {
        let cd = multiplication_count_cd(b, u, k);
        let ocd = multiplication_count_ocd(b, u, k);
        println!("{k:>4} {cd:>14} {ocd:>14} {:>8.3}", cd as f64 / ocd as f64);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate(*args),
        Command::Verify => run_verify(),
        Command::Count { b, u, k } => count(b, u, &k),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
