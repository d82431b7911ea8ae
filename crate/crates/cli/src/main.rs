mod commands;
mod scenario;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use commands::RunOptions;
use scenario::Scenario;
use table::Table;

#[derive(Debug, Parser)]
#[command(name = "risfade", version, about = "Fading statistics, link sweeps and optimizers for RIS-equipped UAV relays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Envelope density over h for several shadowing shapes, both variants
    PdfSurface(Common),
    /// Exact, Gaussian and simulated CDF of the envelope sum for N = 10, 50, 100
    CltCheck(Common),
    /// Lower, exact and upper mean SNR for N = 1..=20
    SnrBounds(Common),
    /// Simulated and Jensen average capacity against N
    CapacitySweep(Common),
    /// Outage probability against transmit power with the high-SNR bound
    OutageSweep(Common),
    /// Energy-efficient element count, algorithm and exhaustive oracle
    OptimizeN(Common),
    /// Maximum coverage radius, KKT solution and grid oracle
    OptimizeCoverage(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::PdfSurface(c) => ("pdf-surface", c),
            Command::CltCheck(c) => ("clt-check", c),
            Command::SnrBounds(c) => ("snr-bounds", c),
            Command::CapacitySweep(c) => ("capacity-sweep", c),
            Command::OutageSweep(c) => ("outage-sweep", c),
            Command::OptimizeN(c) => ("optimize-n", c),
            Command::OptimizeCoverage(c) => ("optimize-coverage", c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct Common {
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    scenario: Scenario,
}

#[derive(Debug, Args, Serialize)]
struct RunArgs {
    /// Base seed for every simulated series
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials per simulated point
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when omitted
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit
    #[arg(long)]
    #[serde(skip)]
    print_config: bool,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    #[serde(skip)]
    workers: Option<usize>,
    /// First transmit power of a sweep, dBm
    #[arg(long = "ps-from", requires_all = ["ps_to", "ps_step"])]
    ps_from: Option<f64>,
    /// Last transmit power of a sweep, dBm
    #[arg(long = "ps-to", requires_all = ["ps_from", "ps_step"])]
    ps_to: Option<f64>,
    /// Transmit power step of a sweep, dB
    #[arg(long = "ps-step", requires_all = ["ps_from", "ps_to"])]
    ps_step: Option<f64>,
}

#[derive(Serialize)]
struct EffectiveConfig<'a> {
    command: &'a str,
    run: &'a RunArgs,
    scenario: &'a Scenario,
}

enum Failure {
    Model(risfade::Error),
    Io(io::Error),
    Setup(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Model(risfade::Error::Domain(_)) | Failure::Setup(_) => 2,
            Failure::Model(_) => 3,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Model(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
            Failure::Setup(e) => write!(f, "{e}"),
        }
    }
}

impl From<risfade::Error> for Failure {
    fn from(e: risfade::Error) -> Self {
        Failure::Model(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn build(name: &str, common: &Common) -> Result<Table, Failure> {
    let cfg = &common.scenario;
    let r = &common.run;
    let ps_grid = match (r.ps_from, r.ps_to, r.ps_step) {
        (Some(a), Some(b), Some(s)) => {
            if !(s > 0.0 && b >= a) {
                return Err(Failure::Setup("need ps-step > 0 and ps-to >= ps-from".into()));
            }
            Some((a, b, s))
        }
        _ => None,
    };
    let run = RunOptions {
        seed: r.seed,
        trials: r.trials,
        ps_grid,
    };
    Ok(match name {
        "pdf-surface" => commands::pdf_surface(cfg)?,
        "clt-check" => commands::clt_check(cfg, &run)?,
        "snr-bounds" => commands::snr_bounds(cfg)?,
        "capacity-sweep" => commands::capacity_sweep(cfg, &run)?,
        "outage-sweep" => commands::outage_sweep(cfg, &run)?,
        "optimize-n" => commands::optimize_n(cfg, &run)?,
        "optimize-coverage" => commands::optimize_coverage(cfg, &run)?,
        other => unreachable!("unknown command {other}"),
    })
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (name, common) = cli.command.parts();
    let effective = EffectiveConfig {
        command: name,
        run: &common.run,
        scenario: &common.scenario,
    };
    if common.run.print_config {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        serde_json::to_writer_pretty(&mut lock, &effective).map_err(io::Error::from)?;
        writeln!(lock)?;
        return Ok(());
    }
    common.scenario.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = common.run.workers {
        if w == 0 {
            return Err(Failure::Setup("workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Failure::Setup(e.to_string()))?;
    let table = pool.install(|| build(name, common))?;

    let sink: Box<dyn Write> = match &common.run.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match common.run.format {
        Format::Csv => table.write_csv(&mut sink)?,
        Format::Json => table.write_json(&mut sink, &effective, common.run.seed)?,
    }
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
