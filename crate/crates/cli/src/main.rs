//! gdnet: grow-and-destroy scale-free networks from the command line.

mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gdnet_core::sweep::RESULTS_HEADER;
use gdnet_core::{
    direction_report, range_check, read_results_csv, run_single, run_sweep, AttackSpec, Error,
    GenerationParams, Result, RunConfig, SweepGrid,
};

use config::{parse_attacks, parse_list, single, FileConfig, Settings};

const EXIT_PARAMETER: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gdnet",
    version,
    about = "Grow-and-destroy scale-free network generator",
    after_help = "Exit codes: 0 success, 1 parameter error, 2 i/o error, 3 partial sweep failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one parameter point and print its result rows
    Generate(RunArgs),
    /// Run every combination of the parameter lists
    Sweep(RunArgs),
    /// Direction and range reports from an existing results.csv
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file; these flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grown network size [default: 30000] (sweep: comma list)
    #[arg(long)]
    n0: Option<String>,
    /// Links per new node [default: 3] (sweep: comma list)
    #[arg(long)]
    m: Option<String>,
    /// Probability of the popularity rule, in [0, 1] [default: 0.5] (sweep: comma list)
    #[arg(long)]
    p: Option<String>,
    /// central, peripheral, general or none [default: none] (sweep: comma list)
    #[arg(long)]
    attack: Option<String>,
    /// Fraction of grown nodes to remove [default: 0] (sweep: comma list)
    #[arg(long)]
    eta: Option<String>,
    /// Master seed [default: 0]; replica r of cell c runs on mix(seed, c, r)
    #[arg(long)]
    seed: Option<u64>,
    /// Replicas per parameter point [default: generate 1, sweep 20]
    #[arg(long)]
    replicas: Option<usize>,
    /// Output directory; results.csv and exports land here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-replica files: comma list of edges, nodes, hist, clusters
    #[arg(long)]
    export: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// results.csv written by generate or sweep
    results: PathBuf,
    /// Directory for direction.csv and ranges.csv (stdout only if absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings> {
        let flags = FileConfig {
            n0: self.n0.as_deref().map(|s| parse_list("n0", s)).transpose()?,
            m: self.m.as_deref().map(|s| parse_list("m", s)).transpose()?,
            p: self.p.as_deref().map(|s| parse_list("p", s)).transpose()?,
            attack: self.attack.as_deref().map(parse_attacks).transpose()?,
            eta: self
                .eta
                .as_deref()
                .map(|s| parse_list("eta", s))
                .transpose()?,
            seed: self.seed,
            replicas: self.replicas,
            out: self.out.clone(),
            export: self
                .export
                .as_deref()
                .map(gdnet_core::ExportFlags::parse)
                .transpose()?,
        };
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let settings = flags.or(file).settings();
        if settings.export.any() && settings.out.is_none() {
            return Err(Error::Parameter(
                "export needs an output directory (--out or `out` in the config)".into(),
            ));
        }
        Ok(settings)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let parameter_error = e.use_stderr();
            let _ = e.print();
            return if parameter_error {
                ExitCode::from(EXIT_PARAMETER)
            } else {
                ExitCode::SUCCESS // --help / --version
            };
        }
    };
    let result = match cli.command {
        Command::Generate(args) => generate(&args),
        Command::Sweep(args) => sweep(&args),
        Command::Report(args) => report(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gdnet: {e}");
            ExitCode::from(match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_PARAMETER,
            })
        }
    }
}

fn print_rows(rows: &[gdnet_core::ResultRow]) {
    println!("{RESULTS_HEADER}");
    for row in rows {
        println!("{}", row.to_csv_line());
    }
}

fn generate(args: &RunArgs) -> Result<ExitCode> {
    let s = args.settings()?;
    let params = GenerationParams::new(
        single("n0", &s.n0s)?,
        single("m", &s.ms)?,
        single("p", &s.ps)?,
    )?;
    let attack = AttackSpec::new(single("attack", &s.attacks)?, single("eta", &s.etas)?)?;
    let mut cfg = RunConfig::new(params, attack, s.seed);
    cfg.replicas = s.replicas.unwrap_or(1);
    cfg.out_dir = s.out;
    cfg.exports = s.export;
    let rows = run_single(&cfg)?;
    print_rows(&rows);
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &RunArgs) -> Result<ExitCode> {
    let s = args.settings()?;
    let grid = SweepGrid {
        n0s: s.n0s,
        ms: s.ms,
        ps: s.ps,
        attacks: s.attacks,
        etas: s.etas,
        replicas: s.replicas.unwrap_or(20),
        seed: s.seed,
        out_dir: s.out,
        exports: s.export,
    };
    let planned = grid.cells().len() * grid.replicas;
    let outcome = run_sweep(&grid)?;
    print_rows(&outcome.rows);
    if !outcome.complete() {
        eprintln!(
            "gdnet: {} of {planned} replicas failed{}",
            outcome.failures.len(),
            if grid.out_dir.is_some() {
                " (recorded in failures.csv)"
            } else {
                ""
            }
        );
        for failure in &outcome.failures {
            eprintln!(
                "gdnet:   cell {} (n0={} m={} p={} {}@{}) replica {}: {}",
                failure.cell,
                failure.n0,
                failure.m,
                failure.p,
                failure.attack,
                failure.eta,
                failure.replica,
                failure.message
            );
        }
        return Ok(ExitCode::from(EXIT_PARTIAL));
    }
    Ok(ExitCode::SUCCESS)
}

fn report(args: &ReportArgs) -> Result<ExitCode> {
    let rows = read_results_csv(&args.results)?;
    if rows.is_empty() {
        return Err(Error::Parameter(format!(
            "no result rows in {}",
            args.results.display()
        )));
    }
    let directions = direction_report(&rows);
    let ranges = range_check(&rows);
    print!("{}", directions.render());
    println!();
    print!("{}", ranges.render());
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        directions.write_csv(fs::File::create(dir.join("direction.csv"))?)?;
        ranges.write_csv(fs::File::create(dir.join("ranges.csv"))?)?;
    }
    Ok(ExitCode::SUCCESS)
}
