use std::path::PathBuf;
use std::process::ExitCode;

use capacity_lab::experiments::{
    run_scenario, LoadedScenario, ReportFormat, EXIT_ASSERTION, EXIT_INVALID, EXIT_PASS,
};
use capacity_lab::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "capacity-lab", version, about = "Run capacity scenarios and write reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continuity-from-above gaps along a decreasing chain
    ChainProbe(RunArgs),
    /// Huber contamination: Lusin optimum and chain gaps bounded below
    Counterexample(RunArgs),
    /// Supremum of measures: Lusin optimum and chain gaps vanish
    PositiveCase(RunArgs),
    /// Exact, greedy and brute-force Lusin solvers over an (eta, scale) grid
    LusinSweep(RunArgs),
    /// Axiom, sub-additivity, 2-alternation and core checks over a zoo
    PropertySweep(RunArgs),
    /// Closed neighbourhood of an intersection versus intersection of neighbourhoods
    SetEquality(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the scenario's output.dir, then ./reports
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Report format; defaults to the scenario's output.format, then json
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Command {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::ChainProbe(a) => ("chain-probe", a),
            Command::Counterexample(a) => ("counterexample", a),
            Command::PositiveCase(a) => ("positive-case", a),
            Command::LusinSweep(a) => ("lusin-sweep", a),
            Command::PropertySweep(a) => ("property-sweep", a),
            Command::SetEquality(a) => ("set-equality", a),
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let (kind, args) = cli.command.parts();
    let mut scenario = LoadedScenario::load(&args.config)?;
    if scenario.config.run.kind() != kind {
        return Err(Error::Config(format!(
            "{} describes a {} run, not {kind}",
            args.config.display(),
            scenario.config.run.kind()
        )));
    }
    if let Some(seed) = args.seed {
        scenario.config.seed = seed;
    }
    let report = run_scenario(&scenario)?;
    let out = args
        .out
        .clone()
        .or_else(|| scenario.config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("reports"));
    let format = match args.format {
        Some(Format::Json) => ReportFormat::Json,
        Some(Format::Csv) => ReportFormat::Csv,
        None => scenario.config.output.format.unwrap_or_default(),
    };
    for a in &report.assertions {
        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    for path in report.write(&out, format)? {
        println!("wrote {}", path.display());
    }
    Ok(if report.passed() { EXIT_PASS } else { EXIT_ASSERTION })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}
