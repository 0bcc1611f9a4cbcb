//! `htcsem`: identifiability, recovery and constraint tools for linear SEMs
//! on mixed graphs.
//!
//! Exit codes: 0 ok, 1 a census property failed, 2 parse or I/O error,
//! 3 not identifiable, 4 degenerate input, 5 resource cap.

mod commands;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use htcsem::algebra::DEFAULT_MAX_TERMS;

use report::{Failure, Inputs, Output, RunReport, EXIT_PARSE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "htcsem", version, about = "Half-trek identifiability for linear SEMs on mixed graphs")]
struct Cli {
    /// Seed for every random choice (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory receiving report.json and any command-specific files.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a graph and print its certificate.
    Identify { graph: PathBuf },
    /// Recover Lambda and Omega from a covariance matrix.
    Recover { graph: PathBuf, sigma: PathBuf },
    /// Sample parameters and write the implied covariance matrix.
    Simulate { graph: PathBuf },
    /// Print the canonical model-ideal generators.
    Constraints {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// Evaluate the generators at a covariance matrix.
    Verify {
        graph: PathBuf,
        sigma: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
    /// Check the equivalence properties over a family of graphs.
    Census {
        /// Vertex count of every graph in the family.
        #[arg(long)]
        max_vertices: usize,
        /// Draw this many random graphs instead of enumerating all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Identify { .. } => "identify",
            Command::Recover { .. } => "recover",
            Command::Simulate { .. } => "simulate",
            Command::Constraints { .. } => "constraints",
            Command::Verify { .. } => "verify",
            Command::Census { .. } => "census",
        }
    }
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Result<Output, Failure> {
    match &cli.command {
        Command::Identify { graph } => commands::identify(inputs, graph),
        Command::Recover { graph, sigma } => commands::recover(inputs, graph, sigma),
        Command::Simulate { graph } => commands::simulate(inputs, graph, cli.seed),
        Command::Constraints { graph, max_terms } => commands::constraints(inputs, graph, *max_terms),
        Command::Verify { graph, sigma, threshold, max_terms } => {
            commands::verify(inputs, graph, sigma, *max_terms, *threshold)
        }
        Command::Census { max_vertices, samples, jobs, max_terms } => commands::census(&commands::CensusArgs {
            vertices: *max_vertices,
            samples: *samples,
            jobs: *jobs,
            max_terms: *max_terms,
            seed: cli.seed,
        }),
    }
}

fn write_outputs(dir: &Path, report: &str, files: &[(String, String)]) -> Result<(), Failure> {
    let io_err = |e: std::io::Error| Failure::new(EXIT_PARSE, format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    for (name, contents) in files {
        fs::write(dir.join(name), contents).map_err(io_err)?;
    }
    fs::write(dir.join("report.json"), report).map_err(io_err)
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let out = dispatch(cli, &mut inputs)?;
    let report = RunReport {
        command: cli.command.name().to_string(),
        tool_version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        inputs: inputs.0,
        results: out.results,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    let report_json = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    if let Some(dir) = &cli.output_dir {
        write_outputs(dir, &report_json, &out.files)?;
    }
    match cli.format {
        Format::Text => print!("{}", out.text),
        Format::Json => print!("{report_json}"),
    }
    Ok(out.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
