use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use finsch_cli::commands::{parse_point_list, sections_summary, spec_summary, stalk_summary, topology_summary};
use finsch_cli::{parse_ring_spec, run_suite, RingSpec, Suite};
use finsch_core::{FiniteRing, Guards};

#[derive(Parser)]
#[command(name = "finsch", version, about = "Exact spectra, structure sheaves and scheme checks for finite rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the prime ideals of the ring.
    Spec { file: PathBuf },
    /// Print the Zariski topology on the spectrum.
    Topology { file: PathBuf },
    /// Enumerate the structure-sheaf sections over an open set.
    Sections {
        file: PathBuf,
        /// Comma-separated point indices; empty for the empty set.
        #[arg(long, allow_hyphen_values = true)]
        open: String,
    },
    /// Describe the stalk of the structure sheaf at a point.
    Stalk {
        file: PathBuf,
        #[arg(long)]
        point: usize,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Where to write the JSON report; `-` for standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        max_subsets: Option<u64>,
        #[arg(long)]
        max_sections: Option<u64>,
        #[arg(long)]
        max_covers: Option<u64>,
        /// Leave `timings_ms` empty so reports are byte-identical across runs.
        #[arg(long)]
        no_timings: bool,
    },
}

fn load(file: &Path) -> Result<RingSpec> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(parse_ring_spec(&text)?)
}

fn build(file: &Path, guards: &Guards) -> Result<FiniteRing> {
    Ok(load(file)?.build(guards)?)
}

/// Writes to standard output, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print(v: &serde_json::Value) {
    emit(&(serde_json::to_string_pretty(v).expect("json value serializes") + "\n"));
}

fn run(cli: Cli) -> Result<bool> {
    let defaults = Guards::default();
    match cli.command {
        Command::Spec { file } => print(&spec_summary(&build(&file, &defaults)?, &defaults)?),
        Command::Topology { file } => print(&topology_summary(&build(&file, &defaults)?, &defaults)?),
        Command::Sections { file, open } => {
            let open = parse_point_list(&open).map_err(anyhow::Error::msg)?;
            print(&sections_summary(&build(&file, &defaults)?, &open, &defaults)?)
        }
        Command::Stalk { file, point } => print(&stalk_summary(&build(&file, &defaults)?, point, &defaults)?),
        Command::Verify {
            file,
            suite,
            report,
            max_subsets,
            max_sections,
            max_covers,
            no_timings,
        } => {
            let guards = Guards {
                max_subsets: max_subsets.unwrap_or(defaults.max_subsets),
                max_sections: max_sections.unwrap_or(defaults.max_sections),
                max_covers: max_covers.unwrap_or(defaults.max_covers),
            };
            let mut result = run_suite(&load(&file)?, suite, &guards);
            if no_timings {
                result = result.without_timings();
            }
            match report.as_deref() {
                Some(p) if p == Path::new("-") => emit(&(result.to_json() + "\n")),
                Some(p) => {
                    std::fs::write(p, result.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?;
                    emit(&result.summary());
                }
                None => print!("{}", result.summary()),
            }
            return Ok(result.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
