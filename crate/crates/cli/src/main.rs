use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use growthlab::{emit, parse_spec, resolve_cap, run_experiment, select, Format, RunConfig, RunError};

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "growthlab", version, about = "Growth-rate experiments for group automorphisms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a .gspec file.
    Run {
        spec: PathBuf,
        /// Experiment to run; may be omitted when the file declares one.
        #[arg(long)]
        experiment: Option<String>,
        /// Letter cap per word (overrides GROWTHLAB_CAP; default 1e8).
        #[arg(long)]
        cap: Option<usize>,
        /// Conjugator search radius for tau_upper.
        #[arg(long, default_value_t = growthlab::run::DEFAULT_TAU_RADIUS)]
        tau_radius: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        spec,
        experiment,
        cap,
        tau_radius,
        format,
        out,
    } = Cli::parse().command;

    let text = match fs::read_to_string(&spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("growthlab: cannot read {}: {e}", spec.display());
            return ExitCode::from(EXIT_IO);
        }
    };
    let parsed = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}:{}:{}: {}", spec.display(), e.line, e.col, e.message);
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let cap = match resolve_cap(cap) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("growthlab: {msg}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };
    let report = select(&parsed, experiment.as_deref())
        .and_then(|exp| run_experiment(&parsed, &exp.name, RunConfig { cap, tau_radius }));
    let report = match report {
        Ok(r) => r,
        Err(e @ (RunError::UnknownExperiment(_) | RunError::Precondition(_))) => {
            eprintln!("growthlab: {e}");
            return ExitCode::from(EXIT_PRECONDITION);
        }
    };

    let written = match &out {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            emit(&report, format, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            emit(&report, format, &mut lock).and_then(|_| lock.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("growthlab: write failed: {e}");
        return ExitCode::from(EXIT_IO);
    }
    if report.capped() {
        eprintln!("growthlab: letter cap {cap} reached; the report holds the completed prefix");
        return ExitCode::from(EXIT_CAP);
    }
    ExitCode::SUCCESS
}
