//! `jbw`: batch front-end for jbw-core.
//!
//! Exit codes: 0 success, 1 malformed input, 2 mathematical precondition
//! failure, 3 verification failure.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jbw_core::par::Backend;
use jbw_core::verify::{SampleConfig, FAST_TRIALS};

use report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "jbw", version, about = "Euclidean Jordan algebras and order isomorphisms of their cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Sampling trials for verification commands.
    #[arg(long, global = true, default_value_t = FAST_TRIALS)]
    trials: usize,

    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Parallel)]
    backend: BackendArg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factors, center, disengaged atoms and engaged part.
    Analyze {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Eigenvalues and idempotent frame of an element.
    Spectrum {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Factor a linear order isomorphism as U_y J.
    Factorize {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Engaged/disengaged decomposition as structured data.
    Decompose {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Sample an order isomorphism form for order preservation and linearity.
    VerifyOiso {
        #[arg(long)]
        form: PathBuf,
    },
    /// Pointwise power on a grid algebra, with a homogeneity witness.
    DemoNonlinear {
        #[arg(long, default_value_t = 8)]
        grid: usize,
        /// Exponent on the scalar half of the grid.
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Sequential,
    Parallel,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Sequential => Backend::Sequential,
            BackendArg::Parallel => Backend::Parallel,
        }
    }
}

fn run(cli: &Cli) -> Report {
    let backend = Backend::from(cli.backend);
    let config = SampleConfig { trials: cli.trials, seed: cli.seed, backend };
    let (name, result) = match &cli.command {
        Command::Analyze { algebra } => ("analyze", commands::analyze(algebra, cli.seed)),
        Command::Spectrum { algebra, element } => ("spectrum", commands::spectrum(algebra, element)),
        Command::Factorize { algebra, map } => ("factorize", commands::factorize(algebra, map)),
        Command::Decompose { algebra } => ("decompose", commands::decompose(algebra, cli.seed)),
        Command::VerifyOiso { form } => ("verify-oiso", commands::verify_oiso(form, config)),
        Command::DemoNonlinear { grid, lambda } => ("demo-nonlinear", commands::demo_nonlinear(*grid, *lambda, config)),
        Command::Selftest => ("selftest", Ok(commands::selftest(backend))),
    };
    result.unwrap_or_else(|e| e.into_report(name))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Status::MalformedInput.exit_code()) } else { ExitCode::SUCCESS };
        }
    };
    let report = run(&cli);
    let mut stdout = std::io::stdout().lock();
    match cli.format {
        Format::Structured => {
            let _ = writeln!(stdout, "{}", report.render_structured());
        }
        Format::Text if !report.lines.is_empty() => {
            let _ = writeln!(stdout, "{}", report.lines.join("\n"));
        }
        Format::Text => {}
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(report.status.exit_code())
}
