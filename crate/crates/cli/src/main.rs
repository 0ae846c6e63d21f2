use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contact_sphere_cli::{run_suite, write_outputs, ExperimentConfig, Suite};

#[derive(Parser)]
#[command(name = "contact-exp", about = "Translated-point experiments on the standard contact sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Complex dimension.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Focal parameter.
    #[arg(long, global = true)]
    a: Option<f64>,
    /// Conjugator parameter.
    #[arg(long, global = true)]
    b: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Contact-condition and Jacobian checks.
    Verify,
    /// Multipliers at the fixed points.
    Spectrum,
    /// Localization table of the zero sets.
    Decay,
    /// Multistart defect search per scheduled iterate.
    Search,
    /// Separation certificate per scheduled iterate.
    Certify,
    /// Circle diffeomorphism checks.
    Circle,
    /// Invariant Hamiltonian checks.
    Hamiltonian,
    /// Full counterexample pipeline.
    Run,
    /// Full pipeline plus the circle and Hamiltonian checks.
    All,
}

impl From<Command> for Suite {
    fn from(c: Command) -> Self {
        match c {
            Command::Verify => Suite::Verify,
            Command::Spectrum => Suite::Spectrum,
            Command::Decay => Suite::Decay,
            Command::Search => Suite::Search,
            Command::Certify => Suite::Certify,
            Command::Circle => Suite::Circle,
            Command::Hamiltonian => Suite::Hamiltonian,
            Command::Run => Suite::Run,
            Command::All => Suite::All,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = cli.seed {
        config.seed = v;
    }
    if let Some(v) = cli.grid {
        config.grid = v;
    }
    if let Some(v) = cli.out {
        config.output_dir = v;
    }
    if let Some(v) = cli.n {
        config.n = v;
    }
    if let Some(v) = cli.a {
        config.a = v;
    }
    if let Some(v) = cli.b {
        config.b = v;
    }
    config.validate()?;
    let report = run_suite(cli.command.into(), &config)?;
    for path in write_outputs(&report, &config.output_dir)? {
        eprintln!("wrote {}", path.display());
    }
    if let Some(c) = &report.conclusion {
        eprintln!(
            "n = {}: min defect {:.6e}, certificate {}, verdict {:?}",
            c.n, c.min_total, c.certified, c.verdict
        );
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
