use clap::{Parser, ValueEnum};
use dissipator::{load_spec, run_experiment, HarnessError};
use dissipator_core::parallel::{default_workers, with_workers};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Simulate,
    Sweep,
    Spectrum,
    Rage,
    Nash,
    Quench,
    Flow,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Sweep => "sweep",
            Kind::Spectrum => "spectrum",
            Kind::Rage => "rage",
            Kind::Nash => "nash",
            Kind::Quench => "quench",
            Kind::Flow => "flow",
        }
    }
}

/// Run a dissipator experiment from a JSON spec.
#[derive(Debug, Parser)]
#[command(name = "dissipator", version)]
struct Cli {
    kind: Kind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the spec's `output`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "DISSIPATOR_WORKERS")]
    workers: Option<usize>,
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let spec = load_spec(&cli.config)?;
    if spec.experiment.kind() != cli.kind.name() {
        return Err(HarnessError::Schema(format!(
            "experiment.kind: spec is `{}` but `{}` was requested",
            spec.experiment.kind(),
            cli.kind.name()
        )));
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| spec.output.clone())
        .unwrap_or_else(|| PathBuf::from("dissipator-out"));
    let workers = cli.workers.unwrap_or_else(default_workers);
    let record = with_workers(workers, || run_experiment(&spec, &dir))?;
    for (k, v) in &record.summary {
        println!("{k} = {v:.16e}");
    }
    if record.budget_exhausted {
        eprintln!("warning: budget exhausted before the target was reached");
    }
    let failed = record.failed_invariants();
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("invariants failed: {}", failed.join(", "));
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
