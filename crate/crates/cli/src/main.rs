use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use warpcert::certify::{emit_report, run_certify, CertificationReport, ReportFormat, RunConfig, Verdict};
use warpcert::grw::{catalog_get, catalog_names};
use warpcert::specfile::{CompiledSpec, SpecFile};

/// Certify perfect-fluid and generalized Robertson-Walker structure of a
/// metric given in closed form.
#[derive(Parser)]
#[command(name = "warpcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a spec file.
    Certify {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run only the identity ladder on a spec file.
    Ladder {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Built-in validation metrics.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the entry names.
    List,
    /// Certify a catalog entry.
    Run {
        name: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the spec file of a catalog entry.
    Export {
        name: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Number of sample points.
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sets both the hypothesis and the conclusion tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    hypothesis_tol: Option<f64>,
    #[arg(long)]
    conclusion_tol: Option<f64>,
    #[arg(long)]
    cluster_tol: Option<f64>,
    /// Gravitational coupling.
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Comma-separated basepoint of the potentials, overriding the spec.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    basepoint: Option<Vec<f64>>,
    /// Comma-separated checks or groups to report.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Worker threads for point evaluation.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Do not print the text report.
    #[arg(long)]
    quiet: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let base = RunConfig::default();
        RunConfig {
            hypothesis_tol: self.hypothesis_tol.or(self.tol).unwrap_or(base.hypothesis_tol),
            conclusion_tol: self.conclusion_tol.or(self.tol).unwrap_or(base.conclusion_tol),
            cluster_tol: self.cluster_tol.unwrap_or(base.cluster_tol),
            points: self.points,
            seed: self.seed,
            basepoint: self.basepoint.clone(),
            kappa: self.kappa,
            checks: self.checks.clone(),
            workers: self.workers,
        }
    }
}

enum Failure {
    Input(String),
}

fn load(path: &Path) -> Result<CompiledSpec, Failure> {
    let spec = SpecFile::load(path).map_err(|e| Failure::Input(e.to_string()))?;
    spec.compile().map_err(|e| Failure::Input(e.to_string()))
}

fn certify(spec: &CompiledSpec, args: &RunArgs, only: Option<&str>) -> Result<ExitCode, Failure> {
    let mut config = args.config();
    if let Some(group) = only {
        config.checks = Some(vec![group.to_string()]);
    }
    let report: CertificationReport = run_certify(spec, &config).map_err(|e| Failure::Input(e.to_string()))?;
    if !args.quiet {
        print!("{}", report.to_text());
    }
    if let Some(path) = &args.json {
        emit_report(&report, ReportFormat::Json, path)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Certify { file, run } => certify(&load(&file)?, &run, None),
        Command::Ladder { file, run } => certify(&load(&file)?, &run, Some("ladder")),
        Command::Catalog { command } => match command {
            CatalogCommand::List => {
                for name in catalog_names() {
                    let entry = catalog_get(name).map_err(|e| Failure::Input(e.to_string()))?;
                    println!("{name:<24} {}", entry.description);
                }
                Ok(ExitCode::SUCCESS)
            }
            CatalogCommand::Run { name, run } => {
                let entry = catalog_get(&name).map_err(|e| Failure::Input(e.to_string()))?;
                certify(&entry.compiled, &run, None)
            }
            CatalogCommand::Export { name, out } => {
                let entry = catalog_get(&name).map_err(|e| Failure::Input(e.to_string()))?;
                let text = entry.spec.to_json() + "\n";
                match out {
                    Some(path) => std::fs::write(&path, text)
                        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?,
                    None => print!("{text}"),
                }
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
