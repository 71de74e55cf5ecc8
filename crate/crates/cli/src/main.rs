use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use copreli_cli::commands;
use copreli_cli::config::RunConfig;
use copreli_cli::error::{CliError, CliResult};
use copreli_cli::output::{render, Output, Provenance};

#[derive(Parser)]
#[command(name = "copreli", version, about = "Reliability of systems with dependent components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Survival function, hazard, reversed hazard, MRL and aging intensity on a grid
    Eval(Common),
    /// Error of the independence assumption for one measure
    ErrorTable(Common),
    /// Stochastic ordering of the dependent against the independent system
    Ordering(Common),
    /// Ratio monotonicity for each family, compared with published verdicts
    Table1(Common),
    /// Survival inequalities, error identities and radial duality
    Verify(Common),
    /// Draw bivariate lifetimes by conditional inversion
    Sample(Common),
}

#[derive(Args, Default)]
struct Common {
    /// key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Copula spec, e.g. fgm:alpha=0.5
    #[arg(long)]
    copula: Option<String>,
    /// Component lifetime, e.g. exp:1 or weibull:1,2 (repeat per component)
    #[arg(long)]
    marginal: Vec<String>,
    /// series or parallel
    #[arg(long)]
    structure: Option<String>,
    /// dependent or independent
    #[arg(long)]
    mode: Option<String>,
    /// distribution or survival
    #[arg(long)]
    coupling: Option<String>,
    /// min:max:count:spacing
    #[arg(long)]
    grid: Option<String>,
    /// csv, json or md
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// sf, hr, rhr or mrl
    #[arg(long)]
    measure: Option<String>,
    #[arg(long)]
    samples: Option<String>,
}

impl Common {
    fn resolve(&self) -> CliResult<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let single = [
            ("copula", &self.copula),
            ("structure", &self.structure),
            ("mode", &self.mode),
            ("coupling", &self.coupling),
            ("grid", &self.grid),
            ("format", &self.format),
            ("seed", &self.seed),
            ("measure", &self.measure),
            ("samples", &self.samples),
        ];
        for (key, value) in single {
            if let Some(v) = value {
                flags.set(key, v).map_err(|e| CliError::config(format!("--{key}: {e}")))?;
            }
        }
        for v in &self.marginal {
            flags
                .set("marginal", v)
                .map_err(|e| CliError::config(format!("--marginal: {e}")))?;
        }
        Ok(file.overlay(flags))
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("COPRELI_THREADS") else {
        return Ok(());
    };
    let requested: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config(format!("COPRELI_THREADS `{raw}` is not a positive integer")))?;
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    rayon::ThreadPoolBuilder::new()
        .num_threads(requested.min(available))
        .build_global()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))
}

type Handler = fn(&RunConfig) -> CliResult<(Provenance, Output)>;

fn run(cli: &Cli) -> CliResult<(String, Output)> {
    configure_threads()?;
    let (common, f): (&Common, Handler) = match &cli.command {
        Command::Eval(c) => (c, commands::eval),
        Command::ErrorTable(c) => (c, commands::error_table),
        Command::Ordering(c) => (c, commands::ordering),
        Command::Table1(c) => (c, commands::table1),
        Command::Verify(c) => (c, commands::verify),
        Command::Sample(c) => (c, commands::sample),
    };
    let cfg = common.resolve()?;
    let (provenance, out) = f(&cfg)?;
    Ok((render(cfg.format(), &provenance, &out)?, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, out)) => {
            print!("{text}");
            for line in &out.diagnostics {
                eprintln!("note: {line}");
            }
            match out.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
