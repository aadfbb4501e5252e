use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lhv_photons::counts::YConvention;
use lhv_photons::model::DetectorKind;
use lhv_photons_cli::config::{CorrelationSource, OutputFormat};
use lhv_photons_cli::{execute, Command, RunConfig};

/// Local particle model of photons in a double-homodyne Bell test.
#[derive(Parser)]
#[command(name = "lhv-photons", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// θ-moments, closed-form cross-check and averaging-order variances.
    Analytic,
    /// Monte Carlo ±1 counts with the quadrature oracle alongside.
    Simulate,
    /// CHSH statistic at the configured setting and the best grid setting.
    Chsh,
    /// Correlation versus θi − θj for plotting.
    Sweep,
    /// Print the effective configuration as JSON.
    Config,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials (per grid cell for empirical CHSH).
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    model: Option<Model>,
    /// Phases per axis for the CHSH search.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Correlation source for `chsh`.
    #[arg(long, global = true)]
    source: Option<Source>,
    /// Sign convention for E(Y|θ).
    #[arg(long, global = true)]
    convention: Option<Convention>,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy)]
enum Model {
    Symmetric,
    CoherentOnly,
    AmplitudeWeighted,
}

#[derive(ValueEnum, Clone, Copy)]
enum Source {
    Analytic,
    Empirical,
}

#[derive(ValueEnum, Clone, Copy)]
enum Convention {
    RatioDerived,
    Published,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
        }
        if let Some(s) = self.seed {
            cfg.sampler.seed = s;
        }
        if let Some(n) = self.n {
            cfg.sampler.n = n;
        }
        if let Some(m) = self.model {
            cfg.detector_model = match m {
                Model::Symmetric => DetectorKind::Symmetric,
                Model::CoherentOnly => DetectorKind::CoherentOnly,
                Model::AmplitudeWeighted => DetectorKind::AmplitudeWeighted,
            };
        }
        if let Some(g) = self.grid {
            cfg.chsh.grid = g;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(s) = self.source {
            cfg.chsh.source = match s {
                Source::Analytic => CorrelationSource::Analytic,
                Source::Empirical => CorrelationSource::Empirical,
            };
        }
        if let Some(c) = self.convention {
            cfg.y_convention = match c {
                Convention::RatioDerived => YConvention::RatioDerived,
                Convention::Published => YConvention::Published,
            };
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.common.apply(&mut cfg);
    let cfg = cfg.validated()?;
    let command = match cli.command {
        Cmd::Analytic => Command::Analytic,
        Cmd::Simulate => Command::Simulate,
        Cmd::Chsh => Command::Chsh,
        Cmd::Sweep => Command::Sweep,
        Cmd::Config => {
            println!("{}", cfg.to_json());
            return Ok(());
        }
    };
    execute(command, &cfg)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
