use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stoptics::experiment::{run, validate, ExperimentConfig, ExperimentKind, Overrides, OUT_DIR_ENV};
use stoptics::Result;

#[derive(Parser)]
#[command(name = "stoptics", version, about = "Cloak, DN-spectrum and ray-tracing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment file; keys not given keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the file and $STOPTICS_OUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Integrator relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a cloak design on a radial grid.
    DesignDump(Common),
    /// DN eigenvalues of one design.
    DnSpectrum(Common),
    /// DN errors of truncated cloaks along a list of truncation radii.
    CloakConverge(Common),
    /// DN errors of approximate quantum cloaks along a list of layer counts.
    QuantumConverge(Common),
    /// Interior/exterior energy ratio over an energy window.
    TrappedScan(Common),
    /// Trace a ray fan through the cloak metric.
    Rays(Common),
    /// Trace rays through a wormhole design.
    WormholeRays(Common),
    /// Check a configuration without running it.
    Validate {
        /// Experiment file.
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn resolve(kind: Option<ExperimentKind>, common: &Common) -> Result<ExperimentConfig> {
    let mut config = match (&common.config, kind) {
        (Some(path), kind) => {
            let c = ExperimentConfig::load(path)?;
            if let Some(k) = kind.filter(|k| *k != c.kind) {
                return Err(stoptics::Error::Config(format!(
                    "{} describes a `{}` experiment, not `{k}`",
                    path.display(),
                    c.kind
                )));
            }
            c
        }
        (None, Some(kind)) => ExperimentConfig::new(kind),
        (None, None) => unreachable!("validate always has a file"),
    };
    config.apply(&Overrides {
        out: common.out.clone(),
        threads: common.threads,
        tol: common.tol,
    });
    Ok(config)
}

fn execute(cli: Cli) -> Result<()> {
    let (kind, common) = match &cli.command {
        Command::Validate { file, common } => {
            let common = Common {
                config: Some(file.clone()),
                ..common.clone()
            };
            let diag = validate(&resolve(None, &common)?)?;
            for w in &diag.warnings {
                eprintln!("warning: {w}");
            }
            println!("ok");
            print!("{}", diag.config.to_toml());
            return Ok(());
        }
        Command::DesignDump(c) => (ExperimentKind::DesignDump, c),
        Command::DnSpectrum(c) => (ExperimentKind::DnSpectrum, c),
        Command::CloakConverge(c) => (ExperimentKind::CloakConverge, c),
        Command::QuantumConverge(c) => (ExperimentKind::QuantumConverge, c),
        Command::TrappedScan(c) => (ExperimentKind::TrappedScan, c),
        Command::Rays(c) => (ExperimentKind::Rays, c),
        Command::WormholeRays(c) => (ExperimentKind::WormholeRays, c),
    };
    let config = resolve(Some(kind), common)?;
    let manifest = run(&config)?;
    let dir = config.out_dir();
    for f in &manifest.files {
        println!("{}", dir.join(f).display());
    }
    println!("{}", dir.join(format!("{}.manifest.json", config.stem())).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if std::env::var_os(OUT_DIR_ENV).is_none() && matches!(e, stoptics::Error::Io { .. }) {
                eprintln!("hint: set --out or ${OUT_DIR_ENV} to a writable directory");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
