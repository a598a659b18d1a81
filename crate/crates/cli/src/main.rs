use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use sphwave_cli::config::ExperimentConfig;
use sphwave_cli::output::Out;
use sphwave_cli::{multi, single, transform, verify};

#[derive(Parser)]
#[command(name = "sphwave", version, about = "Spectral-element spherical harmonic transforms and sphere scattering")]
struct Cli {
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Run {
    /// experiment JSON
    #[arg(long)]
    config: PathBuf,
    /// output directory (overrides `output_dir`, default `out/<experiment>`)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// SPH or VSH forward transform of a sampled wave, with optional convergence sweep
    Transform(Run),
    /// Sound-soft acoustic or perfectly conducting EM scattering by one sphere
    ScatterSingle(Run),
    /// Sound-soft scattering by several spheres
    ScatterMulti {
        #[command(flatten)]
        run: Run,
        /// random boundary-residual points from this seed instead of a spiral
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check production kernels against the reference oracles
    Verify {
        /// also write verify.csv here
        #[arg(long)]
        out: Option<PathBuf>,
        /// seed for the random translation geometries
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_perturbation: bool,
    },
}

fn load(run: &Run) -> Result<(ExperimentConfig, Out)> {
    let cfg = ExperimentConfig::load(&run.config)?;
    let dir = match (&run.out, &cfg.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => d.clone(),
        (None, None) => Path::new("out").join(&cfg.experiment),
    };
    let out = Out::new(&dir)?;
    Ok((cfg, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    match cli.cmd {
        Cmd::Transform(run) => {
            let (cfg, out) = load(&run)?;
            for c in &cfg.cases {
                transform::run(c, &out).with_context(|| format!("case {}", c.name))?;
            }
        }
        Cmd::ScatterSingle(run) => {
            let (cfg, out) = load(&run)?;
            for c in &cfg.cases {
                single::run(c, &out).with_context(|| format!("case {}", c.name))?;
            }
        }
        Cmd::ScatterMulti { run, seed } => {
            let (cfg, out) = load(&run)?;
            for c in &cfg.cases {
                multi::run(c, &out, seed).with_context(|| format!("case {}", c.name))?;
            }
        }
        Cmd::Verify { out, seed, inject_perturbation } => {
            let out = out.as_deref().map(Out::new).transpose()?;
            return verify::run(inject_perturbation, seed, out.as_ref());
        }
    }
    Ok(true)
}
