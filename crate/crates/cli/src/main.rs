mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Cells, ConfigFile};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "voladapt", version, about = "Nodal DGSEM with adaptive volume terms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the registered testcases.
    List,
    /// Integrate one testcase to its final time.
    Run(RunArgs),
    /// Run a grid refinement ladder and tabulate errors and observed orders.
    Convergence(RunArgs),
    /// Eigenvalues of the linearized operator at the initial state, per volume mode.
    Spectrum(RunArgs),
    /// Time the analytical and entropy-conservative Euler fluxes.
    BenchFlux(BenchArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory.
    #[arg(long, short, env = "VOLADAPT_OUTPUT_DIR")]
    output: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Single-threaded run with timing columns left out of the outputs.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML configuration file.
    config: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    testcase: Option<String>,
    #[arg(long, short = 'p')]
    degree: Option<usize>,
    /// Elements per direction.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    surface_flux: Option<String>,
    #[arg(long)]
    volume_flux: Option<String>,
    /// wf, fd, adaptive_rigorous, adaptive_heuristic or blended_shock.
    #[arg(long)]
    volume_mode: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long, conflicts_with = "dt")]
    cfl: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated volume modes for convergence and spectrum studies.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<String>>,
    /// Comma-separated cell counts for convergence studies.
    #[arg(long, value_delimiter = ',')]
    grids: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// euler1d or euler2d.
    #[arg(long, default_value = "euler2d")]
    equation: String,
    #[arg(long, default_value_t = 1.4)]
    gamma: f64,
    #[arg(long, default_value_t = 10_000_000)]
    n_evals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn config(&self) -> Result<ConfigFile, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut flags = ConfigFile {
            testcase: self.testcase.clone(),
            seed: self.seed,
            threads: self.common.threads,
            ..Default::default()
        };
        let d = &mut flags.discretization;
        d.degree = self.degree;
        d.cells = self.cells.map(Cells::Uniform);
        d.surface_flux = self.surface_flux.clone();
        d.volume_flux = self.volume_flux.clone();
        d.volume_mode = self.volume_mode.clone();
        d.sigma = self.sigma;
        d.beta_min = self.beta_min;
        d.beta_max = self.beta_max;
        if self.cfl.is_some() || self.dt.is_some() {
            cfg.time.cfl = None;
            cfg.time.dt = None;
        }
        flags.time.cfl = self.cfl;
        flags.time.dt = self.dt;
        flags.time.t_final = self.t_final;
        flags.output.dir = self.common.output.clone();
        flags.study.modes = self.modes.clone();
        flags.study.grids = self.grids.clone();
        cfg.merge(flags);
        Ok(cfg)
    }
}

fn init_threads(threads: Option<usize>, deterministic: bool) -> Result<(), CliError> {
    let n = if deterministic { Some(1) } else { threads };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => {
            commands::list();
            Ok(())
        }
        Command::Run(args) => {
            let setup = commands::prepare(&args.config()?)?;
            init_threads(setup.threads, args.common.deterministic)?;
            commands::run(&setup, args.common.deterministic)
        }
        Command::Convergence(args) => {
            let setup = commands::prepare(&args.config()?)?;
            init_threads(setup.threads, args.common.deterministic)?;
            commands::convergence(&setup)
        }
        Command::Spectrum(args) => {
            let setup = commands::prepare(&args.config()?)?;
            init_threads(setup.threads, args.common.deterministic)?;
            commands::spectrum(&setup)
        }
        Command::BenchFlux(args) => {
            init_threads(args.common.threads, args.common.deterministic)?;
            let dir = args.common.output.unwrap_or_else(|| PathBuf::from("voladapt-out"));
            commands::bench_flux(&args.equation, args.gamma, args.n_evals, args.seed, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
