//! The `nilspec` binary: parse arguments, load the subcommand's config,
//! size the worker pool, run the command, map errors to the exit contract
//! (1 = checks failed, 2 = config or compute refusal).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nilspec_cli::commands::{
    cmd_defaults, cmd_oracle, cmd_project, cmd_reconstruct, cmd_sweep_kr, cmd_sweep_mu,
    cmd_sweep_ts, cmd_validate, ensure_out_dir, init_workers, CliError,
};
use nilspec_cli::config::load_config;

#[derive(Parser)]
#[command(
    name = "nilspec",
    about = "Spectral checks and sweeps for the sub-Laplacian on the free two-step group",
    version
)]
struct Cli {
    /// JSON config file; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for report files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads; overrides the config field. Zero keeps the library
    /// default.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the named invariant checks (all by default) and write a report.
    Validate,
    /// Evaluate one spectral density slice on a point cloud.
    Project,
    /// Integrate the density over mu and compare with the input.
    Reconstruct,
    /// Restriction ratios across scales with a log-log exponent fit.
    SweepMu,
    /// Normalized projection ratios across levels for several p.
    SweepKr,
    /// First-layer restriction ratios across radii against a fitted constant.
    SweepTs,
    /// Discretize the twisted operator and compare spectrum and projections.
    Oracle,
    /// Print every subcommand's default config as JSON.
    Defaults,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli.config.as_deref();
    macro_rules! dispatch {
        ($ty:ty, $cmd:path) => {{
            let mut cfg: $ty = load_config(path)?;
            if let Some(w) = cli.workers {
                cfg.workers = w;
            }
            init_workers(cfg.workers)?;
            ensure_out_dir(&cli.out)?;
            $cmd(&cfg, &cli.out)
        }};
    }
    use nilspec_cli::config as cfgs;
    match cli.command {
        Command::Validate => dispatch!(cfgs::ValidateConfig, cmd_validate),
        Command::Project => dispatch!(cfgs::ProjectConfig, cmd_project),
        Command::Reconstruct => dispatch!(cfgs::ReconstructConfig, cmd_reconstruct),
        Command::SweepMu => dispatch!(cfgs::SweepMuConfig, cmd_sweep_mu),
        Command::SweepKr => dispatch!(cfgs::SweepKrConfig, cmd_sweep_kr),
        Command::SweepTs => dispatch!(cfgs::SweepTsConfig, cmd_sweep_ts),
        Command::Oracle => dispatch!(cfgs::OracleConfig, cmd_oracle),
        Command::Defaults => cmd_defaults(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
