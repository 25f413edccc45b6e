use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crg::config::VerificationConfig;
use crg::report::{export_gaps, VerificationReport};
use crg::simulate::{load_sim_config, simulate_with, Scenario};
use crg::sweep::{sweep, write_csv, Grid};
use crg::{run_verification, Resources, RunOptions, Verdict};

/// Dataset ownership verification for contrastive encoders.
///
/// Exit status: 0 Innocent, 2 Stolen, 1 error.
#[derive(Parser)]
#[command(name = "crg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a suspect encoder against a shadow encoder.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run a verification per cell of a parameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sweep the simulator for this scenario instead of the configured endpoints.
        #[arg(long)]
        scenario: Option<Scenario>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Verify the synthetic suspect of one scenario.
    Simulate {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Write the per-round gaps of a report as CSV.
    ExportGaps {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunFlags {
    /// Process rounds one at a time.
    #[arg(long)]
    sequential: bool,
    /// Record per-phase timings in the report.
    #[arg(long)]
    timings: bool,
}

impl RunFlags {
    fn options(&self) -> RunOptions {
        RunOptions {
            parallel: !self.sequential,
            record_timings: self.timings,
        }
    }
}

fn seed_override(cfg: &mut VerificationConfig) -> crg::Result<()> {
    if let Ok(raw) = std::env::var("CRG_SEED") {
        cfg.seed = raw.trim().parse().map_err(|e| crg::Error::Parse {
            what: "CRG_SEED",
            message: format!("{raw:?}: {e}"),
        })?;
    }
    Ok(())
}

fn emit(report: &VerificationReport, out: Option<&PathBuf>) -> crg::Result<ExitCode> {
    match out {
        Some(path) => report.write_json(path)?,
        None => print!("{}", report.to_json()),
    }
    eprintln!(
        "verdict {} (p = {:.3e}, t = {}, df = {})",
        report.verdict, report.p_value, report.t_statistic, report.df
    );
    Ok(match report.verdict {
        Verdict::Innocent => ExitCode::from(0),
        Verdict::Stolen => ExitCode::from(2),
    })
}

fn run(cli: Cli) -> crg::Result<ExitCode> {
    match cli.command {
        Command::Verify { config, out, run } => {
            let mut cfg = VerificationConfig::from_file(&config)?;
            seed_override(&mut cfg)?;
            let resources = Resources::resolve(&cfg)?;
            let report = run_verification(&cfg, &resources, run.options())?;
            emit(&report, out.as_ref())
        }
        Command::Simulate {
            scenario,
            config,
            out,
            run,
        } => {
            let (mut cfg, params) = load_sim_config(&config)?;
            seed_override(&mut cfg)?;
            let report = simulate_with(scenario, &cfg, &params, run.options())?;
            emit(&report, out.as_ref())
        }
        Command::Sweep {
            config,
            grid,
            out,
            scenario,
            run,
        } => {
            let (mut cfg, params) = load_sim_config(&config)?;
            seed_override(&mut cfg)?;
            let grid = Grid::from_file(&grid)?;
            let rows = match scenario {
                Some(sc) => sweep(&cfg, &grid, |c| simulate_with(sc, c, &params, run.options())),
                None => {
                    let resources = Resources::resolve(&cfg)?;
                    sweep(&cfg, &grid, |c| run_verification(c, &resources, run.options()))
                }
            };
            write_csv(&grid.params(), &rows, &out)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            eprintln!("{} cells, {failed} failed, written to {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportGaps { report, out } => {
            let report = VerificationReport::read_json(&report)?;
            export_gaps(&report, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
