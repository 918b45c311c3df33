use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qleak::sdp::DEFAULT_GAP_TOL;
use qleak::ChainOptions;
use qleak_cli::commands::{self, DEFAULT_P_GRID};
use qleak_cli::spec::{read_json, DpCheckDoc, EnsembleDoc, ModelDoc};
use qleak_cli::{worker_pool, CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "qleak",
    version,
    about = "Leakage, privacy and trade-off computations for quantum encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_GAP_TOL)]
    gap_tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = qleak::leakage::DEFAULT_RESTARTS)]
    restarts: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepParam {
    P,
    Alpha,
}

#[derive(Subcommand)]
enum Command {
    /// Certificate table for an ensemble document.
    Leakage {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Max-divergence privacy check of a channel on an ensemble.
    DpCheck {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Degradation and leakage rows of a variational model under depolarizing noise.
    Tradeoff {
        /// Model document; without it a seeded basis-encoding model of dimension `--d` is used.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// One scalar parameter swept over a grid for an ensemble document.
    Sweep {
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        input: PathBuf,
        /// Values of the swept parameter.
        #[arg(long, alias = "p-grid", value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Built-in basis-encoding and diagonal-pair instances.
    Demo {
        /// Also write the demo ensembles as JSON documents into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn check_common(c: &Common) -> CliResult<()> {
    if !(c.gap_tol > 0.0 && c.gap_tol <= 1e-2) {
        return Err(CliError::validation(
            "gap-tol",
            format!("must lie in (0, 1e-2], got {}", c.gap_tol),
        ));
    }
    if c.restarts == 0 {
        return Err(CliError::validation("restarts", "must be at least 1"));
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(common: &Common, text: &str) -> CliResult<()> {
    match &common.output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let pool = worker_pool()?;
    match cli.command {
        Command::Leakage { input, common } => {
            check_common(&common)?;
            let e = read_json::<EnsembleDoc>(&input)?.to_ensemble()?;
            let options = ChainOptions {
                gap_tol: common.gap_tol,
                restarts: common.restarts,
                seed: common.seed,
            };
            emit(&common, &commands::leakage(&e, &options)?)
        }
        Command::DpCheck { input, common } => {
            check_common(&common)?;
            emit(
                &common,
                &commands::dp_check(&read_json::<DpCheckDoc>(&input)?)?,
            )
        }
        Command::Tradeoff {
            input,
            d,
            p_grid,
            common,
        } => {
            check_common(&common)?;
            let job = match (&input, d) {
                (Some(path), d) => {
                    let job = read_json::<ModelDoc>(path)?.to_job()?;
                    if let Some(d) = d.filter(|&d| d != job.model.dim()) {
                        return Err(CliError::validation(
                            "d",
                            format!("model dimension is {}, but --d is {d}", job.model.dim()),
                        ));
                    }
                    job
                }
                (None, Some(d)) => commands::default_model_job(d, common.seed)?,
                (None, None) => {
                    return Err(CliError::validation(
                        "d",
                        "give --d or a model document via --input",
                    ))
                }
            };
            let grid = p_grid.unwrap_or_else(|| DEFAULT_P_GRID.to_vec());
            let text = pool.install(|| commands::tradeoff(&job, &grid, common.gap_tol))?;
            emit(&common, &text)
        }
        Command::Sweep {
            param,
            input,
            grid,
            common,
        } => {
            check_common(&common)?;
            let e = read_json::<EnsembleDoc>(&input)?.to_ensemble()?;
            let text = match param {
                SweepParam::P => pool.install(|| commands::sweep_p(&e, &grid, common.gap_tol))?,
                SweepParam::Alpha => commands::sweep_alpha(&e, &grid)?,
            };
            emit(&common, &text)
        }
        Command::Demo { emit: dir, common } => {
            check_common(&common)?;
            if let Some(dir) = dir {
                std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
                for (stem, doc) in commands::demo_documents()? {
                    let json =
                        serde_json::to_string_pretty(&doc).expect("ensemble documents serialize");
                    write_file(&dir.join(format!("{stem}.json")), &(json + "\n"))?;
                }
            }
            emit(&common, &commands::demo(common.gap_tol)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
