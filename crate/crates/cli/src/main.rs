use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use reupload::checkpoint::Checkpoint;
use reupload::config::ExperimentConfig;
use reupload::render::{parse_state, render_husimi, render_regions};
use reupload::runner::{execute, threads_from_env, write_atomic, OUTPUT_DIR_ENV};
use reupload::{CliError, Result};
use reupload_core::circuit::output_spectrum;

#[derive(Parser)]
#[command(name = "reupload", version, about = "Train and inspect single-qudit data re-uploading classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every setting and seed of a configuration and write artifacts.
    Run { config: PathBuf },
    /// Check a configuration without training.
    Validate { config: PathBuf },
    /// Decision regions of a 2-D checkpoint as a PPM image.
    RenderRegions {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Defaults to the checkpoint path with a `.regions.ppm` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Husimi distribution of a qudit state as a grayscale PPM image.
    RenderHusimi {
        /// `basis:d:k`, `coherent:d:polar:azimuth` or `squeezed:d:tau:polar:azimuth`.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        #[arg(short, long, default_value = "husimi.ppm")]
        output: PathBuf,
    },
    /// Fourier magnitudes of a 1-D checkpoint's output as CSV.
    Spectrum {
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        /// Written to stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, String)> {
    let (mut config, text) = ExperimentConfig::load(path)?;
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        config.output = PathBuf::from(dir);
    }
    Ok((config, text))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.with_extension("").into_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Run { config } => {
            let (cfg, text) = load_config(&config)?;
            let threads = threads_from_env()?;
            let report = execute(&cfg, &text, threads)?;
            eprintln!("wrote {} runs to {}", report.runs.len(), report.output.display());
            let failed = report.failures();
            if failed > 0 {
                return Err(CliError::Failed(format!("{failed} of {} runs failed, see runs.csv", report.runs.len())));
            }
        }
        Command::Validate { config } => {
            let (cfg, _) = load_config(&config)?;
            threads_from_env()?;
            println!(
                "ok: {} task, d = {}, {} architecture, {} setting(s) x {} seed(s), output {}",
                cfg.task.name(),
                cfg.dim,
                cfg.arch.name(),
                cfg.layers.len(),
                cfg.seeds.len(),
                cfg.output.display()
            );
        }
        Command::RenderRegions { checkpoint, grid, output } => {
            let cp = Checkpoint::load(&checkpoint)?;
            let out = output.unwrap_or_else(|| with_suffix(&checkpoint, ".regions.ppm"));
            write_atomic(&out, &render_regions(&cp, grid)?)?;
        }
        Command::RenderHusimi { state, resolution, output } => {
            let psi = parse_state(&state)?;
            write_atomic(&output, &render_husimi(&psi, resolution)?)?;
        }
        Command::Spectrum { checkpoint, grid, output } => {
            let cp = Checkpoint::load(&checkpoint)?;
            let spectrum = output_spectrum(&cp.spec.to_spec()?, &cp.params()?, grid)?;
            let mut csv = String::from("frequency,magnitude\n");
            for (k, m) in spectrum {
                csv.push_str(&format!("{k},{m:e}\n"));
            }
            match output {
                Some(path) => write_atomic(&path, csv.as_bytes())?,
                None => std::io::stdout()
                    .write_all(csv.as_bytes())
                    .map_err(|e| CliError::io("<stdout>", e))?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage mistakes count as configuration errors.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
