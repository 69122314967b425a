use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mvwave::analysis::DetectionFraction;
use mvwave::cli::commands::{self, ObjectSource, Options, Outcome};
use mvwave::config::DisplayConfig;
use mvwave::error::Result;

/// Multiview 3D display synthesis and wavelet depth analysis.
#[derive(Debug, Parser)]
#[command(name = "mvwave", version)]
struct Cli {
    /// Cell pitch in pixels.
    #[arg(long, global = true, default_value_t = 60)]
    pitch: usize,
    /// Number of gray levels (at most 256).
    #[arg(long, global = true, default_value_t = 256)]
    levels: u32,
    /// Largest plane magnitude.
    #[arg(long = "max-plane", global = true, default_value_t = 6)]
    max_plane: u32,
    /// Output directory.
    #[arg(long = "out-dir", global = true, env = "MVWAVE_OUT", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a built-in object (cube8, tetra) or an object file to PGM.
    Synth {
        object: ObjectSource,
        /// Uniform noise amplitude in gray levels.
        #[arg(long, default_value_t = 0)]
        noise: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Detect voxels in every plane and build a depth map.
    Analyze {
        image: PathBuf,
        /// Fraction of the threshold value a score must reach, e.g. 0.7 or 7/10.
        #[arg(long, default_value = "0.7")]
        fraction: DetectionFraction,
        /// Ground-truth voxel CSV to score against.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Dense wavelet response for one plane.
    Cwt {
        image: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        plane: i32,
    },
    /// Export reference and wavelet kernels for one plane.
    Kernels {
        #[arg(long, allow_hyphen_values = true)]
        plane: i32,
    },
    /// Check kernel invariants for the configuration.
    Selftest,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = DisplayConfig::new(cli.pitch, cli.levels, cli.max_plane)?;
    let opts = Options {
        cfg,
        out_dir: cli.out_dir,
    };
    let outcome: Outcome = match cli.command {
        Command::Synth { object, noise, seed } => commands::synth(&opts, &object, noise, seed)?,
        Command::Analyze {
            image,
            fraction,
            truth,
        } => commands::analyze(&opts, &image, fraction, truth.as_deref())?,
        Command::Cwt { image, plane } => commands::cwt(&opts, &image, plane)?,
        Command::Kernels { plane } => commands::kernels(&opts, plane)?,
        Command::Selftest => {
            let checks = commands::selftest(&cfg)?;
            let mut ok = true;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    for line in &outcome.summary {
        println!("{line}");
    }
    for path in &outcome.outputs {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mvwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
