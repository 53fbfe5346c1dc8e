use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use echostick::cli::{run_scenario_text, verify_tables, write_trace, RunOptions};
use echostick::geometry::{overlap_distance, DEFAULT_DIVERGENCE_DEG};
use echostick::sensing::{fit_calibration, parse_calibration_points};

#[derive(Parser)]
#[command(
    name = "echostick",
    version,
    about = "Ultrasonic walking-aid simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its per-tick trace.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several scenarios in parallel, one trace file each.
    Batch {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
        /// Directory receiving `<scenario stem>.csv` files.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Sweep every classifier against the band tables.
    VerifyTables,
    /// Distance at which two stacked sensor cones start to overlap.
    Overlap {
        upper_cm: f64,
        lower_cm: f64,
        #[arg(long, default_value_t = DEFAULT_DIVERGENCE_DEG)]
        divergence: f64,
    },
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Tick period in milliseconds.
    #[arg(long)]
    tick_ms: Option<u32>,
    /// Ambient temperature, °C.
    #[arg(long)]
    temp: Option<f64>,
    /// Temperature the sensors were calibrated at, °C.
    #[arg(long)]
    temp_cal: Option<f64>,
    /// File of `actual measured` pairs to fit the sensor response from.
    #[arg(long)]
    calib: Option<PathBuf>,
    /// Uniform rays per sensor cone (odd, at least 3).
    #[arg(long)]
    rays: Option<usize>,
    /// Seed for optional reading jitter.
    #[arg(long)]
    seed: Option<u64>,
}

impl RunFlags {
    fn options(&self) -> Result<RunOptions> {
        let calibration = match &self.calib {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let points =
                    parse_calibration_points(&text).with_context(|| path.display().to_string())?;
                Some(fit_calibration(&points).with_context(|| path.display().to_string())?)
            }
            None => None,
        };
        Ok(RunOptions {
            tick_ms: self.tick_ms,
            temp: self.temp,
            temp_cal: self.temp_cal,
            calibration,
            rays: self.rays,
            seed: self.seed,
        })
    }
}

fn run_one(path: &Path, opts: &RunOptions, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let frames = run_scenario_text(&text, opts).with_context(|| path.display().to_string())?;
    write_trace(&frames, out)?;
    Ok(())
}

fn batch(scenarios: &[PathBuf], opts: &RunOptions, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let results: Vec<Result<()>> = std::thread::scope(|s| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|path| {
                s.spawn(move || {
                    let stem = path.file_stem().context("scenario path has no file name")?;
                    let dest = out_dir.join(stem).with_extension("csv");
                    let mut file = io::BufWriter::new(
                        fs::File::create(&dest)
                            .with_context(|| format!("creating {}", dest.display()))?,
                    );
                    run_one(path, opts, &mut file)?;
                    file.flush()?;
                    Ok(())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut failed = 0;
    for err in results.into_iter().filter_map(Result::err) {
        eprintln!("error: {err:#}");
        failed += 1;
    }
    if failed > 0 {
        bail!("{failed} of {} scenarios failed", scenarios.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            flags,
            out,
        } => flags.options().and_then(|opts| match out {
            Some(dest) => {
                let file = fs::File::create(&dest)
                    .with_context(|| format!("creating {}", dest.display()))?;
                let mut w = io::BufWriter::new(file);
                run_one(&scenario, &opts, &mut w)?;
                w.flush().map_err(Into::into)
            }
            None => run_one(&scenario, &opts, &mut io::stdout().lock()),
        }),
        Command::Batch {
            scenarios,
            flags,
            out_dir,
        } => flags
            .options()
            .and_then(|opts| batch(&scenarios, &opts, &out_dir)),
        Command::VerifyTables => {
            let report = verify_tables();
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(anyhow::anyhow!("band tables do not match"))
            }
        }
        Command::Overlap {
            upper_cm,
            lower_cm,
            divergence,
        } => overlap_distance(upper_cm, lower_cm, divergence)
            .map(|d| println!("{d:.1}"))
            .map_err(Into::into),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
