//! The command-line surface: scenario files, traces, table verification and
//! the glue that runs a scenario end to end.

pub mod scenario;
pub mod trace;
pub mod verify;

use thiserror::Error;

use crate::pipeline::{run_scenario, FrameOutput, SimError};
use crate::sensing::{Calibration, SensingError};

pub use scenario::{parse_scenario, print_scenario, ScenarioError, ScenarioFile};
pub use trace::{format_frame, trace_string, write_trace, TRACE_HEADER};
pub use verify::{verify_tables, TableReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Command-line overrides; anything set here beats the scenario's `CONFIG`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub tick_ms: Option<u32>,
    pub temp: Option<f64>,
    pub temp_cal: Option<f64>,
    pub calibration: Option<Calibration>,
    pub rays: Option<usize>,
    pub seed: Option<u64>,
}

/// Parses, validates and runs a scenario.
pub fn run_scenario_text(text: &str, opts: &RunOptions) -> Result<Vec<FrameOutput>, CliError> {
    let file = parse_scenario(text)?;
    let mut cfg = file.sim_config();
    if let Some(v) = opts.tick_ms {
        cfg.tick_ms = v;
    }
    if let Some(v) = opts.temp {
        cfg.temp_actual = v;
    }
    if let Some(v) = opts.temp_cal {
        cfg.temp_cal = v;
    }
    if let Some(v) = opts.calibration {
        cfg.calibration = v;
    }
    if let Some(v) = opts.rays {
        cfg.n_rays = v;
    }
    if let Some(v) = opts.seed {
        cfg.seed = v;
    }
    let scene = file.scene().map_err(SimError::from)?;
    Ok(run_scenario(&scene, &file.walks, &cfg)?)
}
