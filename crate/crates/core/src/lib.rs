//! Simulator and decision logic for a chest/knee/toe/arch ultrasonic walking aid.
//!
//! The crate models each transducer as a 30° cone cast into a side-view
//! scene, turns echoes into buzzer levels with fixed distance bands, detects
//! up-stairs and potholes, and runs the whole thing as a deterministic
//! 30 ms tick loop that emits a CSV trace.

pub mod classify;
pub mod cli;
pub mod geometry;
pub mod pipeline;
pub mod sensing;

pub use classify::{Advisory, BuzzerFrame, UpperLevel};
pub use geometry::{Aim, GroundSegment, Point, Ray, Rect, SagittalScene};
pub use pipeline::{
    run_scenario, FrameOutput, SimConfig, SimError, Simulator, UserState, WalkSegment,
};
pub use sensing::{Calibration, Reading, SensorName, SensorSpec};
