//! Distance-band decision tables: buzzer levels, up-stair detection, pothole
//! grading and upper-body obstacle inference.
//!
//! Bands are closed on the near side of each boundary: a distance sitting
//! exactly on a boundary takes the closer (louder) band.

use std::fmt;

use crate::sensing::Reading;

/// Buzzer levels for one tick. Zero is silent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct BuzzerFrame {
    /// Chest channel, 0..=4.
    pub brz_c: u8,
    /// Knee channel, 0..=3.
    pub brz_k: u8,
    /// Toe channel, 0..=3.
    pub brz_t: u8,
    /// Pothole channel, 0..=3.
    pub brz_p: u8,
}

impl BuzzerFrame {
    pub fn is_valid(&self) -> bool {
        self.brz_c <= 4 && self.brz_k <= 3 && self.brz_t <= 3 && self.brz_p <= 3
    }

    pub fn is_silent(&self) -> bool {
        *self == Self::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpperLevel {
    Head,
    Chest,
    Waist,
    Unknown,
}

impl UpperLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            UpperLevel::Head => "Head",
            UpperLevel::Chest => "Chest",
            UpperLevel::Waist => "Waist",
            UpperLevel::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for UpperLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What the user is told to do this tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Advisory {
    MoveForward,
    MoveForwardCaution,
    UpStairsAhead,
    KneeObstacleAhead,
    ToeObstacleAhead,
    AlternatePath,
    StopImmediately,
    UpperObstacle(UpperLevel),
}

impl fmt::Display for Advisory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Advisory::MoveForward => f.write_str("MoveForward"),
            Advisory::MoveForwardCaution => f.write_str("MoveForwardCaution"),
            Advisory::UpStairsAhead => f.write_str("UpStairsAhead"),
            Advisory::KneeObstacleAhead => f.write_str("KneeObstacleAhead"),
            Advisory::ToeObstacleAhead => f.write_str("ToeObstacleAhead"),
            Advisory::AlternatePath => f.write_str("AlternatePath"),
            Advisory::StopImmediately => f.write_str("StopImmediately"),
            Advisory::UpperObstacle(level) => write!(f, "UpperObstacle({level})"),
        }
    }
}

/// Level for `d` given `(upper_bound, level)` bands ordered near to far.
fn band(d: f64, bands: &[(f64, u8)]) -> u8 {
    bands
        .iter()
        .find(|&&(hi, _)| d <= hi)
        .map_or(0, |&(_, level)| level)
}

const CHEST_BANDS: [(f64, u8); 4] = [(40.0, 4), (60.0, 3), (87.0, 2), (150.0, 1)];
const KNEE_BANDS: [(f64, u8); 3] = [(10.0, 3), (30.0, 2), (60.0, 1)];
const TOE_BANDS: [(f64, u8); 3] = [(10.0, 3), (20.0, 2), (40.0, 1)];

pub fn classify_chest(r: Reading) -> u8 {
    r.distance().map_or(0, |d| band(d, &CHEST_BANDS))
}

pub fn classify_knee(r: Reading) -> u8 {
    r.distance().map_or(0, |d| band(d, &KNEE_BANDS))
}

pub fn classify_toe(r: Reading) -> u8 {
    r.distance().map_or(0, |d| band(d, &TOE_BANDS))
}

/// Knee echoes beyond this do not take part in stair detection.
pub const STAIR_KNEE_LIMIT: f64 = 40.0;
/// Toe echoes beyond this do not take part in stair detection.
pub const STAIR_TOE_LIMIT: f64 = 20.0;
/// Open window on knee minus toe distance that marks a stair tread.
pub const TREAD_WINDOW: (f64, f64) = (24.0, 26.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StairDetection {
    pub upstairs: bool,
    pub knee_bit: bool,
    pub toe_bit: bool,
}

/// Combines knee and toe echoes into an up-stair verdict.
pub fn detect_upstairs(knee: Reading, toe: Reading) -> StairDetection {
    let knee = knee.within(STAIR_KNEE_LIMIT).distance();
    let toe = toe.within(STAIR_TOE_LIMIT).distance();
    let upstairs = match (knee, toe) {
        (Some(x), Some(y)) => {
            let tread = x - y;
            tread > TREAD_WINDOW.0 && tread < TREAD_WINDOW.1
        }
        _ => false,
    };
    StairDetection {
        upstairs,
        knee_bit: knee.is_some(),
        toe_bit: toe.is_some(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthClass {
    pub brz_p: u8,
    pub advisory: Advisory,
}

/// Grades a depression under the foot. Negative depths count as flat.
pub fn classify_depth(depth: f64) -> DepthClass {
    let depth = depth.max(0.0);
    let (brz_p, advisory) = if depth <= 10.0 {
        (0, Advisory::MoveForward)
    } else if depth <= 20.0 {
        (1, Advisory::MoveForwardCaution)
    } else if depth <= 40.0 {
        (2, Advisory::AlternatePath)
    } else {
        (3, Advisory::StopImmediately)
    };
    DepthClass { brz_p, advisory }
}

/// Depth below the foot implied by a downward reading. No echo means the
/// ground is out of range, i.e. bottomless as far as the user is concerned.
pub fn depth_from_reading(r: Reading, arch_height: f64) -> f64 {
    r.distance()
        .map_or(f64::INFINITY, |d| (d - arch_height).max(0.0))
}

pub fn is_downstep(depth: f64) -> bool {
    (15.0..=30.0).contains(&depth)
}

/// Which part of the body an obstacle threatened, given the last chest
/// distance at which it was still audible before dropping out of the cone.
pub fn infer_upper_level(last_active_distance: f64) -> UpperLevel {
    let d = last_active_distance;
    if d > 87.0 && d <= 150.0 {
        UpperLevel::Waist
    } else if d > 60.0 && d <= 87.0 {
        UpperLevel::Head
    } else if d > 40.0 && d <= 60.0 {
        UpperLevel::Chest
    } else {
        UpperLevel::Unknown
    }
}
