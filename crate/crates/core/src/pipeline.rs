//! Fixed-period tick loop: fire the four sensors, classify, fuse and debounce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::{
    classify_chest, classify_depth, classify_knee, classify_toe, depth_from_reading,
    detect_upstairs, infer_upper_level, is_downstep, Advisory, BuzzerFrame, UpperLevel,
};
use crate::geometry::{GeometryError, SagittalScene, DEFAULT_RAYS};
use crate::sensing::{
    clamp_range, measure, Calibration, Conditions, Reading, SensingError, SensorName, SensorSpec,
};

/// Walking speeds beyond this are rejected as nonsense input, cm/s.
pub const MAX_SPEED: f64 = 500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid trajectory: {0}")]
    Trajectory(String),
}

/// One spec per sensor, indexed by name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSet([SensorSpec; 4]);

impl Default for SensorSet {
    fn default() -> Self {
        Self(SensorName::ALL.map(SensorSpec::default_for))
    }
}

impl SensorSet {
    pub fn get(&self, name: SensorName) -> &SensorSpec {
        &self.0[name.index()]
    }

    pub fn get_mut(&mut self, name: SensorName) -> &mut SensorSpec {
        &mut self.0[name.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &SensorSpec> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub tick_ms: u32,
    pub sensors: SensorSet,
    pub temp_actual: f64,
    pub temp_cal: f64,
    pub calibration: Calibration,
    pub debounce_ticks: u32,
    pub n_rays: usize,
    /// Half-width of uniform reading noise, cm. Zero disables it.
    pub jitter_cm: f64,
    pub seed: u64,
    pub start_x: f64,
    pub user_height: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tick_ms: 30,
            sensors: SensorSet::default(),
            temp_actual: 20.0,
            temp_cal: 20.0,
            calibration: Calibration::IDENTITY,
            debounce_ticks: 2,
            n_rays: DEFAULT_RAYS,
            jitter_cm: 0.0,
            seed: 0,
            start_x: 0.0,
            user_height: 175.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let cfg = |m: &str| Err(SimError::Config(m.to_string()));
        if self.tick_ms == 0 {
            return cfg("tick period must be positive");
        }
        if self.n_rays < 3 || self.n_rays.is_multiple_of(2) {
            return Err(GeometryError::RayCount(self.n_rays).into());
        }
        if !(self.temp_actual.is_finite() && self.temp_cal.is_finite()) {
            return cfg("temperatures must be finite");
        }
        if !(self.jitter_cm >= 0.0 && self.jitter_cm.is_finite()) {
            return cfg("jitter must be finite and non-negative");
        }
        if !(self.start_x.is_finite() && self.user_height > 0.0 && self.user_height.is_finite()) {
            return cfg("start position and user height must be finite, height positive");
        }
        Calibration::new(self.calibration.gain, self.calibration.offset)?;
        for (i, spec) in self.sensors.iter().enumerate() {
            if spec.name.index() != i {
                return cfg("sensor set must hold exactly one spec per name");
            }
            spec.validate()?;
        }
        Ok(())
    }

    pub fn conditions(&self) -> Conditions {
        Conditions {
            temp_actual: self.temp_actual,
            temp_cal: self.temp_cal,
            calibration: self.calibration,
            n_rays: self.n_rays,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserState {
    pub x: f64,
    /// Negative while stepping back, cm/s.
    pub speed: f64,
    pub height: f64,
}

impl UserState {
    pub fn at(x: f64) -> Self {
        Self {
            x,
            speed: 0.0,
            height: 175.0,
        }
    }

    pub fn moving_back(&self) -> bool {
        self.speed < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Flags {
    pub upstairs: bool,
    pub downstep: bool,
    pub inferred: Option<UpperLevel>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameOutput {
    pub tick: u64,
    pub t_ms: u64,
    pub user_x: f64,
    /// Indexed by [`SensorName::index`].
    pub readings: [Reading; 4],
    pub frame: BuzzerFrame,
    pub advisory: Advisory,
    pub flags: Flags,
}

impl FrameOutput {
    pub fn reading(&self, name: SensorName) -> Reading {
        self.readings[name.index()]
    }
}

/// Tracks the chest channel dropping out and coming back, which tells the
/// user at what height an obstacle sits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Disambiguation {
    pub prev_level: u8,
    /// Last audible distance, recorded when the chest channel went quiet
    /// while the user was advancing.
    pub armed: Option<f64>,
    pub inferred: Option<UpperLevel>,
}

pub fn disambiguate(
    state: Disambiguation,
    brz_c: u8,
    distance_at_deactivation: f64,
    moving_back: bool,
) -> Disambiguation {
    let mut next = Disambiguation {
        prev_level: brz_c,
        ..state
    };
    match (state.prev_level > 0, brz_c > 0) {
        (true, false) => {
            next.inferred = None;
            next.armed = (!moving_back).then_some(distance_at_deactivation);
        }
        (false, true) => {
            next.inferred = match state.armed {
                Some(d) if moving_back => Some(infer_upper_level(d)),
                _ => None,
            };
            next.armed = None;
        }
        _ => {}
    }
    next
}

/// Highest-priority verdict among the active findings.
pub fn fuse(frame: &BuzzerFrame, flags: &Flags) -> Advisory {
    if frame.brz_p >= 3 {
        Advisory::StopImmediately
    } else if frame.brz_p == 2 {
        Advisory::AlternatePath
    } else if flags.upstairs {
        Advisory::UpStairsAhead
    } else if let Some(level) = flags.inferred {
        Advisory::UpperObstacle(level)
    } else if frame.brz_k > 0 {
        Advisory::KneeObstacleAhead
    } else if frame.brz_t > 0 {
        Advisory::ToeObstacleAhead
    } else if !frame.is_silent() || flags.downstep {
        Advisory::MoveForwardCaution
    } else {
        Advisory::MoveForward
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
struct Debounce {
    current: Option<Advisory>,
    pending: Option<(Advisory, u32)>,
}

impl Debounce {
    fn update(&mut self, raw: Advisory, ticks: u32) -> Advisory {
        match self.current {
            None => self.current = Some(raw),
            Some(cur) if cur == raw => self.pending = None,
            Some(_) => {
                let seen = match self.pending {
                    Some((a, n)) if a == raw => n + 1,
                    _ => 1,
                };
                if seen >= ticks.max(1) {
                    self.current = Some(raw);
                    self.pending = None;
                } else {
                    self.pending = Some((raw, seen));
                }
            }
        }
        self.current.unwrap_or(raw)
    }
}

/// Mutable state carried between ticks of one run.
#[derive(Debug, Clone)]
pub struct SimState {
    pub tick: u64,
    pub disambiguation: Disambiguation,
    pub last_active_chest: Option<f64>,
    debounce: Debounce,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            tick: 0,
            disambiguation: Disambiguation::default(),
            last_active_chest: None,
            debounce: Debounce::default(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        }
    }
}

/// Runs one sense-classify period and advances the user.
///
/// All four sensors read against the same user position, in the order chest,
/// knee, toe, arch.
pub fn tick(
    scene: &SagittalScene,
    user: &mut UserState,
    config: &SimConfig,
    state: &mut SimState,
) -> FrameOutput {
    let cond = config.conditions();
    let readings = SensorName::ALL.map(|name| {
        let spec = config.sensors.get(name);
        let r = measure(scene, spec, user.x, &cond);
        jitter(r, spec, config.jitter_cm, &mut state.rng)
    });
    let [chest, knee, toe, arch] = readings;
    let sensors = &config.sensors;

    let chest_gated = chest.within(sensors.get(SensorName::Chest).sarl);
    let stairs = detect_upstairs(knee, toe);
    let depth = depth_from_reading(arch, sensors.get(SensorName::Arch).mount_height);
    let frame = BuzzerFrame {
        brz_c: classify_chest(chest_gated),
        brz_k: classify_knee(knee.within(sensors.get(SensorName::Knee).sarl)),
        brz_t: classify_toe(toe.within(sensors.get(SensorName::Toe).sarl)),
        brz_p: classify_depth(depth).brz_p,
    };

    state.disambiguation = disambiguate(
        state.disambiguation,
        frame.brz_c,
        state.last_active_chest.unwrap_or(f64::NAN),
        user.moving_back(),
    );
    if frame.brz_c > 0 {
        state.last_active_chest = chest_gated.distance();
    }

    let flags = Flags {
        upstairs: stairs.upstairs,
        downstep: is_downstep(depth),
        inferred: state.disambiguation.inferred,
    };
    let advisory = state
        .debounce
        .update(fuse(&frame, &flags), config.debounce_ticks);

    let out = FrameOutput {
        tick: state.tick,
        t_ms: state.tick * u64::from(config.tick_ms),
        user_x: user.x,
        readings,
        frame,
        advisory,
        flags,
    };
    state.tick += 1;
    user.x += user.speed * f64::from(config.tick_ms) / 1000.0;
    out
}

fn jitter(r: Reading, spec: &SensorSpec, amount: f64, rng: &mut ChaCha8Rng) -> Reading {
    match r {
        Reading::Echo(d) if amount > 0.0 => {
            Reading::Echo(clamp_range(spec, d + rng.gen_range(-amount..=amount)))
        }
        other => other,
    }
}

/// Constant-speed leg of a walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSegment {
    pub speed: f64,
    pub seconds: f64,
}

impl WalkSegment {
    pub const fn new(speed: f64, seconds: f64) -> Self {
        Self { speed, seconds }
    }

    pub fn ticks(&self, tick_ms: u32) -> u64 {
        (self.seconds * 1000.0 / f64::from(tick_ms)).round() as u64
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.speed.is_finite() && self.speed.abs() <= MAX_SPEED) {
            return Err(SimError::Trajectory(format!(
                "speed {} outside ±{MAX_SPEED} cm/s",
                self.speed
            )));
        }
        if !(self.seconds > 0.0 && self.seconds.is_finite()) {
            return Err(SimError::Trajectory(format!(
                "duration {} must be positive",
                self.seconds
            )));
        }
        Ok(())
    }
}

/// Owns a scene and configuration and steps them tick by tick.
#[derive(Debug, Clone)]
pub struct Simulator {
    scene: SagittalScene,
    config: SimConfig,
    user: UserState,
    state: SimState,
}

impl Simulator {
    pub fn new(scene: SagittalScene, config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let user = UserState {
            x: config.start_x,
            speed: 0.0,
            height: config.user_height,
        };
        let state = SimState::new(&config);
        Ok(Self {
            scene,
            config,
            user,
            state,
        })
    }

    pub fn user(&self) -> &UserState {
        &self.user
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// Sets the walking speed and runs one tick.
    pub fn step(&mut self, speed: f64) -> Result<FrameOutput, SimError> {
        if !(speed.is_finite() && speed.abs() <= MAX_SPEED) {
            return Err(SimError::Trajectory(format!(
                "speed {speed} outside ±{MAX_SPEED} cm/s"
            )));
        }
        self.user.speed = speed;
        Ok(tick(
            &self.scene,
            &mut self.user,
            &self.config,
            &mut self.state,
        ))
    }
}

/// Runs a whole walk. Validation happens before the first tick.
pub fn run_scenario(
    scene: &SagittalScene,
    trajectory: &[WalkSegment],
    config: &SimConfig,
) -> Result<Vec<FrameOutput>, SimError> {
    if trajectory.is_empty() {
        return Err(SimError::Trajectory("no walk segments".into()));
    }
    for seg in trajectory {
        seg.validate()?;
    }
    let mut sim = Simulator::new(scene.clone(), config.clone())?;
    let total: u64 = trajectory.iter().map(|s| s.ticks(config.tick_ms)).sum();
    let mut frames = Vec::with_capacity(total as usize);
    for seg in trajectory {
        for _ in 0..seg.ticks(config.tick_ms) {
            frames.push(sim.step(seg.speed)?);
        }
    }
    Ok(frames)
}
