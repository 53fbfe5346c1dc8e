//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! CONFIG tick_ms 30
//! SENSOR knee 50 60
//! OBSTACLE 100 102 0 200
//! GROUND 500 560 -30
//! WALK 140 3.0
//! ```
//!
//! Lengths are cm, durations seconds, speeds cm/s.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{GroundSegment, Rect, SagittalScene};
use crate::pipeline::{SimConfig, WalkSegment, MAX_SPEED};
use crate::sensing::SensorName;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
}

impl ScenarioError {
    pub fn line(&self) -> usize {
        match self {
            ScenarioError::Syntax { line, .. } | ScenarioError::Semantic { line, .. } => *line,
        }
    }
}

/// `CONFIG` values present in a file. Absent keys keep the simulator defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigOverrides {
    pub tick_ms: Option<u32>,
    pub rays: Option<usize>,
    pub debounce_ticks: Option<u32>,
    pub temp: Option<f64>,
    pub temp_cal: Option<f64>,
    pub jitter: Option<f64>,
    pub seed: Option<u64>,
    pub start_x: Option<f64>,
    pub user_height: Option<f64>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut SimConfig) {
        if let Some(v) = self.tick_ms {
            cfg.tick_ms = v;
        }
        if let Some(v) = self.rays {
            cfg.n_rays = v;
        }
        if let Some(v) = self.debounce_ticks {
            cfg.debounce_ticks = v;
        }
        if let Some(v) = self.temp {
            cfg.temp_actual = v;
        }
        if let Some(v) = self.temp_cal {
            cfg.temp_cal = v;
        }
        if let Some(v) = self.jitter {
            cfg.jitter_cm = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.start_x {
            cfg.start_x = v;
        }
        if let Some(v) = self.user_height {
            cfg.user_height = v;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorOverride {
    pub name: SensorName,
    pub height: f64,
    pub sarl: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioFile {
    pub config: ConfigOverrides,
    pub sensors: Vec<SensorOverride>,
    pub obstacles: Vec<Rect>,
    pub ground: Vec<GroundSegment>,
    pub walks: Vec<WalkSegment>,
}

impl ScenarioFile {
    /// Simulator defaults with this file's overrides applied.
    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::default();
        self.config.apply(&mut cfg);
        for s in &self.sensors {
            let spec = cfg.sensors.get_mut(s.name);
            spec.mount_height = s.height;
            spec.sarl = s.sarl;
        }
        cfg
    }

    pub fn scene(&self) -> Result<SagittalScene, crate::geometry::GeometryError> {
        SagittalScene::new(self.obstacles.clone(), self.ground.clone())
    }
}

impl FromStr for ScenarioFile {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scenario(s)
    }
}

struct Fields<'a> {
    line: usize,
    directive: &'a str,
    args: Vec<&'a str>,
}

impl<'a> Fields<'a> {
    fn syntax(&self, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn semantic(&self, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Semantic {
            line: self.line,
            message: message.into(),
        }
    }

    fn expect(&self, n: usize) -> Result<(), ScenarioError> {
        if self.args.len() != n {
            return Err(self.syntax(format!(
                "{} takes {n} arguments, found {}",
                self.directive,
                self.args.len()
            )));
        }
        Ok(())
    }

    fn num<T: FromStr>(&self, i: usize) -> Result<T, ScenarioError> {
        self.args[i]
            .parse()
            .map_err(|_| self.syntax(format!("invalid number `{}`", self.args[i])))
    }

    fn real(&self, i: usize) -> Result<f64, ScenarioError> {
        let v: f64 = self.num(i)?;
        if !v.is_finite() {
            return Err(self.syntax(format!("non-finite number `{}`", self.args[i])));
        }
        Ok(v)
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile, ScenarioError> {
    let mut out = ScenarioFile::default();
    let mut ground_lines: Vec<usize> = Vec::new();
    let mut sensor_lines: Vec<usize> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut words = body.split_whitespace();
        let Some(directive) = words.next() else {
            continue;
        };
        let f = Fields {
            line: i + 1,
            directive,
            args: words.collect(),
        };
        match directive {
            "CONFIG" => parse_config(&f, &mut out.config)?,
            "SENSOR" => {
                f.expect(3)?;
                let name: SensorName = f.args[0]
                    .parse()
                    .map_err(|_| f.syntax(format!("unknown sensor `{}`", f.args[0])))?;
                let ov = SensorOverride {
                    name,
                    height: f.real(1)?,
                    sarl: f.real(2)?,
                };
                if let Some(k) = out.sensors.iter().position(|s| s.name == name) {
                    return Err(f.semantic(format!(
                        "sensor {name} already set on line {}",
                        sensor_lines[k]
                    )));
                }
                let mut cfg = SimConfig::default();
                let spec = cfg.sensors.get_mut(name);
                spec.mount_height = ov.height;
                spec.sarl = ov.sarl;
                spec.validate().map_err(|e| f.semantic(e.to_string()))?;
                out.sensors.push(ov);
                sensor_lines.push(f.line);
            }
            "OBSTACLE" => {
                f.expect(4)?;
                let r = Rect::new(f.real(0)?, f.real(1)?, f.real(2)?, f.real(3)?);
                if !r.is_valid() {
                    return Err(f.semantic("obstacle needs x0 < x1 and z0 < z1"));
                }
                out.obstacles.push(r);
            }
            "GROUND" => {
                f.expect(3)?;
                let g = GroundSegment::new(f.real(0)?, f.real(1)?, f.real(2)?);
                if g.x0 >= g.x1 {
                    return Err(f.semantic("ground segment needs x0 < x1"));
                }
                if let Some(k) = out.ground.iter().position(|o| g.x0 < o.x1 && o.x0 < g.x1) {
                    return Err(f.semantic(format!(
                        "ground segment overlaps the one on line {}",
                        ground_lines[k]
                    )));
                }
                out.ground.push(g);
                ground_lines.push(f.line);
            }
            "WALK" => {
                f.expect(2)?;
                let w = WalkSegment::new(f.real(0)?, f.real(1)?);
                if w.speed.abs() > MAX_SPEED {
                    return Err(f.semantic(format!("speed exceeds {MAX_SPEED} cm/s")));
                }
                if w.seconds <= 0.0 {
                    return Err(f.semantic("walk duration must be positive"));
                }
                out.walks.push(w);
            }
            other => return Err(f.syntax(format!("unknown directive `{other}`"))),
        }
    }
    Ok(out)
}

fn parse_config(f: &Fields<'_>, cfg: &mut ConfigOverrides) -> Result<(), ScenarioError> {
    f.expect(2)?;
    let key = f.args[0];
    let f1 = Fields {
        line: f.line,
        directive: f.directive,
        args: f.args[1..].to_vec(),
    };
    fn set<T>(f: &Fields<'_>, slot: &mut Option<T>, v: T) -> Result<(), ScenarioError> {
        if slot.is_some() {
            return Err(f.semantic(format!("duplicate CONFIG key `{}`", f.args[0])));
        }
        *slot = Some(v);
        Ok(())
    }
    match key {
        "tick_ms" => {
            let v: u32 = f1.num(0)?;
            if v == 0 {
                return Err(f.semantic("tick_ms must be positive"));
            }
            set(f, &mut cfg.tick_ms, v)
        }
        "rays" => {
            let v: usize = f1.num(0)?;
            if v < 3 || v.is_multiple_of(2) {
                return Err(f.semantic("rays must be odd and at least 3"));
            }
            set(f, &mut cfg.rays, v)
        }
        "debounce_ticks" => set(f, &mut cfg.debounce_ticks, f1.num(0)?),
        "temp" => set(f, &mut cfg.temp, f1.real(0)?),
        "temp_cal" => set(f, &mut cfg.temp_cal, f1.real(0)?),
        "jitter" => {
            let v = f1.real(0)?;
            if v < 0.0 {
                return Err(f.semantic("jitter must be non-negative"));
            }
            set(f, &mut cfg.jitter, v)
        }
        "seed" => set(f, &mut cfg.seed, f1.num(0)?),
        "start_x" => set(f, &mut cfg.start_x, f1.real(0)?),
        "user_height" => {
            let v = f1.real(0)?;
            if v <= 0.0 {
                return Err(f.semantic("user_height must be positive"));
            }
            set(f, &mut cfg.user_height, v)
        }
        other => Err(f.syntax(format!("unknown CONFIG key `{other}`"))),
    }
}

/// Canonical text form; parsing it gives back an equal [`ScenarioFile`].
pub fn print_scenario(s: &ScenarioFile) -> String {
    s.to_string()
}

impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let c = &self.config;
        let mut kv = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(out, "CONFIG {k} {v}");
            }
        };
        kv("tick_ms", c.tick_ms.map(|v| v.to_string()));
        kv("rays", c.rays.map(|v| v.to_string()));
        kv("debounce_ticks", c.debounce_ticks.map(|v| v.to_string()));
        kv("temp", c.temp.map(|v| v.to_string()));
        kv("temp_cal", c.temp_cal.map(|v| v.to_string()));
        kv("jitter", c.jitter.map(|v| v.to_string()));
        kv("seed", c.seed.map(|v| v.to_string()));
        kv("start_x", c.start_x.map(|v| v.to_string()));
        kv("user_height", c.user_height.map(|v| v.to_string()));
        for s in &self.sensors {
            let _ = writeln!(out, "SENSOR {} {} {}", s.name, s.height, s.sarl);
        }
        for r in &self.obstacles {
            let _ = writeln!(out, "OBSTACLE {} {} {} {}", r.x0, r.x1, r.z0, r.z1);
        }
        for g in &self.ground {
            let _ = writeln!(out, "GROUND {} {} {}", g.x0, g.x1, g.dz);
        }
        for w in &self.walks {
            let _ = writeln!(out, "WALK {} {}", w.speed, w.seconds);
        }
        f.write_str(&out)
    }
}
