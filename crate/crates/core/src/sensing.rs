//! Sensor models: mounting, range limits, temperature bias and the linear
//! actual-vs-measured calibration.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{cone_min_distance, Aim, Point, SagittalScene, DEFAULT_RAYS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SensingError {
    #[error("calibration needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("calibration points all share the same actual distance")]
    DegenerateFit,
    #[error("calibration gain must be positive, got {0}")]
    NonPositiveGain(f64),
    #[error("calibration file line {line}: {message}")]
    CalibrationSyntax { line: usize, message: String },
    #[error("sensor {name}: {message}")]
    InvalidSpec { name: SensorName, message: String },
    #[error("unknown sensor name `{0}`")]
    UnknownSensor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SensorName {
    Chest,
    Knee,
    Toe,
    Arch,
}

impl SensorName {
    /// Firing order within a tick.
    pub const ALL: [SensorName; 4] = [
        SensorName::Chest,
        SensorName::Knee,
        SensorName::Toe,
        SensorName::Arch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SensorName::Chest => "chest",
            SensorName::Knee => "knee",
            SensorName::Toe => "toe",
            SensorName::Arch => "arch",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SensorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SensorName {
    type Err = SensingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chest" => Ok(SensorName::Chest),
            "knee" => Ok(SensorName::Knee),
            "toe" => Ok(SensorName::Toe),
            "arch" => Ok(SensorName::Arch),
            _ => Err(SensingError::UnknownSensor(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSpec {
    pub name: SensorName,
    /// Height of the transducer above nominal ground, cm.
    pub mount_height: f64,
    pub aim: Aim,
    pub half_angle: f64,
    pub min_range: f64,
    pub max_range: f64,
    /// Readings beyond this distance are ignored by the decision logic.
    pub sarl: f64,
}

impl SensorSpec {
    /// Factory mounting for a 175 cm user.
    pub fn default_for(name: SensorName) -> Self {
        let (mount_height, aim, sarl) = match name {
            SensorName::Chest => (150.0, Aim::Forward, 150.0),
            SensorName::Knee => (50.0, Aim::Forward, 60.0),
            SensorName::Toe => (5.0, Aim::Forward, 40.0),
            SensorName::Arch => (10.0, Aim::Down, 10.0),
        };
        Self {
            name,
            mount_height,
            aim,
            half_angle: 15.0,
            min_range: 3.0,
            max_range: 300.0,
            sarl,
        }
    }

    pub fn origin(&self, user_x: f64) -> Point {
        Point::new(user_x, self.mount_height)
    }

    pub fn validate(&self) -> Result<(), SensingError> {
        let bad = |message: &str| {
            Err(SensingError::InvalidSpec {
                name: self.name,
                message: message.to_string(),
            })
        };
        let finite = [
            self.mount_height,
            self.half_angle,
            self.min_range,
            self.max_range,
            self.sarl,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite parameter");
        }
        if self.mount_height <= 0.0 {
            return bad("mount height must be positive");
        }
        if !(self.half_angle > 0.0 && self.half_angle < 90.0) {
            return bad("half-angle must lie in (0, 90) degrees");
        }
        if !(self.min_range > 0.0 && self.min_range < self.max_range) {
            return bad("range limits must satisfy 0 < min < max");
        }
        match self.aim {
            Aim::Forward if !(self.min_range < self.sarl && self.sarl <= self.max_range) => {
                bad("range cutoff must satisfy min_range < sarl <= max_range")
            }
            Aim::Down if self.sarl <= 0.0 => bad("range cutoff must be positive"),
            _ => Ok(()),
        }
    }
}

/// One sensor's echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reading {
    Echo(f64),
    NoEcho,
}

impl Reading {
    pub fn distance(self) -> Option<f64> {
        match self {
            Reading::Echo(d) => Some(d),
            Reading::NoEcho => None,
        }
    }

    /// Drops echoes farther than `limit`.
    pub fn within(self, limit: f64) -> Reading {
        match self {
            Reading::Echo(d) if d <= limit => self,
            _ => Reading::NoEcho,
        }
    }
}

impl From<Option<f64>> for Reading {
    fn from(d: Option<f64>) -> Self {
        d.map_or(Reading::NoEcho, Reading::Echo)
    }
}

/// Linear sensor response `measured = gain * actual + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub gain: f64,
    pub offset: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Calibration {
    pub const IDENTITY: Calibration = Calibration {
        gain: 1.0,
        offset: 0.0,
    };

    pub fn new(gain: f64, offset: f64) -> Result<Self, SensingError> {
        if !(gain > 0.0 && gain.is_finite()) || !offset.is_finite() {
            return Err(SensingError::NonPositiveGain(gain));
        }
        Ok(Self { gain, offset })
    }

    pub fn apply(&self, actual: f64) -> f64 {
        self.gain * actual + self.offset
    }

    /// Recovers the actual distance from a measured one.
    pub fn correct(&self, measured: f64) -> f64 {
        (measured - self.offset) / self.gain
    }
}

/// Free function form of [`Calibration::correct`].
pub fn correct(calib: &Calibration, measured: f64) -> f64 {
    calib.correct(measured)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub actual: f64,
    pub measured: f64,
}

/// Ordinary least-squares line through `(actual, measured)` pairs.
pub fn fit_calibration(points: &[CalibrationPoint]) -> Result<Calibration, SensingError> {
    if points.len() < 2 {
        return Err(SensingError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.actual).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.measured).sum::<f64>() / n;
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(sxx, sxy), p| {
        let dx = p.actual - mean_x;
        (sxx + dx * dx, sxy + dx * (p.measured - mean_y))
    });
    if sxx == 0.0 {
        return Err(SensingError::DegenerateFit);
    }
    let gain = sxy / sxx;
    Calibration::new(gain, mean_y - gain * mean_x)
}

/// Parses `actual measured` pairs, one per line; `#` starts a comment.
pub fn parse_calibration_points(text: &str) -> Result<Vec<CalibrationPoint>, SensingError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| SensingError::CalibrationSyntax {
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err(format!("expected 2 fields, found {}", fields.len())));
        }
        let num = |s: &str| -> Result<f64, SensingError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("invalid number `{s}`")))
        };
        out.push(CalibrationPoint {
            actual: num(fields[0])?,
            measured: num(fields[1])?,
        });
    }
    Ok(out)
}

/// Speed of sound in air at `temp_c` degrees Celsius, cm/s.
pub fn speed_of_sound(temp_c: f64) -> f64 {
    33130.0 + 60.6 * temp_c
}

/// Ratio of reported to true distance for a sensor that assumes sound travels
/// at its calibration-temperature speed.
pub fn temperature_bias(temp_actual: f64, temp_cal: f64) -> f64 {
    speed_of_sound(temp_cal) / speed_of_sound(temp_actual)
}

/// Everything besides geometry that shapes a reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditions {
    pub temp_actual: f64,
    pub temp_cal: f64,
    pub calibration: Calibration,
    pub n_rays: usize,
}

impl Default for Conditions {
    fn default() -> Self {
        Self {
            temp_actual: 20.0,
            temp_cal: 20.0,
            calibration: Calibration::IDENTITY,
            n_rays: DEFAULT_RAYS,
        }
    }
}

/// Distance the sensor would report for the user standing at `user_x`.
///
/// Out-of-range or missing echoes, and geometry errors such as an origin
/// buried in raised ground, yield [`Reading::NoEcho`].
pub fn measure(
    scene: &SagittalScene,
    spec: &SensorSpec,
    user_x: f64,
    cond: &Conditions,
) -> Reading {
    let hit = cone_min_distance(
        scene,
        spec.origin(user_x),
        spec.aim,
        spec.half_angle,
        cond.n_rays,
    );
    match hit {
        Ok(Some(d)) if d <= spec.max_range => {
            let biased = d * temperature_bias(cond.temp_actual, cond.temp_cal);
            Reading::Echo(clamp_range(spec, cond.calibration.apply(biased)))
        }
        _ => Reading::NoEcho,
    }
}

pub(crate) fn clamp_range(spec: &SensorSpec, d: f64) -> f64 {
    d.clamp(spec.min_range, spec.max_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use approx::assert_abs_diff_eq;

    fn wall(x: f64) -> SagittalScene {
        SagittalScene::new(vec![Rect::new(x, x + 2.0, 0.0, 200.0)], vec![]).unwrap()
    }

    fn chest() -> SensorSpec {
        SensorSpec::default_for(SensorName::Chest)
    }

    #[test]
    fn unbiased_wall_reading() {
        let r = measure(&wall(100.0), &chest(), 0.0, &Conditions::default());
        assert_eq!(r, Reading::Echo(100.0));
    }

    #[test]
    fn warm_air_shortens_reading() {
        let cond = Conditions {
            temp_actual: 30.0,
            temp_cal: 20.0,
            ..Conditions::default()
        };
        let d = measure(&wall(150.0), &chest(), 0.0, &cond)
            .distance()
            .unwrap();
        // 150 * 34342 / 34948
        assert_abs_diff_eq!(d, 147.398993, epsilon = 1e-5);
        assert_abs_diff_eq!(d, 147.4, epsilon = 0.05);
    }

    #[test]
    fn beyond_max_range_is_no_echo() {
        assert_eq!(
            measure(&wall(350.0), &chest(), 0.0, &Conditions::default()),
            Reading::NoEcho
        );
        assert_eq!(
            measure(
                &SagittalScene::empty(),
                &chest(),
                0.0,
                &Conditions::default()
            ),
            Reading::NoEcho
        );
    }

    #[test]
    fn close_echo_clamps_to_min_range() {
        let r = measure(&wall(1.0), &chest(), 0.0, &Conditions::default());
        assert_eq!(r, Reading::Echo(3.0));
    }

    #[test]
    fn buried_origin_reads_no_echo() {
        let s = SagittalScene::new(
            vec![],
            vec![crate::geometry::GroundSegment::new(-5.0, 5.0, 20.0)],
        )
        .unwrap();
        let arch = SensorSpec::default_for(SensorName::Arch);
        assert_eq!(
            measure(&s, &arch, 0.0, &Conditions::default()),
            Reading::NoEcho
        );
    }

    #[test]
    fn fit_examples() {
        let pts = |v: &[(f64, f64)]| {
            v.iter()
                .map(|&(actual, measured)| CalibrationPoint { actual, measured })
                .collect::<Vec<_>>()
        };
        let c = fit_calibration(&pts(&[(10.0, 10.0), (100.0, 100.0), (300.0, 300.0)])).unwrap();
        assert_abs_diff_eq!(c.gain, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.offset, 0.0, epsilon = 1e-10);
        let c = fit_calibration(&pts(&[(10.0, 12.0), (100.0, 102.0), (300.0, 302.0)])).unwrap();
        assert_abs_diff_eq!(c.gain, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.offset, 2.0, epsilon = 1e-10);
        let c = fit_calibration(&pts(&[(10.0, 11.0), (20.0, 22.0), (30.0, 33.0)])).unwrap();
        assert_abs_diff_eq!(c.gain, 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(c.offset, 0.0, epsilon = 1e-10);

        assert_eq!(
            fit_calibration(&pts(&[(5.0, 1.0)])),
            Err(SensingError::TooFewPoints(1))
        );
        assert_eq!(
            fit_calibration(&pts(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)])),
            Err(SensingError::DegenerateFit)
        );
        assert!(matches!(
            fit_calibration(&pts(&[(5.0, 10.0), (10.0, 5.0)])),
            Err(SensingError::NonPositiveGain(_))
        ));
    }

    #[test]
    fn correct_examples() {
        assert_eq!(correct(&Calibration::IDENTITY, 57.0), 57.0);
        assert_eq!(correct(&Calibration::new(1.0, 2.0).unwrap(), 102.0), 100.0);
        assert_abs_diff_eq!(
            correct(&Calibration::new(1.1, 0.0).unwrap(), 33.0),
            30.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn calibration_file_parsing() {
        let text = "# actual measured\n10 11\n\n 20\t22  # trailing\n30 33\n";
        let pts = parse_calibration_points(text).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(
            pts[1],
            CalibrationPoint {
                actual: 20.0,
                measured: 22.0
            }
        );
        let err = parse_calibration_points("10 11\n20\n").unwrap_err();
        assert!(matches!(
            err,
            SensingError::CalibrationSyntax { line: 2, .. }
        ));
        let err = parse_calibration_points("10 x\n").unwrap_err();
        assert!(matches!(
            err,
            SensingError::CalibrationSyntax { line: 1, .. }
        ));
    }

    #[test]
    fn default_specs_are_valid() {
        for name in SensorName::ALL {
            SensorSpec::default_for(name).validate().unwrap();
        }
        let mut bad = chest();
        bad.sarl = 400.0;
        assert!(bad.validate().is_err());
        bad = chest();
        bad.min_range = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sensor_names_parse() {
        assert_eq!("Chest".parse::<SensorName>().unwrap(), SensorName::Chest);
        assert_eq!("ARCH".parse::<SensorName>().unwrap(), SensorName::Arch);
        assert!("elbow".parse::<SensorName>().is_err());
    }
}
