//! Sagittal-plane scene model and ultrasonic cone raycasting.
//!
//! Coordinates are centimeters: `x` runs forward from the user, `z` is height
//! above nominal ground. Obstacles are axis-aligned rectangles; the ground is a
//! piecewise-constant elevation profile whose jumps form vertical riser faces.

use thiserror::Error;

/// Obstacles thinner than this (forward extent, cm) do not return an echo.
pub const MIN_OBSTACLE_THICKNESS: f64 = 0.3;

/// Full divergence of the modelled transducer, degrees.
pub const DEFAULT_DIVERGENCE_DEG: f64 = 30.0;

/// Uniform rays per cone on the production path.
pub const DEFAULT_RAYS: usize = 31;

const EPS: f64 = 1e-9;

/// Angular offset, radians, of the rays cast either side of a critical point.
const CRITICAL_NUDGE: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("divergence must lie strictly between 0 and 180 degrees, got {0}")]
    Divergence(f64),
    #[error("cone half-angle must lie strictly between 0 and 90 degrees, got {0}")]
    HalfAngle(f64),
    #[error("upper mount height {upper} is below lower mount height {lower}")]
    InvertedHeights { upper: f64, lower: f64 },
    #[error("obstacle {index} is degenerate or inverted")]
    InvalidRect { index: usize },
    #[error("ground segment {index} is degenerate or non-finite")]
    InvalidGround { index: usize },
    #[error("ground segment {index} overlaps its predecessor")]
    OverlappingGround { index: usize },
    #[error("ray origin ({x}, {z}) lies below the ground")]
    InvalidRay { x: f64, z: f64 },
    #[error("cone needs an odd ray count of at least 3, got {0}")]
    RayCount(usize),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub z: f64,
}

impl Point {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.z - other.z)
    }
}

/// Obstacle body in the forward x height plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub z0: f64,
    pub z1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, z0: f64, z1: f64) -> Self {
        Self { x0, x1, z0, z1 }
    }

    pub fn is_valid(&self) -> bool {
        [self.x0, self.x1, self.z0, self.z1]
            .iter()
            .all(|v| v.is_finite())
            && self.x0 < self.x1
            && self.z0 < self.z1
    }

    pub fn thickness(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Whether the sensor can see this obstacle at all.
    pub fn is_detectable(&self) -> bool {
        self.thickness() >= MIN_OBSTACLE_THICKNESS - EPS
    }

    fn contains_strictly(&self, p: Point) -> bool {
        p.x > self.x0 && p.x < self.x1 && p.z > self.z0 && p.z < self.z1
    }
}

/// A stretch of ground at elevation `dz` relative to nominal ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSegment {
    pub x0: f64,
    pub x1: f64,
    pub dz: f64,
}

impl GroundSegment {
    pub const fn new(x0: f64, x1: f64, dz: f64) -> Self {
        Self { x0, x1, dz }
    }

    fn is_valid(&self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.dz.is_finite() && self.x0 < self.x1
    }
}

/// Which way a sensor points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aim {
    Forward,
    Down,
}

impl Aim {
    /// Unit direction of a ray tilted `angle` radians off this aim.
    ///
    /// Positive angles tilt up for `Forward` and toward +x for `Down`.
    pub fn direction(self, angle: f64) -> (f64, f64) {
        match self {
            Aim::Forward => (angle.cos(), angle.sin()),
            Aim::Down => (angle.sin(), -angle.cos()),
        }
    }

    /// Inverse of [`Aim::direction`]: the tilt pointing from `origin` at `p`.
    pub fn angle_to(self, origin: Point, p: Point) -> f64 {
        let (dx, dz) = (p.x - origin.x, p.z - origin.z);
        match self {
            Aim::Forward => dz.atan2(dx),
            Aim::Down => dx.atan2(-dz),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point,
    /// Radians relative to the emitting sensor's aim axis.
    pub angle: f64,
}

impl Ray {
    pub const fn new(origin: Point, angle: f64) -> Self {
        Self { origin, angle }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SurfaceKind {
    /// Horizontal ground. Forward-aimed sensors meet it at grazing incidence
    /// and get no echo back, but it still blocks the beam.
    GroundTop,
    Riser,
    Obstacle,
}

impl SurfaceKind {
    fn echoes(self, aim: Aim) -> bool {
        !(aim == Aim::Forward && self == SurfaceKind::GroundTop)
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Horizontal { z: f64, x0: f64, x1: f64 },
    Vertical { x: f64, z0: f64, z1: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Surface {
    shape: Shape,
    kind: SurfaceKind,
}

impl Surface {
    fn intersect(&self, o: Point, d: (f64, f64)) -> Option<f64> {
        let (t, along, lo, hi) = match self.shape {
            Shape::Horizontal { z, x0, x1 } => {
                if d.1 == 0.0 {
                    return None;
                }
                let t = (z - o.z) / d.1;
                (t, o.x + t * d.0, x0, x1)
            }
            Shape::Vertical { x, z0, z1 } => {
                if d.0 == 0.0 {
                    return None;
                }
                let t = (x - o.x) / d.0;
                (t, o.z + t * d.1, z0, z1)
            }
        };
        (t >= -EPS && along >= lo - EPS && along <= hi + EPS).then_some(t.max(0.0))
    }

    /// Finite vertices and the foot of the perpendicular from `o`, if on the surface.
    fn critical_points(&self, o: Point) -> impl Iterator<Item = Point> {
        let pts = match self.shape {
            Shape::Horizontal { z, x0, x1 } => {
                [Point::new(x0, z), Point::new(x1, z), Point::new(o.x, z)]
                    .map(|p| Some(p).filter(|p| p.x.is_finite() && p.x >= x0 && p.x <= x1))
            }
            Shape::Vertical { x, z0, z1 } => {
                [Point::new(x, z0), Point::new(x, z1), Point::new(x, o.z)]
                    .map(|p| Some(p).filter(|p| p.z >= z0 && p.z <= z1))
            }
        };
        pts.into_iter().flatten()
    }
}

/// The world the sensors look at.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SagittalScene {
    obstacles: Vec<Rect>,
    /// Authored ground segments, sorted and non-overlapping.
    ground: Vec<GroundSegment>,
}

impl SagittalScene {
    /// Builds a scene. Ground segments may be given in any order; gaps between
    /// them are nominal ground (`dz = 0`).
    pub fn new(obstacles: Vec<Rect>, mut ground: Vec<GroundSegment>) -> Result<Self> {
        if let Some(index) = obstacles.iter().position(|r| !r.is_valid()) {
            return Err(GeometryError::InvalidRect { index });
        }
        if let Some(index) = ground.iter().position(|g| !g.is_valid()) {
            return Err(GeometryError::InvalidGround { index });
        }
        let mut order: Vec<usize> = (0..ground.len()).collect();
        order.sort_by(|&a, &b| ground[a].x0.total_cmp(&ground[b].x0));
        for w in order.windows(2) {
            if ground[w[1]].x0 < ground[w[0]].x1 {
                return Err(GeometryError::OverlappingGround { index: w[1] });
            }
        }
        ground.sort_by(|a, b| a.x0.total_cmp(&b.x0));
        Ok(Self { obstacles, ground })
    }

    /// Flat, empty ground.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn obstacles(&self) -> &[Rect] {
        &self.obstacles
    }

    pub fn ground(&self) -> &[GroundSegment] {
        &self.ground
    }

    pub fn with_obstacle(mut self, rect: Rect) -> Result<Self> {
        if !rect.is_valid() {
            return Err(GeometryError::InvalidRect {
                index: self.obstacles.len(),
            });
        }
        self.obstacles.push(rect);
        Ok(self)
    }

    /// Same scene shifted `dx` cm along the forward axis.
    pub fn translated(&self, dx: f64) -> Self {
        Self {
            obstacles: self
                .obstacles
                .iter()
                .map(|r| Rect::new(r.x0 + dx, r.x1 + dx, r.z0, r.z1))
                .collect(),
            ground: self
                .ground
                .iter()
                .map(|g| GroundSegment::new(g.x0 + dx, g.x1 + dx, g.dz))
                .collect(),
        }
    }

    /// Ground elevation at `x`. On a riser the lower of the two sides is returned.
    pub fn elevation_at(&self, x: f64) -> f64 {
        self.profile()
            .iter()
            .filter(|&&(x0, x1, _)| x >= x0 && x <= x1)
            .map(|&(_, _, dz)| dz)
            .fold(f64::INFINITY, f64::min)
    }

    /// Contiguous profile over the whole axis, gaps filled with `dz = 0` and
    /// equal neighbours merged. Returned as `(x0, x1, dz)` with infinite ends.
    fn profile(&self) -> Vec<(f64, f64, f64)> {
        let mut out: Vec<(f64, f64, f64)> = Vec::with_capacity(self.ground.len() * 2 + 1);
        let mut push = |x0: f64, x1: f64, dz: f64| {
            if x1 <= x0 {
                return;
            }
            match out.last_mut() {
                Some(last) if last.2 == dz => last.1 = x1,
                _ => out.push((x0, x1, dz)),
            }
        };
        let mut cursor = f64::NEG_INFINITY;
        for g in &self.ground {
            push(cursor, g.x0, 0.0);
            push(g.x0, g.x1, g.dz);
            cursor = g.x1;
        }
        push(cursor, f64::INFINITY, 0.0);
        out
    }

    fn surfaces(&self) -> Vec<Surface> {
        let profile = self.profile();
        let mut out = Vec::with_capacity(profile.len() * 2 + self.obstacles.len() * 4);
        for (i, &(x0, x1, dz)) in profile.iter().enumerate() {
            out.push(Surface {
                shape: Shape::Horizontal { z: dz, x0, x1 },
                kind: SurfaceKind::GroundTop,
            });
            if let Some(&(_, _, next)) = profile.get(i + 1) {
                out.push(Surface {
                    shape: Shape::Vertical {
                        x: x1,
                        z0: dz.min(next),
                        z1: dz.max(next),
                    },
                    kind: SurfaceKind::Riser,
                });
            }
        }
        for r in self.obstacles.iter().filter(|r| r.is_detectable()) {
            let kind = SurfaceKind::Obstacle;
            out.extend([
                Surface {
                    shape: Shape::Vertical {
                        x: r.x0,
                        z0: r.z0,
                        z1: r.z1,
                    },
                    kind,
                },
                Surface {
                    shape: Shape::Vertical {
                        x: r.x1,
                        z0: r.z0,
                        z1: r.z1,
                    },
                    kind,
                },
                Surface {
                    shape: Shape::Horizontal {
                        z: r.z0,
                        x0: r.x0,
                        x1: r.x1,
                    },
                    kind,
                },
                Surface {
                    shape: Shape::Horizontal {
                        z: r.z1,
                        x0: r.x0,
                        x1: r.x1,
                    },
                    kind,
                },
            ]);
        }
        out
    }

    fn check_origin(&self, o: Point) -> Result<()> {
        if !(o.x.is_finite() && o.z.is_finite()) || o.z < self.elevation_at(o.x) - EPS {
            return Err(GeometryError::InvalidRay { x: o.x, z: o.z });
        }
        Ok(())
    }
}

/// Forward distance at which the lower edge of the upper cone meets the upper
/// edge of the lower cone, for two parallel forward-facing sensors.
pub fn overlap_distance(h_upper: f64, h_lower: f64, divergence_deg: f64) -> Result<f64> {
    if !(divergence_deg > 0.0 && divergence_deg < 180.0) {
        return Err(GeometryError::Divergence(divergence_deg));
    }
    if h_upper < h_lower {
        return Err(GeometryError::InvertedHeights {
            upper: h_upper,
            lower: h_lower,
        });
    }
    let half = (divergence_deg / 2.0).to_radians();
    Ok((h_upper - h_lower) / (2.0 * half.tan()))
}

fn first_hit(
    surfaces: &[Surface],
    obstacles: &[Rect],
    o: Point,
    d: (f64, f64),
) -> Option<(f64, SurfaceKind)> {
    if obstacles
        .iter()
        .any(|r| r.is_detectable() && r.contains_strictly(o))
    {
        return Some((0.0, SurfaceKind::Obstacle));
    }
    surfaces
        .iter()
        .filter_map(|s| s.intersect(o, d).map(|t| (t, s.kind)))
        // Obstacle faces win exact ties with ground so that a box resting on
        // the floor echoes at its base corner.
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| echo_rank(a.1).cmp(&echo_rank(b.1)))
        })
}

fn echo_rank(kind: SurfaceKind) -> u8 {
    match kind {
        SurfaceKind::Obstacle => 0,
        SurfaceKind::Riser => 1,
        SurfaceKind::GroundTop => 2,
    }
}

fn echo_along(
    surfaces: &[Surface],
    obstacles: &[Rect],
    o: Point,
    aim: Aim,
    angle: f64,
) -> Option<f64> {
    first_hit(surfaces, obstacles, o, aim.direction(angle))
        .filter(|(_, kind)| kind.echoes(aim))
        .map(|(t, _)| t)
}

/// Distance along `ray` to the first surface that returns an echo.
///
/// Obstacles thinner than [`MIN_OBSTACLE_THICKNESS`] are transparent. A
/// forward-aimed ray whose first contact is horizontal ground returns `None`.
pub fn raycast(scene: &SagittalScene, ray: Ray, aim: Aim) -> Result<Option<f64>> {
    scene.check_origin(ray.origin)?;
    let surfaces = scene.surfaces();
    Ok(echo_along(
        &surfaces,
        &scene.obstacles,
        ray.origin,
        aim,
        ray.angle,
    ))
}

/// `n_rays` tilts evenly spanning `[-half_angle, +half_angle]`, in radians.
pub fn uniform_angles(half_angle_deg: f64, n_rays: usize) -> Result<Vec<f64>> {
    if n_rays < 3 || n_rays.is_multiple_of(2) {
        return Err(GeometryError::RayCount(n_rays));
    }
    if !(half_angle_deg > 0.0 && half_angle_deg < 90.0) {
        return Err(GeometryError::HalfAngle(half_angle_deg));
    }
    let half = half_angle_deg.to_radians();
    let mid = (n_rays / 2) as f64;
    Ok((0..n_rays).map(|i| half * (i as f64 - mid) / mid).collect())
}

/// Smallest echo distance over an explicit set of ray tilts.
pub fn min_over_angles(
    scene: &SagittalScene,
    origin: Point,
    aim: Aim,
    angles: &[f64],
) -> Result<Option<f64>> {
    scene.check_origin(origin)?;
    let surfaces = scene.surfaces();
    Ok(angles
        .iter()
        .filter_map(|&a| echo_along(&surfaces, &scene.obstacles, origin, aim, a))
        .min_by(f64::total_cmp))
}

/// Nearest echo anywhere inside a cone of the given half-angle.
///
/// The cone is sampled with `n_rays` uniform rays and additionally with a
/// pair of rays hugging every vertex and perpendicular foot of the scene
/// geometry that falls inside the cone. The minimum of a ray-to-segment
/// distance over an angular interval sits at one of those points or at the
/// cone edge, so the result matches the continuous cone to within
/// `r * CRITICAL_NUDGE`.
pub fn cone_min_distance(
    scene: &SagittalScene,
    origin: Point,
    aim: Aim,
    half_angle_deg: f64,
    n_rays: usize,
) -> Result<Option<f64>> {
    let angles = uniform_angles(half_angle_deg, n_rays)?;
    scene.check_origin(origin)?;
    let surfaces = scene.surfaces();
    let obstacles = &scene.obstacles;
    let half = half_angle_deg.to_radians();

    let mut best = angles
        .iter()
        .filter_map(|&a| echo_along(&surfaces, obstacles, origin, aim, a))
        .min_by(f64::total_cmp);
    let mut consider = |d: f64| {
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    };

    for s in surfaces.iter().filter(|s| s.kind.echoes(aim)) {
        for p in s.critical_points(origin) {
            if origin.dist(p) <= EPS {
                consider(0.0);
                continue;
            }
            let angle = aim.angle_to(origin, p);
            if angle.abs() > half + EPS {
                continue;
            }
            // Straddle the point rather than aim at it: a ray through a bare
            // corner only grazes it, and the faces that really return the
            // echo are hit by the rays on either side.
            for a in [angle - CRITICAL_NUDGE, angle + CRITICAL_NUDGE] {
                if let Some(t) = echo_along(&surfaces, obstacles, origin, aim, a.clamp(-half, half))
                {
                    consider(t);
                }
            }
        }
    }
    Ok(best)
}
