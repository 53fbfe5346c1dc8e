//! Test-only oracles. Nothing here calls into the production raycaster; scenes
//! are rebuilt as plain line segments and intersected generically.

#![allow(dead_code)]

use echostick::geometry::{Aim, Point, SagittalScene, MIN_OBSTACLE_THICKNESS};
use echostick::{GroundSegment, Rect, SensorName, SensorSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAR: f64 = 1.0e6;

#[derive(Debug, Clone, Copy)]
struct Seg {
    a: (f64, f64),
    b: (f64, f64),
    /// Horizontal ground: blocks, echoes only for downward sensors.
    floor: bool,
}

fn cross(u: (f64, f64), v: (f64, f64)) -> f64 {
    u.0 * v.1 - u.1 * v.0
}

/// Ground as a polyline from -FAR to +FAR: breakpoints from the authored
/// segments, elevation sampled at interval midpoints, zero in the gaps.
fn ground_polyline(scene: &SagittalScene) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = scene.ground().iter().flat_map(|g| [g.x0, g.x1]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let mut bounds = vec![-FAR];
    bounds.extend(&xs);
    bounds.push(FAR);
    let levels: Vec<f64> = bounds
        .windows(2)
        .map(|w| elevation(scene, 0.5 * (w[0] + w[1])))
        .collect();
    let mut pts = vec![(-FAR, levels[0])];
    for (i, &x) in xs.iter().enumerate() {
        pts.push((x, levels[i]));
        pts.push((x, levels[i + 1]));
    }
    pts.push((FAR, levels[levels.len() - 1]));
    pts
}

fn segments(scene: &SagittalScene) -> Vec<Seg> {
    let mut out = Vec::new();
    let poly = ground_polyline(scene);
    for w in poly.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        out.push(Seg {
            a: w[0],
            b: w[1],
            floor: w[0].1 == w[1].1,
        });
    }
    for r in scene.obstacles() {
        if r.x1 - r.x0 < MIN_OBSTACLE_THICKNESS - 1e-9 {
            continue;
        }
        let c = [(r.x0, r.z0), (r.x1, r.z0), (r.x1, r.z1), (r.x0, r.z1)];
        for i in 0..4 {
            out.push(Seg {
                a: c[i],
                b: c[(i + 1) % 4],
                floor: false,
            });
        }
    }
    out
}

fn direction(aim: Aim, angle: f64) -> (f64, f64) {
    match aim {
        Aim::Forward => (angle.cos(), angle.sin()),
        Aim::Down => (angle.sin(), -angle.cos()),
    }
}

fn first_contact(
    segs: &[Seg],
    scene: &SagittalScene,
    o: Point,
    d: (f64, f64),
) -> Option<(f64, bool)> {
    let inside = scene.obstacles().iter().any(|r| {
        r.x1 - r.x0 >= MIN_OBSTACLE_THICKNESS - 1e-9
            && o.x > r.x0
            && o.x < r.x1
            && o.z > r.z0
            && o.z < r.z1
    });
    if inside {
        return Some((0.0, false));
    }
    let mut best: Option<(f64, bool)> = None;
    for s in segs {
        let e = (s.b.0 - s.a.0, s.b.1 - s.a.1);
        let denom = cross(d, e);
        if denom.abs() < 1e-15 {
            continue;
        }
        let w = (s.a.0 - o.x, s.a.1 - o.z);
        let t = cross(w, e) / denom;
        let u = cross(w, d) / denom;
        if t >= -1e-9 && (-1e-12..=1.0 + 1e-12).contains(&u) {
            let t = t.max(0.0);
            // Prefer a non-floor contact on exact ties (box standing on the floor).
            let better = match best {
                None => true,
                Some((bt, bf)) => t < bt - 1e-12 || ((t - bt).abs() <= 1e-12 && bf && !s.floor),
            };
            if better {
                best = Some((t, s.floor));
            }
        }
    }
    best
}

/// Echo distance along one ray via generic segment intersection.
pub fn oracle_ray(scene: &SagittalScene, o: Point, aim: Aim, angle: f64) -> Option<f64> {
    let segs = segments(scene);
    first_contact(&segs, scene, o, direction(aim, angle))
        .filter(|&(_, floor)| !(floor && aim == Aim::Forward))
        .map(|(t, _)| t)
}

/// Minimum echo over `n` evenly spaced rays across the cone.
pub fn dense_cone(
    scene: &SagittalScene,
    o: Point,
    aim: Aim,
    half_angle_deg: f64,
    n: usize,
) -> Option<f64> {
    let segs = segments(scene);
    let half = half_angle_deg.to_radians();
    (0..n)
        .filter_map(|i| {
            let a = -half + 2.0 * half * i as f64 / (n - 1) as f64;
            first_contact(&segs, scene, o, direction(aim, a))
                .filter(|&(_, floor)| !(floor && aim == Aim::Forward))
                .map(|(t, _)| t)
        })
        .min_by(|a, b| a.partial_cmp(b).unwrap())
}

fn elevation(scene: &SagittalScene, x: f64) -> f64 {
    scene
        .ground()
        .iter()
        .find(|g| x >= g.x0 && x < g.x1)
        .map_or(0.0, |g| g.dz)
}

fn ground_piece(scene: &SagittalScene, x: f64) -> Option<usize> {
    scene.ground().iter().position(|g| x >= g.x0 && x < g.x1)
}

/// Marches along a ray in `step` cm increments until it is inside something.
/// Returns the distance of the first solid sample, or `None` past `max_t`.
pub fn march_ray(
    scene: &SagittalScene,
    o: Point,
    aim: Aim,
    angle: f64,
    step: f64,
    max_t: f64,
) -> Option<f64> {
    let d = direction(aim, angle);
    let n = (max_t / step).ceil() as usize;
    let mut prev_piece = ground_piece(scene, o.x);
    for i in 0..=n {
        let t = i as f64 * step;
        let (x, z) = (o.x + t * d.0, o.z + t * d.1);
        let in_obstacle = scene.obstacles().iter().any(|r| {
            r.x1 - r.x0 >= MIN_OBSTACLE_THICKNESS - 1e-9
                && x >= r.x0
                && x <= r.x1
                && z >= r.z0
                && z <= r.z1
        });
        if in_obstacle {
            return Some(t);
        }
        let piece = ground_piece(scene, x);
        if z < elevation(scene, x) {
            // Same ground piece as the previous sample: came through the top.
            let through_top = piece == prev_piece;
            return if through_top && aim == Aim::Forward {
                None
            } else {
                Some(t)
            };
        }
        prev_piece = piece;
    }
    None
}

/// Random scene around a user standing at `user_x`, plus a sensor that can be
/// placed there.
pub fn random_scene(seed: u64, user_x: f64) -> (SagittalScene, SensorSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sensor = SensorSpec::default_for(SensorName::ALL[rng.gen_range(0..4)]);
    let n_obstacles = rng.gen_range(0..=5);
    let obstacles: Vec<Rect> = (0..n_obstacles)
        .map(|_| {
            let x0 = user_x + rng.gen_range(5.0..320.0);
            let z0 = rng.gen_range(0.0..180.0);
            Rect::new(
                x0,
                x0 + rng.gen_range(0.5..60.0),
                z0,
                z0 + rng.gen_range(1.0..80.0),
            )
        })
        .collect();
    let mut ground = Vec::new();
    let mut x = user_x - rng.gen_range(0.0..60.0);
    for _ in 0..rng.gen_range(0..=3) {
        let x0 = x + rng.gen_range(0.0..80.0);
        let x1 = x0 + rng.gen_range(5.0..120.0);
        let dz = if x0 <= user_x && user_x <= x1 {
            rng.gen_range(-60.0..5.0)
        } else {
            rng.gen_range(-60.0..25.0)
        };
        ground.push(GroundSegment::new(x0, x1, dz));
        x = x1;
    }
    (SagittalScene::new(obstacles, ground).unwrap(), sensor)
}
