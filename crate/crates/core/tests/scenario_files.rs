use std::fs;
use std::path::{Path, PathBuf};

use echostick::cli::scenario::{ConfigOverrides, SensorOverride};
use echostick::cli::{
    parse_scenario, print_scenario, run_scenario_text, trace_string, RunOptions, ScenarioError,
    ScenarioFile,
};
use echostick::{GroundSegment, Rect, SensorName, WalkSegment};
use proptest::prelude::*;

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(manifest().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    v.sort();
    v
}

#[test]
fn bundled_scenarios_match_golden_traces() {
    let paths = bundled();
    assert!(paths.len() >= 7);
    for p in paths {
        let stem = p.file_stem().unwrap().to_str().unwrap();
        let golden =
            fs::read_to_string(manifest().join("tests/golden").join(format!("{stem}.csv")))
                .unwrap();
        let frames =
            run_scenario_text(&fs::read_to_string(&p).unwrap(), &RunOptions::default()).unwrap();
        let got = trace_string(&frames);
        let first_diff = got.lines().zip(golden.lines()).position(|(a, b)| a != b);
        assert!(
            first_diff.is_none(),
            "{stem}: line {} differs",
            first_diff.unwrap() + 1
        );
        assert_eq!(got.lines().count(), golden.lines().count(), "{stem}");
    }
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("WALK 100 1\nBOGUS 1\n", 2),
        ("# ok\nOBSTACLE 10 5 0 1\n", 2),
        ("GROUND 0 10 -5\n\nGROUND 5 20 -5\n", 3),
        ("CONFIG tick_ms 30\nCONFIG tick_ms 20\n", 2),
        ("WALK 900 1\n", 1),
        ("WALK 100 0\n", 1),
        ("SENSOR chest 150 400\n", 1),
        ("SENSOR knee 50 60\nSENSOR knee 50 60\n", 2),
        ("OBSTACLE 1 2 3\n", 1),
        ("CONFIG rays 30\n", 1),
        ("CONFIG colour blue\n", 1),
        ("OBSTACLE 1 2 x 4\n", 1),
    ];
    for (text, line) in cases {
        let err = parse_scenario(text).unwrap_err();
        assert_eq!(err.line(), line, "{text:?}: {err}");
        assert!(err.to_string().starts_with(&format!("line {line}:")));
    }
    assert!(matches!(
        parse_scenario("FOO").unwrap_err(),
        ScenarioError::Syntax { .. }
    ));
    assert!(matches!(
        parse_scenario("WALK 600 1").unwrap_err(),
        ScenarioError::Semantic { .. }
    ));
}

#[test]
fn run_options_override_the_file() {
    let text = fs::read_to_string(manifest().join("scenarios/wall_approach.scn")).unwrap();
    let opts = RunOptions {
        tick_ms: Some(60),
        temp: Some(30.0),
        ..RunOptions::default()
    };
    let frames = run_scenario_text(&text, &opts).unwrap();
    assert_eq!(frames[1].t_ms, 60);
    assert_eq!(frames.len(), 35);
}

fn finite() -> impl Strategy<Value = f64> {
    // Printed with `{}`, so any finite value must survive the trip.
    prop_oneof![-1000.0..1000.0f64, (-1000i32..1000).prop_map(f64::from)]
}

fn config() -> impl Strategy<Value = ConfigOverrides> {
    (
        prop::option::of(1u32..200),
        prop::option::of((1usize..50).prop_map(|n| 2 * n + 1)),
        prop::option::of(0u32..10),
        prop::option::of(finite()),
        prop::option::of(finite()),
        prop::option::of(0.0..5.0f64),
        prop::option::of(any::<u64>()),
        prop::option::of(finite()),
        prop::option::of(100.0..220.0f64),
    )
        .prop_map(
            |(
                tick_ms,
                rays,
                debounce_ticks,
                temp,
                temp_cal,
                jitter,
                seed,
                start_x,
                user_height,
            )| ConfigOverrides {
                tick_ms,
                rays,
                debounce_ticks,
                temp,
                temp_cal,
                jitter,
                seed,
                start_x,
                user_height,
            },
        )
}

fn sensors() -> impl Strategy<Value = Vec<SensorOverride>> {
    (
        prop::sample::subsequence(SensorName::ALL.to_vec(), 0..=4),
        1.0..200.0f64,
        4.0..300.0f64,
    )
        .prop_map(|(names, height, sarl)| {
            names
                .into_iter()
                .map(|name| SensorOverride { name, height, sarl })
                .collect()
        })
}

fn obstacle() -> impl Strategy<Value = Rect> {
    (finite(), 0.01..100.0f64, finite(), 0.01..100.0f64)
        .prop_map(|(x, w, z, h)| Rect::new(x, x + w, z, z + h))
}

fn ground() -> impl Strategy<Value = Vec<GroundSegment>> {
    prop::collection::vec((0.0..50.0f64, 1.0..100.0f64, -80.0..40.0f64), 0..4).prop_map(|parts| {
        let mut x = -100.0;
        parts
            .into_iter()
            .map(|(gap, len, dz)| {
                let g = GroundSegment::new(x + gap, x + gap + len, dz);
                x = g.x1;
                g
            })
            .collect()
    })
}

fn scenario() -> impl Strategy<Value = ScenarioFile> {
    (
        config(),
        sensors(),
        prop::collection::vec(obstacle(), 0..5),
        ground(),
        prop::collection::vec(
            (-500.0..=500.0f64, 0.01..10.0f64).prop_map(|(v, s)| WalkSegment::new(v, s)),
            0..5,
        ),
    )
        .prop_map(|(config, sensors, obstacles, ground, walks)| ScenarioFile {
            config,
            sensors,
            obstacles,
            ground,
            walks,
        })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(s in scenario()) {
        let text = print_scenario(&s);
        let back: ScenarioFile = text.parse().map_err(|e: ScenarioError| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, s);
    }
}
