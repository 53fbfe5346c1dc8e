use echostick::classify::{
    classify_chest, classify_depth, classify_knee, classify_toe, detect_upstairs,
    infer_upper_level, is_downstep, Advisory, UpperLevel,
};
use echostick::Reading;
use proptest::prelude::*;

#[test]
fn zero_depth_moves_forward() {
    let c = classify_depth(0.0);
    assert_eq!((c.brz_p, c.advisory), (0, Advisory::MoveForward));
}

#[test]
fn stair_window_is_strict() {
    let at = |k, t| detect_upstairs(Reading::Echo(k), Reading::Echo(t)).upstairs;
    assert!(at(40.0, 15.0));
    assert!(!at(39.0, 15.0));
    assert!(!at(41.0, 16.0));
    assert!(!at(35.0, 9.0));
}

proptest! {
    #[test]
    fn levels_fall_with_distance(a in 0.0..400.0f64, b in 0.0..400.0f64) {
        let (near, far) = if a <= b { (a, b) } else { (b, a) };
        for f in [classify_chest, classify_knee, classify_toe] {
            prop_assert!(f(Reading::Echo(far)) <= f(Reading::Echo(near)));
        }
    }

    #[test]
    fn depth_levels_rise_with_depth(a in -10.0..200.0f64, b in -10.0..200.0f64) {
        let (shallow, deep) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(classify_depth(shallow).brz_p <= classify_depth(deep).brz_p);
    }

    #[test]
    fn downstep_sits_in_the_middle_bands(d in -10.0..200.0f64) {
        if is_downstep(d) {
            prop_assert!(matches!(classify_depth(d).brz_p, 1 | 2));
        }
    }

    #[test]
    fn missing_echo_clears_its_bit(d in 0.0..100.0f64) {
        let knee_only = detect_upstairs(Reading::Echo(d), Reading::NoEcho);
        let toe_only = detect_upstairs(Reading::NoEcho, Reading::Echo(d));
        prop_assert!(!knee_only.toe_bit && !knee_only.upstairs);
        prop_assert!(!toe_only.knee_bit && !toe_only.upstairs);
    }

    #[test]
    fn upper_level_follows_chest_bands(d in 0.5..200.0f64) {
        // Head band is 61-87 cm (chest level 2), chest 41-60 (3), waist 88-150 (1).
        let expected = match classify_chest(Reading::Echo(d)) {
            1 => UpperLevel::Waist,
            2 => UpperLevel::Head,
            3 => UpperLevel::Chest,
            _ => UpperLevel::Unknown,
        };
        prop_assert_eq!(infer_upper_level(d), expected);
    }
}
