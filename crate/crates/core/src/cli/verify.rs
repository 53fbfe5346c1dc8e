//! Exhaustive sweep of the classifiers against reference band tables.
//!
//! The tables here are written out as `(lower, upper, level)` rows, independent
//! of how the classifiers encode them, and every 0.5 cm step is compared.

use std::fmt;

use crate::classify::{
    classify_chest, classify_depth, classify_knee, classify_toe, detect_upstairs, is_downstep,
    Advisory, StairDetection,
};
use crate::sensing::Reading;

/// Rows are `lower < d <= upper`; the first row also admits `d == lower`.
type BandTable = &'static [(f64, f64, u8)];

const CHEST: BandTable = &[
    (0.0, 40.0, 4),
    (40.0, 60.0, 3),
    (60.0, 87.0, 2),
    (87.0, 150.0, 1),
];
const KNEE: BandTable = &[(0.0, 10.0, 3), (10.0, 30.0, 2), (30.0, 60.0, 1)];
const TOE: BandTable = &[(0.0, 10.0, 3), (10.0, 20.0, 2), (20.0, 40.0, 1)];
const DEPTH: BandTable = &[(0.0, 10.0, 0), (10.0, 20.0, 1), (20.0, 40.0, 2)];
const DEPTH_ADVICE: [Advisory; 4] = [
    Advisory::MoveForward,
    Advisory::MoveForwardCaution,
    Advisory::AlternatePath,
    Advisory::StopImmediately,
];

const SWEEP_STEP: f64 = 0.5;
const SWEEP_MAX: f64 = 300.0;

fn table_level(table: BandTable, d: f64, beyond: u8) -> u8 {
    table
        .iter()
        .enumerate()
        .find(|&(i, &(lo, hi, _))| (d > lo || (i == 0 && d == lo)) && d <= hi)
        .map_or(beyond, |(_, &(_, _, level))| level)
}

fn sweep() -> impl Iterator<Item = f64> {
    (1..=(SWEEP_MAX / SWEEP_STEP) as u32).map(|i| f64::from(i) * SWEEP_STEP)
}

#[derive(Debug, Clone, Default)]
pub struct ChannelReport {
    pub name: &'static str,
    pub checked: usize,
    pub mismatches: Vec<String>,
    /// Integer-cm level changes, as `d→level/d+1→level`.
    pub transitions: Vec<String>,
}

impl ChannelReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct TableReport {
    pub channels: Vec<ChannelReport>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.channels.iter().all(ChannelReport::passed)
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelReport> {
        self.channels.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.channels {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{verdict} {:<10} {} points checked", c.name, c.checked)?;
            for t in &c.transitions {
                writeln!(f, "     {:<10} {t}", "")?;
            }
            for m in c.mismatches.iter().take(10) {
                writeln!(f, "     mismatch   {m}")?;
            }
        }
        Ok(())
    }
}

fn band_channel(
    name: &'static str,
    table: BandTable,
    classify: impl Fn(Reading) -> u8,
) -> ChannelReport {
    let mut report = ChannelReport {
        name,
        ..Default::default()
    };
    for d in sweep() {
        let (got, want) = (classify(Reading::Echo(d)), table_level(table, d, 0));
        report.checked += 1;
        if got != want {
            report
                .mismatches
                .push(format!("d={d}: got {got}, table says {want}"));
        }
    }
    report.checked += 1;
    let silent = classify(Reading::NoEcho);
    if silent != 0 {
        report
            .mismatches
            .push(format!("no echo gives level {silent}"));
    }
    report.transitions = transitions(|d| classify(Reading::Echo(d)).to_string());
    report
}

fn transitions(level: impl Fn(f64) -> String) -> Vec<String> {
    (0..SWEEP_MAX as u32)
        .filter_map(|d| {
            let (a, b) = (level(f64::from(d)), level(f64::from(d + 1)));
            (a != b).then(|| format!("{d}→{a}/{}→{b}", d + 1))
        })
        .collect()
}

fn depth_channel() -> ChannelReport {
    let mut report = ChannelReport {
        name: "pothole",
        ..Default::default()
    };
    for d in std::iter::once(0.0).chain(sweep()) {
        let want = table_level(DEPTH, d, 3);
        let got = classify_depth(d);
        report.checked += 1;
        if got.brz_p != want || got.advisory != DEPTH_ADVICE[usize::from(want)] {
            report.mismatches.push(format!(
                "depth={d}: got ({}, {}), table says {want}",
                got.brz_p, got.advisory
            ));
        }
    }
    report.transitions = transitions(|d| classify_depth(d).brz_p.to_string());
    report
}

fn downstep_channel() -> ChannelReport {
    let mut report = ChannelReport {
        name: "downstep",
        ..Default::default()
    };
    for d in std::iter::once(0.0).chain(sweep()) {
        let want = (15.0..=30.0).contains(&d);
        report.checked += 1;
        if is_downstep(d) != want {
            report
                .mismatches
                .push(format!("depth={d}: got {}, expected {want}", !want));
        }
    }
    report.transitions = transitions(|d| u8::from(is_downstep(d)).to_string());
    report
}

/// Truth table for stair detection: reflection counts inside the knee (40 cm)
/// and toe (20 cm) boundaries, and a stair needs 24 < knee - toe < 26.
fn stairs_channel() -> ChannelReport {
    let mut report = ChannelReport {
        name: "stairs",
        ..Default::default()
    };
    let inputs = || {
        std::iter::once(Reading::NoEcho)
            .chain((1..=160).map(|i| Reading::Echo(f64::from(i) * SWEEP_STEP)))
    };
    let mut rows = [false; 5];
    for k in inputs() {
        for t in inputs() {
            let knee_yes = matches!(k, Reading::Echo(d) if d <= 40.0);
            let toe_yes = matches!(t, Reading::Echo(d) if d <= 20.0);
            let gap = match (k, t) {
                (Reading::Echo(x), Reading::Echo(y)) => x - y,
                _ => f64::NAN,
            };
            let want = StairDetection {
                upstairs: knee_yes && toe_yes && gap > 24.0 && gap < 26.0,
                knee_bit: knee_yes,
                toe_bit: toe_yes,
            };
            let got = detect_upstairs(k, t);
            report.checked += 1;
            if got != want {
                report.mismatches.push(format!(
                    "knee={k:?} toe={t:?}: got {got:?}, expected {want:?}"
                ));
            }
            let row = match (want.upstairs, knee_yes, toe_yes) {
                (true, ..) => 0,
                (false, true, true) => 4,
                (false, true, false) => 1,
                (false, false, true) => 2,
                (false, false, false) => 3,
            };
            rows[row] = true;
        }
    }
    let labels = [
        "knee yes, toe yes, 24<x-y<26 -> BrzK 1 BrzT 1 up stairs",
        "knee yes, toe no             -> BrzK 1 BrzT 0 knee obstacle",
        "knee no,  toe yes            -> BrzK 0 BrzT 1 toe obstacle",
        "knee no,  toe no             -> BrzK 0 BrzT 0 move forward",
        "knee yes, toe yes, gap off   -> BrzK 1 BrzT 1 no stairs",
    ];
    for (seen, label) in rows.iter().zip(labels) {
        if *seen {
            report.transitions.push(label.to_string());
        } else {
            report
                .mismatches
                .push(format!("row never exercised: {label}"));
        }
    }
    report
}

pub fn verify_tables() -> TableReport {
    TableReport {
        channels: vec![
            band_channel("chest", CHEST, classify_chest),
            band_channel("knee", KNEE, classify_knee),
            band_channel("toe", TOE, classify_toe),
            depth_channel(),
            downstep_channel(),
            stairs_channel(),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tables_pass() {
        let r = verify_tables();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn reports_band_boundaries() {
        let r = verify_tables();
        assert!(r
            .channel("chest")
            .unwrap()
            .transitions
            .contains(&"150→1/151→0".to_string()));
        assert!(r
            .channel("pothole")
            .unwrap()
            .transitions
            .contains(&"40→2/41→3".to_string()));
        assert!(r
            .channel("knee")
            .unwrap()
            .transitions
            .contains(&"60→1/61→0".to_string()));
        assert!(r
            .channel("downstep")
            .unwrap()
            .transitions
            .contains(&"14→0/15→1".to_string()));
    }

    #[test]
    fn table_lookup_catches_a_wrong_classifier() {
        let broken = band_channel("chest", CHEST, |r| match r {
            Reading::Echo(d) if d >= 150.0 => 0,
            r => classify_chest(r),
        });
        assert!(!broken.passed());
    }
}
