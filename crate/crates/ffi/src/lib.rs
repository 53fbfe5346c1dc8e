//! C ABI for the echostick simulator.
//!
//! Every fallible call returns an [`EsStatus`]; on failure a message is kept
//! per thread and can be read with [`es_last_error_message`]. Scenarios and
//! simulators are opaque handles that must be released with their `_free`
//! function. Strings returned by the library are released with
//! [`es_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use echostick::classify::{self, StairDetection};
use echostick::cli::{self, ScenarioFile};
use echostick::{Advisory, FrameOutput, Reading, Simulator, UpperLevel};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    ValidationError = 4,
    DomainError = 5,
    Panic = 6,
}

/// Echo distance in cm; `distance_cm` is meaningless when `has_echo` is false.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsReading {
    pub has_echo: bool,
    pub distance_cm: f64,
}

impl From<Reading> for EsReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Echo(d) => EsReading {
                has_echo: true,
                distance_cm: d,
            },
            Reading::NoEcho => EsReading {
                has_echo: false,
                distance_cm: 0.0,
            },
        }
    }
}

impl From<EsReading> for Reading {
    fn from(r: EsReading) -> Self {
        if r.has_echo {
            Reading::Echo(r.distance_cm)
        } else {
            Reading::NoEcho
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsUpperLevel {
    None = 0,
    Head = 1,
    Chest = 2,
    Waist = 3,
    Unknown = 4,
}

impl From<Option<UpperLevel>> for EsUpperLevel {
    fn from(l: Option<UpperLevel>) -> Self {
        match l {
            None => EsUpperLevel::None,
            Some(UpperLevel::Head) => EsUpperLevel::Head,
            Some(UpperLevel::Chest) => EsUpperLevel::Chest,
            Some(UpperLevel::Waist) => EsUpperLevel::Waist,
            Some(UpperLevel::Unknown) => EsUpperLevel::Unknown,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsAdvisory {
    MoveForward = 0,
    MoveForwardCaution = 1,
    UpStairsAhead = 2,
    KneeObstacleAhead = 3,
    ToeObstacleAhead = 4,
    AlternatePath = 5,
    StopImmediately = 6,
    UpperObstacleHead = 7,
    UpperObstacleChest = 8,
    UpperObstacleWaist = 9,
    UpperObstacleUnknown = 10,
}

impl From<Advisory> for EsAdvisory {
    fn from(a: Advisory) -> Self {
        match a {
            Advisory::MoveForward => EsAdvisory::MoveForward,
            Advisory::MoveForwardCaution => EsAdvisory::MoveForwardCaution,
            Advisory::UpStairsAhead => EsAdvisory::UpStairsAhead,
            Advisory::KneeObstacleAhead => EsAdvisory::KneeObstacleAhead,
            Advisory::ToeObstacleAhead => EsAdvisory::ToeObstacleAhead,
            Advisory::AlternatePath => EsAdvisory::AlternatePath,
            Advisory::StopImmediately => EsAdvisory::StopImmediately,
            Advisory::UpperObstacle(UpperLevel::Head) => EsAdvisory::UpperObstacleHead,
            Advisory::UpperObstacle(UpperLevel::Chest) => EsAdvisory::UpperObstacleChest,
            Advisory::UpperObstacle(UpperLevel::Waist) => EsAdvisory::UpperObstacleWaist,
            Advisory::UpperObstacle(UpperLevel::Unknown) => EsAdvisory::UpperObstacleUnknown,
        }
    }
}

/// One tick of simulator output.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsFrame {
    pub tick: u64,
    pub t_ms: u64,
    pub user_x: f64,
    pub chest: EsReading,
    pub knee: EsReading,
    pub toe: EsReading,
    pub arch: EsReading,
    pub brz_c: u8,
    pub brz_k: u8,
    pub brz_t: u8,
    pub brz_p: u8,
    pub upstairs: bool,
    pub downstep: bool,
    pub inferred: EsUpperLevel,
    pub advisory: EsAdvisory,
}

impl From<&FrameOutput> for EsFrame {
    fn from(f: &FrameOutput) -> Self {
        let [chest, knee, toe, arch] = f.readings.map(EsReading::from);
        EsFrame {
            tick: f.tick,
            t_ms: f.t_ms,
            user_x: f.user_x,
            chest,
            knee,
            toe,
            arch,
            brz_c: f.frame.brz_c,
            brz_k: f.frame.brz_k,
            brz_t: f.frame.brz_t,
            brz_p: f.frame.brz_p,
            upstairs: f.flags.upstairs,
            downstep: f.flags.downstep,
            inferred: f.flags.inferred.into(),
            advisory: f.advisory.into(),
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EsStairDetection {
    pub upstairs: bool,
    pub knee_bit: bool,
    pub toe_bit: bool,
}

impl From<StairDetection> for EsStairDetection {
    fn from(s: StairDetection) -> Self {
        EsStairDetection {
            upstairs: s.upstairs,
            knee_bit: s.knee_bit,
            toe_bit: s.toe_bit,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EsDepthClass {
    pub brz_p: u8,
    pub advisory: EsAdvisory,
}

/// Parsed scenario file.
pub struct EsScenario {
    file: ScenarioFile,
}

/// Running simulation.
pub struct EsSimulator {
    sim: Simulator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: EsStatus, msg: impl Into<String>) -> EsStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EsStatus) -> EsStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EsStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, EsStatus> {
    if text.is_null() {
        return Err(fail(EsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|_| fail(EsStatus::InvalidUtf8, "string is not valid UTF-8"))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn es_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn es_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Forward distance at which two stacked sensor cones first overlap.
///
/// # Safety
/// `out` must be a valid pointer to a `double`.
#[no_mangle]
pub unsafe extern "C" fn es_overlap_distance(
    h_upper: f64,
    h_lower: f64,
    divergence_deg: f64,
    out: *mut f64,
) -> EsStatus {
    guard(|| {
        if out.is_null() {
            return fail(EsStatus::NullPointer, "null output pointer");
        }
        match echostick::geometry::overlap_distance(h_upper, h_lower, divergence_deg) {
            Ok(d) => {
                *out = d;
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::DomainError, e.to_string()),
        }
    })
}

#[no_mangle]
pub extern "C" fn es_classify_chest(r: EsReading) -> u8 {
    classify::classify_chest(r.into())
}

#[no_mangle]
pub extern "C" fn es_classify_knee(r: EsReading) -> u8 {
    classify::classify_knee(r.into())
}

#[no_mangle]
pub extern "C" fn es_classify_toe(r: EsReading) -> u8 {
    classify::classify_toe(r.into())
}

#[no_mangle]
pub extern "C" fn es_detect_upstairs(knee: EsReading, toe: EsReading) -> EsStairDetection {
    classify::detect_upstairs(knee.into(), toe.into()).into()
}

#[no_mangle]
pub extern "C" fn es_classify_depth(depth_cm: f64) -> EsDepthClass {
    let c = classify::classify_depth(depth_cm);
    EsDepthClass {
        brz_p: c.brz_p,
        advisory: c.advisory.into(),
    }
}

#[no_mangle]
pub extern "C" fn es_is_downstep(depth_cm: f64) -> bool {
    classify::is_downstep(depth_cm)
}

/// Parses scenario text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn es_scenario_parse(
    text: *const c_char,
    out: *mut *mut EsScenario,
) -> EsStatus {
    guard(|| {
        if out.is_null() {
            return fail(EsStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match cli::parse_scenario(text) {
            Ok(file) => {
                *out = Box::into_raw(Box::new(EsScenario { file }));
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must come from [`es_scenario_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn es_scenario_free(scenario: *mut EsScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs the scenario's walk and returns the CSV trace in `*out`.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer. The returned
/// string must be released with [`es_string_free`].
#[no_mangle]
pub unsafe extern "C" fn es_scenario_run_trace(
    scenario: *const EsScenario,
    out: *mut *mut c_char,
) -> EsStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let file = &(*scenario).file;
        let frames = file
            .scene()
            .map_err(echostick::SimError::from)
            .and_then(|scene| echostick::run_scenario(&scene, &file.walks, &file.sim_config()));
        match frames {
            Ok(frames) => {
                let text = cli::trace_string(&frames);
                *out = CString::new(text).expect("trace has no NUL").into_raw();
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::ValidationError, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn es_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a step-by-step simulator from a scenario's scene and configuration.
/// The scenario's walk segments are ignored; drive it with [`es_simulator_tick`].
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn es_simulator_new(
    scenario: *const EsScenario,
    out: *mut *mut EsSimulator,
) -> EsStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let file = &(*scenario).file;
        let sim = file
            .scene()
            .map_err(echostick::SimError::from)
            .and_then(|scene| Simulator::new(scene, file.sim_config()));
        match sim {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(EsSimulator { sim }));
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::ValidationError, e.to_string()),
        }
    })
}

/// Runs one tick at `speed_cm_s` and writes the result to `*out`.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn es_simulator_tick(
    sim: *mut EsSimulator,
    speed_cm_s: f64,
    out: *mut EsFrame,
) -> EsStatus {
    guard(|| {
        if sim.is_null() || out.is_null() {
            return fail(EsStatus::NullPointer, "null argument");
        }
        match (*sim).sim.step(speed_cm_s) {
            Ok(frame) => {
                *out = EsFrame::from(&frame);
                EsStatus::Ok
            }
            Err(e) => fail(EsStatus::DomainError, e.to_string()),
        }
    })
}

/// # Safety
/// `sim` must come from [`es_simulator_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn es_simulator_free(sim: *mut EsSimulator) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
