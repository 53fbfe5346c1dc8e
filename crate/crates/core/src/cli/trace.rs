//! CSV trace output. The format is fixed: same columns, same decimals.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::pipeline::FrameOutput;
use crate::sensing::Reading;

pub const TRACE_HEADER: &str =
    "tick,t_ms,user_x,d_chest,d_knee,d_toe,d_down,brzC,brzK,brzT,brzP,upstairs,downstep,inferred,advisory";

fn cm(v: f64) -> String {
    // Adding zero folds -0.0 into 0.0 so the sign never leaks into the text.
    format!("{:.1}", v + 0.0)
}

fn reading(r: Reading) -> String {
    r.distance().map_or_else(|| "-".to_string(), cm)
}

pub fn format_frame(f: &FrameOutput) -> String {
    let mut line = String::with_capacity(96);
    let _ = write!(line, "{},{},{}", f.tick, f.t_ms, cm(f.user_x));
    for r in f.readings {
        let _ = write!(line, ",{}", reading(r));
    }
    let b = &f.frame;
    let _ = write!(
        line,
        ",{},{},{},{},{},{},{},{}",
        b.brz_c,
        b.brz_k,
        b.brz_t,
        b.brz_p,
        u8::from(f.flags.upstairs),
        u8::from(f.flags.downstep),
        f.flags.inferred.map_or("none", |l| l.as_str()),
        f.advisory
    );
    line
}

pub fn write_trace<W: Write>(frames: &[FrameOutput], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for f in frames {
        writeln!(w, "{}", format_frame(f))?;
    }
    Ok(())
}

pub fn trace_string(frames: &[FrameOutput]) -> String {
    let mut buf = Vec::new();
    write_trace(frames, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace is ASCII")
}
