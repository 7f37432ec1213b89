//! Columnar text serialization of sensor bundles.
//!
//! A bundle directory holds one CSV file per stream, each with a header
//! line:
//!
//! | file         | columns                                  |
//! |--------------|------------------------------------------|
//! | `frames.csv` | `timestamp,width,height,pixels` (hex)    |
//! | `accel.csv`  | `timestamp,ax,ay,az` (g)                 |
//! | `ppg.csv`    | `timestamp,amplitude`                    |
//! | `pir.csv`    | `timestamp`                              |
//!
//! Floats use Rust's shortest round-trip formatting, so a bundle read back
//! is bit-identical to the one written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scenario::ScenarioScript;
use crate::synth::{AccelSample, Frame, PirEvent, PpgSample, SensorBundle};

pub const FRAMES_FILE: &str = "frames.csv";
pub const ACCEL_FILE: &str = "accel.csv";
pub const PPG_FILE: &str = "ppg.csv";
pub const PIR_FILE: &str = "pir.csv";

const FRAMES_HEADER: &str = "timestamp,width,height,pixels";
const ACCEL_HEADER: &str = "timestamp,ax,ay,az";
const PPG_HEADER: &str = "timestamp,amplitude";
const PIR_HEADER: &str = "timestamp";

pub fn frames_csv(frames: &[Frame]) -> String {
    let mut out = String::with_capacity(frames.len() * (frames.first().map_or(0, |f| f.pixels.len() * 2) + 32));
    out.push_str(FRAMES_HEADER);
    out.push('\n');
    for f in frames {
        let _ = writeln!(out, "{},{},{},{}", f.timestamp, f.width, f.height, hex::encode(&f.pixels));
    }
    out
}

pub fn accel_csv(accel: &[AccelSample]) -> String {
    let mut out = format!("{ACCEL_HEADER}\n");
    for a in accel {
        let _ = writeln!(out, "{},{},{},{}", a.timestamp, a.ax, a.ay, a.az);
    }
    out
}

pub fn ppg_csv(ppg: &[PpgSample]) -> String {
    let mut out = format!("{PPG_HEADER}\n");
    for p in ppg {
        let _ = writeln!(out, "{},{}", p.timestamp, p.amplitude);
    }
    out
}

pub fn pir_csv(pir: &[PirEvent]) -> String {
    let mut out = format!("{PIR_HEADER}\n");
    for e in pir {
        let _ = writeln!(out, "{}", e.timestamp);
    }
    out
}

pub fn write_bundle(dir: &Path, bundle: &SensorBundle) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(FRAMES_FILE), frames_csv(&bundle.frames))?;
    fs::write(dir.join(ACCEL_FILE), accel_csv(&bundle.accel))?;
    fs::write(dir.join(PPG_FILE), ppg_csv(&bundle.ppg))?;
    fs::write(dir.join(PIR_FILE), pir_csv(&bundle.pir))?;
    Ok(())
}

fn rows<'a>(text: &'a str, header: &str, file: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(Error::Format(format!("{file}: truncated final line")));
    }
    let mut lines = text.lines();
    if lines.next() != Some(header) {
        return Err(Error::Format(format!("{file}: expected header `{header}`")));
    }
    Ok(lines.enumerate().map(|(i, l)| (i + 2, l.split(',').collect())))
}

fn field<T: FromStr>(fields: &[&str], i: usize, file: &str, line: usize) -> Result<T> {
    fields
        .get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format(format!("{file}:{line}: bad field {i}")))
}

fn expect_width(fields: &[&str], n: usize, file: &str, line: usize) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(Error::Format(format!("{file}:{line}: expected {n} fields, found {}", fields.len())))
    }
}

pub fn parse_frames(text: &str) -> Result<Vec<Frame>> {
    rows(text, FRAMES_HEADER, FRAMES_FILE)?
        .map(|(line, f)| {
            expect_width(&f, 4, FRAMES_FILE, line)?;
            let width: usize = field(&f, 1, FRAMES_FILE, line)?;
            let height: usize = field(&f, 2, FRAMES_FILE, line)?;
            let pixels = hex::decode(f[3]).map_err(|e| Error::Format(format!("{FRAMES_FILE}:{line}: {e}")))?;
            if pixels.len() != width * height {
                return Err(Error::Format(format!(
                    "{FRAMES_FILE}:{line}: {} pixels for a {width}x{height} frame",
                    pixels.len()
                )));
            }
            Ok(Frame {
                timestamp: field(&f, 0, FRAMES_FILE, line)?,
                width,
                height,
                pixels,
            })
        })
        .collect()
}

pub fn parse_accel(text: &str) -> Result<Vec<AccelSample>> {
    rows(text, ACCEL_HEADER, ACCEL_FILE)?
        .map(|(line, f)| {
            expect_width(&f, 4, ACCEL_FILE, line)?;
            Ok(AccelSample {
                timestamp: field(&f, 0, ACCEL_FILE, line)?,
                ax: field(&f, 1, ACCEL_FILE, line)?,
                ay: field(&f, 2, ACCEL_FILE, line)?,
                az: field(&f, 3, ACCEL_FILE, line)?,
            })
        })
        .collect()
}

pub fn parse_ppg(text: &str) -> Result<Vec<PpgSample>> {
    rows(text, PPG_HEADER, PPG_FILE)?
        .map(|(line, f)| {
            expect_width(&f, 2, PPG_FILE, line)?;
            Ok(PpgSample {
                timestamp: field(&f, 0, PPG_FILE, line)?,
                amplitude: field(&f, 1, PPG_FILE, line)?,
            })
        })
        .collect()
}

pub fn parse_pir(text: &str) -> Result<Vec<PirEvent>> {
    rows(text, PIR_HEADER, PIR_FILE)?
        .map(|(line, f)| {
            expect_width(&f, 1, PIR_FILE, line)?;
            Ok(PirEvent {
                timestamp: field(&f, 0, PIR_FILE, line)?,
            })
        })
        .collect()
}

fn read(dir: &Path, file: &str) -> Result<String> {
    fs::read_to_string(dir.join(file)).map_err(|e| Error::Format(format!("{file}: {e}")))
}

pub fn read_bundle(dir: &Path) -> Result<SensorBundle> {
    Ok(SensorBundle {
        frames: parse_frames(&read(dir, FRAMES_FILE)?)?,
        accel: parse_accel(&read(dir, ACCEL_FILE)?)?,
        ppg: parse_ppg(&read(dir, PPG_FILE)?)?,
        pir: parse_pir(&read(dir, PIR_FILE)?)?,
    })
}

fn check_stream(name: &str, times: impl Iterator<Item = f64>, period: Option<f64>, total: f64) -> Result<()> {
    let mut last: Option<f64> = None;
    let mut first = None;
    for t in times {
        if !t.is_finite() || last.is_some_and(|l| t <= l) {
            return Err(Error::Format(format!("{name}: timestamps not strictly increasing")));
        }
        first.get_or_insert(t);
        last = Some(t);
    }
    if let Some(period) = period {
        let (Some(first), Some(last)) = (first, last) else {
            return Err(Error::Format(format!("{name}: stream is empty")));
        };
        let tol = period + 1e-9;
        if first > tol || (total - last).abs() > tol {
            return Err(Error::Format(format!(
                "{name}: spans [{first}, {last}] but the scenario lasts {total} s"
            )));
        }
    } else if let (Some(f), Some(l)) = (first, last) {
        if f < 0.0 || l > total {
            return Err(Error::Format(format!("{name}: events outside the scenario")));
        }
    }
    Ok(())
}

/// Checks ordering and that every sampled stream spans the scenario.
pub fn validate_bundle(bundle: &SensorBundle, script: &ScenarioScript) -> Result<()> {
    let total = script.total_duration();
    let r = script.rates;
    check_stream("frames", bundle.frames.iter().map(|f| f.timestamp), Some(1.0 / r.frame_hz), total)?;
    check_stream("accel", bundle.accel.iter().map(|a| a.timestamp), Some(1.0 / r.accel_hz), total)?;
    check_stream("ppg", bundle.ppg.iter().map(|p| p.timestamp), Some(1.0 / r.ppg_hz), total)?;
    check_stream("pir", bundle.pir.iter().map(|p| p.timestamp), None, total)?;
    if let Some(f) = bundle.frames.first() {
        if bundle.frames.iter().any(|g| g.width != f.width || g.height != f.height) {
            return Err(Error::Format("frames: dimensions vary".into()));
        }
    }
    Ok(())
}
