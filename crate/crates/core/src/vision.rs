//! Frame comparison and eyelid analysis.
//!
//! Blinks are counted as falling crossings of the 0.5 aperture threshold;
//! after a count the detector re-arms only once the aperture rises above
//! 0.5 again. One full open-close-open cycle is therefore one blink, and a
//! square wave yields exactly one blink per falling edge.

use crate::error::{Error, Result};
use crate::synth::{Frame, EYE_COLS, EYE_LEFT, EYE_ROWS};

pub const BLINK_THRESHOLD: f64 = 0.5;
pub const CLOSED_THRESHOLD: f64 = 0.25;
pub const MIN_BLINK_WINDOW: f64 = 10.0;
pub const STILL_BELOW: f64 = 0.002;
pub const ERRATIC_ABOVE: f64 = 0.05;
pub const MIN_MOTION_SCORES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureSample {
    pub timestamp: f64,
    pub aperture: f64,
}

/// Time-ordered eyelid aperture estimates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ApertureSeries {
    samples: Vec<ApertureSample>,
}

impl ApertureSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(samples: Vec<ApertureSample>) -> Result<Self> {
        let mut s = Self::new();
        for x in samples {
            s.push(x.timestamp, x.aperture)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, timestamp: f64, aperture: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&aperture) {
            return Err(Error::Domain(format!("aperture {aperture} outside [0, 1]")));
        }
        if let Some(last) = self.samples.last() {
            if timestamp <= last.timestamp {
                return Err(Error::Domain("aperture timestamps must increase".into()));
            }
        }
        self.samples.push(ApertureSample { timestamp, aperture });
        Ok(())
    }

    pub fn samples(&self) -> &[ApertureSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionLevel {
    Still,
    Normal,
    Erratic,
}

impl MotionLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            MotionLevel::Still => "still",
            MotionLevel::Normal => "normal",
            MotionLevel::Erratic => "erratic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [MotionLevel::Still, MotionLevel::Normal, MotionLevel::Erratic]
            .into_iter()
            .find(|m| m.as_str() == s)
    }
}

/// Normalised mean absolute pixel difference between two frames.
pub fn frame_diff_score(prev: &Frame, next: &Frame) -> Result<f64> {
    if prev.width != next.width || prev.height != next.height || prev.pixels.len() != next.pixels.len() {
        return Err(Error::Domain(format!(
            "frame dimensions differ: {}x{} vs {}x{}",
            prev.width, prev.height, next.width, next.height
        )));
    }
    let total: u64 = prev
        .pixels
        .iter()
        .zip(&next.pixels)
        .map(|(&a, &b)| a.abs_diff(b) as u64)
        .sum();
    Ok(total as f64 / (prev.pixels.len() as f64 * 255.0))
}

/// Fraction of eye-box rows that are bright.
///
/// Rows are scanned over the full height of the eye-box column band so a
/// head-pitch shift of the box does not change the estimate.
pub fn estimate_aperture(frame: &Frame) -> f64 {
    let cols = EYE_LEFT.min(frame.width)..(EYE_LEFT + EYE_COLS).min(frame.width);
    if cols.is_empty() {
        return 0.0;
    }
    let bright = (0..frame.height)
        .filter(|&r| {
            let row = &frame.pixels[r * frame.width..(r + 1) * frame.width];
            let sum: u32 = row[cols.clone()].iter().map(|&p| p as u32).sum();
            sum as f64 / cols.len() as f64 > 128.0
        })
        .count();
    bright.min(EYE_ROWS) as f64 / EYE_ROWS as f64
}

/// Samples in the trailing window `(end - window, end]`, where `end` is the
/// last sample's timestamp.
fn trailing(samples: &[ApertureSample], window: f64) -> &[ApertureSample] {
    let Some(last) = samples.last() else {
        return samples;
    };
    let start = last.timestamp - window;
    let i = samples.partition_point(|s| s.timestamp <= start);
    &samples[i..]
}

/// Blinks per minute over the trailing `window` seconds of `series`.
pub fn blink_rate(series: &ApertureSeries, window: f64) -> Result<f64> {
    if !(window >= MIN_BLINK_WINDOW) {
        return Err(Error::InsufficientData(format!(
            "blink window {window} s shorter than {MIN_BLINK_WINDOW} s"
        )));
    }
    let samples = series.samples();
    let Some(last) = samples.last() else {
        return Err(Error::InsufficientData("empty aperture series".into()));
    };
    let start = last.timestamp - window;
    let mut armed = samples[0].aperture > BLINK_THRESHOLD;
    let mut count = 0usize;
    for s in &samples[1..] {
        if armed && s.aperture < BLINK_THRESHOLD {
            armed = false;
            if s.timestamp > start {
                count += 1;
            }
        } else if s.aperture > BLINK_THRESHOLD {
            armed = true;
        }
    }
    Ok(count as f64 * 60.0 / window)
}

/// Fraction of samples in the trailing window with aperture below 0.25.
pub fn closed_fraction(series: &ApertureSeries, window: f64) -> Result<f64> {
    let w = trailing(series.samples(), window);
    if w.is_empty() || !(window > 0.0) {
        return Err(Error::InsufficientData("empty closure window".into()));
    }
    let closed = w.iter().filter(|s| s.aperture < CLOSED_THRESHOLD).count();
    Ok(closed as f64 / w.len() as f64)
}

/// Classifies scene motion from the mean of `(timestamp, score)` pairs in
/// the trailing window.
pub fn classify_motion(diff_scores: &[(f64, f64)], window: f64) -> Result<MotionLevel> {
    let in_window = match diff_scores.last() {
        Some(&(end, _)) => {
            let i = diff_scores.partition_point(|&(t, _)| t <= end - window);
            &diff_scores[i..]
        }
        None => diff_scores,
    };
    if in_window.len() < MIN_MOTION_SCORES {
        return Err(Error::InsufficientData(format!(
            "{} motion scores in window, need {MIN_MOTION_SCORES}",
            in_window.len()
        )));
    }
    let mean = in_window.iter().map(|&(_, s)| s).sum::<f64>() / in_window.len() as f64;
    Ok(if mean < STILL_BELOW {
        MotionLevel::Still
    } else if mean > ERRATIC_ABOVE {
        MotionLevel::Erratic
    } else {
        MotionLevel::Normal
    })
}
