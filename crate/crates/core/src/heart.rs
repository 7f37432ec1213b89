//! PPG peak detection, heart rate and vitality classification.
//!
//! BPM uses the mean inter-peak interval. That is fine for clean periodic
//! signals but carries no protection against ectopic beats or missed peaks.

use std::fmt;

use crate::error::{Error, Result};
use crate::synth::PpgSample;

pub const PEAK_THRESHOLD: f64 = 0.4;
pub const PEAK_REFRACTORY: f64 = 0.3;
pub const BPM_WINDOW: f64 = 15.0;
pub const FLATLINE_VARIANCE: f64 = 0.001;
pub const BRADYCARDIA_BELOW: f64 = 50.0;
pub const TACHYCARDIA_ABOVE: f64 = 120.0;
const MIN_PPG_SPAN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vitality {
    Normal,
    Bradycardia,
    Tachycardia,
    NoPulse,
    Unknown,
}

impl fmt::Display for Vitality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Heart rate in beats per minute, or unknown when fewer than two peaks
/// fall in the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bpm {
    Rate(f64),
    Unknown,
}

impl Bpm {
    pub fn value(self) -> Option<f64> {
        match self {
            Bpm::Rate(r) => Some(r),
            Bpm::Unknown => None,
        }
    }
}

/// Timestamps of local maxima at or above `threshold`, at least
/// `refractory` seconds apart. Within a refractory span the highest maximum
/// is kept.
pub fn detect_peaks(ppg: &[PpgSample], threshold: f64, refractory: f64) -> Result<Vec<f64>> {
    let span = match (ppg.first(), ppg.last()) {
        (Some(a), Some(b)) => b.timestamp - a.timestamp,
        _ => 0.0,
    };
    if ppg.len() < 3 || span < MIN_PPG_SPAN - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "PPG window spans {span:.3} s, need {MIN_PPG_SPAN} s"
        )));
    }
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for w in ppg.windows(3) {
        let (prev, cur, next) = (w[0].amplitude, w[1].amplitude, w[2].amplitude);
        if cur < threshold || cur < prev || cur <= next {
            continue;
        }
        let t = w[1].timestamp;
        match peaks.last_mut() {
            Some(last) if t - last.0 < refractory => {
                if cur > last.1 {
                    *last = (t, cur);
                }
            }
            _ => peaks.push((t, cur)),
        }
    }
    Ok(peaks.into_iter().map(|(t, _)| t).collect())
}

/// Heart rate from the peaks in the trailing `window` seconds (ending at the
/// last peak).
pub fn bpm(peaks: &[f64], window: f64) -> Bpm {
    let Some(&end) = peaks.last() else {
        return Bpm::Unknown;
    };
    let i = peaks.partition_point(|&t| t < end - window);
    let recent = &peaks[i..];
    if recent.len() < 2 {
        return Bpm::Unknown;
    }
    let mean_interval = (end - recent[0]) / (recent.len() - 1) as f64;
    Bpm::Rate(60.0 / mean_interval)
}

/// Classifies cardiac status for the vitality check.
pub fn vitality(bpm_value: Bpm, ppg_window_variance: f64, peak_count: usize) -> Vitality {
    if peak_count == 0 && ppg_window_variance < FLATLINE_VARIANCE {
        return Vitality::NoPulse;
    }
    match bpm_value {
        Bpm::Unknown => Vitality::Unknown,
        Bpm::Rate(r) if r < BRADYCARDIA_BELOW => Vitality::Bradycardia,
        Bpm::Rate(r) if r > TACHYCARDIA_ABOVE => Vitality::Tachycardia,
        Bpm::Rate(_) => Vitality::Normal,
    }
}

pub fn variance(ppg: &[PpgSample]) -> f64 {
    if ppg.is_empty() {
        return 0.0;
    }
    let n = ppg.len() as f64;
    let mean = ppg.iter().map(|s| s.amplitude).sum::<f64>() / n;
    ppg.iter().map(|s| (s.amplitude - mean).powi(2)).sum::<f64>() / n
}

/// Result of one heart-rate assessment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrReading {
    pub vitality: Vitality,
    pub bpm: Bpm,
}

/// Runs the full chain (peaks, BPM, variance, vitality) over a PPG window.
/// Windows too short to analyse yield an unknown reading.
pub fn assess(ppg: &[PpgSample]) -> HrReading {
    match detect_peaks(ppg, PEAK_THRESHOLD, PEAK_REFRACTORY) {
        Ok(peaks) => {
            let rate = bpm(&peaks, BPM_WINDOW);
            HrReading {
                vitality: vitality(rate, variance(ppg), peaks.len()),
                bpm: rate,
            }
        }
        Err(_) => HrReading {
            vitality: Vitality::Unknown,
            bpm: Bpm::Unknown,
        },
    }
}
