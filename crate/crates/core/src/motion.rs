//! Head-nod detection from the accelerometer and cabin activity from PIR.

use crate::error::{Error, Result};
use crate::synth::{AccelSample, PirEvent};

pub const NOD_MIN_AMPLITUDE: f64 = 10.0;
pub const NOD_REFRACTORY: f64 = 1.0;
pub const NOD_BASELINE_WINDOW: f64 = 5.0;
pub const PIR_WINDOW: f64 = 10.0;
const MIN_NOD_SERIES: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchSample {
    pub timestamp: f64,
    pub degrees: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodEvent {
    pub timestamp: f64,
    /// Absolute pitch excursion from the running baseline, degrees.
    pub amplitude: f64,
}

/// Gravity-referenced pitch `atan2(ax, az)` of every sample, in degrees.
pub fn pitch_series(trace: &[AccelSample]) -> Result<Vec<PitchSample>> {
    if trace.is_empty() {
        return Err(Error::InsufficientData("empty accelerometer trace".into()));
    }
    trace.iter().map(pitch_of).collect()
}

pub fn pitch_of(s: &AccelSample) -> Result<PitchSample> {
    if !(s.magnitude() > 0.0) {
        return Err(Error::DegenerateSample { timestamp: s.timestamp });
    }
    Ok(PitchSample {
        timestamp: s.timestamp,
        degrees: s.ax.atan2(s.az).to_degrees(),
    })
}

fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    let mid = n / 2;
    let (_, &mut upper, _) = values.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    if n % 2 == 1 {
        upper
    } else {
        let lower = values[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

/// Streaming deviation of pitch from its trailing 5 s median.
///
/// The baseline at a sample uses samples in `(t - 5, t]`, so the deviation
/// of a sample never changes once computed.
#[derive(Debug, Clone, Default)]
pub struct BaselineTracker {
    history: Vec<PitchSample>,
    deviations: Vec<PitchSample>,
    scratch: Vec<f64>,
}

impl BaselineTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: PitchSample) {
        self.history.push(s);
        let start = s.timestamp - NOD_BASELINE_WINDOW;
        let i = self.history.partition_point(|h| h.timestamp <= start);
        self.scratch.clear();
        self.scratch.extend(self.history[i..].iter().map(|h| h.degrees));
        let base = median(&mut self.scratch);
        self.deviations.push(PitchSample {
            timestamp: s.timestamp,
            degrees: s.degrees - base,
        });
    }

    pub fn deviations(&self) -> &[PitchSample] {
        &self.deviations
    }

    pub fn pitch(&self) -> &[PitchSample] {
        &self.history
    }
}

/// Nod events among baseline deviations: interior local maxima of the
/// absolute deviation of at least `min_amplitude`, merged so successive
/// events are at least `refractory` apart (the larger excursion wins).
pub fn nods_from_deviations(dev: &[PitchSample], min_amplitude: f64, refractory: f64) -> Vec<NodEvent> {
    let mut events: Vec<NodEvent> = Vec::new();
    for w in dev.windows(3) {
        let (prev, cur, next) = (w[0].degrees.abs(), w[1].degrees.abs(), w[2].degrees.abs());
        if cur < min_amplitude || cur < prev || cur <= next {
            continue;
        }
        let ev = NodEvent {
            timestamp: w[1].timestamp,
            amplitude: cur,
        };
        match events.last_mut() {
            Some(last) if ev.timestamp - last.timestamp < refractory => {
                if ev.amplitude > last.amplitude {
                    // replacing moves the event later, so spacing to the one
                    // before only grows
                    *last = ev;
                }
            }
            _ => events.push(ev),
        }
    }
    events
}

/// Detects head nods in a pitch series.
pub fn detect_nods(pitch: &[PitchSample], min_amplitude: f64, refractory: f64) -> Result<Vec<NodEvent>> {
    let span = match (pitch.first(), pitch.last()) {
        (Some(a), Some(b)) => b.timestamp - a.timestamp,
        _ => 0.0,
    };
    if span < MIN_NOD_SERIES {
        return Err(Error::InsufficientData(format!(
            "pitch series spans {span:.3} s, need {MIN_NOD_SERIES} s"
        )));
    }
    let mut tracker = BaselineTracker::new();
    for &s in pitch {
        tracker.push(s);
    }
    Ok(nods_from_deviations(tracker.deviations(), min_amplitude, refractory))
}

/// True iff a PIR event lies in `(window_end - window, window_end]`.
pub fn pir_active(events: &[PirEvent], window_end: f64, window: f64) -> bool {
    let start = window_end - window;
    let i = events.partition_point(|e| e.timestamp <= start);
    events.get(i).is_some_and(|e| e.timestamp <= window_end)
}

/// Range (max - min) of pitch in the trailing window.
pub fn movement_range(pitch: &[PitchSample], window: f64) -> Result<f64> {
    let Some(last) = pitch.last() else {
        return Err(Error::InsufficientData("empty pitch window".into()));
    };
    let start = last.timestamp - window;
    let i = pitch.partition_point(|p| p.timestamp <= start);
    let (lo, hi) = pitch[i..]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.degrees), hi.max(p.degrees))
        });
    Ok(hi - lo)
}
