//! Scenario scripts: the scripted driver condition over time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scripted ground-truth condition of the driver for one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverCondition {
    Awake,
    Drowsy,
    Sleepy,
    Asleep,
    NoPulse,
}

impl DriverCondition {
    pub const ALL: [DriverCondition; 5] = [
        DriverCondition::Awake,
        DriverCondition::Drowsy,
        DriverCondition::Sleepy,
        DriverCondition::Asleep,
        DriverCondition::NoPulse,
    ];

    /// Severity of the driver state this condition should be detected as.
    pub fn severity(self) -> u8 {
        match self {
            DriverCondition::Awake => 0,
            DriverCondition::Drowsy => 1,
            DriverCondition::Sleepy => 2,
            DriverCondition::Asleep | DriverCondition::NoPulse => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DriverCondition::Awake => "awake",
            DriverCondition::Drowsy => "drowsy",
            DriverCondition::Sleepy => "sleepy",
            DriverCondition::Asleep => "asleep",
            DriverCondition::NoPulse => "no_pulse",
        }
    }
}

impl fmt::Display for DriverCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DriverCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DriverCondition::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown condition `{s}`")))
    }
}

/// Per-segment overrides of the synthesized signal parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heart_rate_bpm: Option<f64>,
    /// Mean rate of eyelid cycles (blinks or droops).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blink_rate_per_min: Option<f64>,
    /// Fixed spacing between head nods; enables nods for any condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nod_interval_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nod_amplitude_deg: Option<f64>,
    /// Mean spacing of PIR events; zero disables the sensor for the segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pir_interval_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_pitch_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub duration: f64,
    pub condition: DriverCondition,
    #[serde(default, skip_serializing_if = "is_default")]
    pub overrides: SegmentOverrides,
}

fn is_default(o: &SegmentOverrides) -> bool {
    *o == SegmentOverrides::default()
}

impl Segment {
    pub fn new(duration: f64, condition: DriverCondition) -> Self {
        Segment {
            duration,
            condition,
            overrides: SegmentOverrides::default(),
        }
    }

    pub fn with_overrides(mut self, overrides: SegmentOverrides) -> Self {
        self.overrides = overrides;
        self
    }
}

/// Sensor sampling rates in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleRates {
    pub frame_hz: f64,
    pub accel_hz: f64,
    pub ppg_hz: f64,
}

impl Default for SampleRates {
    fn default() -> Self {
        SampleRates {
            frame_hz: 10.0,
            accel_hz: 50.0,
            ppg_hz: 100.0,
        }
    }
}

fn default_speed() -> f64 {
    100.0
}

fn default_epoch() -> u64 {
    1_700_000_000
}

/// A scripted scenario: ordered condition segments plus the scripted
/// driver acknowledgements and the train's initial speed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioScript {
    #[serde(default = "default_speed")]
    pub initial_speed_kmh: f64,
    /// Unix time of scenario start, used to stamp status messages.
    #[serde(default = "default_epoch")]
    pub epoch: u64,
    /// Times (s) at which the driver acknowledges the alarm.
    #[serde(default)]
    pub responses: Vec<f64>,
    #[serde(default)]
    pub rates: SampleRates,
    #[serde(rename = "segment", default)]
    pub segments: Vec<Segment>,
}

impl ScenarioScript {
    pub fn new(segments: Vec<Segment>) -> Self {
        ScenarioScript {
            initial_speed_kmh: default_speed(),
            epoch: default_epoch(),
            responses: Vec::new(),
            rates: SampleRates::default(),
            segments,
        }
    }

    /// Shorthand for a script of `(duration, condition)` pairs.
    pub fn from_pairs(pairs: &[(f64, DriverCondition)]) -> Self {
        Self::new(pairs.iter().map(|&(d, c)| Segment::new(d, c)).collect())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Start time of each segment, followed by the total duration.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut t = 0.0;
        out.push(t);
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// Scripted condition in effect at time `t`.
    pub fn condition_at(&self, t: f64) -> DriverCondition {
        let bounds = self.boundaries();
        let idx = segment_index(&bounds, t);
        self.segments[idx].condition
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidScenario("scenario has no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidScenario(format!(
                    "segment {i} has non-positive duration {}",
                    s.duration
                )));
            }
            let o = &s.overrides;
            let positive = [
                ("heart_rate_bpm", o.heart_rate_bpm),
                ("blink_rate_per_min", o.blink_rate_per_min),
                ("nod_interval_s", o.nod_interval_s),
            ];
            for (name, v) in positive {
                if let Some(v) = v {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::InvalidScenario(format!(
                            "segment {i}: {name} must be positive"
                        )));
                    }
                }
            }
            if let Some(v) = o.pir_interval_s {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "segment {i}: pir_interval_s must be non-negative"
                    )));
                }
            }
        }
        let r = self.rates;
        for (name, v) in [("frame_hz", r.frame_hz), ("accel_hz", r.accel_hz), ("ppg_hz", r.ppg_hz)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidScenario(format!("{name} must be positive")));
            }
        }
        if !(self.initial_speed_kmh.is_finite() && self.initial_speed_kmh >= 0.0) {
            return Err(Error::InvalidScenario("initial speed must be >= 0".into()));
        }
        if self.responses.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidScenario("response times must be >= 0".into()));
        }
        Ok(())
    }
}

/// Index of the segment containing `t`, given `boundaries()` output.
/// Times at or past the end map to the last segment.
pub(crate) fn segment_index(bounds: &[f64], t: f64) -> usize {
    let n = bounds.len() - 1;
    // first boundary strictly greater than t, minus one
    let idx = bounds[1..n].partition_point(|&b| b <= t);
    idx.min(n - 1)
}
