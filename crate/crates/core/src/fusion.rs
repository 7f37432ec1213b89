//! Evidence fusion into the driver-state taxonomy.
//!
//! Each window yields a candidate state: the most severe state whose full
//! threshold conjunction holds. The fused state then moves at most one
//! severity level per window, and only after `dwell_up` (escalating) or
//! `dwell_down` (de-escalating) consecutive candidates agree on the
//! direction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vision::MotionLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DriverState {
    Awake,
    Drowsy,
    Sleepy,
    Asleep,
    /// Only set by the escalation controller after a vitality check.
    Incapacitated,
}

impl DriverState {
    pub const ALL: [DriverState; 5] = [
        DriverState::Awake,
        DriverState::Drowsy,
        DriverState::Sleepy,
        DriverState::Asleep,
        DriverState::Incapacitated,
    ];

    pub fn severity(self) -> u8 {
        self as u8
    }

    pub fn from_severity(s: u8) -> Option<Self> {
        Self::ALL.get(s as usize).copied()
    }
}

impl fmt::Display for DriverState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for DriverState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| Error::Format(format!("unknown driver state `{s}`")))
    }
}

/// Detector outputs for one fusion window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub window_end: f64,
    pub blink_rate: Option<f64>,
    pub closed_fraction: f64,
    pub nod_rate: f64,
    pub motion: MotionLevel,
    pub pir_active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionConfig {
    /// Seconds between fusion updates.
    pub window: f64,
    pub dwell_up: usize,
    pub dwell_down: usize,
    pub drowsy_closed_fraction: f64,
    pub sleepy_closed_fraction: f64,
    pub asleep_closed_fraction: f64,
    pub drowsy_max_blink_rate: f64,
    pub sleepy_min_nod_rate: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            window: 1.0,
            dwell_up: 3,
            dwell_down: 2,
            drowsy_closed_fraction: 0.3,
            sleepy_closed_fraction: 0.6,
            asleep_closed_fraction: 0.9,
            drowsy_max_blink_rate: 8.0,
            sleepy_min_nod_rate: 6.0,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dwell_up < 1 || self.dwell_down < 1 {
            return Err(Error::Config("dwell counts must be >= 1".into()));
        }
        if !(self.window > 0.0) {
            return Err(Error::Config("fusion window must be positive".into()));
        }
        if !(self.drowsy_closed_fraction <= self.sleepy_closed_fraction
            && self.sleepy_closed_fraction <= self.asleep_closed_fraction)
        {
            return Err(Error::Config("closed-fraction thresholds must rise with severity".into()));
        }
        Ok(())
    }

    pub fn history_len(&self) -> usize {
        self.dwell_up.max(self.dwell_down)
    }
}

/// Most severe state whose threshold conjunction the evidence satisfies.
pub fn candidate_state(e: &Evidence, cfg: &FusionConfig) -> DriverState {
    let asleep = e.closed_fraction >= cfg.asleep_closed_fraction
        && e.motion == MotionLevel::Still
        && !e.pir_active;
    let sleepy = e.closed_fraction >= cfg.sleepy_closed_fraction && e.nod_rate >= cfg.sleepy_min_nod_rate;
    // an unknown blink rate cannot satisfy the drowsy conjunction
    let drowsy = e.closed_fraction >= cfg.drowsy_closed_fraction
        && e.blink_rate.is_some_and(|b| b <= cfg.drowsy_max_blink_rate);
    if asleep {
        DriverState::Asleep
    } else if sleepy {
        DriverState::Sleepy
    } else if drowsy {
        DriverState::Drowsy
    } else {
        DriverState::Awake
    }
}

/// Next fused state given the most recent candidates (oldest first).
pub fn update(current: DriverState, history: &[DriverState], cfg: &FusionConfig) -> DriverState {
    if current == DriverState::Incapacitated {
        return current;
    }
    let tail = |n: usize| (history.len() >= n).then(|| &history[history.len() - n..]);
    if let Some(recent) = tail(cfg.dwell_up) {
        if recent.iter().all(|c| c.severity() > current.severity()) {
            let next = current.severity() + 1;
            return DriverState::from_severity(next.min(DriverState::Asleep.severity())).unwrap_or(current);
        }
    }
    if let Some(recent) = tail(cfg.dwell_down) {
        if recent.iter().all(|c| c.severity() < current.severity()) {
            return DriverState::from_severity(current.severity() - 1).unwrap_or(current);
        }
    }
    current
}

/// Fused state plus the bounded candidate history it depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionFsm {
    state: DriverState,
    history: Vec<DriverState>,
    cfg: FusionConfig,
}

impl FusionFsm {
    pub fn new(cfg: FusionConfig) -> Self {
        FusionFsm {
            state: DriverState::Awake,
            history: Vec::with_capacity(cfg.history_len() + 1),
            cfg,
        }
    }

    pub fn state(&self) -> DriverState {
        self.state
    }

    /// Feeds one candidate and returns the new fused state.
    pub fn observe(&mut self, candidate: DriverState) -> DriverState {
        self.history.push(candidate);
        if self.history.len() > self.cfg.history_len() {
            self.history.remove(0);
        }
        self.state = update(self.state, &self.history, &self.cfg);
        self.state
    }

    /// Used by the escalation path once a vitality check found no pulse.
    pub fn mark_incapacitated(&mut self) {
        self.state = DriverState::Incapacitated;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use DriverState::*;

    fn evidence(closed: f64, blink: Option<f64>, nod: f64, motion: MotionLevel, pir: bool) -> Evidence {
        Evidence {
            window_end: 0.0,
            blink_rate: blink,
            closed_fraction: closed,
            nod_rate: nod,
            motion,
            pir_active: pir,
        }
    }

    #[test]
    fn candidate_examples() {
        let cfg = FusionConfig::default();
        assert_eq!(
            candidate_state(&evidence(0.0, Some(17.0), 0.0, MotionLevel::Normal, true), &cfg),
            Awake
        );
        assert_eq!(
            candidate_state(&evidence(0.95, None, 0.0, MotionLevel::Still, false), &cfg),
            Asleep
        );
        assert_eq!(
            candidate_state(&evidence(0.65, None, 8.0, MotionLevel::Normal, true), &cfg),
            Sleepy
        );
        assert_eq!(
            candidate_state(&evidence(0.4, Some(6.0), 0.0, MotionLevel::Normal, true), &cfg),
            Drowsy
        );
        // the drowsy conjunction needs a known, low blink rate
        assert_eq!(
            candidate_state(&evidence(0.4, None, 0.0, MotionLevel::Normal, true), &cfg),
            Awake
        );
        // eyes shut but the driver moves: not asleep
        assert_eq!(
            candidate_state(&evidence(0.95, Some(2.0), 0.0, MotionLevel::Normal, false), &cfg),
            Drowsy
        );
    }

    #[test]
    fn update_examples() {
        let cfg = FusionConfig::default();
        assert_eq!(update(Awake, &[Asleep, Asleep, Asleep], &cfg), Drowsy);
        assert_eq!(update(Sleepy, &[Sleepy, Sleepy, Sleepy], &cfg), Sleepy);
        assert_eq!(update(Drowsy, &[Awake, Awake], &cfg), Awake);
        assert_eq!(update(Awake, &[Asleep, Asleep], &cfg), Awake);
        assert_eq!(update(Asleep, &[Asleep, Awake, Asleep], &cfg), Asleep);
        assert_eq!(update(Incapacitated, &[Awake, Awake, Awake], &cfg), Incapacitated);
    }

    #[test]
    fn config_validation() {
        assert!(FusionConfig::default().validate().is_ok());
        let bad = FusionConfig {
            dwell_up: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = FusionConfig {
            sleepy_closed_fraction: 0.95,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn observable() -> impl Strategy<Value = DriverState> {
        (0u8..4).prop_map(|s| DriverState::from_severity(s).unwrap())
    }

    proptest! {
        #[test]
        fn single_spike_never_moves_state(steady in observable(), spike in observable(),
                                          before in 3usize..10, after in 0usize..10) {
            let mut fsm = FusionFsm::new(FusionConfig::default());
            for _ in 0..40 {
                fsm.observe(steady);
            }
            prop_assert_eq!(fsm.state(), steady);
            for _ in 0..before { fsm.observe(steady); }
            fsm.observe(spike);
            prop_assert_eq!(fsm.state(), steady);
            for _ in 0..after {
                fsm.observe(steady);
                prop_assert_eq!(fsm.state(), steady);
            }
        }

        #[test]
        fn recovers_to_awake_in_bounded_windows(start in observable()) {
            let cfg = FusionConfig::default();
            let mut fsm = FusionFsm::new(cfg);
            for _ in 0..20 { fsm.observe(start); }
            let bound = start.severity() as usize * cfg.dwell_down;
            let mut steps = 0;
            while fsm.state() != Awake {
                fsm.observe(Awake);
                steps += 1;
                prop_assert!(steps <= bound);
            }
        }
    }
}
