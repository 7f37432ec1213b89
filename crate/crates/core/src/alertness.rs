//! Three-process alertness prediction from a sleep/wake schedule.
//!
//! Alertness is the sum of a homeostatic term `S` (decays while awake,
//! recovers while asleep), a 24 h circadian term `C`, and a sleep-inertia
//! term `W`. `W` is non-positive: it depresses alertness right after waking
//! and fades with time constant `inertia_tau`.
//!
//! Times are clock hours on a continuous axis (hour 30 is 06:00 on day two).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Sleep,
    Wake,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub kind: IntervalKind,
}

/// Contiguous, alternating sleep and wake intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SleepWakeSchedule {
    intervals: Vec<Interval>,
}

const BOUNDARY_TOLERANCE: f64 = 1e-9;

impl SleepWakeSchedule {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Domain("schedule has no intervals".into()));
        }
        for (i, iv) in intervals.iter().enumerate() {
            if !(iv.start.is_finite() && iv.end.is_finite() && iv.end > iv.start) {
                return Err(Error::Domain(format!("interval {i} is empty or not finite")));
            }
        }
        for (i, w) in intervals.windows(2).enumerate() {
            if (w[1].start - w[0].end).abs() > BOUNDARY_TOLERANCE {
                return Err(Error::Domain(format!(
                    "intervals {i} and {} are not contiguous",
                    i + 1
                )));
            }
            if w[0].kind == w[1].kind {
                return Err(Error::Domain(format!(
                    "intervals {i} and {} do not alternate",
                    i + 1
                )));
            }
        }
        Ok(SleepWakeSchedule { intervals })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn start(&self) -> f64 {
        self.intervals[0].start
    }

    pub fn end(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].end
    }

    /// The same schedule moved by `hours`.
    pub fn shifted(&self, hours: f64) -> Self {
        SleepWakeSchedule {
            intervals: self
                .intervals
                .iter()
                .map(|iv| Interval {
                    start: iv.start + hours,
                    end: iv.end + hours,
                    kind: iv.kind,
                })
                .collect(),
        }
    }

    fn index_at(&self, t: f64) -> Result<usize> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(Error::Domain(format!(
                "t = {t} h outside schedule [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        // intervals are closed on the right for lookup; boundaries belong to
        // the earlier interval
        Ok(self
            .intervals
            .partition_point(|iv| iv.end < t)
            .min(self.intervals.len() - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlertnessParams {
    pub mesor: f64,
    pub amplitude: f64,
    /// Clock hour of circadian peak.
    pub acrophase: f64,
    /// Homeostatic decay rate while awake, per hour.
    pub wake_decay: f64,
    pub low_asymptote: f64,
    /// Homeostatic recovery rate while asleep, per hour.
    pub sleep_recovery: f64,
    pub high_asymptote: f64,
    pub inertia_magnitude: f64,
    /// Inertia time constant, hours.
    pub inertia_tau: f64,
}

impl Default for AlertnessParams {
    fn default() -> Self {
        AlertnessParams {
            mesor: 0.0,
            amplitude: 2.5,
            acrophase: 16.8,
            wake_decay: 0.0353,
            low_asymptote: 2.4,
            sleep_recovery: 0.381,
            high_asymptote: 14.3,
            inertia_magnitude: -5.72,
            inertia_tau: 1.0 / 1.51,
        }
    }
}

impl AlertnessParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.amplitude >= 0.0
            && self.low_asymptote < self.high_asymptote
            && self.wake_decay > 0.0
            && self.sleep_recovery > 0.0
            && self.inertia_tau > 0.0
            && self.inertia_magnitude <= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid alertness parameters {self:?}")))
        }
    }

    pub fn midpoint(&self) -> f64 {
        (self.low_asymptote + self.high_asymptote) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertnessScore {
    pub value: f64,
    pub homeostatic: f64,
    pub circadian: f64,
    pub inertia: f64,
}

pub fn circadian(t: f64, params: &AlertnessParams) -> f64 {
    params.mesor + params.amplitude * (std::f64::consts::TAU * (t - params.acrophase) / 24.0).cos()
}

fn evolve(kind: IntervalKind, entry: f64, tau: f64, p: &AlertnessParams) -> f64 {
    match kind {
        IntervalKind::Wake => p.low_asymptote + (entry - p.low_asymptote) * (-p.wake_decay * tau).exp(),
        IntervalKind::Sleep => p.high_asymptote - (p.high_asymptote - entry) * (-p.sleep_recovery * tau).exp(),
    }
}

/// Homeostatic process at `t`, evolved interval by interval from
/// `s_initial` at the schedule start.
pub fn homeostatic(
    schedule: &SleepWakeSchedule,
    t: f64,
    params: &AlertnessParams,
    s_initial: f64,
) -> Result<f64> {
    let idx = schedule.index_at(t)?;
    let mut s = s_initial;
    for iv in &schedule.intervals[..idx] {
        s = evolve(iv.kind, s, iv.end - iv.start, params);
    }
    let iv = &schedule.intervals[idx];
    Ok(evolve(iv.kind, s, t - iv.start, params))
}

/// Inertia term for a given time since waking.
pub fn sleep_inertia(time_since_waking: f64, params: &AlertnessParams) -> Result<f64> {
    if !(time_since_waking >= 0.0) {
        return Err(Error::Domain(format!(
            "time since waking {time_since_waking} h is negative"
        )));
    }
    Ok(params.inertia_magnitude * (-time_since_waking / params.inertia_tau).exp())
}

/// Hours since the most recent sleep-to-wake transition, if `t` falls in a
/// wake interval that follows a sleep interval.
pub fn time_since_waking(schedule: &SleepWakeSchedule, t: f64) -> Result<Option<f64>> {
    let idx = schedule.index_at(t)?;
    let iv = &schedule.intervals[idx];
    if iv.kind != IntervalKind::Wake || idx == 0 {
        return Ok(None);
    }
    Ok(Some(t - iv.start))
}

pub fn predicted_alertness(
    schedule: &SleepWakeSchedule,
    t: f64,
    params: &AlertnessParams,
    s_initial: f64,
) -> Result<AlertnessScore> {
    let homeostatic = homeostatic(schedule, t, params, s_initial)?;
    let circadian = circadian(t, params);
    let inertia = match time_since_waking(schedule, t)? {
        Some(h) => sleep_inertia(h, params)?,
        None => 0.0,
    };
    Ok(AlertnessScore {
        value: homeostatic + circadian + inertia,
        homeostatic,
        circadian,
        inertia,
    })
}

/// Alertness sampled every `step` hours over the whole schedule.
pub fn alertness_curve(
    schedule: &SleepWakeSchedule,
    params: &AlertnessParams,
    s_initial: f64,
    step: f64,
) -> Result<Vec<(f64, AlertnessScore)>> {
    if !(step > 0.0) {
        return Err(Error::Domain("curve step must be positive".into()));
    }
    let n = ((schedule.end() - schedule.start()) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|k| {
            let t = schedule.start() + k as f64 * step;
            predicted_alertness(schedule, t, params, s_initial).map(|s| (t, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(start: f64, end: f64, kind: IntervalKind) -> Interval {
        Interval { start, end, kind }
    }

    fn sleep_then_wake() -> SleepWakeSchedule {
        SleepWakeSchedule::new(vec![
            iv(0.0, 8.0, IntervalKind::Sleep),
            iv(8.0, 24.0, IntervalKind::Wake),
        ])
        .unwrap()
    }

    #[test]
    fn circadian_examples() {
        let p = AlertnessParams::default();
        assert_eq!(circadian(p.acrophase, &p), p.mesor + p.amplitude);
        assert!((circadian(p.acrophase + 12.0, &p) - (p.mesor - p.amplitude)).abs() < 1e-12);
        for t in [0.0, 3.3, 17.0, 40.25] {
            assert!((circadian(t, &p) - circadian(t + 24.0, &p)).abs() < 1e-12);
        }
    }

    #[test]
    fn homeostatic_examples() {
        let wake = SleepWakeSchedule::new(vec![iv(0.0, 10.0, IntervalKind::Wake)]).unwrap();
        let p = AlertnessParams {
            wake_decay: std::f64::consts::LN_2,
            ..Default::default()
        };
        let s0 = p.low_asymptote + 8.0;
        assert_eq!(homeostatic(&wake, 0.0, &p, s0).unwrap(), s0);
        let s3 = homeostatic(&wake, 3.0, &p, s0).unwrap();
        assert!((s3 - p.low_asymptote - 8.0 * 2f64.powi(-3)).abs() < 1e-12);
        let mut last = s0;
        for k in 1..=100 {
            let s = homeostatic(&wake, k as f64 * 0.1, &p, s0).unwrap();
            assert!(s < last && s > p.low_asymptote);
            last = s;
        }
    }

    #[test]
    fn out_of_horizon_is_domain_error() {
        let s = sleep_then_wake();
        let p = AlertnessParams::default();
        assert!(matches!(homeostatic(&s, 24.5, &p, 8.0), Err(Error::Domain(_))));
        assert!(matches!(homeostatic(&s, -0.1, &p, 8.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inertia_examples() {
        let p = AlertnessParams::default();
        assert_eq!(sleep_inertia(0.0, &p).unwrap(), p.inertia_magnitude);
        let late = sleep_inertia(10.0 * p.inertia_tau, &p).unwrap();
        assert!(late.abs() <= p.inertia_magnitude.abs() * (-10f64).exp() + 1e-15);
        let at_tau = sleep_inertia(p.inertia_tau, &p).unwrap();
        assert!((at_tau - p.inertia_magnitude / std::f64::consts::E).abs() < 1e-9);
        assert!(matches!(sleep_inertia(-1.0, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn no_wake_transition_means_no_inertia() {
        let wake = SleepWakeSchedule::new(vec![iv(0.0, 24.0, IntervalKind::Wake)]).unwrap();
        let p = AlertnessParams::default();
        let early = predicted_alertness(&wake, 2.0, &p, p.midpoint()).unwrap();
        let late = predicted_alertness(&wake, 20.0, &p, p.midpoint()).unwrap();
        assert_eq!(early.inertia, 0.0);
        assert!(late.value - late.circadian < early.value - early.circadian);
    }

    #[test]
    fn schedule_validation() {
        assert!(SleepWakeSchedule::new(vec![]).is_err());
        assert!(SleepWakeSchedule::new(vec![
            iv(0.0, 8.0, IntervalKind::Sleep),
            iv(9.0, 12.0, IntervalKind::Wake)
        ])
        .is_err());
        assert!(SleepWakeSchedule::new(vec![
            iv(0.0, 8.0, IntervalKind::Wake),
            iv(8.0, 12.0, IntervalKind::Wake)
        ])
        .is_err());
        assert!(SleepWakeSchedule::new(vec![iv(3.0, 3.0, IntervalKind::Wake)]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AlertnessParams::default().validate().is_ok());
        let bad = AlertnessParams {
            inertia_magnitude: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn curve_covers_schedule() {
        let p = AlertnessParams::default();
        let c = alertness_curve(&sleep_then_wake(), &p, p.midpoint(), 0.5).unwrap();
        assert_eq!(c.len(), 49);
        assert_eq!(c.last().unwrap().0, 24.0);
    }

    fn schedule_strategy() -> impl Strategy<Value = SleepWakeSchedule> {
        (proptest::collection::vec(0.5f64..12.0, 1..6), any::<bool>()).prop_map(|(lens, sleep_first)| {
            let mut t = 0.0;
            let mut kind = if sleep_first { IntervalKind::Sleep } else { IntervalKind::Wake };
            let mut out = Vec::new();
            for l in lens {
                out.push(iv(t, t + l, kind));
                t += l;
                kind = match kind {
                    IntervalKind::Sleep => IntervalKind::Wake,
                    IntervalKind::Wake => IntervalKind::Sleep,
                };
            }
            SleepWakeSchedule::new(out).unwrap()
        })
    }

    proptest! {
        #[test]
        fn score_is_sum_of_components(s in schedule_strategy(), frac in 0.0f64..=1.0) {
            let p = AlertnessParams::default();
            let t = s.start() + frac * (s.end() - s.start());
            let a = predicted_alertness(&s, t, &p, p.midpoint()).unwrap();
            prop_assert_eq!(a.value, a.homeostatic + a.circadian + a.inertia);
        }

        #[test]
        fn homeostat_stays_in_bounds(s in schedule_strategy(), frac in 0.0f64..=1.0, s0 in 2.4f64..=14.3) {
            let p = AlertnessParams::default();
            let t = s.start() + frac * (s.end() - s.start());
            let h = homeostatic(&s, t, &p, s0).unwrap();
            prop_assert!(h >= p.low_asymptote && h <= p.high_asymptote);
        }

        #[test]
        fn inertia_is_nonpositive_and_fading(a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let p = AlertnessParams::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let wl = sleep_inertia(lo, &p).unwrap();
            let wh = sleep_inertia(hi, &p).unwrap();
            prop_assert!(wl <= 0.0 && wh <= 0.0);
            prop_assert!(wh >= wl);
        }

        #[test]
        fn day_shift_is_invisible(s in schedule_strategy(), frac in 0.0f64..=1.0) {
            let p = AlertnessParams::default();
            let t = s.start() + frac * (s.end() - s.start());
            let a = predicted_alertness(&s, t, &p, p.midpoint()).unwrap();
            let b = predicted_alertness(&s.shifted(24.0), t + 24.0, &p, p.midpoint()).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-9);
        }
    }
}
