//! Alarm escalation, automatic braking and the heart-rate vitality check.
//!
//! Phases run `Monitoring -> AlarmSounding -> Braking -> HrCheck -> Reported`,
//! with `AlarmSounding -> Monitoring` when the driver responds. Once braking
//! starts the heart-rate check always follows, and nothing releases the
//! brake automatically: `Reported` is terminal until a manual reset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::DriverState;
use crate::heart::{Bpm, HrReading, Vitality};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EscalationPhase {
    Monitoring,
    AlarmSounding,
    Braking,
    HrCheck,
    Reported,
}

impl fmt::Display for EscalationPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for EscalationPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use EscalationPhase::*;
        [Monitoring, AlarmSounding, Braking, HrCheck, Reported]
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| Error::Format(format!("unknown phase `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// Sent when braking starts; the heart-rate sensor has not run yet.
    State,
    /// Sent at the end of the heart-rate check.
    Vitality,
}

/// Payload of a status report; the harness stamps it with sequence number,
/// time and train speed before it goes on the wire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Report {
    pub kind: ReportKind,
    pub driver_state: DriverState,
    pub vitality: Vitality,
    pub bpm: Bpm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    SoundAlarm,
    StopAlarm,
    /// Deceleration in m/s^2.
    ApplyBrake(f64),
    ActivateHrSensor,
    SendReport(Report),
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::SoundAlarm => f.write_str("SoundAlarm"),
            Action::StopAlarm => f.write_str("StopAlarm"),
            Action::ApplyBrake(d) => write!(f, "ApplyBrake({d})"),
            Action::ActivateHrSensor => f.write_str("ActivateHrSensor"),
            Action::SendReport(r) => write!(f, "SendReport({:?}:{}:{})", r.kind, r.driver_state, r.vitality),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlConfig {
    pub alarm_response_timeout: f64,
    pub hr_check_duration: f64,
    /// m/s^2
    pub service_deceleration: f64,
    pub trigger_severity: DriverState,
}

impl Default for ControlConfig {
    fn default() -> Self {
        ControlConfig {
            alarm_response_timeout: 10.0,
            hr_check_duration: 5.0,
            service_deceleration: 0.5,
            trigger_severity: DriverState::Sleepy,
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alarm_response_timeout > 0.0 && self.hr_check_duration > 0.0) {
            return Err(Error::Config("timeouts must be positive".into()));
        }
        if !(self.service_deceleration > 0.0) {
            return Err(Error::Config("deceleration must be positive".into()));
        }
        if self.trigger_severity == DriverState::Awake || self.trigger_severity == DriverState::Incapacitated {
            return Err(Error::Config("trigger must be Drowsy, Sleepy or Asleep".into()));
        }
        Ok(())
    }
}

/// Inputs to one controller step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInput {
    pub driver_state: DriverState,
    /// Any driver activity this tick (PIR event or acknowledgement).
    pub response: bool,
    /// Heart-rate reading, present while the sensor is active.
    pub hr: Option<HrReading>,
    pub elapsed_in_phase: f64,
}

/// One transition of the escalation protocol.
pub fn step(phase: EscalationPhase, input: StepInput, cfg: &ControlConfig) -> Result<(EscalationPhase, Vec<Action>)> {
    use EscalationPhase::*;
    if !(input.elapsed_in_phase >= 0.0) {
        return Err(Error::ProtocolViolation(format!(
            "elapsed time {} in {phase} is not >= 0",
            input.elapsed_in_phase
        )));
    }
    if input.driver_state == DriverState::Incapacitated && matches!(phase, Monitoring | AlarmSounding) {
        return Err(Error::ProtocolViolation(format!(
            "driver reported incapacitated while {phase}"
        )));
    }
    let out = match phase {
        Monitoring if input.driver_state >= cfg.trigger_severity => (AlarmSounding, vec![Action::SoundAlarm]),
        Monitoring => (Monitoring, vec![]),
        AlarmSounding if input.response => (Monitoring, vec![Action::StopAlarm]),
        AlarmSounding if input.elapsed_in_phase >= cfg.alarm_response_timeout => (
            Braking,
            vec![
                Action::ApplyBrake(cfg.service_deceleration),
                Action::SendReport(Report {
                    kind: ReportKind::State,
                    driver_state: input.driver_state,
                    vitality: Vitality::Unknown,
                    bpm: Bpm::Unknown,
                }),
            ],
        ),
        AlarmSounding => (AlarmSounding, vec![]),
        // no activation delay for the heart-rate sensor
        Braking => (HrCheck, vec![Action::ActivateHrSensor]),
        HrCheck if input.elapsed_in_phase >= cfg.hr_check_duration => {
            let hr = input.hr.ok_or_else(|| {
                Error::ProtocolViolation("heart-rate check finished without a reading".into())
            })?;
            let driver_state = if hr.vitality == Vitality::NoPulse {
                DriverState::Incapacitated
            } else {
                input.driver_state
            };
            (
                Reported,
                vec![Action::SendReport(Report {
                    kind: ReportKind::Vitality,
                    driver_state,
                    vitality: hr.vitality,
                    bpm: hr.bpm,
                })],
            )
        }
        HrCheck => (HrCheck, vec![]),
        Reported => (Reported, vec![]),
    };
    Ok(out)
}

/// Phases whose exit needs no time to elapse.
pub fn is_transient(phase: EscalationPhase) -> bool {
    phase == EscalationPhase::Braking
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainState {
    pub speed_kmh: f64,
    pub braking: bool,
}

impl TrainState {
    pub fn new(speed_kmh: f64) -> Self {
        TrainState {
            speed_kmh,
            braking: false,
        }
    }
}

/// Integrates train speed over `dt` seconds. `deceleration` is in m/s^2 and
/// only applies while braking.
pub fn advance_train(train: TrainState, dt: f64, braking: bool, deceleration: f64) -> TrainState {
    let speed_kmh = if braking {
        (train.speed_kmh - 3.6 * deceleration * dt).max(0.0)
    } else {
        train.speed_kmh
    };
    TrainState { speed_kmh, braking }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EscalationPhase::*;

    fn input(state: DriverState, response: bool, hr: Option<HrReading>, elapsed: f64) -> StepInput {
        StepInput {
            driver_state: state,
            response,
            hr,
            elapsed_in_phase: elapsed,
        }
    }

    fn reading(v: Vitality) -> Option<HrReading> {
        Some(HrReading {
            vitality: v,
            bpm: Bpm::Unknown,
        })
    }

    #[test]
    fn step_examples() {
        let cfg = ControlConfig::default();
        for elapsed in [0.0, 3.0, 100.0] {
            assert_eq!(
                step(Monitoring, input(DriverState::Awake, false, None, elapsed), &cfg).unwrap(),
                (Monitoring, vec![])
            );
        }
        assert_eq!(
            step(AlarmSounding, input(DriverState::Sleepy, true, None, 3.0), &cfg).unwrap(),
            (Monitoring, vec![Action::StopAlarm])
        );
        let (next, actions) = step(
            HrCheck,
            input(DriverState::Asleep, false, reading(Vitality::NoPulse), 5.0),
            &cfg,
        )
        .unwrap();
        assert_eq!(next, Reported);
        let [Action::SendReport(r)] = actions.as_slice() else {
            panic!("{actions:?}")
        };
        assert_eq!(r.vitality, Vitality::NoPulse);
        assert_eq!(r.driver_state, DriverState::Incapacitated);
    }

    #[test]
    fn escalation_walks_the_phase_table() {
        let cfg = ControlConfig::default();
        let (p, a) = step(Monitoring, input(DriverState::Sleepy, false, None, 0.0), &cfg).unwrap();
        assert_eq!((p, a), (AlarmSounding, vec![Action::SoundAlarm]));
        let (p, a) = step(p, input(DriverState::Asleep, false, None, 9.9), &cfg).unwrap();
        assert_eq!((p, a), (AlarmSounding, vec![]));
        let (p, a) = step(p, input(DriverState::Asleep, false, None, 10.0), &cfg).unwrap();
        assert_eq!(p, Braking);
        assert_eq!(a[0], Action::ApplyBrake(0.5));
        assert!(matches!(a[1], Action::SendReport(Report { kind: ReportKind::State, .. })));
        let (p, a) = step(p, input(DriverState::Asleep, false, None, 0.0), &cfg).unwrap();
        assert_eq!((p, a), (HrCheck, vec![Action::ActivateHrSensor]));
        let (p, a) = step(p, input(DriverState::Asleep, true, reading(Vitality::Normal), 4.9), &cfg).unwrap();
        assert_eq!((p, a), (HrCheck, vec![]));
        let (p, _) = step(p, input(DriverState::Asleep, false, reading(Vitality::Normal), 5.0), &cfg).unwrap();
        assert_eq!(p, Reported);
        let (p, a) = step(p, input(DriverState::Awake, true, None, 50.0), &cfg).unwrap();
        assert_eq!((p, a), (Reported, vec![]));
    }

    #[test]
    fn protocol_violations() {
        let cfg = ControlConfig::default();
        assert!(matches!(
            step(Monitoring, input(DriverState::Awake, false, None, -1.0), &cfg),
            Err(Error::ProtocolViolation(_))
        ));
        assert!(matches!(
            step(Monitoring, input(DriverState::Incapacitated, false, None, 0.0), &cfg),
            Err(Error::ProtocolViolation(_))
        ));
        assert!(matches!(
            step(HrCheck, input(DriverState::Asleep, false, None, 5.0), &cfg),
            Err(Error::ProtocolViolation(_))
        ));
    }

    #[test]
    fn train_examples() {
        assert_eq!(advance_train(TrainState::new(100.0), 1.0, false, 0.5).speed_kmh, 100.0);
        let braked = advance_train(TrainState::new(100.0), 1.0, true, 0.5).speed_kmh;
        assert!((braked - (100.0 - 3.6 * 0.5)).abs() < 1e-12);
        assert_eq!(advance_train(TrainState::new(1.0), 1.0, true, 0.5).speed_kmh, 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(ControlConfig::default().validate().is_ok());
        let bad = ControlConfig {
            service_deceleration: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
