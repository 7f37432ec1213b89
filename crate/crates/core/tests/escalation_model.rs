//! Exhaustive enumeration of short controller input sequences.

use fatigue_core::escalation::{is_transient, step, Action, ControlConfig, EscalationPhase, StepInput};
use fatigue_core::fusion::DriverState;
use fatigue_core::heart::{Bpm, HrReading, Vitality};

use EscalationPhase::*;

const DEPTH: usize = 6;

/// Controller configuration scaled so every phase is reachable in six steps.
fn cfg() -> ControlConfig {
    ControlConfig {
        alarm_response_timeout: 2.0,
        hr_check_duration: 1.0,
        ..Default::default()
    }
}

#[derive(Clone, Debug)]
struct Walk {
    phase: EscalationPhase,
    entered: usize,
    visited: Vec<EscalationPhase>,
    alarms_this_incident: usize,
    reports: usize,
    always_responsive: bool,
}

fn legal(from: EscalationPhase, to: EscalationPhase) -> bool {
    from == to
        || matches!(
            (from, to),
            (Monitoring, AlarmSounding)
                | (AlarmSounding, Monitoring)
                | (AlarmSounding, Braking)
                | (Braking, HrCheck)
                | (HrCheck, Reported)
        )
}

fn explore(w: Walk, n: usize, tally: &mut usize) {
    if n == DEPTH {
        return;
    }
    let states = [DriverState::Awake, DriverState::Sleepy, DriverState::Asleep];
    let readings = [Vitality::Normal, Vitality::NoPulse];
    for state in states {
        for response in [false, true] {
            for vitality in readings {
                let mut w = w.clone();
                w.always_responsive &= response;
                let mut phase = w.phase;
                loop {
                    let input = StepInput {
                        driver_state: state,
                        response,
                        hr: (phase == HrCheck).then_some(HrReading { vitality, bpm: Bpm::Unknown }),
                        elapsed_in_phase: (n - w.entered) as f64,
                    };
                    let (next, actions) = step(phase, input, &cfg()).expect("legal input");
                    assert!(legal(phase, next), "{phase} -> {next}");
                    let reports = actions.iter().filter(|a| matches!(a, Action::SendReport(_))).count();
                    assert!(reports <= 1, "two reports on one transition");
                    w.reports += reports;
                    assert!(w.reports <= 2);
                    if actions.contains(&Action::SoundAlarm) {
                        w.alarms_this_incident += 1;
                        assert_eq!(w.alarms_this_incident, 1, "second alarm in one incident");
                    }
                    if next == Monitoring && phase == AlarmSounding {
                        assert!(response && actions == [Action::StopAlarm]);
                        w.alarms_this_incident = 0;
                    }
                    if next != phase {
                        w.visited.push(next);
                        w.entered = n;
                    }
                    let again = next != phase && is_transient(next);
                    phase = next;
                    if !again {
                        break;
                    }
                }
                w.phase = phase;
                if w.always_responsive {
                    assert!(!w.visited.contains(&Braking), "responsive driver braked: {:?}", w.visited);
                }
                // once braking starts the incident runs to the report, in order
                if let Some(b) = w.visited.iter().position(|p| *p == Braking) {
                    let tail = &w.visited[b..];
                    assert!([Braking, HrCheck, Reported].starts_with(tail), "{tail:?}");
                }
                *tally += 1;
                explore(w, n + 1, tally);
            }
        }
    }
}

#[test]
fn all_short_input_sequences_follow_the_phase_table() {
    let mut tally = 0;
    let start = Walk {
        phase: Monitoring,
        entered: 0,
        visited: vec![Monitoring],
        alarms_this_incident: 0,
        reports: 0,
        always_responsive: true,
    };
    explore(start, 0, &mut tally);
    assert_eq!(tally, (1..=DEPTH).map(|k| 12usize.pow(k as u32)).sum::<usize>());
}

#[test]
fn reported_is_terminal() {
    for state in [DriverState::Awake, DriverState::Asleep, DriverState::Incapacitated] {
        for response in [false, true] {
            let input = StepInput {
                driver_state: state,
                response,
                hr: None,
                elapsed_in_phase: 1e6,
            };
            assert_eq!(step(Reported, input, &cfg()).unwrap(), (Reported, vec![]));
        }
    }
}

#[test]
fn nan_elapsed_is_a_protocol_violation() {
    let input = StepInput {
        driver_state: DriverState::Awake,
        response: false,
        hr: None,
        elapsed_in_phase: f64::NAN,
    };
    assert!(matches!(
        step(Monitoring, input, &cfg()),
        Err(fatigue_core::Error::ProtocolViolation(_))
    ));
}
