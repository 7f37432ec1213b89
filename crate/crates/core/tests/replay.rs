use std::fs;

use fatigue_core::bundle;
use fatigue_core::harness::{replay, run, write_recording, ReplayConfig, RunConfig, ScenarioFile};
use fatigue_core::scenario::{DriverCondition, ScenarioScript};
use fatigue_core::synth::synthesize;
use fatigue_core::Error;

fn recorded(dir: &std::path::Path) -> ScenarioFile {
    let file = ScenarioFile::new(ScenarioScript::from_pairs(&[
        (20.0, DriverCondition::Awake),
        (40.0, DriverCondition::Sleepy),
    ]));
    let streams = synthesize(&file.script, 8).unwrap();
    write_recording(&dir.join("bundle"), &file, &streams).unwrap();
    file
}

#[test]
fn replay_of_a_recorded_run_matches_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let file = recorded(dir.path());
    let scenario = dir.path().join("s.toml");
    fs::write(&scenario, file.to_toml().unwrap()).unwrap();
    let live = run(&RunConfig::new(&scenario, 8, dir.path().join("live"))).unwrap();
    let again = replay(&ReplayConfig::new(dir.path().join("bundle"), dir.path().join("replay"))).unwrap();
    assert_eq!(live, again);
}

#[test]
fn truncated_stream_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    recorded(dir.path());
    let f = dir.path().join("bundle").join(bundle::FRAMES_FILE);
    let text = fs::read_to_string(&f).unwrap();
    fs::write(&f, &text[..text.len() / 2]).unwrap();
    let err = replay(&ReplayConfig::new(dir.path().join("bundle"), dir.path().join("out"))).unwrap_err();
    assert!(matches!(err, Error::Format(_)), "{err}");
}

#[test]
fn streams_of_unequal_duration_are_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    recorded(dir.path());
    let f = dir.path().join("bundle").join(bundle::ACCEL_FILE);
    let text = fs::read_to_string(&f).unwrap();
    // drop the last second of accelerometer samples, keeping whole lines
    let keep: Vec<&str> = text.lines().collect();
    fs::write(&f, keep[..keep.len() - 50].join("\n") + "\n").unwrap();
    let err = replay(&ReplayConfig::new(dir.path().join("bundle"), dir.path().join("out"))).unwrap_err();
    assert!(matches!(err, Error::Format(ref m) if m.contains("accel")), "{err}");
}

#[test]
fn missing_scenario_in_bundle_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    recorded(dir.path());
    fs::remove_file(dir.path().join("bundle").join("scenario.toml")).unwrap();
    let err = replay(&ReplayConfig::new(dir.path().join("bundle"), dir.path().join("out"))).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
