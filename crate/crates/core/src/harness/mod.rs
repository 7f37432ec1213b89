//! The fixed-tick simulation loop and its file-level entry points.
//!
//! Each tick ingests the sensor samples due by the tick time, refreshes the
//! detector windows on fusion-window boundaries, fuses, steps the
//! escalation controller, routes any reports through the telemetry link
//! and finally integrates the train speed.

pub mod timeline;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alertness::{predicted_alertness, AlertnessParams, Interval, SleepWakeSchedule};
use crate::bundle;
use crate::error::{Error, Result};
use crate::escalation::{self, Action, ControlConfig, EscalationPhase, ReportKind, StepInput, TrainState};
use crate::fusion::{candidate_state, DriverState, Evidence, FusionConfig, FusionFsm};
use crate::heart;
use crate::motion::{self, BaselineTracker};
use crate::scenario::{segment_index, ScenarioScript};
use crate::synth::{self, PirEvent, PpgSample, SensorBundle};
use crate::telemetry::{self, ControlRoom, StatusMessage};
use crate::vision::{self, ApertureSeries, MotionLevel};

use timeline::{timeline_csv, MetricRow, Metrics, Summary, TimelineRow};

pub const DEFAULT_TICK: f64 = 0.1;
pub const SCENARIO_FILE: &str = "scenario.toml";
pub const TIMELINE_FILE: &str = "timeline.csv";
pub const TELEMETRY_FILE: &str = "telemetry.log";
pub const ACKS_FILE: &str = "acks.log";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const BUNDLE_DIR: &str = "bundle";

/// Sample timestamps within this of the tick time count as due.
const TIME_EPS: f64 = 1e-9;

/// Windowing of the detector channels feeding fusion, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorConfig {
    pub blink_window: f64,
    pub closure_window: f64,
    pub nod_window: f64,
    pub motion_window: f64,
    pub pir_window: f64,
    pub nod_min_amplitude: f64,
    pub nod_refractory: f64,
    pub hr_window: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            blink_window: 30.0,
            closure_window: 10.0,
            nod_window: 30.0,
            motion_window: 10.0,
            pir_window: motion::PIR_WINDOW,
            nod_min_amplitude: motion::NOD_MIN_AMPLITUDE,
            nod_refractory: motion::NOD_REFRACTORY,
            hr_window: heart::BPM_WINDOW,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let windows = [
            self.closure_window,
            self.nod_window,
            self.motion_window,
            self.pir_window,
            self.hr_window,
        ];
        if windows.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("detector windows must be positive".into()));
        }
        if !(self.blink_window >= vision::MIN_BLINK_WINDOW) {
            return Err(Error::Config(format!(
                "blink window must be at least {} s",
                vision::MIN_BLINK_WINDOW
            )));
        }
        if !(self.nod_min_amplitude > 0.0 && self.nod_refractory >= 0.0) {
            return Err(Error::Config("nod thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// A scenario script plus the module configuration it runs under.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub script: ScenarioScript,
    pub fusion: FusionConfig,
    pub control: ControlConfig,
    pub detector: DetectorConfig,
}

impl ScenarioFile {
    pub fn new(script: ScenarioScript) -> Self {
        ScenarioFile {
            script,
            fusion: FusionConfig::default(),
            control: ControlConfig::default(),
            detector: DetectorConfig::default(),
        }
    }

    /// Parses the TOML form: script keys and `[[segment]]` tables at top
    /// level, with optional `[fusion]`, `[control]` and `[detector]` tables.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Error::InvalidScenario(format!("{e}")))?;
        fn section<T: for<'de> Deserialize<'de> + Default>(table: &mut toml::Table, key: &str) -> Result<T> {
            match table.remove(key) {
                None => Ok(T::default()),
                Some(v) => v
                    .try_into()
                    .map_err(|e| Error::Config(format!("[{key}]: {e}"))),
            }
        }
        let fusion = section(&mut table, "fusion")?;
        let control = section(&mut table, "control")?;
        let detector = section(&mut table, "detector")?;
        let script: ScenarioScript = toml::Value::Table(table)
            .try_into()
            .map_err(|e| Error::InvalidScenario(format!("{e}")))?;
        let file = ScenarioFile {
            script,
            fusion,
            control,
            detector,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        let ser = |e: toml::ser::Error| Error::Config(format!("cannot serialize scenario: {e}"));
        let mut table = toml::Table::try_from(&self.script).map_err(ser)?;
        table.insert("fusion".into(), toml::Value::try_from(self.fusion).map_err(ser)?);
        table.insert("control".into(), toml::Value::try_from(self.control).map_err(ser)?);
        table.insert("detector".into(), toml::Value::try_from(self.detector).map_err(ser)?);
        toml::to_string(&table).map_err(ser)
    }

    pub fn validate(&self) -> Result<()> {
        self.script.validate()?;
        self.fusion.validate()?;
        self.control.validate()?;
        self.detector.validate()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleToml {
    scenario_start: Option<f64>,
    s_initial: Option<f64>,
    #[serde(default)]
    params: AlertnessParams,
    interval: Vec<Interval>,
}

/// Sleep/wake history used to annotate the timeline with predicted
/// alertness. The prediction is reported alongside the fused state; it
/// does not influence it.
#[derive(Debug, Clone, PartialEq)]
pub struct AlertnessSetup {
    pub schedule: SleepWakeSchedule,
    pub params: AlertnessParams,
    pub s_initial: f64,
    /// Clock hour corresponding to simulation time zero.
    pub scenario_start: f64,
}

impl AlertnessSetup {
    /// Parses `[[interval]]` tables (`start`, `end`, `kind`) with optional
    /// `scenario_start`, `s_initial` and a `[params]` table.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: ScheduleToml = toml::from_str(text).map_err(|e| Error::Config(format!("schedule: {e}")))?;
        raw.params.validate().map_err(|e| Error::Config(e.to_string()))?;
        let schedule = SleepWakeSchedule::new(raw.interval).map_err(|e| Error::Config(e.to_string()))?;
        let s_initial = raw.s_initial.unwrap_or_else(|| raw.params.midpoint());
        if !(raw.params.low_asymptote..=raw.params.high_asymptote).contains(&s_initial) {
            return Err(Error::Config("s_initial must lie between the asymptotes".into()));
        }
        Ok(AlertnessSetup {
            scenario_start: raw.scenario_start.unwrap_or(schedule.start()),
            schedule,
            params: raw.params,
            s_initial,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read schedule {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn clock(&self, t: f64) -> f64 {
        self.scenario_start + t / 3600.0
    }
}

/// Everything a run needs besides the sensor streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub scenario: ScenarioFile,
    pub tick: f64,
    pub alertness: Option<AlertnessSetup>,
}

fn is_integral(x: f64) -> bool {
    x >= 1.0 - 1e-9 && (x - x.round()).abs() < 1e-9
}

impl Simulation {
    pub fn new(scenario: ScenarioFile) -> Self {
        Simulation {
            scenario,
            tick: DEFAULT_TICK,
            alertness: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if !(self.tick > 0.0 && self.tick.is_finite()) {
            return Err(Error::Config("tick must be positive".into()));
        }
        // a sampling stream and the tick must nest: either a whole number
        // of samples per tick or a whole number of ticks per sample
        let r = self.scenario.script.rates;
        for (name, hz) in [("frame", r.frame_hz), ("accel", r.accel_hz), ("ppg", r.ppg_hz)] {
            let per_tick = hz * self.tick;
            if !(is_integral(per_tick) || is_integral(1.0 / per_tick)) {
                return Err(Error::Config(format!(
                    "tick {} s does not nest with the {name} period {} s",
                    self.tick,
                    1.0 / hz
                )));
            }
        }
        if !is_integral(self.scenario.fusion.window / self.tick) {
            return Err(Error::Config("fusion window must be a multiple of the tick".into()));
        }
        if let Some(a) = &self.alertness {
            let end = a.clock(self.scenario.script.total_duration());
            if a.scenario_start < a.schedule.start() || end > a.schedule.end() {
                return Err(Error::Config(format!(
                    "schedule covers hours [{}, {}] but the run spans [{}, {end}]",
                    a.schedule.start(),
                    a.schedule.end(),
                    a.scenario_start
                )));
            }
        }
        Ok(())
    }
}

/// A finished run: timeline plus everything sent over the telemetry link.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineReport {
    pub rows: Vec<TimelineRow>,
    pub summary: Summary,
    pub messages: Vec<StatusMessage>,
    /// Control-room log: the accepted lines verbatim.
    pub telemetry_log: Vec<u8>,
    pub acks: Vec<u8>,
}

impl TimelineReport {
    pub fn timeline_csv(&self) -> String {
        timeline_csv(&self.rows)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(TIMELINE_FILE), self.timeline_csv())?;
        fs::write(dir.join(TELEMETRY_FILE), &self.telemetry_log)?;
        fs::write(dir.join(ACKS_FILE), &self.acks)?;
        fs::write(dir.join(SUMMARY_FILE), self.summary.to_string())?;
        Ok(())
    }
}

/// First index in `times` not yet due at `t`, starting from `from`.
fn due(from: usize, len: usize, t: f64, ts: impl Fn(usize) -> f64) -> usize {
    let mut i = from;
    while i < len && ts(i) <= t + TIME_EPS {
        i += 1;
    }
    i
}

fn trailing_ppg(ppg: &[PpgSample], end: f64, window: f64) -> &[PpgSample] {
    let i = ppg.partition_point(|p| p.timestamp <= end - window + TIME_EPS);
    &ppg[i..]
}

/// Runs the tick loop over pre-recorded or synthesized streams.
pub fn simulate(sim: &Simulation, streams: &SensorBundle) -> Result<TimelineReport> {
    sim.validate()?;
    let ScenarioFile {
        script,
        fusion: fusion_cfg,
        control,
        detector,
    } = &sim.scenario;
    let tick = sim.tick;
    let bounds = script.boundaries();
    let n_ticks = (script.total_duration() / tick).round() as u64;
    let window_ticks = (fusion_cfg.window / tick).round() as u64;

    let mut apertures = ApertureSeries::new();
    let mut diffs: Vec<(f64, f64)> = Vec::new();
    let mut tracker = BaselineTracker::new();
    let mut ppg: Vec<PpgSample> = Vec::new();
    let mut pir: Vec<PirEvent> = Vec::new();
    let (mut fi, mut ai, mut pi, mut ri, mut resp_i) = (0, 0, 0, 0, 0);
    let mut responses = script.responses.clone();
    responses.sort_by(f64::total_cmp);

    let mut fsm = FusionFsm::new(*fusion_cfg);
    let mut phase = EscalationPhase::Monitoring;
    let mut phase_entry = 0u64;
    let mut train = TrainState::new(script.initial_speed_kmh);
    let mut braking = false;
    let mut deceleration = control.service_deceleration;
    let mut room = ControlRoom::new(Vec::new(), Vec::new());
    let mut seq = 0u32;
    let mut rows = Vec::with_capacity(n_ticks as usize);

    for n in 0..n_ticks {
        let t = n as f64 * tick;
        let speed_now = train.speed_kmh;
        let fail = |e: Error| match e {
            Error::ProtocolViolation(m) => Error::ProtocolViolation(format!("tick {n} (t={t:.3} s): {m}")),
            other => other,
        };

        // 1. capture and compare images
        let fe = due(fi, streams.frames.len(), t, |i| streams.frames[i].timestamp);
        for i in fi..fe {
            let f = &streams.frames[i];
            apertures.push(f.timestamp, vision::estimate_aperture(f)).map_err(as_format)?;
            if i > 0 {
                diffs.push((f.timestamp, vision::frame_diff_score(&streams.frames[i - 1], f).map_err(as_format)?));
            }
        }
        fi = fe;
        // 2. head movement and cabin activity
        let ae = due(ai, streams.accel.len(), t, |i| streams.accel[i].timestamp);
        for s in &streams.accel[ai..ae] {
            tracker.push(motion::pitch_of(s).map_err(as_format)?);
        }
        ai = ae;
        let re = due(ri, streams.pir.len(), t, |i| streams.pir[i].timestamp);
        pir.extend_from_slice(&streams.pir[ri..re]);
        let mut response = re > ri;
        ri = re;
        let se = due(resp_i, responses.len(), t, |i| responses[i]);
        response |= se > resp_i;
        resp_i = se;
        // 3. pulse
        let pe = due(pi, streams.ppg.len(), t, |i| streams.ppg[i].timestamp);
        ppg.extend_from_slice(&streams.ppg[pi..pe]);
        pi = pe;

        // 4. fuse on window boundaries
        let old_state = fsm.state();
        let mut evidence = None;
        let mut candidate = None;
        if n > 0 && n % window_ticks == 0 {
            let e = gather_evidence(t, detector, &apertures, &diffs, &tracker, &pir)?;
            let c = candidate_state(&e, fusion_cfg);
            fsm.observe(c);
            evidence = Some(e);
            candidate = Some(c);
        }

        // 5. escalate; transient phases resolve within the tick
        let mut actions = Vec::new();
        loop {
            let hr = (phase == EscalationPhase::HrCheck)
                .then(|| heart::assess(trailing_ppg(&ppg, t, detector.hr_window)));
            let elapsed = ((n - phase_entry) as f64 * tick * 1e9).round() / 1e9;
            let input = StepInput {
                driver_state: fsm.state(),
                response,
                hr,
                elapsed_in_phase: elapsed,
            };
            let (next, step_actions) = escalation::step(phase, input, control).map_err(fail)?;
            for a in &step_actions {
                match a {
                    Action::ApplyBrake(d) => {
                        braking = true;
                        deceleration = *d;
                    }
                    Action::SendReport(r) => {
                        seq += 1;
                        let msg = StatusMessage::from_report(seq, script.epoch + t.floor() as u64, r, speed_now);
                        // delivery; a rejected line shows up in the reject counts
                        let _ = room.receive_line(&telemetry::encode(&msg))?;
                        if r.kind == ReportKind::Vitality && r.driver_state == DriverState::Incapacitated {
                            fsm.mark_incapacitated();
                        }
                    }
                    _ => {}
                }
            }
            actions.extend(step_actions);
            let changed = next != phase;
            if changed {
                phase = next;
                phase_entry = n;
            }
            if !(changed && escalation::is_transient(phase)) {
                break;
            }
        }

        let alertness = match &sim.alertness {
            Some(a) => Some(
                predicted_alertness(&a.schedule, a.clock(t), &a.params, a.s_initial)
                    .map_err(|e| Error::Config(e.to_string()))?
                    .value,
            ),
            None => None,
        };

        rows.push(TimelineRow {
            tick: n,
            time: t,
            condition: script.segments[segment_index(&bounds, t)].condition,
            evidence,
            candidate,
            old_state,
            fused_state: fsm.state(),
            phase,
            actions,
            speed_kmh: speed_now,
            alertness,
        });

        // 6. train dynamics over the coming tick
        train = escalation::advance_train(train, tick, braking, deceleration);
    }

    let metric_rows: Vec<MetricRow> = rows.iter().map(MetricRow::from).collect();
    let summary = Summary {
        ticks: rows.len(),
        tick,
        trigger: control.trigger_severity,
        metrics: Metrics::compute(&metric_rows, control.trigger_severity),
    };
    let (telemetry_log, acks, messages, _) = room.into_parts();
    Ok(TimelineReport {
        rows,
        summary,
        messages,
        telemetry_log,
        acks,
    })
}

fn as_format(e: Error) -> Error {
    match e {
        Error::Format(_) => e,
        other => Error::Format(format!("bad sensor sample: {other}")),
    }
}

fn gather_evidence(
    t: f64,
    d: &DetectorConfig,
    apertures: &ApertureSeries,
    diffs: &[(f64, f64)],
    tracker: &BaselineTracker,
    pir: &[PirEvent],
) -> Result<Evidence> {
    let elapsed = t;
    let blink_rate = if elapsed + TIME_EPS >= vision::MIN_BLINK_WINDOW {
        vision::blink_rate(apertures, d.blink_window.min(elapsed.max(vision::MIN_BLINK_WINDOW))).ok()
    } else {
        None
    };
    let closed_fraction = vision::closed_fraction(apertures, d.closure_window)
        .map_err(|_| Error::Config("no frames before the first fusion window".into()))?;
    let nod_rate = if elapsed + TIME_EPS >= 2.0 {
        let dev = tracker.deviations();
        let i = dev.partition_point(|p| p.timestamp <= t - d.nod_window + TIME_EPS);
        let nods = motion::nods_from_deviations(&dev[i..], d.nod_min_amplitude, d.nod_refractory);
        nods.len() as f64 * 60.0 / d.nod_window.min(elapsed)
    } else {
        0.0
    };
    let motion = match vision::classify_motion(diffs, d.motion_window) {
        Ok(m) => m,
        Err(_) if diffs.is_empty() => MotionLevel::Normal,
        Err(e) => return Err(Error::Config(format!("fusion window too short for motion: {e}"))),
    };
    Ok(Evidence {
        window_end: t,
        blink_rate,
        closed_fraction,
        nod_rate,
        motion,
        pir_active: motion::pir_active(pir, t, d.pir_window),
    })
}

/// Inputs of the `run` entry point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub seed: u64,
    pub tick: f64,
    pub out_dir: PathBuf,
    pub schedule: Option<PathBuf>,
    /// Also write the synthesized streams to `out_dir/bundle`.
    pub record_bundle: bool,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>, seed: u64, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            scenario: scenario.into(),
            seed,
            tick: DEFAULT_TICK,
            out_dir: out_dir.into(),
            schedule: None,
            record_bundle: false,
        }
    }
}

fn load_simulation(scenario: ScenarioFile, tick: f64, schedule: Option<&Path>) -> Result<Simulation> {
    let sim = Simulation {
        scenario,
        tick,
        alertness: schedule.map(AlertnessSetup::load).transpose()?,
    };
    sim.validate()?;
    Ok(sim)
}

/// Synthesizes the scenario's streams, runs them and writes the outputs.
pub fn run(cfg: &RunConfig) -> Result<TimelineReport> {
    let scenario = ScenarioFile::load(&cfg.scenario)?;
    let sim = load_simulation(scenario, cfg.tick, cfg.schedule.as_deref())?;
    let streams = synth::synthesize(&sim.scenario.script, cfg.seed)?;
    let report = simulate(&sim, &streams)?;
    report.write(&cfg.out_dir)?;
    if cfg.record_bundle {
        write_recording(&cfg.out_dir.join(BUNDLE_DIR), &sim.scenario, &streams)?;
    }
    Ok(report)
}

/// Writes a self-contained bundle: the streams plus the scenario they ran under.
pub fn write_recording(dir: &Path, scenario: &ScenarioFile, streams: &SensorBundle) -> Result<()> {
    bundle::write_bundle(dir, streams)?;
    fs::write(dir.join(SCENARIO_FILE), scenario.to_toml()?)?;
    Ok(())
}

/// Inputs of the `replay` entry point.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig {
    pub bundle: PathBuf,
    pub out_dir: PathBuf,
    pub tick: f64,
    pub schedule: Option<PathBuf>,
}

impl ReplayConfig {
    pub fn new(bundle: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        ReplayConfig {
            bundle: bundle.into(),
            out_dir: out_dir.into(),
            tick: DEFAULT_TICK,
            schedule: None,
        }
    }
}

/// Runs a recorded bundle through the same pipeline as [`run`].
pub fn replay(cfg: &ReplayConfig) -> Result<TimelineReport> {
    let text = fs::read_to_string(cfg.bundle.join(SCENARIO_FILE))
        .map_err(|e| Error::Format(format!("{SCENARIO_FILE}: {e}")))?;
    let scenario = ScenarioFile::parse(&text)?;
    let streams = bundle::read_bundle(&cfg.bundle)?;
    bundle::validate_bundle(&streams, &scenario.script)?;
    let sim = load_simulation(scenario, cfg.tick, cfg.schedule.as_deref())?;
    let report = simulate(&sim, &streams)?;
    report.write(&cfg.out_dir)?;
    Ok(report)
}

/// Recomputes a stored run's metrics. The summary defaults to
/// `summary.txt` next to the timeline.
pub fn report(timeline: &Path, summary: Option<&Path>) -> Result<timeline::Recheck> {
    let summary = summary
        .map(Path::to_path_buf)
        .unwrap_or_else(|| timeline.with_file_name(SUMMARY_FILE));
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::Format(format!("{}: {e}", p.display())));
    timeline::recheck(&read(timeline)?, &read(&summary)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DriverCondition;

    fn run_pairs(pairs: &[(f64, DriverCondition)], seed: u64) -> TimelineReport {
        let sim = Simulation::new(ScenarioFile::new(ScenarioScript::from_pairs(pairs)));
        let streams = synth::synthesize(&sim.scenario.script, seed).unwrap();
        simulate(&sim, &streams).unwrap()
    }

    #[test]
    fn scenario_toml_round_trips() {
        let text = r#"
            initial_speed_kmh = 80.0
            responses = [65.0]

            [[segment]]
            duration = 60.0
            condition = "awake"

            [[segment]]
            duration = 30.0
            condition = "sleepy"
            overrides = { nod_interval_s = 5.0 }

            [control]
            alarm_response_timeout = 8.0
        "#;
        let file = ScenarioFile::parse(text).unwrap();
        assert_eq!(file.script.segments.len(), 2);
        assert_eq!(file.control.alarm_response_timeout, 8.0);
        assert_eq!(file.fusion, FusionConfig::default());
        assert_eq!(ScenarioFile::parse(&file.to_toml().unwrap()).unwrap(), file);
    }

    #[test]
    fn bad_scenarios_are_config_class_errors() {
        for text in [
            "",
            "[[segment]]\nduration = 5.0\ncondition = \"dazed\"\n",
            "[[segment]]\nduration = -5.0\ncondition = \"awake\"\n",
            "[[segment]]\nduration = 5.0\ncondition = \"awake\"\n[fusion]\ndwell_up = 0\n",
        ] {
            let err = ScenarioFile::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
    }

    #[test]
    fn tick_must_nest_with_sample_periods() {
        let mut sim = Simulation::new(ScenarioFile::new(ScenarioScript::from_pairs(&[(5.0, DriverCondition::Awake)])));
        sim.validate().unwrap();
        sim.tick = 0.03;
        assert!(matches!(sim.validate(), Err(Error::Config(_))));
        sim.tick = 0.2;
        sim.validate().unwrap();
    }

    #[test]
    fn schedule_parses_and_must_cover_the_run() {
        let text = r#"
            scenario_start = 9.0
            [[interval]]
            start = 0.0
            end = 8.0
            kind = "sleep"
            [[interval]]
            start = 8.0
            end = 24.0
            kind = "wake"
        "#;
        let setup = AlertnessSetup::parse(text).unwrap();
        assert_eq!(setup.s_initial, AlertnessParams::default().midpoint());
        let mut sim = Simulation::new(ScenarioFile::new(ScenarioScript::from_pairs(&[(60.0, DriverCondition::Awake)])));
        sim.alertness = Some(setup.clone());
        sim.validate().unwrap();
        sim.alertness = Some(AlertnessSetup {
            scenario_start: 23.99,
            ..setup
        });
        assert!(matches!(sim.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn awake_drive_is_uneventful() {
        let report = run_pairs(&[(120.0, DriverCondition::Awake)], 11);
        assert_eq!(report.rows.len(), 1200);
        assert!(report.rows.iter().all(|r| r.fused_state == DriverState::Awake));
        assert_eq!(report.summary.metrics.false_alarm_count, 0);
        assert_eq!(report.summary.metrics.reports_sent, 0);
        assert_eq!(report.summary.metrics.final_speed_kmh, 100.0);
    }

    #[test]
    fn sleep_onset_escalates_to_a_vitality_report() {
        let report = run_pairs(&[(60.0, DriverCondition::Awake), (120.0, DriverCondition::Asleep)], 5);
        let m = report.summary.metrics;
        assert!(m.detection_latency.unwrap() <= 15.0, "{m:?}");
        assert_eq!(m.reports_sent, 2);
        assert_eq!(report.messages.len(), 2);
        assert_eq!(report.messages[1].hr, telemetry::HrCode::Ok);
        assert!(m.time_to_stop.is_some());
    }
}
