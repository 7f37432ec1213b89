//! Timeline rows, the CSV they serialize to, and the summary metrics that
//! can be recomputed from a timeline file alone.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::escalation::{Action, EscalationPhase};
use crate::fusion::{DriverState, Evidence};
use crate::scenario::DriverCondition;

pub const TIMELINE_HEADER: &str = "tick,time_s,condition,blink_rate,closed_fraction,nod_rate,motion,pir_active,\
candidate,old_state,fused_state,phase,actions,speed_kmh,alertness";

/// Speeds below this (the CSV resolution) count as stopped.
const STOPPED_BELOW: f64 = 0.0005;

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineRow {
    pub tick: u64,
    pub time: f64,
    pub condition: DriverCondition,
    /// Present on fusion-window ticks only.
    pub evidence: Option<Evidence>,
    pub candidate: Option<DriverState>,
    pub old_state: DriverState,
    pub fused_state: DriverState,
    pub phase: EscalationPhase,
    pub actions: Vec<Action>,
    /// Speed at the start of the tick.
    pub speed_kmh: f64,
    pub alertness: Option<f64>,
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl TimelineRow {
    pub fn to_csv(&self) -> String {
        let e = self.evidence.as_ref();
        let actions: Vec<String> = self.actions.iter().map(Action::to_string).collect();
        format!(
            "{},{:.3},{},{},{},{},{},{},{},{},{},{},{},{:.3},{}",
            self.tick,
            self.time,
            self.condition.as_str(),
            opt(e, |e| e.blink_rate.map_or("NA".into(), |b| format!("{b:.3}"))),
            opt(e, |e| format!("{:.4}", e.closed_fraction)),
            opt(e, |e| format!("{:.3}", e.nod_rate)),
            opt(e, |e| e.motion.as_str().to_string()),
            opt(e, |e| u8::from(e.pir_active).to_string()),
            opt(self.candidate, |c| c.to_string()),
            self.old_state,
            self.fused_state,
            self.phase,
            actions.join(";"),
            self.speed_kmh,
            opt(self.alertness, |a| format!("{a:.6}")),
        )
    }
}

pub fn timeline_csv(rows: &[TimelineRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(TIMELINE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// The columns the summary metrics depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub time: f64,
    pub condition: DriverCondition,
    pub fused_state: DriverState,
    pub alarms: usize,
    pub brakes: usize,
    pub reports: usize,
    pub speed_kmh: f64,
}

impl From<&TimelineRow> for MetricRow {
    fn from(r: &TimelineRow) -> Self {
        let count = |p: fn(&Action) -> bool| r.actions.iter().filter(|a| p(a)).count();
        MetricRow {
            time: r.time,
            condition: r.condition,
            fused_state: r.fused_state,
            alarms: count(|a| matches!(a, Action::SoundAlarm)),
            brakes: count(|a| matches!(a, Action::ApplyBrake(_))),
            reports: count(|a| matches!(a, Action::SendReport(_))),
            speed_kmh: r.speed_kmh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Seconds from the first non-awake condition onset until the fused
    /// state reaches that condition's severity, capped at the trigger.
    pub detection_latency: Option<f64>,
    /// Alarms sounded while the scripted condition was below the trigger.
    pub false_alarm_count: usize,
    /// Seconds from the first brake application to standstill.
    pub time_to_stop: Option<f64>,
    pub reports_sent: usize,
    pub final_speed_kmh: f64,
}

impl Metrics {
    pub fn compute(rows: &[MetricRow], trigger: DriverState) -> Metrics {
        let onset = rows.iter().find(|r| r.condition != DriverCondition::Awake);
        let detection_latency = onset.and_then(|o| {
            let target = o.condition.severity().min(trigger.severity());
            rows.iter()
                .find(|r| r.time >= o.time && r.fused_state.severity() >= target)
                .map(|r| r.time - o.time)
        });
        let false_alarm_count = rows
            .iter()
            .filter(|r| r.condition.severity() < trigger.severity())
            .map(|r| r.alarms)
            .sum();
        let time_to_stop = rows.iter().find(|r| r.brakes > 0).and_then(|b| {
            rows.iter()
                .find(|r| r.time >= b.time && r.speed_kmh < STOPPED_BELOW)
                .map(|r| r.time - b.time)
        });
        Metrics {
            detection_latency,
            false_alarm_count,
            time_to_stop,
            reports_sent: rows.iter().map(|r| r.reports).sum(),
            final_speed_kmh: rows.last().map_or(0.0, |r| r.speed_kmh),
        }
    }
}

/// Run summary, rendered as `key: value` lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub ticks: usize,
    pub tick: f64,
    pub trigger: DriverState,
    pub metrics: Metrics,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), |v| format!("{v:.3}"))
}

impl Summary {
    /// Metric lines compared by consistency checks, in file order.
    pub fn metric_entries(&self) -> Vec<(&'static str, String)> {
        let m = &self.metrics;
        vec![
            ("ticks", self.ticks.to_string()),
            ("detection_latency_s", fmt_opt(m.detection_latency)),
            ("false_alarm_count", m.false_alarm_count.to_string()),
            ("time_to_stop_s", fmt_opt(m.time_to_stop)),
            ("reports_sent", m.reports_sent.to_string()),
            ("final_speed_kmh", format!("{:.3}", m.final_speed_kmh)),
        ]
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tick_s: {}", self.tick)?;
        writeln!(f, "trigger_state: {}", self.trigger)?;
        for (k, v) in self.metric_entries() {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

pub fn parse_summary(text: &str) -> Result<BTreeMap<String, String>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once(": ")
                .map(|(k, v)| (k.to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Format(format!("summary line `{l}` is not `key: value`")))
        })
        .collect()
}

fn parse_col<T: std::str::FromStr>(s: &str, name: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("timeline line {line}: bad {name} `{s}`")))
}

/// Reads the metric columns of a timeline CSV.
pub fn parse_timeline(text: &str) -> Result<Vec<MetricRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TIMELINE_HEADER) {
        return Err(Error::Format("timeline is empty or has the wrong header".into()));
    }
    let rows = lines
        .enumerate()
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 15 {
                return Err(Error::Format(format!("timeline line {line}: expected 15 columns")));
            }
            let condition = f[2]
                .parse::<DriverCondition>()
                .map_err(|_| Error::Format(format!("timeline line {line}: bad condition `{}`", f[2])))?;
            let actions: Vec<&str> = f[12].split(';').filter(|a| !a.is_empty()).collect();
            let count = |prefix: &str| actions.iter().filter(|a| a.starts_with(prefix)).count();
            Ok(MetricRow {
                time: parse_col(f[1], "time", line)?,
                condition,
                fused_state: f[10].parse()?,
                alarms: count("SoundAlarm"),
                brakes: count("ApplyBrake"),
                reports: count("SendReport"),
                speed_kmh: parse_col(f[13], "speed", line)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Format("timeline has no rows".into()));
    }
    Ok(rows)
}

/// Outcome of re-deriving the metrics of a stored run.
#[derive(Debug, Clone, PartialEq)]
pub struct Recheck {
    pub recomputed: Summary,
    /// `(key, stored, recomputed)` for each disagreeing metric.
    pub mismatches: Vec<(String, String, String)>,
}

impl Recheck {
    pub fn is_consistent(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.recomputed.to_string();
        for (k, stored, got) in &self.mismatches {
            let _ = writeln!(out, "MISMATCH {k}: stored {stored}, recomputed {got}");
        }
        out
    }
}

/// Recomputes metrics from a timeline and compares with a stored summary.
pub fn recheck(timeline: &str, summary: &str) -> Result<Recheck> {
    let rows = parse_timeline(timeline)?;
    let stored = parse_summary(summary)?;
    let get = |k: &str| {
        stored
            .get(k)
            .ok_or_else(|| Error::Format(format!("summary lacks `{k}`")))
    };
    let trigger: DriverState = get("trigger_state")?.parse()?;
    let tick: f64 = get("tick_s")?
        .parse()
        .map_err(|_| Error::Format("summary has a bad tick_s".into()))?;
    let recomputed = Summary {
        ticks: rows.len(),
        tick,
        trigger,
        metrics: Metrics::compute(&rows, trigger),
    };
    let mut mismatches = Vec::new();
    for (k, v) in recomputed.metric_entries() {
        let s = get(k)?;
        if *s != v {
            mismatches.push((k.to_string(), s.clone(), v));
        }
    }
    Ok(Recheck { recomputed, mismatches })
}
