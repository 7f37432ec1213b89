//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations are exposed: rendering a synthetic eye frame and
//! reading its aperture back, running a scenario script end to end, and
//! sampling the alertness curve of a sleep/wake schedule. Each binding is a
//! thin wrapper over a plain Rust function so the logic is testable
//! natively.

use wasm_bindgen::prelude::*;

use fatigue_core::alertness::alertness_curve;
use fatigue_core::harness::{simulate, AlertnessSetup, ScenarioFile, Simulation, TimelineReport};
use fatigue_core::synth::{render_frame, synthesize, Frame};
use fatigue_core::vision::estimate_aperture;

fn js_err(e: fatigue_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Grayscale frame expanded to RGBA bytes for an `ImageData`.
pub fn to_rgba(frame: &Frame) -> Vec<u8> {
    frame.pixels.iter().flat_map(|&p| [p, p, p, 255]).collect()
}

#[wasm_bindgen]
pub struct EyeFrame {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
    estimated: f64,
}

#[wasm_bindgen]
impl EyeFrame {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.rgba.clone()
    }

    /// Aperture recovered from the rendered pixels.
    pub fn estimated_aperture(&self) -> f64 {
        self.estimated
    }
}

pub fn eye_frame(aperture: f64, head_pitch: f64, noise_seed: u64) -> Result<EyeFrame, fatigue_core::Error> {
    let frame = render_frame(aperture, head_pitch, noise_seed)?;
    Ok(EyeFrame {
        width: frame.width,
        height: frame.height,
        estimated: estimate_aperture(&frame),
        rgba: to_rgba(&frame),
    })
}

#[wasm_bindgen(js_name = renderEye)]
pub fn render_eye(aperture: f64, head_pitch: f64, noise_seed: u64) -> Result<EyeFrame, JsValue> {
    eye_frame(aperture, head_pitch, noise_seed).map_err(js_err)
}

#[wasm_bindgen]
pub struct RunOutput {
    report: TimelineReport,
}

#[wasm_bindgen]
impl RunOutput {
    pub fn summary(&self) -> String {
        self.report.summary.to_string()
    }

    pub fn timeline_csv(&self) -> String {
        self.report.timeline_csv()
    }

    pub fn telemetry(&self) -> String {
        String::from_utf8_lossy(&self.report.telemetry_log).into_owned()
    }

    /// Fused-state severity per tick (0 awake .. 4 incapacitated).
    pub fn severities(&self) -> Vec<u8> {
        self.report.rows.iter().map(|r| r.fused_state.severity()).collect()
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.report.rows.iter().map(|r| r.speed_kmh).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.report.rows.iter().map(|r| r.time).collect()
    }
}

pub fn run_scenario_text(scenario_toml: &str, seed: u64) -> Result<TimelineReport, fatigue_core::Error> {
    let sim = Simulation::new(ScenarioFile::parse(scenario_toml)?);
    let streams = synthesize(&sim.scenario.script, seed)?;
    simulate(&sim, &streams)
}

#[wasm_bindgen(js_name = runScenario)]
pub fn run_scenario(scenario_toml: &str, seed: u64) -> Result<RunOutput, JsValue> {
    run_scenario_text(scenario_toml, seed)
        .map(|report| RunOutput { report })
        .map_err(js_err)
}

/// Flattened `(t, S, C, W, value)` rows.
pub fn alertness_rows(schedule_toml: &str, step: f64) -> Result<Vec<f64>, fatigue_core::Error> {
    let setup = AlertnessSetup::parse(schedule_toml)?;
    let curve = alertness_curve(&setup.schedule, &setup.params, setup.s_initial, step)?;
    Ok(curve
        .into_iter()
        .flat_map(|(t, s)| [t, s.homeostatic, s.circadian, s.inertia, s.value])
        .collect())
}

#[wasm_bindgen(js_name = alertnessCurve)]
pub fn alertness_curve_js(schedule_toml: &str, step: f64) -> Result<Vec<f64>, JsValue> {
    alertness_rows(schedule_toml, step).map_err(js_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eye_frame_round_trips_aperture() {
        let f = eye_frame(0.75, 0.0, 3).unwrap();
        assert_eq!(f.rgba.len(), 64 * 64 * 4);
        assert_eq!(f.estimated, 0.75);
        assert!(eye_frame(1.5, 0.0, 3).is_err());
    }

    #[test]
    fn scenario_text_runs() {
        let toml = "[[segment]]\nduration = 20.0\ncondition = \"awake\"\n";
        let r = run_scenario_text(toml, 1).unwrap();
        assert_eq!(r.rows.len(), 200);
        assert!(run_scenario_text("nonsense =", 1).is_err());
    }

    #[test]
    fn alertness_rows_are_flat_quintuples() {
        let toml = "[[interval]]\nstart = 0.0\nend = 8.0\nkind = \"sleep\"\n\
                    [[interval]]\nstart = 8.0\nend = 24.0\nkind = \"wake\"\n";
        let rows = alertness_rows(toml, 1.0).unwrap();
        assert_eq!(rows.len(), 25 * 5);
        for r in rows.chunks(5) {
            assert_eq!(r[4], r[1] + r[2] + r[3]);
        }
    }
}
