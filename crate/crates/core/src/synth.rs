//! Synthetic sensor streams for a scripted scenario.
//!
//! Every stream is a pure function of `(script, seed)`. Each stream draws
//! from its own ChaCha stream so adding samples to one never perturbs the
//! others.
//!
//! Frames are 64x64 grayscale with a fixed 16x16 eye box at rows 16..32,
//! cols 24..40. The topmost `round(aperture * 16)` eye-box rows are bright
//! (230 +/- 5), everything else is dark (40 +/- 5). Head pitch moves the eye
//! box by `round(pitch / 2)` rows. The sensor noise is a fixed per-pixel
//! pattern drawn once per run, so two frames with identical content are
//! identical.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scenario::{segment_index, DriverCondition, ScenarioScript, Segment};

pub const FRAME_WIDTH: usize = 64;
pub const FRAME_HEIGHT: usize = 64;
pub const EYE_TOP: usize = 16;
pub const EYE_ROWS: usize = 16;
pub const EYE_LEFT: usize = 24;
pub const EYE_COLS: usize = 16;
pub const BRIGHT_LEVEL: u8 = 230;
pub const DARK_LEVEL: u8 = 40;
pub const NOISE_AMPLITUDE: i16 = 5;

/// PPG pulse amplitude of a normally perfused driver.
const PPG_AMPLITUDE: f64 = 0.8;
const PPG_NOISE: f64 = 0.005;
const ACCEL_NOISE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub timestamp: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major grayscale intensities.
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn pixel(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelSample {
    pub timestamp: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl AccelSample {
    pub fn magnitude(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpgSample {
    pub timestamp: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PirEvent {
    pub timestamp: f64,
}

/// All four sensor streams for one scenario run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SensorBundle {
    pub frames: Vec<Frame>,
    pub accel: Vec<AccelSample>,
    pub ppg: Vec<PpgSample>,
    pub pir: Vec<PirEvent>,
}

/// Fixed-pattern sensor noise for one camera.
#[derive(Debug, Clone)]
pub struct NoisePattern(Vec<i16>);

impl NoisePattern {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        NoisePattern(
            (0..FRAME_WIDTH * FRAME_HEIGHT)
                .map(|_| rng.gen_range(-NOISE_AMPLITUDE..=NOISE_AMPLITUDE))
                .collect(),
        )
    }
}

/// Renders one eye-camera frame. The returned frame has timestamp 0.
pub fn render_frame(aperture: f64, head_pitch: f64, noise_seed: u64) -> Result<Frame> {
    render_with_noise(aperture, head_pitch, &NoisePattern::new(noise_seed))
}

pub fn render_with_noise(aperture: f64, head_pitch: f64, noise: &NoisePattern) -> Result<Frame> {
    if !(0.0..=1.0).contains(&aperture) {
        return Err(Error::Domain(format!("aperture {aperture} outside [0, 1]")));
    }
    if !head_pitch.is_finite() {
        return Err(Error::Domain("head pitch must be finite".into()));
    }
    let bright_rows = (aperture * EYE_ROWS as f64).round() as i64;
    let shift = (head_pitch / 2.0).round() as i64;
    let top = EYE_TOP as i64 + shift;
    let bright = top..top + bright_rows;

    let mut pixels = Vec::with_capacity(FRAME_WIDTH * FRAME_HEIGHT);
    for row in 0..FRAME_HEIGHT {
        let row_bright = bright.contains(&(row as i64));
        for col in 0..FRAME_WIDTH {
            let in_eye = row_bright && (EYE_LEFT..EYE_LEFT + EYE_COLS).contains(&col);
            let base = if in_eye { BRIGHT_LEVEL } else { DARK_LEVEL } as i16;
            let v = base + noise.0[row * FRAME_WIDTH + col];
            pixels.push(v.clamp(0, 255) as u8);
        }
    }
    Ok(Frame {
        timestamp: 0.0,
        width: FRAME_WIDTH,
        height: FRAME_HEIGHT,
        pixels,
    })
}

/// Eyelid behaviour of one condition.
#[derive(Debug, Clone, Copy)]
enum EyePattern {
    /// Open eyes, brief full closure at the end of each cycle.
    Blinking { period: (f64, f64), closed_s: f64 },
    /// Slow droop to closed, a long closure, quick reopen.
    Droop {
        period: (f64, f64),
        droop_s: f64,
        closed_frac: f64,
        reopen_s: f64,
    },
    /// Mostly closed with brief partial openings.
    Flutter {
        period: (f64, f64),
        open_s: f64,
        open_aperture: f64,
    },
    Closed,
}

#[derive(Debug, Clone, Copy)]
struct HeadPattern {
    baseline_deg: f64,
    sway: [(f64, f64); 2],
    /// (spacing range, depth, width) of triangular nods.
    nods: Option<((f64, f64), f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Profile {
    eye: EyePattern,
    head: HeadPattern,
    heart_rate: Option<f64>,
    pir: Option<(f64, f64)>,
}

fn jittered(rate_per_min: f64) -> (f64, f64) {
    let p = 60.0 / rate_per_min;
    (0.9 * p, 1.1 * p)
}

impl Profile {
    fn for_segment(seg: &Segment) -> Profile {
        let o = &seg.overrides;
        let mut p = match seg.condition {
            DriverCondition::Awake => Profile {
                eye: EyePattern::Blinking {
                    period: jittered(17.5),
                    closed_s: 0.2,
                },
                head: HeadPattern {
                    baseline_deg: 0.0,
                    sway: [(3.0, 3.0), (1.0, 7.3)],
                    nods: None,
                },
                heart_rate: Some(70.0),
                pir: Some((1.0, 5.0)),
            },
            DriverCondition::Drowsy => Profile {
                eye: EyePattern::Droop {
                    period: jittered(6.5),
                    droop_s: 1.5,
                    closed_frac: 0.4,
                    reopen_s: 0.3,
                },
                head: HeadPattern {
                    baseline_deg: -3.0,
                    sway: [(1.5, 5.0), (0.0, 1.0)],
                    nods: None,
                },
                heart_rate: Some(62.0),
                pir: Some((4.0, 8.0)),
            },
            DriverCondition::Sleepy => Profile {
                eye: EyePattern::Flutter {
                    period: (2.5, 3.5),
                    open_s: 0.8,
                    open_aperture: 0.75,
                },
                head: HeadPattern {
                    baseline_deg: -5.0,
                    sway: [(0.5, 6.0), (0.0, 1.0)],
                    nods: Some(((4.0, 7.0), 20.0, 1.0)),
                },
                heart_rate: Some(58.0),
                pir: Some((15.0, 30.0)),
            },
            DriverCondition::Asleep | DriverCondition::NoPulse => Profile {
                eye: EyePattern::Closed,
                head: HeadPattern {
                    baseline_deg: -6.0,
                    sway: [(0.0, 1.0), (0.0, 1.0)],
                    nods: None,
                },
                heart_rate: (seg.condition == DriverCondition::Asleep).then_some(55.0),
                pir: None,
            },
        };

        if let (Some(hr), Some(_)) = (o.heart_rate_bpm, p.heart_rate) {
            p.heart_rate = Some(hr);
        }
        if let Some(rate) = o.blink_rate_per_min {
            match &mut p.eye {
                EyePattern::Blinking { period, .. }
                | EyePattern::Droop { period, .. }
                | EyePattern::Flutter { period, .. } => *period = jittered(rate),
                EyePattern::Closed => {}
            }
        }
        if let Some(interval) = o.nod_interval_s {
            let (_, depth, width) = p.head.nods.unwrap_or(((0.0, 0.0), 20.0, 1.0));
            p.head.nods = Some(((interval, interval), depth, width));
        }
        if let Some(depth) = o.nod_amplitude_deg {
            if let Some(n) = &mut p.head.nods {
                n.1 = depth;
            }
        }
        if let Some(pitch) = o.head_pitch_deg {
            p.head.baseline_deg = pitch;
        }
        match o.pir_interval_s {
            Some(0.0) => p.pir = None,
            Some(m) => p.pir = Some((0.5 * m, 1.5 * m)),
            None => {}
        }
        p
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// One eyelid cycle, `start..start + len`.
#[derive(Debug, Clone, Copy)]
struct EyeCycle {
    start: f64,
    len: f64,
    pattern: EyePattern,
}

impl EyeCycle {
    fn aperture_at(&self, t: f64) -> f64 {
        let tau = t - self.start;
        match self.pattern {
            EyePattern::Blinking { closed_s, .. } => {
                if tau >= self.len - closed_s {
                    0.0
                } else {
                    1.0
                }
            }
            EyePattern::Droop {
                droop_s,
                closed_frac,
                reopen_s,
                ..
            } => {
                let closed_s = closed_frac * self.len;
                let open_s = (self.len - droop_s - closed_s - reopen_s).max(0.0);
                if tau < open_s {
                    1.0
                } else if tau < open_s + droop_s {
                    1.0 - (tau - open_s) / droop_s
                } else if tau < open_s + droop_s + closed_s {
                    0.0
                } else {
                    ((tau - open_s - droop_s - closed_s) / reopen_s).min(1.0)
                }
            }
            EyePattern::Flutter {
                open_s,
                open_aperture,
                ..
            } => {
                if tau < open_s {
                    open_aperture
                } else {
                    0.0
                }
            }
            EyePattern::Closed => 0.0,
        }
    }
}

fn eye_cycles(script: &ScenarioScript, profiles: &[Profile], rng: &mut ChaCha8Rng) -> Vec<EyeCycle> {
    let bounds = script.boundaries();
    let mut cycles = Vec::new();
    for (i, profile) in profiles.iter().enumerate() {
        let (start, end) = (bounds[i], bounds[i + 1]);
        let period = match profile.eye {
            EyePattern::Blinking { period, .. }
            | EyePattern::Droop { period, .. }
            | EyePattern::Flutter { period, .. } => period,
            EyePattern::Closed => {
                cycles.push(EyeCycle {
                    start,
                    len: end - start,
                    pattern: EyePattern::Closed,
                });
                continue;
            }
        };
        let mut t = start;
        while t < end {
            let len = uniform(rng, period);
            cycles.push(EyeCycle {
                start: t,
                len,
                pattern: profile.eye,
            });
            t += len;
        }
    }
    cycles
}

#[derive(Debug, Clone)]
struct HeadTrack {
    start: f64,
    pattern: HeadPattern,
    phases: [f64; 2],
    /// Centres of the nods in this segment.
    nods: Vec<f64>,
}

impl HeadTrack {
    fn pitch_at(&self, t: f64) -> f64 {
        let tau = t - self.start;
        let mut p = self.pattern.baseline_deg;
        for ((amp, period), phase) in self.pattern.sway.iter().zip(self.phases) {
            p += amp * (std::f64::consts::TAU * tau / period + phase).sin();
        }
        if let Some((_, depth, width)) = self.pattern.nods {
            let half = width / 2.0;
            // nods are sorted; only the nearest can overlap t
            let i = self.nods.partition_point(|&c| c < t);
            for &c in self.nods[i.saturating_sub(1)..].iter().take(2) {
                let d = (t - c).abs();
                if d < half {
                    p -= depth * (1.0 - d / half);
                }
            }
        }
        p
    }
}

fn head_tracks(script: &ScenarioScript, profiles: &[Profile], rng: &mut ChaCha8Rng) -> Vec<HeadTrack> {
    let bounds = script.boundaries();
    profiles
        .iter()
        .enumerate()
        .map(|(i, profile)| {
            let (start, end) = (bounds[i], bounds[i + 1]);
            let phases = [
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.0..std::f64::consts::TAU),
            ];
            let mut nods = Vec::new();
            if let Some((spacing, _, width)) = profile.head.nods {
                let mut c = start + width + uniform(rng, (0.0, spacing.0));
                while c + width / 2.0 < end {
                    nods.push(c);
                    c += uniform(rng, spacing);
                }
            }
            HeadTrack {
                start,
                pattern: profile.head,
                phases,
                nods,
            }
        })
        .collect()
}

fn sample_times(duration: f64, rate: f64) -> impl Iterator<Item = f64> {
    let n = (duration * rate).round() as u64;
    (0..n).map(move |k| k as f64 / rate)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generates all sensor streams for `script`.
pub fn synthesize(script: &ScenarioScript, seed: u64) -> Result<SensorBundle> {
    script.validate()?;
    let total = script.total_duration();
    let bounds = script.boundaries();
    let profiles: Vec<Profile> = script.segments.iter().map(Profile::for_segment).collect();

    let mut eye_rng = stream_rng(seed, 1);
    let mut head_rng = stream_rng(seed, 2);
    let mut accel_rng = stream_rng(seed, 3);
    let mut ppg_rng = stream_rng(seed, 4);
    let mut pir_rng = stream_rng(seed, 5);
    let mut cam_rng = stream_rng(seed, 6);

    let cycles = eye_cycles(script, &profiles, &mut eye_rng);
    let heads = head_tracks(script, &profiles, &mut head_rng);
    let noise = NoisePattern::new(cam_rng.gen());

    let head_pitch = |t: f64| heads[segment_index(&bounds, t)].pitch_at(t);

    let mut frames = Vec::new();
    let mut ci = 0;
    for t in sample_times(total, script.rates.frame_hz) {
        while ci + 1 < cycles.len() && cycles[ci + 1].start <= t {
            ci += 1;
        }
        let aperture = cycles[ci].aperture_at(t).clamp(0.0, 1.0);
        let mut frame = render_with_noise(aperture, head_pitch(t), &noise)?;
        frame.timestamp = t;
        frames.push(frame);
    }

    let accel = sample_times(total, script.rates.accel_hz)
        .map(|t| {
            let pitch = head_pitch(t).to_radians();
            let mut n = || accel_rng.gen_range(-ACCEL_NOISE..ACCEL_NOISE);
            AccelSample {
                timestamp: t,
                ax: pitch.sin() + n(),
                ay: n(),
                az: pitch.cos() + n(),
            }
        })
        .collect();

    let dt = 1.0 / script.rates.ppg_hz;
    let mut phase: f64 = ppg_rng.gen_range(0.0..1.0);
    let ppg = sample_times(total, script.rates.ppg_hz)
        .map(|t| {
            let hr = profiles[segment_index(&bounds, t)].heart_rate;
            let noise = ppg_rng.gen_range(-PPG_NOISE..PPG_NOISE);
            let pulse = match hr {
                Some(bpm) => {
                    let a = PPG_AMPLITUDE * (std::f64::consts::TAU * phase).cos();
                    phase = (phase + bpm / 60.0 * dt).fract();
                    a
                }
                None => 0.0,
            };
            PpgSample {
                timestamp: t,
                amplitude: (pulse + noise).clamp(-1.0, 1.0),
            }
        })
        .collect();

    let mut pir = Vec::new();
    for (i, profile) in profiles.iter().enumerate() {
        let Some(spacing) = profile.pir else { continue };
        let (start, end) = (bounds[i], bounds[i + 1]);
        let mut t = start + uniform(&mut pir_rng, (0.0, spacing.1));
        while t < end {
            let ts = (t * 1000.0).round() / 1000.0;
            let later = pir.last().is_none_or(|e: &PirEvent| ts > e.timestamp);
            if later && ts < total {
                pir.push(PirEvent { timestamp: ts });
            }
            t += uniform(&mut pir_rng, spacing);
        }
    }

    Ok(SensorBundle {
        frames,
        accel,
        ppg,
        pir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{DriverCondition::*, SegmentOverrides};

    fn eye_row_means(f: &Frame) -> Vec<f64> {
        (EYE_TOP..EYE_TOP + EYE_ROWS)
            .map(|r| {
                (EYE_LEFT..EYE_LEFT + EYE_COLS)
                    .map(|c| f.pixel(r, c) as f64)
                    .sum::<f64>()
                    / EYE_COLS as f64
            })
            .collect()
    }

    #[test]
    fn sixty_seconds_awake_is_six_hundred_frames() {
        let b = synthesize(&ScenarioScript::from_pairs(&[(60.0, Awake)]), 1).unwrap();
        assert_eq!(b.frames.len(), 600);
        assert_eq!(b.accel.len(), 3000);
        assert_eq!(b.ppg.len(), 6000);
    }

    #[test]
    fn render_open_closed_and_half() {
        let open = render_frame(1.0, 0.0, 3).unwrap();
        assert!(eye_row_means(&open).iter().all(|&m| m > 128.0));
        let closed = render_frame(0.0, 0.0, 3).unwrap();
        assert!(eye_row_means(&closed).iter().all(|&m| m < 128.0));
        let half = render_frame(0.5, 0.0, 3).unwrap();
        let bright = eye_row_means(&half).iter().filter(|&&m| m > 128.0).count();
        assert_eq!(bright, 8);
        // topmost rows are the bright ones
        assert!(eye_row_means(&half)[..8].iter().all(|&m| m > 128.0));
    }

    #[test]
    fn render_intensities_stay_within_noise_band() {
        let f = render_frame(0.5, 4.0, 99).unwrap();
        for &p in &f.pixels {
            assert!((35..=45).contains(&p) || (225..=235).contains(&p), "{p}");
        }
    }

    #[test]
    fn head_pitch_shifts_eye_box() {
        let f = render_frame(1.0, 6.0, 0).unwrap();
        // shifted down by 3 rows
        assert!(f.pixel(EYE_TOP + 2, EYE_LEFT) < 128);
        assert!(f.pixel(EYE_TOP + 3, EYE_LEFT) > 128);
        assert!(f.pixel(EYE_TOP + 18, EYE_LEFT) > 128);
        // clipped when shifted off the frame
        let off = render_frame(1.0, 200.0, 0).unwrap();
        assert!(off.pixels.iter().all(|&p| p < 128));
    }

    #[test]
    fn render_rejects_aperture_out_of_range() {
        assert!(matches!(render_frame(1.2, 0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(render_frame(-0.1, 0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(render_frame(f64::NAN, 0.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn no_pulse_ppg_is_flat() {
        let s = ScenarioScript::from_pairs(&[(20.0, Awake), (40.0, NoPulse)]);
        let b = synthesize(&s, 5).unwrap();
        let max = b
            .ppg
            .iter()
            .filter(|p| p.timestamp >= 20.0)
            .map(|p| p.amplitude.abs())
            .fold(0.0, f64::max);
        assert!(max <= 0.01, "max |amplitude| {max}");
    }

    #[test]
    fn same_seed_is_identical_and_seeds_differ() {
        let s = ScenarioScript::from_pairs(&[(15.0, Awake), (15.0, Sleepy)]);
        assert_eq!(synthesize(&s, 11).unwrap(), synthesize(&s, 11).unwrap());
        assert_ne!(synthesize(&s, 11).unwrap(), synthesize(&s, 12).unwrap());
    }

    #[test]
    fn streams_are_aligned_and_increasing() {
        let s = ScenarioScript::from_pairs(&[(12.5, Drowsy), (7.5, Sleepy)]);
        let b = synthesize(&s, 2).unwrap();
        let total = s.total_duration();
        let last = [
            (b.frames.last().unwrap().timestamp, 0.1),
            (b.accel.last().unwrap().timestamp, 0.02),
            (b.ppg.last().unwrap().timestamp, 0.01),
        ];
        for (ts, period) in last {
            assert!(total - ts <= period + 1e-9);
        }
        assert!(b.frames.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        assert!(b.accel.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        assert!(b.pir.windows(2).all(|w| w[0].timestamp < w[1].timestamp));
        for a in &b.accel {
            assert!((0.0..=8.0).contains(&a.magnitude()));
        }
    }

    #[test]
    fn awake_pir_gaps_are_at_most_five_seconds() {
        let b = synthesize(&ScenarioScript::from_pairs(&[(300.0, Awake)]), 8).unwrap();
        assert!(b.pir[0].timestamp <= 5.0);
        assert!(b.pir.windows(2).all(|w| w[1].timestamp - w[0].timestamp <= 5.0 + 1e-3));
    }

    #[test]
    fn asleep_has_no_pir_and_pir_can_be_disabled() {
        let b = synthesize(&ScenarioScript::from_pairs(&[(60.0, Asleep)]), 8).unwrap();
        assert!(b.pir.is_empty());
        let quiet = Segment::new(60.0, Awake).with_overrides(SegmentOverrides {
            pir_interval_s: Some(0.0),
            ..Default::default()
        });
        let b = synthesize(&ScenarioScript::new(vec![quiet]), 8).unwrap();
        assert!(b.pir.is_empty());
    }
}
