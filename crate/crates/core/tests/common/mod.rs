#![allow(dead_code)]

use std::thread;

use fatigue_core::harness::{simulate, ScenarioFile, Simulation, TimelineReport};
use fatigue_core::scenario::{DriverCondition, ScenarioScript};
use fatigue_core::synth::synthesize;
use fatigue_core::telemetry::{HrCode, StateCode, StatusMessage};
use rand::Rng;

pub fn script(pairs: &[(f64, DriverCondition)]) -> ScenarioScript {
    ScenarioScript::from_pairs(pairs)
}

pub fn run_script(script: &ScenarioScript, seed: u64) -> TimelineReport {
    run_file(&ScenarioFile::new(script.clone()), seed)
}

pub fn run_file(file: &ScenarioFile, seed: u64) -> TimelineReport {
    let sim = Simulation::new(file.clone());
    let streams = synthesize(&sim.scenario.script, seed).expect("synthesize");
    simulate(&sim, &streams).expect("simulate")
}

/// Maps `f` over `items` on scoped threads, a bounded batch at a time.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let width = thread::available_parallelism().map_or(4, |n| n.get()).clamp(1, 8);
    let mut out = Vec::with_capacity(items.len());
    for chunk in items.chunks(width) {
        let f = &f;
        let part: Vec<R> = thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|x| s.spawn(move || f(x))).collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        out.extend(part);
    }
    out
}

/// Bit-at-a-time CRC-16/CCITT-FALSE, kept separate from the table-driven codec.
pub fn crc16_bitwise(data: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in data {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ 0x1021 } else { crc << 1 };
        }
    }
    crc
}

pub fn random_message(rng: &mut impl Rng) -> StatusMessage {
    StatusMessage {
        seq: rng.gen(),
        timestamp: rng.gen(),
        state: StateCode::ALL[rng.gen_range(0..StateCode::ALL.len())],
        hr: HrCode::ALL[rng.gen_range(0..HrCode::ALL.len())],
        bpm: rng.gen_bool(0.8).then(|| rng.gen()),
        speed: rng.gen(),
    }
}
