//! Deterministic simulator for camera, accelerometer, PIR and pulse based
//! train-driver fatigue detection with automatic alarm escalation, train
//! braking and a checksummed control-room telemetry link.
//!
//! The pipeline, one module per stage:
//!
//! - [`synth`] renders synthetic sensor streams from a [`scenario`] script;
//! - [`vision`], [`motion`] and [`heart`] turn raw samples into evidence;
//! - [`fusion`] debounces evidence into a [`fusion::DriverState`];
//! - [`escalation`] sounds the alarm, brakes the train and checks vitality;
//! - [`telemetry`] frames status reports for the control room;
//! - [`alertness`] predicts alertness from the sleep/wake history;
//! - [`harness`] runs the fixed-tick loop and writes the timeline.

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alertness;
pub mod bundle;
pub mod error;
pub mod escalation;
pub mod fusion;
pub mod harness;
pub mod heart;
pub mod motion;
pub mod scenario;
pub mod synth;
pub mod telemetry;
pub mod vision;

pub use error::{Error, Result};
