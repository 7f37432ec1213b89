use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fatigue_core::alertness::alertness_curve;
use fatigue_core::harness::{self, AlertnessSetup, ReplayConfig, RunConfig, DEFAULT_TICK};
use fatigue_core::telemetry::receive_log;
use fatigue_core::Error;

#[derive(Parser)]
#[command(name = "fatigue-sim", version, about = "Train-driver fatigue detection simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a scenario's sensor streams and run the detection loop.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Sleep/wake schedule for the alertness column.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TICK)]
        tick: f64,
        /// Also write the synthesized streams to OUT/bundle for replay.
        #[arg(long)]
        record: bool,
    },
    /// Run a recorded sensor bundle through the detection loop.
    Replay {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TICK)]
        tick: f64,
    },
    /// Recompute a run's metrics and check them against its summary.
    Report {
        #[arg(long)]
        timeline: PathBuf,
        /// Defaults to summary.txt next to the timeline.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Emit the predicted alertness curve of a schedule as CSV.
    Alertness {
        #[arg(long)]
        schedule: PathBuf,
        /// Sampling step in hours.
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate, log and acknowledge a stream of status lines.
    Receive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        acks: PathBuf,
    },
}

enum Outcome {
    Ok,
    Mismatch,
}

fn execute(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Run {
            scenario,
            seed,
            out,
            schedule,
            tick,
            record,
        } => {
            let report = harness::run(&RunConfig {
                scenario,
                seed,
                tick,
                out_dir: out,
                schedule,
                record_bundle: record,
            })?;
            print!("{}", report.summary);
        }
        Command::Replay {
            bundle,
            out,
            schedule,
            tick,
        } => {
            let report = harness::replay(&ReplayConfig {
                bundle,
                out_dir: out,
                tick,
                schedule,
            })?;
            print!("{}", report.summary);
        }
        Command::Report { timeline, summary } => {
            let check = harness::report(&timeline, summary.as_deref())?;
            print!("{}", check.render());
            if !check.is_consistent() {
                return Ok(Outcome::Mismatch);
            }
        }
        Command::Alertness { schedule, step, out } => {
            let setup = AlertnessSetup::load(&schedule)?;
            let curve = alertness_curve(&setup.schedule, &setup.params, setup.s_initial, step)
                .map_err(|e| Error::Config(e.to_string()))?;
            let mut sink: Box<dyn Write> = match out {
                Some(p) => Box::new(BufWriter::new(File::create(p)?)),
                None => Box::new(io::stdout().lock()),
            };
            writeln!(sink, "t,S,C,W,value")?;
            for (t, s) in curve {
                writeln!(
                    sink,
                    "{t:.4},{:.9},{:.9},{:.9},{:.9}",
                    s.homeostatic, s.circadian, s.inertia, s.value
                )?;
            }
            sink.flush()?;
        }
        Command::Receive { input, log, acks } => {
            let src = BufReader::new(File::open(&input)?);
            let mut log_file = BufWriter::new(File::create(log)?);
            let mut ack_file = BufWriter::new(File::create(acks)?);
            let (accepted, rejects) = receive_log(src, &mut log_file, &mut ack_file)?;
            log_file.flush()?;
            ack_file.flush()?;
            println!("accepted: {}", accepted.len());
            println!("rejected: {rejects}");
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

