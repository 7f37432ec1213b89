//! Status-message line codec and the control-room receiver.
//!
//! Wire format, one ASCII line per message:
//!
//! ```text
//! FTG1,<seq>,<timestamp>,<state>,<hr>,<bpm>,<speed>,<CRC>\n
//! ```
//!
//! `CRC` is four uppercase hex digits of CRC-16/CCITT-FALSE (poly 0x1021,
//! init 0xFFFF, no reflection, no final XOR) over every byte from the `F` of
//! the magic through the comma before the CRC. Decimal fields carry no
//! padding or sign, except `bpm`, which is `-1` when unknown. `speed` is in
//! units of 0.1 km/h.
//!
//! The receiver appends each accepted line verbatim to its log and answers
//! with `ACK,<seq>\n`. Rejected lines are counted, never logged. Duplicate
//! sequence numbers are accepted; deduplication is left to consumers.

use std::fmt;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::escalation::Report;
use crate::fusion::DriverState;
use crate::heart::{Bpm, Vitality};

pub const MAGIC: &[u8] = b"FTG1,";

const CRC_TABLE: [u16; 256] = {
    let mut table = [0u16; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u16) << 8;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & 0x8000 != 0 { (crc << 1) ^ 0x1021 } else { crc << 1 };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
};

/// CRC-16/CCITT-FALSE.
pub fn crc16(data: &[u8]) -> u16 {
    data.iter().fold(0xFFFF, |crc, &b| {
        (crc << 8) ^ CRC_TABLE[((crc >> 8) as u8 ^ b) as usize]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateCode {
    Aw,
    Dr,
    Sl,
    As,
    In,
}

impl StateCode {
    pub const ALL: [StateCode; 5] = [StateCode::Aw, StateCode::Dr, StateCode::Sl, StateCode::As, StateCode::In];

    pub fn as_str(self) -> &'static str {
        match self {
            StateCode::Aw => "AW",
            StateCode::Dr => "DR",
            StateCode::Sl => "SL",
            StateCode::As => "AS",
            StateCode::In => "IN",
        }
    }
}

impl From<DriverState> for StateCode {
    fn from(s: DriverState) -> Self {
        match s {
            DriverState::Awake => StateCode::Aw,
            DriverState::Drowsy => StateCode::Dr,
            DriverState::Sleepy => StateCode::Sl,
            DriverState::Asleep => StateCode::As,
            DriverState::Incapacitated => StateCode::In,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HrCode {
    Ok,
    Br,
    Ta,
    Np,
    Na,
}

impl HrCode {
    pub const ALL: [HrCode; 5] = [HrCode::Ok, HrCode::Br, HrCode::Ta, HrCode::Np, HrCode::Na];

    pub fn as_str(self) -> &'static str {
        match self {
            HrCode::Ok => "OK",
            HrCode::Br => "BR",
            HrCode::Ta => "TA",
            HrCode::Np => "NP",
            HrCode::Na => "NA",
        }
    }
}

impl From<Vitality> for HrCode {
    fn from(v: Vitality) -> Self {
        match v {
            Vitality::Normal => HrCode::Ok,
            Vitality::Bradycardia => HrCode::Br,
            Vitality::Tachycardia => HrCode::Ta,
            Vitality::NoPulse => HrCode::Np,
            Vitality::Unknown => HrCode::Na,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StatusMessage {
    pub seq: u32,
    /// Unix seconds.
    pub timestamp: u64,
    pub state: StateCode,
    pub hr: HrCode,
    pub bpm: Option<u16>,
    /// Tenths of km/h.
    pub speed: u32,
}

impl StatusMessage {
    pub fn from_report(seq: u32, timestamp: u64, report: &Report, speed_kmh: f64) -> Self {
        StatusMessage {
            seq,
            timestamp,
            state: report.driver_state.into(),
            hr: report.vitality.into(),
            bpm: match report.bpm {
                Bpm::Rate(r) => Some(r.round().clamp(0.0, u16::MAX as f64) as u16),
                Bpm::Unknown => None,
            },
            speed: (speed_kmh * 10.0).round().max(0.0) as u32,
        }
    }

    /// The CRC-covered part of the line, up to and including the final comma.
    fn body(&self) -> String {
        let bpm = self.bpm.map_or_else(|| "-1".to_string(), |b| b.to_string());
        format!(
            "FTG1,{},{},{},{},{},{},",
            self.seq,
            self.timestamp,
            self.state.as_str(),
            self.hr.as_str(),
            bpm,
            self.speed
        )
    }
}

pub fn encode(msg: &StatusMessage) -> Vec<u8> {
    let mut line = msg.body().into_bytes();
    let crc = crc16(&line);
    line.extend_from_slice(format!("{crc:04X}\n").as_bytes());
    line
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("format error: {0}")]
    Format(String),
    #[error("integrity error: crc {found:04X} does not match computed {computed:04X}")]
    Integrity { found: u16, computed: u16 },
}

fn format_err(msg: impl Into<String>) -> DecodeError {
    DecodeError::Format(msg.into())
}

/// Unsigned decimal without sign or leading zeros.
fn parse_decimal<T: std::str::FromStr>(field: &[u8], name: &str) -> Result<T, DecodeError> {
    let canonical = !field.is_empty()
        && field.iter().all(u8::is_ascii_digit)
        && (field.len() == 1 || field[0] != b'0');
    if !canonical {
        return Err(format_err(format!("bad {name} field")));
    }
    std::str::from_utf8(field)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format_err(format!("{name} out of range")))
}

fn parse_code<C: Copy>(field: &[u8], all: &[C], as_str: fn(C) -> &'static str, name: &str) -> Result<C, DecodeError> {
    all.iter()
        .copied()
        .find(|&c| as_str(c).as_bytes() == field)
        .ok_or_else(|| format_err(format!("unknown {name} code")))
}

/// Parses and verifies one line. A single trailing `\n` is optional.
///
/// Framing (magic, CRC digits) is checked first, then the CRC, then the
/// fields, so any corruption inside the CRC-covered payload surfaces as an
/// integrity error.
pub fn decode(line: &[u8]) -> Result<StatusMessage, DecodeError> {
    let line = line.strip_suffix(b"\n").unwrap_or(line);
    if !line.starts_with(MAGIC) {
        return Err(format_err("bad magic"));
    }
    if line.len() < MAGIC.len() + 4 {
        return Err(format_err("line too short"));
    }
    let (body, crc_field) = line.split_at(line.len() - 4);
    if !crc_field.iter().all(|b| matches!(b, b'0'..=b'9' | b'A'..=b'F')) {
        return Err(format_err("crc field is not 4 uppercase hex digits"));
    }
    let found = u16::from_str_radix(std::str::from_utf8(crc_field).unwrap_or("0"), 16)
        .map_err(|_| format_err("bad crc field"))?;
    let computed = crc16(body);
    if found != computed {
        return Err(DecodeError::Integrity { found, computed });
    }

    let Some(fields) = body[MAGIC.len()..].strip_suffix(b",") else {
        return Err(format_err("missing separator before crc"));
    };
    let fields: Vec<&[u8]> = fields.split(|&b| b == b',').collect();
    let [seq, ts, state, hr, bpm, speed] = fields.as_slice() else {
        return Err(format_err(format!("expected 6 fields, found {}", fields.len())));
    };
    Ok(StatusMessage {
        seq: parse_decimal(seq, "seq")?,
        timestamp: parse_decimal(ts, "timestamp")?,
        state: parse_code(state, &StateCode::ALL, StateCode::as_str, "state")?,
        hr: parse_code(hr, &HrCode::ALL, HrCode::as_str, "hr")?,
        bpm: if *bpm == b"-1" {
            None
        } else {
            Some(parse_decimal(bpm, "bpm")?)
        },
        speed: parse_decimal(speed, "speed")?,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RejectCounts {
    pub format: usize,
    pub integrity: usize,
}

impl RejectCounts {
    pub fn total(&self) -> usize {
        self.format + self.integrity
    }
}

impl fmt::Display for RejectCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "format={} integrity={}", self.format, self.integrity)
    }
}

pub fn ack_line(seq: u32) -> String {
    format!("ACK,{seq}\n")
}

/// Control-room endpoint: validates lines, appends accepted ones to the log
/// and acknowledges them.
#[derive(Debug)]
pub struct ControlRoom<L: Write, A: Write> {
    log: L,
    acks: A,
    accepted: Vec<StatusMessage>,
    rejects: RejectCounts,
}

impl<L: Write, A: Write> ControlRoom<L, A> {
    pub fn new(log: L, acks: A) -> Self {
        ControlRoom {
            log,
            acks,
            accepted: Vec::new(),
            rejects: RejectCounts::default(),
        }
    }

    /// Handles one line. Returns the decode outcome; only log or ack write
    /// failures are errors.
    pub fn receive_line(&mut self, line: &[u8]) -> io::Result<Result<StatusMessage, DecodeError>> {
        match decode(line) {
            Ok(msg) => {
                // log the canonical line; for a valid input it equals the input
                self.log.write_all(&encode(&msg))?;
                self.log.flush()?;
                self.acks.write_all(ack_line(msg.seq).as_bytes())?;
                self.acks.flush()?;
                self.accepted.push(msg);
                Ok(Ok(msg))
            }
            Err(e) => {
                match e {
                    DecodeError::Format(_) => self.rejects.format += 1,
                    DecodeError::Integrity { .. } => self.rejects.integrity += 1,
                }
                Ok(Err(e))
            }
        }
    }

    pub fn receive_stream<R: BufRead>(&mut self, mut input: R) -> io::Result<()> {
        let mut line = Vec::new();
        loop {
            line.clear();
            if input.read_until(b'\n', &mut line)? == 0 {
                return Ok(());
            }
            // rejects are tallied by the receiver
            let _ = self.receive_line(&line)?;
        }
    }

    pub fn accepted(&self) -> &[StatusMessage] {
        &self.accepted
    }

    pub fn rejects(&self) -> RejectCounts {
        self.rejects
    }

    pub fn into_parts(self) -> (L, A, Vec<StatusMessage>, RejectCounts) {
        (self.log, self.acks, self.accepted, self.rejects)
    }
}

/// Runs a line stream through a fresh receiver.
pub fn receive_log<R: BufRead, L: Write, A: Write>(
    input: R,
    log: L,
    acks: A,
) -> io::Result<(Vec<StatusMessage>, RejectCounts)> {
    let mut room = ControlRoom::new(log, acks);
    room.receive_stream(input)?;
    let (_, _, accepted, rejects) = room.into_parts();
    Ok((accepted, rejects))
}

/// Reads a receiver log back into messages.
pub fn read_log<R: BufRead>(input: R) -> io::Result<Result<Vec<StatusMessage>, DecodeError>> {
    let mut out = Vec::new();
    for line in input.split(b'\n') {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        match decode(&line) {
            Ok(m) => out.push(m),
            Err(e) => return Ok(Err(e)),
        }
    }
    Ok(Ok(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> StatusMessage {
        StatusMessage {
            seq: 1,
            timestamp: 1_700_000_000,
            state: StateCode::As,
            hr: HrCode::Np,
            bpm: None,
            speed: 0,
        }
    }

    #[test]
    fn crc_check_value() {
        assert_eq!(crc16(b"123456789"), 0x29B1);
        assert_eq!(crc16(b""), 0xFFFF);
    }

    #[test]
    fn encode_golden() {
        assert_eq!(encode(&golden()), b"FTG1,1,1700000000,AS,NP,-1,0,6AF6\n");
    }

    #[test]
    fn seq_change_is_local() {
        let a = encode(&golden());
        let b = encode(&StatusMessage { seq: 7, ..golden() });
        let fa: Vec<&[u8]> = a.split(|&c| c == b',').collect();
        let fb: Vec<&[u8]> = b.split(|&c| c == b',').collect();
        let differing: Vec<usize> = (0..fa.len()).filter(|&i| fa[i] != fb[i]).collect();
        assert_eq!(differing, vec![1, 7]);
    }

    #[test]
    fn decode_errors() {
        assert!(matches!(decode(b"XXX1,1,2,AS,NP,-1,0,0000\n"), Err(DecodeError::Format(_))));
        assert!(matches!(decode(b""), Err(DecodeError::Format(_))));
        assert!(matches!(decode(b"FTG1,"), Err(DecodeError::Format(_))));
        let mut bad = encode(&golden());
        bad[8] = b'9';
        assert!(matches!(decode(&bad), Err(DecodeError::Integrity { .. })));
        // lowercase crc digits are not canonical
        assert!(matches!(decode(b"FTG1,1,1700000000,AS,NP,-1,0,6af6"), Err(DecodeError::Format(_))));
    }

    #[test]
    fn field_errors_behind_valid_crc() {
        let framed = |body: &str| {
            let mut v = body.as_bytes().to_vec();
            v.extend_from_slice(format!("{:04X}\n", crc16(body.as_bytes())).as_bytes());
            v
        };
        for body in [
            "FTG1,1,2,AS,NP,-1,",
            "FTG1,1,2,AS,NP,-1,0,9,",
            "FTG1,01,2,AS,NP,-1,0,",
            "FTG1,1,2,ZZ,NP,-1,0,",
            "FTG1,1,2,AS,XX,-1,0,",
            "FTG1,1,2,AS,NP,-2,0,",
            "FTG1,4294967296,2,AS,NP,-1,0,",
            "FTG1,1,2,AS,NP,-1,+5,",
        ] {
            assert!(matches!(decode(&framed(body)), Err(DecodeError::Format(_))), "{body}");
        }
        assert!(decode(&framed("FTG1,0,0,AW,OK,72,1000,")).is_ok());
    }

    #[test]
    fn receiver_examples() {
        let (acc, rej) = receive_log(&b""[..], Vec::new(), Vec::new()).unwrap();
        assert!(acc.is_empty() && rej.total() == 0);

        let mut input = Vec::new();
        for seq in [1, 2, 2] {
            input.extend(encode(&StatusMessage { seq, ..golden() }));
        }
        let mut bad = encode(&StatusMessage { seq: 3, ..golden() });
        bad[10] ^= 0x01;
        assert_ne!(crc16(&bad[..bad.len() - 5]), crc16(&encode(&StatusMessage { seq: 3, ..golden() })[..bad.len() - 5]));
        input.extend(&bad);

        let mut room = ControlRoom::new(Vec::new(), Vec::new());
        room.receive_stream(&input[..]).unwrap();
        let (log, acks, accepted, rejects) = room.into_parts();
        assert_eq!(accepted.iter().map(|m| m.seq).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert_eq!(rejects, RejectCounts { format: 0, integrity: 1 });
        assert_eq!(acks, b"ACK,1\nACK,2\nACK,2\n");
        assert_eq!(read_log(&log[..]).unwrap().unwrap(), accepted);
    }
}
