//! Line-oriented text formats for schedules and state dumps.
//!
//! A schedule file holds one `device C K epsilon omega idle_rate` header,
//! then one line per op:
//!
//! ```text
//! open <channel> <internal> <duration>
//! phase <cavity> <internal|*> <phi>
//! pipulse <cavity> <from> <to>
//! ```
//!
//! Lines whose first non-blank character is `#` are comments. The serializer
//! records the compiler's target weights in a `# target-weights ...` comment
//! so that parsing a serialized schedule restores the full value; foreign
//! comments are ignored. Floats are written with 17 significant digits and
//! round-trip bit-exactly.
//!
//! A state dump holds one `s i re im` line per stored amplitude, sorted by
//! `(s, i)`.

use std::fmt::Write as _;
use std::str::SplitWhitespace;

use num_complex::Complex64;

use crate::compiler::{Device, PhaseTarget, PrimitiveOp, Schedule, Weights};
use crate::error::{Error, Result};
use crate::statevec::{BasisLabel, StateVector};
use crate::twostate::ChannelParams;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a schedule in the text format.
pub fn serialize_schedule(schedule: &Schedule) -> String {
    let device = schedule.device();
    let params = device.params();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "device {} {} {} {} {}",
        device.cavities(),
        device.internals(),
        fmt_f64(params.epsilon()),
        fmt_f64(params.omega()),
        fmt_f64(device.idle_rate()),
    );
    if let Some(weights) = schedule.target_weights() {
        let _ = writeln!(out, "# target-weights {weights}");
    }
    for op in schedule.ops() {
        match *op {
            PrimitiveOp::OpenChannel {
                channel,
                selective_internal,
                duration,
            } => {
                let _ = writeln!(out, "open {channel} {selective_internal} {}", fmt_f64(duration));
            }
            PrimitiveOp::PhaseShift { cavity, target, phi } => {
                let target = match target {
                    PhaseTarget::All => "*".to_string(),
                    PhaseTarget::Internal(s) => s.to_string(),
                };
                let _ = writeln!(out, "phase {cavity} {target} {}", fmt_f64(phi));
            }
            PrimitiveOp::PiPulse {
                cavity,
                from_internal,
                to_internal,
            } => {
                let _ = writeln!(out, "pipulse {cavity} {from_internal} {to_internal}");
            }
        }
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn next_token<'a>(tokens: &mut SplitWhitespace<'a>, line: usize, what: &str) -> Result<&'a str> {
    tokens.next().ok_or_else(|| parse_err(line, format!("missing {what}")))
}

fn parse_field<T: std::str::FromStr>(
    tokens: &mut SplitWhitespace<'_>,
    line: usize,
    what: &str,
) -> Result<T> {
    let token = next_token(tokens, line, what)?;
    token
        .parse::<T>()
        .map_err(|_| parse_err(line, format!("bad {what} {token:?}")))
}

fn expect_end(tokens: &mut SplitWhitespace<'_>, line: usize) -> Result<()> {
    match tokens.next() {
        None => Ok(()),
        Some(extra) => Err(parse_err(line, format!("unexpected trailing token {extra:?}"))),
    }
}

/// Parses the text format back into a validated schedule.
///
/// Syntax errors carry the 1-based line number; op lines violating schedule
/// invariants (bad indices, nonpositive durations, angles outside
/// `(-pi, pi]`, conflicting channel types) are rejected as well.
pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut device: Option<Device> = None;
    let mut target_weights: Option<Weights> = None;
    let mut ops: Vec<PrimitiveOp> = Vec::new();
    let mut last_line = 0;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(spec) = comment.trim().strip_prefix("target-weights") {
                if let Ok(weights) = spec.trim().parse::<Weights>() {
                    target_weights = Some(weights);
                }
            }
            continue;
        }

        let mut tokens = trimmed.split_whitespace();
        let keyword = next_token(&mut tokens, line, "keyword")?;
        match keyword {
            "device" => {
                if device.is_some() {
                    return Err(parse_err(line, "duplicate device header"));
                }
                let cavities: usize = parse_field(&mut tokens, line, "cavity count")?;
                let internals: usize = parse_field(&mut tokens, line, "internal-state count")?;
                let epsilon: f64 = parse_field(&mut tokens, line, "epsilon")?;
                let omega: f64 = parse_field(&mut tokens, line, "omega")?;
                let idle_rate: f64 = parse_field(&mut tokens, line, "idle rate")?;
                expect_end(&mut tokens, line)?;
                let params = ChannelParams::new(epsilon, omega)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                device = Some(
                    Device::new(cavities, internals, params, idle_rate)
                        .map_err(|e| parse_err(line, e.to_string()))?,
                );
            }
            "open" | "phase" | "pipulse" => {
                let Some(device) = device else {
                    return Err(parse_err(line, "op before device header"));
                };
                let op = match keyword {
                    "open" => PrimitiveOp::OpenChannel {
                        channel: parse_field(&mut tokens, line, "channel index")?,
                        selective_internal: parse_field(&mut tokens, line, "internal state")?,
                        duration: parse_field(&mut tokens, line, "duration")?,
                    },
                    "phase" => {
                        let cavity = parse_field(&mut tokens, line, "cavity index")?;
                        let token = next_token(&mut tokens, line, "internal state or *")?;
                        let target = if token == "*" {
                            PhaseTarget::All
                        } else {
                            PhaseTarget::Internal(token.parse::<usize>().map_err(|_| {
                                parse_err(line, format!("bad internal state {token:?}"))
                            })?)
                        };
                        PrimitiveOp::PhaseShift {
                            cavity,
                            target,
                            phi: parse_field(&mut tokens, line, "angle")?,
                        }
                    }
                    _ => PrimitiveOp::PiPulse {
                        cavity: parse_field(&mut tokens, line, "cavity index")?,
                        from_internal: parse_field(&mut tokens, line, "source internal state")?,
                        to_internal: parse_field(&mut tokens, line, "target internal state")?,
                    },
                };
                expect_end(&mut tokens, line)?;
                op.validate(&device)
                    .map_err(|e| parse_err(line, e.to_string()))?;
                ops.push(op);
            }
            other => {
                return Err(parse_err(line, format!("unknown keyword {other:?}")));
            }
        }
    }

    let device = device.ok_or_else(|| parse_err(last_line.max(1), "missing device header"))?;
    Schedule::new(device, ops, target_weights)
}

/// Renders a state dump, one `s i re im` line per stored amplitude.
pub fn serialize_state(state: &StateVector) -> String {
    let mut out = String::new();
    for (label, amp) in state.amplitudes() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            label.internal,
            label.cavity,
            fmt_f64(amp.re),
            fmt_f64(amp.im)
        );
    }
    out
}

/// Parses a state dump for a device with the given dimensions. Blank lines
/// and `#` comments are skipped; repeated labels are an error.
pub fn parse_state(text: &str, cavities: usize, internals: usize) -> Result<StateVector> {
    let mut state = StateVector::zero(cavities, internals)?;
    let mut seen: Vec<BasisLabel> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let internal: usize = parse_field(&mut tokens, line, "internal state")?;
        let cavity: usize = parse_field(&mut tokens, line, "cavity index")?;
        let re: f64 = parse_field(&mut tokens, line, "real part")?;
        let im: f64 = parse_field(&mut tokens, line, "imaginary part")?;
        expect_end(&mut tokens, line)?;
        let label = BasisLabel::new(internal, cavity);
        if seen.contains(&label) {
            return Err(parse_err(
                line,
                format!("amplitude for internal {internal} cavity {cavity} given twice"),
            ));
        }
        seen.push(label);
        state
            .set_amplitude(label, Complex64::new(re, im))
            .map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(state)
}
