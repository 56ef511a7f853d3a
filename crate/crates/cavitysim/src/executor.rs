//! Runs schedules against state vectors, one primitive op at a time.
//!
//! Channel openings use the exact two-state matrix; when the device has a
//! nonzero idle rate, every component outside the opened pair picks up the
//! idle phase for the opening's duration. Phase shifts and pi pulses are
//! instantaneous.

use num_complex::Complex64;

use crate::compiler::{PhaseTarget, PrimitiveOp, Schedule};
use crate::error::{Error, Result};
use crate::statevec::{BasisLabel, StateVector};
use crate::twostate::{evolve_channel, unitary_from_params};

/// Knobs for [`run_with_options`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record a full state snapshot per op instead of just the norm.
    pub record_states: bool,
}

/// One executed op with the norm of the state right after it.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    /// 1-based op index.
    pub step: usize,
    pub op: PrimitiveOp,
    pub norm: f64,
    pub state: Option<StateVector>,
}

/// Final state plus the per-op trace.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: StateVector,
    pub trace: Vec<TraceEntry>,
}

/// Multiplies the targeted amplitudes in `cavity` by `exp(i phi)`.
pub fn apply_phase_shift(
    state: &StateVector,
    cavity: usize,
    target: PhaseTarget,
    phi: f64,
) -> Result<StateVector> {
    if cavity >= state.cavities() {
        return Err(Error::CavityOutOfRange {
            index: cavity,
            cavities: state.cavities(),
        });
    }
    if let PhaseTarget::Internal(s) = target {
        if s >= state.internals() {
            return Err(Error::InternalOutOfRange {
                index: s,
                internals: state.internals(),
            });
        }
    }
    if !phi.is_finite() {
        return Err(Error::InvalidInput("phase shift angle must be finite".into()));
    }
    let factor = Complex64::from_polar(1.0, phi);
    let mut out = state.clone();
    for (label, amp) in state.amplitudes() {
        let hit = label.cavity == cavity
            && match target {
                PhaseTarget::All => true,
                PhaseTarget::Internal(s) => label.internal == s,
            };
        if hit {
            out.set_amplitude(label, amp * factor)?;
        }
    }
    Ok(out)
}

/// Swaps the amplitudes of two internal states inside one cavity. Applying
/// the same pulse twice restores the state exactly.
pub fn apply_pi_pulse(
    state: &StateVector,
    cavity: usize,
    from_internal: usize,
    to_internal: usize,
) -> Result<StateVector> {
    if cavity >= state.cavities() {
        return Err(Error::CavityOutOfRange {
            index: cavity,
            cavities: state.cavities(),
        });
    }
    for index in [from_internal, to_internal] {
        if index >= state.internals() {
            return Err(Error::InternalOutOfRange {
                index,
                internals: state.internals(),
            });
        }
    }
    if from_internal == to_internal {
        return Err(Error::DegeneratePiPulse(from_internal));
    }
    let a = BasisLabel::new(from_internal, cavity);
    let b = BasisLabel::new(to_internal, cavity);
    let mut out = state.clone();
    let amp_a = state.amplitude(a);
    let amp_b = state.amplitude(b);
    out.set_amplitude(a, amp_b)?;
    out.set_amplitude(b, amp_a)?;
    Ok(out)
}

fn apply_op(state: &StateVector, op: &PrimitiveOp, schedule: &Schedule) -> Result<StateVector> {
    match *op {
        PrimitiveOp::OpenChannel {
            channel,
            selective_internal,
            duration,
        } => {
            let matrix = unitary_from_params(schedule.device().params(), duration);
            let mut next = evolve_channel(state, channel, selective_internal, &matrix)?;
            let idle = schedule.device().idle_rate();
            if idle != 0.0 {
                let factor = Complex64::from_polar(1.0, idle * duration);
                let opened = [
                    BasisLabel::new(selective_internal, 0),
                    BasisLabel::new(selective_internal, channel),
                ];
                let snapshot = next.clone();
                for (label, amp) in snapshot.amplitudes() {
                    if !opened.contains(&label) {
                        next.set_amplitude(label, amp * factor)?;
                    }
                }
            }
            Ok(next)
        }
        PrimitiveOp::PhaseShift { cavity, target, phi } => {
            apply_phase_shift(state, cavity, target, phi)
        }
        PrimitiveOp::PiPulse {
            cavity,
            from_internal,
            to_internal,
        } => apply_pi_pulse(state, cavity, from_internal, to_internal),
    }
}

/// Executes every op of `schedule` on `initial`.
pub fn run_with_options(
    schedule: &Schedule,
    initial: &StateVector,
    options: RunOptions,
) -> Result<RunOutcome> {
    if initial.cavities() != schedule.device().cavities()
        || initial.internals() != schedule.device().internals()
    {
        return Err(Error::DimensionMismatch {
            state_cavities: initial.cavities(),
            state_internals: initial.internals(),
            device_cavities: schedule.device().cavities(),
            device_internals: schedule.device().internals(),
        });
    }
    let mut state = initial.clone();
    let mut trace = Vec::with_capacity(schedule.len());
    for (index, op) in schedule.ops().iter().enumerate() {
        state = apply_op(&state, op, schedule)?;
        trace.push(TraceEntry {
            step: index + 1,
            op: *op,
            norm: state.norm(),
            state: options.record_states.then(|| state.clone()),
        });
    }
    Ok(RunOutcome {
        final_state: state,
        trace,
    })
}

/// [`run_with_options`] without state snapshots.
pub fn run(schedule: &Schedule, initial: &StateVector) -> Result<RunOutcome> {
    run_with_options(schedule, initial, RunOptions::default())
}
