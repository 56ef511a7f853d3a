//! Simulator and schedule compiler for a star-shaped network of cavities
//! with state-selective channels.
//!
//! A single excitation with `K` internal states sits in the central cavity of
//! a star of `C` cavities. Opening the channel to a peripheral cavity for a
//! chosen time moves amplitude through an exact two-state rotation, and the
//! channels are selective: each opening only talks to one internal state.
//!
//! The crate covers the full pipeline:
//!
//! * [`statevec`]: sparse, deliberately unnormalized state vectors;
//! * [`twostate`]: the exact channel matrix, and a stability analysis showing
//!   that channels whose iterates never blow up or die out are exactly the
//!   unitary ones;
//! * [`compiler`]: turns integer weights `(n_1, ..., n_K)` into a schedule of
//!   channel openings (with `cot(omega tau_k) = sqrt(k-1)` step times), phase
//!   corrections and pi pulses that spreads `sum_s sqrt(n_s) |s,0>` into one
//!   unit of amplitude per cavity, plus [`compiler::rationalize`] for turning
//!   target probabilities into weights;
//! * [`executor`]: runs schedules and traces per-op norms;
//! * [`verify`]: checks the result is permutation symmetric and assigns
//!   outcome probabilities `n_s / N` by counting cavities, never by squaring
//!   amplitudes;
//! * [`format`]: the schedule and state-dump text formats.

pub mod compiler;
pub mod error;
pub mod executor;
pub mod format;
pub mod statevec;
pub mod twostate;
pub mod verify;

pub use num_complex::Complex64;

pub use compiler::{compile, rationalize, tau_for_step, Device, PhaseTarget, PrimitiveOp, Schedule, Weights};
pub use error::{Error, Result};
pub use executor::{run, run_with_options, RunOptions, RunOutcome, TraceEntry};
pub use format::{parse_schedule, parse_state, serialize_schedule, serialize_state};
pub use statevec::{BasisLabel, StateVector};
pub use twostate::{
    evolve_channel, stability_verdict, unitary_from_params, ChannelParams, StabilityVerdict,
    TwoStateMatrix,
};
pub use verify::{
    check_equal_amplitude, permutation_invariance, protocol_probabilities, verify_schedule,
    CheckResult, EqualAmplitudeCheck,
};
