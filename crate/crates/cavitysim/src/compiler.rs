//! Compiles integer weights into a primitive-op schedule.
//!
//! Weights `(n_1, ..., n_K)` with total `N` turn into a schedule that maps the
//! input `sum_s sqrt(n_s) |s,0>` to `sum_{i=1..N} |0,i>`: one excitation unit
//! per peripheral cavity, all on internal state 0, all with the same phase.
//! Each internal state `s` gets a contiguous block of `n_s` cavities; its
//! channels open in cavity order for times `tau_{n_s}, ..., tau_1` where
//! `cot(|omega| tau_k) = sqrt(k - 1)`, stepping the central amplitude down
//! `sqrt(n_s), sqrt(n_s - 1), ..., 0` while each opening deposits exactly one
//! unit. Phase corrections and final pi pulses then erase the deposit phases
//! and relabel every block to internal state 0.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::statevec::{BasisLabel, StateVector};
use crate::twostate::ChannelParams;

/// Integer weights, one per internal state, each at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights(Vec<u64>);

impl Weights {
    pub fn new(entries: Vec<u64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidWeights("need at least one weight".into()));
        }
        if entries.iter().any(|&n| n == 0) {
            return Err(Error::InvalidWeights("weights must be at least 1".into()));
        }
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    /// Number of internal states `K`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total weight `N`, the number of peripheral cavities the schedule uses.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Target probabilities `n_s / N`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.0.iter().map(|&n| n as f64 / total).collect()
    }

    /// Cavity block assigned to internal state `s`: the `n_s` cavities after
    /// those of the earlier states, starting at cavity 1.
    pub fn block_range(&self, s: usize) -> Range<usize> {
        assert!(s < self.0.len(), "internal state {s} has no weight");
        let start = 1 + self.0[..s].iter().sum::<u64>() as usize;
        start..start + self.0[s] as usize
    }

    /// The protocol input `sum_s sqrt(n_s) |s,0>` on the given device.
    pub fn initial_state(&self, device: &Device) -> Result<StateVector> {
        let mut state = StateVector::zero(device.cavities(), device.internals())?;
        for (s, &n) in self.0.iter().enumerate() {
            state.set_amplitude(
                BasisLabel::new(s, 0),
                num_complex::Complex64::new((n as f64).sqrt(), 0.0),
            )?;
        }
        Ok(state)
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for n in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Weights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidWeights(format!("bad weight {:?}: {e}", tok.trim())))
            })
            .collect::<Result<Vec<u64>>>()?;
        Weights::new(entries)
    }
}

/// Static description of a device: cavity count, internal-state count,
/// channel parameters and the phase rate of disconnected components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Device {
    cavities: usize,
    internals: usize,
    params: ChannelParams,
    idle_rate: f64,
}

impl Device {
    pub fn new(cavities: usize, internals: usize, params: ChannelParams, idle_rate: f64) -> Result<Self> {
        if cavities < 2 {
            return Err(Error::InvalidInput(
                "device needs the central cavity and at least one peripheral".into(),
            ));
        }
        if internals == 0 {
            return Err(Error::InvalidInput(
                "device needs at least one internal state".into(),
            ));
        }
        if !idle_rate.is_finite() {
            return Err(Error::InvalidInput("idle rate must be finite".into()));
        }
        Ok(Self {
            cavities,
            internals,
            params,
            idle_rate,
        })
    }

    /// The smallest device that can run a schedule for `weights`: `N + 1`
    /// cavities and one internal state per weight.
    pub fn for_weights(weights: &Weights, params: ChannelParams, idle_rate: f64) -> Result<Self> {
        Self::new(weights.total() as usize + 1, weights.len(), params, idle_rate)
    }

    pub fn cavities(&self) -> usize {
        self.cavities
    }

    pub fn internals(&self) -> usize {
        self.internals
    }

    pub fn params(&self) -> ChannelParams {
        self.params
    }

    pub fn idle_rate(&self) -> f64 {
        self.idle_rate
    }
}

/// Which internal states a phase shift touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseTarget {
    All,
    Internal(usize),
}

/// The three primitive operations a device executes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimitiveOp {
    /// Open the channel between cavity 0 and `channel` for `duration`,
    /// selective on internal state `selective_internal`.
    OpenChannel {
        channel: usize,
        selective_internal: usize,
        duration: f64,
    },
    /// Multiply the targeted amplitudes in `cavity` by `exp(i phi)`.
    PhaseShift {
        cavity: usize,
        target: PhaseTarget,
        phi: f64,
    },
    /// Swap the amplitudes of two internal states inside one cavity.
    PiPulse {
        cavity: usize,
        from_internal: usize,
        to_internal: usize,
    },
}

impl PrimitiveOp {
    /// Keyword used in the schedule text format and in trace lines.
    pub fn name(&self) -> &'static str {
        match self {
            PrimitiveOp::OpenChannel { .. } => "open",
            PrimitiveOp::PhaseShift { .. } => "phase",
            PrimitiveOp::PiPulse { .. } => "pipulse",
        }
    }

    /// Wall-clock time the op takes; only channel openings are timed.
    pub fn duration(&self) -> f64 {
        match self {
            PrimitiveOp::OpenChannel { duration, .. } => *duration,
            _ => 0.0,
        }
    }

    pub(crate) fn validate(&self, device: &Device) -> Result<()> {
        let check_cavity = |index: usize| {
            if index >= device.cavities {
                Err(Error::CavityOutOfRange {
                    index,
                    cavities: device.cavities,
                })
            } else {
                Ok(())
            }
        };
        let check_internal = |index: usize| {
            if index >= device.internals {
                Err(Error::InternalOutOfRange {
                    index,
                    internals: device.internals,
                })
            } else {
                Ok(())
            }
        };
        match *self {
            PrimitiveOp::OpenChannel {
                channel,
                selective_internal,
                duration,
            } => {
                if channel == 0 {
                    return Err(Error::CentralChannel);
                }
                check_cavity(channel)?;
                check_internal(selective_internal)?;
                if !(duration > 0.0) || !duration.is_finite() {
                    return Err(Error::ScheduleInvariant(format!(
                        "channel opening duration must be positive and finite, got {duration}"
                    )));
                }
            }
            PrimitiveOp::PhaseShift { cavity, target, phi } => {
                check_cavity(cavity)?;
                if let PhaseTarget::Internal(s) = target {
                    check_internal(s)?;
                }
                if !phi.is_finite() || phi <= -PI || phi > PI {
                    return Err(Error::ScheduleInvariant(format!(
                        "phase shift angle must lie in (-pi, pi], got {phi}"
                    )));
                }
            }
            PrimitiveOp::PiPulse {
                cavity,
                from_internal,
                to_internal,
            } => {
                check_cavity(cavity)?;
                check_internal(from_internal)?;
                check_internal(to_internal)?;
                if from_internal == to_internal {
                    return Err(Error::DegeneratePiPulse(from_internal));
                }
            }
        }
        Ok(())
    }
}

/// A validated sequence of primitive ops for one device.
///
/// Besides per-op validity, every peripheral cavity is opened with a single
/// selective internal state across the whole schedule: a channel has one
/// type.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    device: Device,
    ops: Vec<PrimitiveOp>,
    target_weights: Option<Weights>,
}

impl Schedule {
    pub fn new(device: Device, ops: Vec<PrimitiveOp>, target_weights: Option<Weights>) -> Result<Self> {
        let mut selective: Vec<Option<usize>> = vec![None; device.cavities];
        for op in &ops {
            op.validate(&device)?;
            if let PrimitiveOp::OpenChannel {
                channel,
                selective_internal,
                ..
            } = *op
            {
                match selective[channel] {
                    None => selective[channel] = Some(selective_internal),
                    Some(prev) if prev != selective_internal => {
                        return Err(Error::ScheduleInvariant(format!(
                            "channel {channel} opened selective on internal {prev} and later on {selective_internal}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Self {
            device,
            ops,
            target_weights,
        })
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    pub fn ops(&self) -> &[PrimitiveOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Weights this schedule was compiled from, if it came from the compiler.
    pub fn target_weights(&self) -> Option<&Weights> {
        self.target_weights.as_ref()
    }
}

/// Opening time for the `k`-th descent step: `arccot(sqrt(k - 1)) / omega`
/// with the arc cotangent valued in `(0, pi/2]`.
///
/// Opening a channel that long moves a central amplitude `sqrt(k)` down to
/// `sqrt(k - 1)` while depositing one unit in the cavity.
pub fn tau_for_step(k: u64, omega: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroStep);
    }
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::InvalidOmega);
    }
    Ok(f64::atan2(1.0, ((k - 1) as f64).sqrt()) / omega)
}

/// Wraps an angle to the canonical interval `(-pi, pi]`.
fn canonical_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Compiles weights into the schedule that spreads `sum_s sqrt(n_s) |s,0>`
/// into one unit per cavity on internal state 0.
///
/// The output has exactly `N` channel openings, `N` phase corrections (one
/// per deposited cavity, emitted right after that cavity's block) and
/// `N - n_1` pi pulses. Corrections account for the deposit factor `i`, the
/// `exp(i eps tau)` envelope of every opening the component sat through, and
/// when the device has a nonzero idle rate, the idle phase a deposited
/// component accrues over the rest of the schedule.
pub fn compile(weights: &Weights, device: &Device) -> Result<Schedule> {
    let needed = weights.total() as usize;
    if device.cavities() < needed + 1 {
        return Err(Error::CapacityExceeded {
            needed,
            available: device.cavities() - 1,
        });
    }
    if weights.len() > device.internals() {
        return Err(Error::InternalOutOfRange {
            index: weights.len() - 1,
            internals: device.internals(),
        });
    }

    let params = device.params();
    let epsilon = params.epsilon();
    let omega = params.omega();
    let idle = device.idle_rate();
    // The deposit factor is i sin(omega tau); a negative omega flips it to -i.
    let deposit_phase = FRAC_PI_2 * omega.signum();

    // Opening durations per block, computed once so the emitted ops and the
    // phase ledger use identical floats.
    let mut block_durations: Vec<Vec<f64>> = Vec::with_capacity(weights.len());
    for &n in weights.entries() {
        let mut durations = Vec::with_capacity(n as usize);
        for r in 1..=n {
            let k = n - r + 1;
            durations.push(tau_for_step(k, omega)?.abs());
        }
        block_durations.push(durations);
    }
    let total_duration: f64 = block_durations.iter().flatten().sum();

    let mut ops = Vec::with_capacity(2 * needed + (needed - weights.entries()[0] as usize));
    for (s, durations) in block_durations.iter().enumerate() {
        let block = weights.block_range(s);

        for (cavity, &duration) in block.clone().zip(durations) {
            ops.push(PrimitiveOp::OpenChannel {
                channel: cavity,
                selective_internal: s,
                duration,
            });
        }

        // Exposure time of the component deposited at the r-th cavity of the
        // block: openings 1..=r happened while it was still part of the
        // central amplitude or being deposited.
        let mut exposure = 0.0;
        for (cavity, &duration) in block.zip(durations) {
            exposure += duration;
            let accrued =
                deposit_phase + epsilon * exposure + idle * (total_duration - exposure);
            ops.push(PrimitiveOp::PhaseShift {
                cavity,
                target: PhaseTarget::Internal(s),
                phi: canonical_angle(-accrued),
            });
        }
    }
    for s in 1..weights.len() {
        for cavity in weights.block_range(s) {
            ops.push(PrimitiveOp::PiPulse {
                cavity,
                from_internal: s,
                to_internal: 0,
            });
        }
    }

    Schedule::new(*device, ops, Some(weights.clone()))
}

/// Finds integer weights whose probabilities best approximate `probabilities`
/// in the max-norm, over all totals `N <= max_total`.
///
/// Ties prefer the smaller total, then the lexicographically smallest weight
/// vector. The optimum is exhaustive over `N`, so when `max_total` is at
/// least `2K` the worst-case error stays below `1 / (2 floor(max_total / K))`.
pub fn rationalize(probabilities: &[f64], max_total: u64) -> Result<Weights> {
    let k = probabilities.len();
    if k == 0 {
        return Err(Error::InvalidInput("need at least one probability".into()));
    }
    if probabilities.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        return Err(Error::InvalidInput(
            "probabilities must be finite and positive".into(),
        ));
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "probabilities sum to {sum}, expected 1 within 1e-9"
        )));
    }
    if (max_total as usize) < k {
        return Err(Error::Infeasible(format!(
            "{k} probabilities need a total of at least {k}, max_total is {max_total}"
        )));
    }
    let p_min = probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    if p_min * (max_total as f64) < 0.5 {
        return Err(Error::Infeasible(format!(
            "probability {p_min:e} rounds to zero at every total up to {max_total}"
        )));
    }

    let mut best: Option<(f64, Vec<u64>)> = None;
    for total in k as u64..=max_total {
        let candidate = best_for_total(probabilities, total);
        if best.as_ref().map_or(true, |(err, _)| candidate.0 < *err) {
            best = Some(candidate);
        }
    }
    Weights::new(best.expect("at least one total was searched").1)
}

/// Minimax-optimal weights for one fixed total, lexicographically smallest
/// among the optima.
fn best_for_total(probabilities: &[f64], total: u64) -> (f64, Vec<u64>) {
    let nf = total as f64;
    let err = |i: usize, m: u64| (m as f64 / nf - probabilities[i]).abs();

    // Every achievable max-error is some |m/N - p_i|; binary search the
    // smallest feasible one.
    let mut candidates: Vec<f64> = Vec::with_capacity(probabilities.len() * total as usize);
    for i in 0..probabilities.len() {
        for m in 1..=total {
            candidates.push(err(i, m));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let feasible = |e: f64| -> Option<(Vec<u64>, Vec<u64>)> {
        let mut lows = Vec::with_capacity(probabilities.len());
        let mut highs = Vec::with_capacity(probabilities.len());
        for i in 0..probabilities.len() {
            let (lo, hi) = error_interval(probabilities, total, i, e)?;
            lows.push(lo);
            highs.push(hi);
        }
        if lows.iter().sum::<u64>() <= total && highs.iter().sum::<u64>() >= total {
            Some((lows, highs))
        } else {
            None
        }
    };

    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(candidates[hi]).is_some());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let e = candidates[lo];
    let (lows, highs) = feasible(e).expect("binary search landed on a feasible error");

    // Lexicographically smallest assignment: give each slot the least it can
    // take while the remaining slots can still absorb the rest.
    let mut entries = Vec::with_capacity(probabilities.len());
    let mut remaining = total;
    for i in 0..probabilities.len() {
        let tail_max: u64 = highs[i + 1..].iter().sum();
        let m = lows[i].max(remaining.saturating_sub(tail_max));
        entries.push(m);
        remaining -= m;
    }
    let achieved = entries
        .iter()
        .enumerate()
        .map(|(i, &m)| err(i, m))
        .fold(0.0, f64::max);
    (achieved, entries)
}

/// The contiguous range of counts `m` with `|m/N - p_i| <= e`, intersected
/// with `m >= 1`, or `None` when it is empty.
fn error_interval(probabilities: &[f64], total: u64, i: usize, e: f64) -> Option<(u64, u64)> {
    let nf = total as f64;
    let err = |m: u64| (m as f64 / nf - probabilities[i]).abs();

    let anchor = ((probabilities[i] * nf).round() as i64).clamp(1, total as i64) as u64;
    // err is V-shaped in m; the discrete minimizer sits next to the rounded
    // ideal count.
    let center = (anchor.saturating_sub(1).max(1)..=(anchor + 1).min(total))
        .min_by(|&a, &b| err(a).total_cmp(&err(b)))?;
    if err(center) > e {
        return None;
    }

    // Binary search the edges of { m : err(m) <= e } on each monotone side.
    let mut lo = 1;
    let mut hi = center;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if err(mid) <= e {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let left = lo;
    let mut lo = center;
    let mut hi = total;
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if err(mid) <= e {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Some((left, lo))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;

    #[test]
    fn tau_first_steps_match_closed_forms() {
        assert!((tau_for_step(1, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((tau_for_step(2, 1.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // Third step: cot(omega tau) = sqrt(2), so cos^2/sin^2 = 2.
        let tau = tau_for_step(3, 1.0).unwrap();
        assert!((tau.cos().powi(2) / tau.sin().powi(2) - 2.0).abs() < 1e-12);
        assert!((tau - 0.6154797086703873).abs() < 1e-15);
    }

    #[test]
    fn tau_scales_inversely_with_omega() {
        assert!((tau_for_step(1, 2.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let plain = tau_for_step(5, 1.0).unwrap();
        assert!((tau_for_step(5, 4.0).unwrap() - plain / 4.0).abs() < 1e-15);
    }

    #[test]
    fn tau_rejects_step_zero_and_zero_omega() {
        assert_eq!(tau_for_step(0, 1.0), Err(Error::ZeroStep));
        assert_eq!(tau_for_step(1, 0.0), Err(Error::InvalidOmega));
    }

    #[test]
    fn tau_decreases_with_k() {
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let tau = tau_for_step(k, 1.0).unwrap();
            assert!(tau > 0.0 && tau < prev);
            prev = tau;
        }
    }

    fn device_for(weights: &Weights, epsilon: f64, omega: f64, idle: f64) -> Device {
        Device::for_weights(weights, ChannelParams::new(epsilon, omega).unwrap(), idle).unwrap()
    }

    #[test]
    fn single_weight_compiles_to_one_opening_and_one_correction() {
        let w = Weights::new(vec![1]).unwrap();
        let schedule = compile(&w, &device_for(&w, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(schedule.len(), 2);
        match schedule.ops()[0] {
            PrimitiveOp::OpenChannel {
                channel,
                selective_internal,
                duration,
            } => {
                assert_eq!((channel, selective_internal), (1, 0));
                assert!((duration - FRAC_PI_2).abs() < 1e-15);
            }
            ref op => panic!("expected an opening, got {op:?}"),
        }
        match schedule.ops()[1] {
            PrimitiveOp::PhaseShift { cavity, target, phi } => {
                assert_eq!(cavity, 1);
                assert_eq!(target, PhaseTarget::Internal(0));
                assert!((phi + FRAC_PI_2).abs() < 1e-12);
            }
            ref op => panic!("expected a phase correction, got {op:?}"),
        }
    }

    #[test]
    fn three_two_compiles_to_the_known_op_sequence() {
        let w = Weights::new(vec![3, 2]).unwrap();
        let schedule = compile(&w, &device_for(&w, 0.0, 1.0, 0.0)).unwrap();
        let arccot_sqrt2 = f64::atan2(1.0, 2.0_f64.sqrt());

        let expected_opens = [
            (1, 0, arccot_sqrt2),
            (2, 0, FRAC_PI_4),
            (3, 0, FRAC_PI_2),
            (4, 1, FRAC_PI_4),
            (5, 1, FRAC_PI_2),
        ];
        let opens: Vec<_> = schedule
            .ops()
            .iter()
            .filter_map(|op| match *op {
                PrimitiveOp::OpenChannel {
                    channel,
                    selective_internal,
                    duration,
                } => Some((channel, selective_internal, duration)),
                _ => None,
            })
            .collect();
        assert_eq!(opens.len(), 5);
        for (got, want) in opens.iter().zip(expected_opens) {
            assert_eq!((got.0, got.1), (want.0, want.1));
            assert!((got.2 - want.2).abs() < 1e-15);
        }

        let phases: Vec<_> = schedule
            .ops()
            .iter()
            .filter_map(|op| match *op {
                PrimitiveOp::PhaseShift { cavity, target, phi } => Some((cavity, target, phi)),
                _ => None,
            })
            .collect();
        assert_eq!(phases.len(), 5);
        for (i, (cavity, target, phi)) in phases.iter().enumerate() {
            assert_eq!(*cavity, i + 1);
            let s = if i < 3 { 0 } else { 1 };
            assert_eq!(*target, PhaseTarget::Internal(s));
            assert!((phi + FRAC_PI_2).abs() < 1e-12, "correction {i} was {phi}");
        }

        let pulses: Vec<_> = schedule
            .ops()
            .iter()
            .filter_map(|op| match *op {
                PrimitiveOp::PiPulse {
                    cavity,
                    from_internal,
                    to_internal,
                } => Some((cavity, from_internal, to_internal)),
                _ => None,
            })
            .collect();
        assert_eq!(pulses, vec![(4, 1, 0), (5, 1, 0)]);

        // Per-block emission order: block 0 openings, block 0 corrections,
        // block 1 openings, block 1 corrections, pi pulses.
        let names: Vec<_> = schedule.ops().iter().map(|op| op.name()).collect();
        assert_eq!(
            names,
            [
                "open", "open", "open", "phase", "phase", "phase", "open", "open", "phase",
                "phase", "pipulse", "pipulse"
            ]
        );
    }

    #[test]
    fn op_counts_follow_the_weights() {
        let w = Weights::new(vec![2, 2, 2]).unwrap();
        let schedule = compile(&w, &device_for(&w, 0.1, 1.0, 0.0)).unwrap();
        let count = |name: &str| schedule.ops().iter().filter(|op| op.name() == name).count();
        assert_eq!(count("open"), 6);
        assert_eq!(count("phase"), 6);
        assert_eq!(count("pipulse"), 4);
    }

    #[test]
    fn blocks_are_contiguous() {
        let w = Weights::new(vec![3, 1, 2]).unwrap();
        assert_eq!(w.block_range(0), 1..4);
        assert_eq!(w.block_range(1), 4..5);
        assert_eq!(w.block_range(2), 5..7);
        assert_eq!(w.total(), 6);
    }

    #[test]
    fn compile_rejects_undersized_devices() {
        let w = Weights::new(vec![3, 2]).unwrap();
        let device = Device::new(5, 2, ChannelParams::new(0.0, 1.0).unwrap(), 0.0).unwrap();
        assert_eq!(
            compile(&w, &device),
            Err(Error::CapacityExceeded {
                needed: 5,
                available: 4
            })
        );
    }

    #[test]
    fn initial_state_holds_square_roots() {
        let w = Weights::new(vec![3, 2]).unwrap();
        let device = device_for(&w, 0.0, 1.0, 0.0);
        let state = w.initial_state(&device).unwrap();
        assert_eq!(
            state.amplitude(BasisLabel::new(0, 0)).re,
            3.0_f64.sqrt()
        );
        assert_eq!(
            state.amplitude(BasisLabel::new(1, 0)).re,
            2.0_f64.sqrt()
        );
        assert!((state.norm() - 5.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn schedule_rejects_conflicting_channel_types() {
        let device = Device::new(3, 2, ChannelParams::new(0.0, 1.0).unwrap(), 0.0).unwrap();
        let ops = vec![
            PrimitiveOp::OpenChannel {
                channel: 1,
                selective_internal: 0,
                duration: 1.0,
            },
            PrimitiveOp::OpenChannel {
                channel: 1,
                selective_internal: 1,
                duration: 1.0,
            },
        ];
        assert!(matches!(
            Schedule::new(device, ops, None),
            Err(Error::ScheduleInvariant(_))
        ));
    }

    #[test]
    fn schedule_rejects_nonpositive_durations_and_wild_angles() {
        let device = Device::new(3, 1, ChannelParams::new(0.0, 1.0).unwrap(), 0.0).unwrap();
        let bad_open = PrimitiveOp::OpenChannel {
            channel: 1,
            selective_internal: 0,
            duration: -0.5,
        };
        assert!(matches!(
            Schedule::new(device, vec![bad_open], None),
            Err(Error::ScheduleInvariant(_))
        ));
        let bad_phase = PrimitiveOp::PhaseShift {
            cavity: 1,
            target: PhaseTarget::All,
            phi: 3.5,
        };
        assert!(matches!(
            Schedule::new(device, vec![bad_phase], None),
            Err(Error::ScheduleInvariant(_))
        ));
    }

    #[test]
    fn weights_parse_and_validate() {
        assert_eq!("3,2".parse::<Weights>().unwrap().entries(), &[3, 2]);
        assert_eq!(" 1, 2 ,3 ".parse::<Weights>().unwrap().entries(), &[1, 2, 3]);
        assert!("3,0".parse::<Weights>().is_err());
        assert!("".parse::<Weights>().is_err());
        assert!("a,b".parse::<Weights>().is_err());
    }

    #[test]
    fn canonical_angle_lands_in_half_open_interval() {
        assert!((canonical_angle(-FRAC_PI_2) + FRAC_PI_2).abs() < 1e-15);
        assert_eq!(canonical_angle(PI), PI);
        assert!(canonical_angle(-PI) > 0.0);
        assert!((canonical_angle(-PI) - PI).abs() < 1e-15);
        assert!((canonical_angle(7.0 * PI) - PI).abs() < 1e-12);
        assert!(canonical_angle(1e6).abs() <= PI);
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(
            rationalize(&[0.6, 0.4], 10).unwrap().entries(),
            &[3, 2]
        );
        assert_eq!(
            rationalize(&[1.0 / 3.0, 2.0 / 3.0], 100).unwrap().entries(),
            &[1, 2]
        );
        assert_eq!(rationalize(&[0.5, 0.5], 10).unwrap().entries(), &[1, 1]);
    }

    #[test]
    fn rationalize_prefers_small_totals_on_ties() {
        // Both (1,1) and (2,2) are exact; the smaller total wins.
        assert_eq!(rationalize(&[0.5, 0.5], 4).unwrap().entries(), &[1, 1]);
    }

    #[test]
    fn rationalize_rejects_bad_inputs() {
        assert!(matches!(
            rationalize(&[0.7, 0.4], 10),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            rationalize(&[0.5, 0.5, 0.0], 10),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(rationalize(&[], 10), Err(Error::InvalidInput(_))));
        assert!(matches!(
            rationalize(&[0.5, 0.25, 0.25], 2),
            Err(Error::Infeasible(_))
        ));
        // A probability too small to earn one unit within the allowed total.
        assert!(matches!(
            rationalize(&[0.9999995, 2.5e-7, 2.5e-7], 100),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn rationalize_is_exact_on_representable_inputs() {
        let w = Weights::new(vec![3, 2]).unwrap();
        let again = rationalize(&w.probabilities(), 40).unwrap();
        assert_eq!(again.entries(), &[3, 2]);

        // Weights with a common factor come back divided by it.
        let w = Weights::new(vec![2, 4, 2]).unwrap();
        let again = rationalize(&w.probabilities(), 40).unwrap();
        assert_eq!(again.entries(), &[1, 2, 1]);
    }
}
