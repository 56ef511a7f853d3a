//! Checks that a schedule really produced the permutation-symmetric state,
//! and derives outcome probabilities by counting cavities instead of reading
//! amplitudes.
//!
//! Once the final state passes the equal-amplitude check, any transposition
//! of occupied cavities leaves it invariant, so no cavity can be preferred
//! over another: each of the `N` occupied cavities carries probability `1/N`
//! and internal state `s` collects `n_s / N`. The squared-magnitude rule is
//! never assumed here; the uniform count is the whole argument.

use std::fmt;

use crate::compiler::{compile, Device, Weights};
use crate::error::{Error, Result};
use crate::executor::run;
use crate::statevec::StateVector;

/// Tolerance for protocol-level checks on executed states.
pub const PROTOCOL_TOL: f64 = 1e-9;

/// Tolerance for per-op algebraic identities such as norm conservation.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Outcome of [`check_equal_amplitude`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualAmplitudeCheck {
    pub pass: bool,
    /// Spread of per-cavity magnitudes over the listed cavities.
    pub dispersion: f64,
    /// Leftover magnitude in the central cavity.
    pub central_magnitude: f64,
    /// Largest magnitude sitting on an internal state other than 0 in the
    /// listed cavities.
    pub off_label_magnitude: f64,
}

/// Tests whether `state` holds equal magnitude on internal state 0 in every
/// listed cavity, with nothing left in the center.
pub fn check_equal_amplitude(
    state: &StateVector,
    cavities: &[usize],
    tol: f64,
) -> Result<EqualAmplitudeCheck> {
    let dispersion = state.amplitude_dispersion(cavities)?;
    let central_magnitude = state.cavity_magnitude(0);
    let mut off_label = 0.0_f64;
    for (label, amp) in state.amplitudes() {
        if label.internal != 0 && cavities.contains(&label.cavity) {
            off_label = off_label.max(amp.norm());
        }
    }
    Ok(EqualAmplitudeCheck {
        pass: dispersion <= tol && central_magnitude <= tol && off_label <= tol,
        dispersion,
        central_magnitude,
        off_label_magnitude: off_label,
    })
}

/// Largest entrywise deviation between `state` and its image under any
/// transposition of two listed cavities.
pub fn transposition_deviation(state: &StateVector, cavities: &[usize]) -> Result<f64> {
    if cavities.len() < 2 {
        return Err(Error::InvalidInput(
            "permutation invariance needs at least two cavities".into(),
        ));
    }
    let mut worst = 0.0_f64;
    for (i, &a) in cavities.iter().enumerate() {
        for &b in &cavities[i + 1..] {
            let swapped = state.swap_cavities(a, b)?;
            let mut labels: Vec<_> = state.amplitudes().map(|(l, _)| l).collect();
            labels.extend(swapped.amplitudes().map(|(l, _)| l));
            labels.sort_unstable();
            labels.dedup();
            for label in labels {
                worst = worst.max((state.amplitude(label) - swapped.amplitude(label)).norm());
            }
        }
    }
    Ok(worst)
}

/// True when every transposition of two listed cavities changes no amplitude
/// by more than `tol`.
pub fn permutation_invariance(state: &StateVector, cavities: &[usize], tol: f64) -> Result<bool> {
    Ok(transposition_deviation(state, cavities)? <= tol)
}

/// Runs the compiled schedule for `weights` and returns the outcome
/// probabilities `n_s / N`, derived purely from the symmetry count.
///
/// The final state must pass [`check_equal_amplitude`] at [`PROTOCOL_TOL`];
/// otherwise the uniform count would be unjustified and this returns an
/// error instead of probabilities.
pub fn protocol_probabilities(weights: &Weights, device: &Device) -> Result<Vec<f64>> {
    let schedule = compile(weights, device)?;
    let initial = weights.initial_state(device)?;
    let outcome = run(&schedule, &initial)?;
    let occupied: Vec<usize> = (1..=weights.total() as usize).collect();
    let check = check_equal_amplitude(&outcome.final_state, &occupied, PROTOCOL_TOL)?;
    if !check.pass {
        return Err(Error::EqualAmplitudeFailed {
            reason: format!(
                "dispersion {:e}, central magnitude {:e}, off-label magnitude {:e} against tolerance {:e}",
                check.dispersion, check.central_magnitude, check.off_label_magnitude, PROTOCOL_TOL
            ),
        });
    }
    Ok(weights.probabilities())
}

/// One named check with its metric, printed as
/// `check <name> pass|fail value=<metric> tol=<tol>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub tol: f64,
}

impl CheckResult {
    fn against(name: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name,
            pass: value <= tol,
            value,
            tol,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check {} {} value={:.11e} tol={:e}",
            self.name,
            if self.pass { "pass" } else { "fail" },
            self.value,
            self.tol
        )
    }
}

/// Executes an already-compiled schedule and checks it against the target
/// weights: equal amplitudes on the occupied cavities, an empty center, no
/// amplitude left outside internal state 0, invariance under occupied-cavity
/// transpositions, and per-op norm conservation.
pub fn verify_schedule(
    schedule: &crate::compiler::Schedule,
    weights: &Weights,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let initial = weights.initial_state(schedule.device())?;
    let outcome = run(schedule, &initial)?;
    let occupied: Vec<usize> = (1..=weights.total() as usize).collect();

    let amplitude = check_equal_amplitude(&outcome.final_state, &occupied, tol)?;
    let transposition = transposition_deviation(&outcome.final_state, &occupied)?;

    let mut drift = 0.0_f64;
    let mut prev = initial.norm();
    for entry in &outcome.trace {
        drift = drift.max((entry.norm - prev).abs() / prev);
        prev = entry.norm;
    }

    Ok(vec![
        CheckResult::against("equal_amplitude", amplitude.dispersion, tol),
        CheckResult::against("central_residue", amplitude.central_magnitude, tol),
        CheckResult::against("internal_relabeling", amplitude.off_label_magnitude, tol),
        CheckResult::against("permutation_invariance", transposition, tol),
        CheckResult::against("norm_conservation", drift, ALGEBRAIC_TOL),
    ])
}

/// Removes the overall phase, defined by the largest-magnitude amplitude
/// (ties pick the smallest basis label).
pub fn align_global_phase(state: &StateVector) -> StateVector {
    let mut reference = None;
    let mut best = 0.0_f64;
    for (_, amp) in state.amplitudes() {
        let mag = amp.norm();
        if mag > best {
            best = mag;
            reference = Some(amp);
        }
    }
    match reference {
        Some(amp) => state.scaled(num_complex::Complex64::from_polar(1.0, -amp.arg())),
        None => state.clone(),
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::compiler::PrimitiveOp;
    use crate::statevec::BasisLabel;
    use crate::twostate::ChannelParams;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uniform(cavities: usize, internals: usize, occupied: usize) -> StateVector {
        StateVector::from_amplitudes(
            cavities,
            internals,
            (1..=occupied).map(|i| (BasisLabel::new(0, i), c(1.0, 0.0))),
        )
        .unwrap()
    }

    #[test]
    fn uniform_state_passes_equal_amplitude() {
        let state = uniform(6, 2, 5);
        let check = check_equal_amplitude(&state, &[1, 2, 3, 4, 5], 1e-9).unwrap();
        assert!(check.pass);
        assert_eq!(check.dispersion, 0.0);
        assert_eq!(check.central_magnitude, 0.0);
        assert_eq!(check.off_label_magnitude, 0.0);
    }

    #[test]
    fn leftover_center_fails_the_check() {
        let mut state = uniform(6, 2, 5);
        state
            .set_amplitude(BasisLabel::new(0, 0), c(1e-3, 0.0))
            .unwrap();
        let check = check_equal_amplitude(&state, &[1, 2, 3, 4, 5], 1e-9).unwrap();
        assert!(!check.pass);
        assert!((check.central_magnitude - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn unequal_magnitudes_fail_the_check() {
        let mut state = uniform(4, 1, 3);
        state
            .set_amplitude(BasisLabel::new(0, 2), c(1.001, 0.0))
            .unwrap();
        let check = check_equal_amplitude(&state, &[1, 2, 3], 1e-9).unwrap();
        assert!(!check.pass);
        assert!((check.dispersion - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn amplitude_on_other_internal_states_fails_the_check() {
        let mut state = uniform(4, 2, 3);
        state
            .set_amplitude(BasisLabel::new(1, 2), c(1e-4, 0.0))
            .unwrap();
        let check = check_equal_amplitude(&state, &[1, 2, 3], 1e-9).unwrap();
        assert!(!check.pass);
        assert!((check.off_label_magnitude - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn probabilities_come_from_counting() {
        let weights = Weights::new(vec![3, 2]).unwrap();
        let device =
            Device::for_weights(&weights, ChannelParams::new(0.0, 1.0).unwrap(), 0.0).unwrap();
        let probs = protocol_probabilities(&weights, &device).unwrap();
        assert_eq!(probs, vec![0.6, 0.4]);
    }

    #[test]
    fn probabilities_for_three_weights() {
        let weights = Weights::new(vec![1, 2, 3]).unwrap();
        let device =
            Device::for_weights(&weights, ChannelParams::new(0.2, 1.0).unwrap(), 0.0).unwrap();
        let probs = protocol_probabilities(&weights, &device).unwrap();
        let expected = [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0];
        for (p, e) in probs.iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }
    }

    #[test]
    fn verify_passes_on_compiled_schedules_and_fails_on_corrupted_ones() {
        let weights = Weights::new(vec![2, 1]).unwrap();
        let device =
            Device::for_weights(&weights, ChannelParams::new(0.0, 1.0).unwrap(), 0.0).unwrap();
        let schedule = compile(&weights, &device).unwrap();
        let results = verify_schedule(&schedule, &weights, PROTOCOL_TOL).unwrap();
        assert!(results.iter().all(|r| r.pass), "results: {results:?}");

        // Perturb one opening time by 1e-3.
        let ops: Vec<_> = schedule
            .ops()
            .iter()
            .map(|op| match *op {
                PrimitiveOp::OpenChannel {
                    channel: 1,
                    selective_internal,
                    duration,
                } => PrimitiveOp::OpenChannel {
                    channel: 1,
                    selective_internal,
                    duration: duration + 1e-3,
                },
                other => other,
            })
            .collect();
        let corrupted = crate::compiler::Schedule::new(*schedule.device(), ops, None).unwrap();
        let results = verify_schedule(&corrupted, &weights, PROTOCOL_TOL).unwrap();
        assert!(results.iter().any(|r| !r.pass));
    }

    #[test]
    fn permutation_invariance_detects_asymmetry() {
        let state = uniform(4, 1, 3);
        assert!(permutation_invariance(&state, &[1, 2, 3], 1e-12).unwrap());

        let mut skew = state.clone();
        skew.set_amplitude(BasisLabel::new(0, 1), c(0.9, 0.0)).unwrap();
        assert!(!permutation_invariance(&skew, &[1, 2, 3], 1e-12).unwrap());
        assert!((transposition_deviation(&skew, &[1, 2, 3]).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariance_needs_two_cavities() {
        let state = uniform(4, 1, 3);
        assert!(matches!(
            permutation_invariance(&state, &[1], 1e-9),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn align_global_phase_uses_the_dominant_amplitude() {
        let state = StateVector::from_amplitudes(
            3,
            1,
            [
                (BasisLabel::new(0, 1), Complex64::from_polar(2.0, 0.7)),
                (BasisLabel::new(0, 2), Complex64::from_polar(1.0, 0.7)),
            ],
        )
        .unwrap();
        let aligned = align_global_phase(&state);
        assert!((aligned.amplitude(BasisLabel::new(0, 1)) - c(2.0, 0.0)).norm() < 1e-12);
        assert!((aligned.amplitude(BasisLabel::new(0, 2)) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn check_result_renders_the_report_line() {
        let line = CheckResult {
            name: "equal_amplitude",
            pass: true,
            value: 1.5e-12,
            tol: 1e-9,
        }
        .to_string();
        assert_eq!(line, "check equal_amplitude pass value=1.50000000000e-12 tol=1e-9");
    }
}
