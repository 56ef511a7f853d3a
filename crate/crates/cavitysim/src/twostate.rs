//! The two-state channel: exact evolution on one `{|s,0>, |s,i>}` pair and
//! the stability analysis that singles out unitary channel matrices.
//!
//! Opening the channel between the central cavity and cavity `i` for time
//! `tau` applies
//!
//! ```text
//! alpha = exp(i eps tau) cos(omega tau)
//! beta  = i exp(i eps tau) sin(omega tau)
//! ```
//!
//! as the symmetric matrix `[[alpha, beta], [beta, alpha]]`. The channel is
//! selective: components with any other internal state are untouched.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{BasisLabel, StateVector};

/// Physical constants of a channel: on-site energy `epsilon` and hopping rate
/// `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    epsilon: f64,
    omega: f64,
}

impl ChannelParams {
    /// Rejects `omega == 0` (no population transfer, and the schedule step
    /// times would be undefined) and non-finite values.
    pub fn new(epsilon: f64, omega: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return Err(Error::InvalidInput("epsilon must be finite".into()));
        }
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::InvalidOmega);
        }
        Ok(Self { epsilon, omega })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Complex symmetric matrix `[[alpha, beta], [beta, alpha]]` acting on the
/// pair (central amplitude, cavity amplitude).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateMatrix {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl TwoStateMatrix {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    /// Applies the matrix to the column `(top, bottom)`.
    pub fn apply(&self, top: Complex64, bottom: Complex64) -> (Complex64, Complex64) {
        (
            self.alpha * top + self.beta * bottom,
            self.beta * top + self.alpha * bottom,
        )
    }
}

/// Channel matrix for opening a channel with parameters `params` for time
/// `tau`.
pub fn unitary_from_params(params: ChannelParams, tau: f64) -> TwoStateMatrix {
    assert!(tau.is_finite(), "channel opening time must be finite");
    let envelope = Complex64::from_polar(1.0, params.epsilon * tau);
    let (sin, cos) = (params.omega * tau).sin_cos();
    TwoStateMatrix {
        alpha: envelope * cos,
        beta: Complex64::i() * envelope * sin,
    }
}

/// Evolves the pair `{|s,0>, |s,channel>}` under `matrix`, leaving every
/// other basis label untouched.
///
/// `channel` must be a peripheral cavity (index >= 1) and `selective` an
/// internal state of the device.
pub fn evolve_channel(
    state: &StateVector,
    channel: usize,
    selective: usize,
    matrix: &TwoStateMatrix,
) -> Result<StateVector> {
    if channel == 0 {
        return Err(Error::CentralChannel);
    }
    if channel >= state.cavities() {
        return Err(Error::CavityOutOfRange {
            index: channel,
            cavities: state.cavities(),
        });
    }
    if selective >= state.internals() {
        return Err(Error::InternalOutOfRange {
            index: selective,
            internals: state.internals(),
        });
    }

    let center = BasisLabel::new(selective, 0);
    let far = BasisLabel::new(selective, channel);
    let top = state.amplitude(center);
    let bottom = state.amplitude(far);
    let mut out = state.clone();
    if top == Complex64::ZERO && bottom == Complex64::ZERO {
        return Ok(out);
    }
    let (new_top, new_bottom) = matrix.apply(top, bottom);
    out.set_amplitude(center, new_top)?;
    out.set_amplitude(far, new_bottom)?;
    Ok(out)
}

/// Outcome of the stability analysis of a channel matrix.
///
/// The stationary states of the channel are `|0> + |i>` and `|0> - |i>` with
/// eigenvalues `alpha + beta` and `alpha - beta`. Iterating the matrix keeps
/// every vector bounded away from zero and infinity exactly when both
/// eigenvalues sit on the unit circle, and that in turn pins the matrix to a
/// unitary one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    /// True when both eigenvalue magnitudes are within `tol` of 1.
    pub stable: bool,
    /// `(|alpha + beta|, |alpha - beta|)`.
    pub eigenvalue_magnitudes: [f64; 2],
    /// `(| |alpha|^2 + |beta|^2 - 1 |, |alpha conj(beta) + conj(alpha) beta|)`.
    ///
    /// Whenever `stable` is true both residuals are at most `4 * tol`.
    pub unitarity_residuals: [f64; 2],
}

/// Classifies a channel matrix by the magnitudes of its stationary-state
/// eigenvalues.
pub fn stability_verdict(matrix: &TwoStateMatrix, tol: f64) -> StabilityVerdict {
    assert!(tol > 0.0, "tolerance must be positive");
    let plus = (matrix.alpha + matrix.beta).norm();
    let minus = (matrix.alpha - matrix.beta).norm();
    let stable = (plus - 1.0).abs() <= tol && (minus - 1.0).abs() <= tol;
    let sum_sq = matrix.alpha.norm_sqr() + matrix.beta.norm_sqr();
    let cross = 2.0 * (matrix.alpha * matrix.beta.conj()).re;
    StabilityVerdict {
        stable,
        eigenvalue_magnitudes: [plus, minus],
        unitarity_residuals: [(sum_sq - 1.0).abs(), cross.abs()],
    }
}
