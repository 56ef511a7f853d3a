//! Sparse state vectors over a (internal state, cavity) product basis.
//!
//! The device is a star of `C` cavities around a central one (index 0) holding
//! a single excitation with `K` internal states. Vectors are deliberately not
//! normalized anywhere; integer-weighted superpositions such as
//! `sqrt(3)|0,0> + sqrt(2)|1,0>` are first-class values.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default magnitude below which amplitudes are dropped from the sparse map.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-15;

/// One basis ket `|internal, cavity>`.
///
/// Ordering is lexicographic in `(internal, cavity)`, which fixes the line
/// order of state dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel {
    pub internal: usize,
    pub cavity: usize,
}

impl BasisLabel {
    pub fn new(internal: usize, cavity: usize) -> Self {
        Self { internal, cavity }
    }
}

/// Sparse complex vector over the `(internal, cavity)` basis.
///
/// Operations return new values; a constructed state is never mutated by the
/// evolution code. Amplitudes with magnitude below the prune threshold may be
/// dropped, so "absent" and "zero" are interchangeable.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    cavities: usize,
    internals: usize,
    amps: BTreeMap<BasisLabel, Complex64>,
    prune_threshold: f64,
}

impl StateVector {
    /// The zero vector on a device with `cavities` cavities and `internals`
    /// internal states.
    pub fn zero(cavities: usize, internals: usize) -> Result<Self> {
        if cavities == 0 {
            return Err(Error::InvalidInput("device needs at least one cavity".into()));
        }
        if internals == 0 {
            return Err(Error::InvalidInput(
                "device needs at least one internal state".into(),
            ));
        }
        Ok(Self {
            cavities,
            internals,
            amps: BTreeMap::new(),
            prune_threshold: DEFAULT_PRUNE_THRESHOLD,
        })
    }

    /// Builds a state from `(label, amplitude)` pairs. Amplitudes on repeated
    /// labels add up.
    pub fn from_amplitudes<I>(cavities: usize, internals: usize, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, Complex64)>,
    {
        let mut state = Self::zero(cavities, internals)?;
        for (label, amp) in amplitudes {
            let sum = state.amplitude(label) + amp;
            state.set_amplitude(label, sum)?;
        }
        Ok(state)
    }

    /// Replaces the prune threshold (magnitude under which entries are
    /// dropped). Pass 0.0 to keep every explicitly set entry.
    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self
    }

    pub fn cavities(&self) -> usize {
        self.cavities
    }

    pub fn internals(&self) -> usize {
        self.internals
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    fn check_label(&self, label: BasisLabel) -> Result<()> {
        if label.cavity >= self.cavities {
            return Err(Error::CavityOutOfRange {
                index: label.cavity,
                cavities: self.cavities,
            });
        }
        if label.internal >= self.internals {
            return Err(Error::InternalOutOfRange {
                index: label.internal,
                internals: self.internals,
            });
        }
        Ok(())
    }

    /// Amplitude at `label`, zero when absent.
    pub fn amplitude(&self, label: BasisLabel) -> Complex64 {
        self.amps.get(&label).copied().unwrap_or(Complex64::ZERO)
    }

    /// Sets one amplitude, dropping it if its magnitude falls below the prune
    /// threshold.
    pub fn set_amplitude(&mut self, label: BasisLabel, amp: Complex64) -> Result<()> {
        self.check_label(label)?;
        if !amp.re.is_finite() || !amp.im.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite amplitude at internal {} cavity {}",
                label.internal, label.cavity
            )));
        }
        if amp.norm() < self.prune_threshold {
            self.amps.remove(&label);
        } else {
            self.amps.insert(label, amp);
        }
        Ok(())
    }

    /// Iterates stored entries in `(internal, cavity)` order.
    pub fn amplitudes(&self) -> impl Iterator<Item = (BasisLabel, Complex64)> + '_ {
        self.amps.iter().map(|(l, a)| (*l, *a))
    }

    pub fn stored_len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Euclidean norm `sqrt(sum |amplitude|^2)`.
    ///
    /// The squared magnitudes are summed in value order, so relabeling
    /// cavities cannot change the result even at the last bit.
    pub fn norm(&self) -> f64 {
        let mut sq: Vec<f64> = self.amps.values().map(|a| a.norm_sqr()).collect();
        sq.sort_by(f64::total_cmp);
        // An empty sum is -0.0; magnitudes are reported with the sign cleared.
        sq.into_iter().sum::<f64>().sqrt().abs()
    }

    /// Total squared magnitude carried by one internal state.
    pub fn internal_weight(&self, internal: usize) -> f64 {
        self.amps
            .iter()
            .filter(|(l, _)| l.internal == internal)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .abs()
    }

    /// Magnitude of the amplitude sitting in one cavity, combined over all
    /// internal states.
    pub fn cavity_magnitude(&self, cavity: usize) -> f64 {
        self.amps
            .iter()
            .filter(|(l, _)| l.cavity == cavity)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
            .abs()
    }

    /// Exchanges the contents of two cavities across every internal state.
    pub fn swap_cavities(&self, a: usize, b: usize) -> Result<StateVector> {
        for index in [a, b] {
            if index >= self.cavities {
                return Err(Error::CavityOutOfRange {
                    index,
                    cavities: self.cavities,
                });
            }
        }
        let mut amps = BTreeMap::new();
        for (label, amp) in &self.amps {
            let cavity = if label.cavity == a {
                b
            } else if label.cavity == b {
                a
            } else {
                label.cavity
            };
            amps.insert(BasisLabel::new(label.internal, cavity), *amp);
        }
        Ok(StateVector { amps, ..*self })
    }

    /// Spread of per-cavity magnitudes over a set of cavities: max minus min
    /// of [`cavity_magnitude`](Self::cavity_magnitude). Zero means the listed
    /// cavities hold equal weight; phases are ignored.
    pub fn amplitude_dispersion(&self, cavities: &[usize]) -> Result<f64> {
        if cavities.is_empty() {
            return Err(Error::EmptyCavitySet);
        }
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for &cavity in cavities {
            if cavity >= self.cavities {
                return Err(Error::CavityOutOfRange {
                    index: cavity,
                    cavities: self.cavities,
                });
            }
            let mag = self.cavity_magnitude(cavity);
            max = max.max(mag);
            min = min.min(mag);
        }
        Ok(max - min)
    }

    /// The state multiplied by a complex scalar.
    pub fn scaled(&self, factor: Complex64) -> StateVector {
        let mut out = StateVector {
            amps: BTreeMap::new(),
            ..*self
        };
        for (label, amp) in &self.amps {
            let scaled = amp * factor;
            if scaled.norm() >= out.prune_threshold {
                out.amps.insert(*label, scaled);
            }
        }
        out
    }

    /// Entrywise sum of two states on the same device.
    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        if self.cavities != other.cavities || self.internals != other.internals {
            return Err(Error::DimensionMismatch {
                state_cavities: other.cavities,
                state_internals: other.internals,
                device_cavities: self.cavities,
                device_internals: self.internals,
            });
        }
        let mut out = self.clone();
        for (label, amp) in &other.amps {
            let sum = out.amplitude(*label) + amp;
            out.set_amplitude(*label, sum)?;
        }
        Ok(out)
    }

    /// True when every amplitude of `self` and `other` agrees within `tol`
    /// (absolute, per entry).
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        if self.cavities != other.cavities || self.internals != other.internals {
            return false;
        }
        let mut labels: Vec<BasisLabel> = self.amps.keys().copied().collect();
        labels.extend(other.amps.keys().copied());
        labels.sort_unstable();
        labels.dedup();
        labels
            .into_iter()
            .all(|l| (self.amplitude(l) - other.amplitude(l)).norm() <= tol)
    }
}
