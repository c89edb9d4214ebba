//! Sparse photon states on the OAM ⊗ spatial-mode space.
//!
//! A state is a finite superposition of kets |ℓ⟩_OAM ⊗ |m⟩_mode with complex
//! amplitudes. The OAM index ℓ is an unbounded (possibly negative) integer;
//! the spatial mode m lives in [0, d) for the ambient mode count d. Storage
//! is an ordered map keyed by (ℓ, m), so iteration order — and therefore
//! every floating-point accumulation in this crate — is deterministic.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude below this are dropped by pruning steps.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Internal tolerance for norm preservation by unitary element application.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// One basis ket |ℓ⟩_OAM ⊗ |m⟩_mode.
///
/// Ordering is lexicographic in (ℓ, m); matrix bases and serialized output
/// rely on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub ell: i64,
    pub mode: usize,
}

impl BasisLabel {
    pub fn new(ell: i64, mode: usize) -> Self {
        Self { ell, mode }
    }
}

/// Finite sparse superposition of [`BasisLabel`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    mode_count: usize,
    amps: BTreeMap<BasisLabel, Complex64>,
}

impl PhotonState {
    /// The unit-norm state with a single amplitude 1 on (ell, mode).
    pub fn basis_state(ell: i64, mode: usize, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        if mode >= d {
            return Err(Error::ModeOutOfRange { mode, d });
        }
        let mut amps = BTreeMap::new();
        amps.insert(BasisLabel::new(ell, mode), Complex64::new(1.0, 0.0));
        Ok(Self {
            mode_count: d,
            amps,
        })
    }

    /// Build a state from explicit (ℓ, mode, amplitude) entries.
    ///
    /// Entries for the same ket accumulate. The result is not normalized.
    pub fn superposition(d: usize, entries: &[(i64, usize, Complex64)]) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("mode count must be positive".into()));
        }
        let mut state = Self {
            mode_count: d,
            amps: BTreeMap::new(),
        };
        for &(ell, mode, amp) in entries {
            if mode >= d {
                return Err(Error::ModeOutOfRange { mode, d });
            }
            state.add(BasisLabel::new(ell, mode), amp);
        }
        Ok(state)
    }

    /// An empty (zero) state; useful as an accumulator.
    pub(crate) fn zero(d: usize) -> Self {
        Self {
            mode_count: d,
            amps: BTreeMap::new(),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitude(&self, ell: i64, mode: usize) -> Complex64 {
        self.amps
            .get(&BasisLabel::new(ell, mode))
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Iterate stored amplitudes in lexicographic (ℓ, mode) order.
    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.amps.iter()
    }

    pub(crate) fn add(&mut self, label: BasisLabel, amp: Complex64) {
        use std::collections::btree_map::Entry;
        match self.amps.entry(label) {
            Entry::Vacant(v) => {
                v.insert(amp);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += amp;
            }
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescale to unit norm. Fails on the zero state.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < PRUNE_THRESHOLD {
            return Err(Error::ZeroState);
        }
        let mut out = self.clone();
        for amp in out.amps.values_mut() {
            *amp /= n;
        }
        Ok(out)
    }

    /// ⟨self|other⟩ = Σ conj(self[x])·other[x].
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeCountMismatch {
                left: self.mode_count,
                right: other.mode_count,
            });
        }
        // Iterate the smaller support.
        let (small, big) = if self.amps.len() <= other.amps.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (label, amp) in small.amps.iter() {
            if let Some(other_amp) = big.amps.get(label) {
                let (bra, ket) = if std::ptr::eq(small, self) {
                    (*amp, *other_amp)
                } else {
                    (*other_amp, *amp)
                };
                acc += bra.conj() * ket;
            }
        }
        Ok(acc)
    }

    /// |⟨self|other⟩|², clamped to [0, 1] against round-off.
    ///
    /// Meaningful when both states are unit-norm.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        let ip = self.inner_product(other)?;
        Ok(ip.norm_sqr().clamp(0.0, 1.0))
    }

    /// Per-mode probability Σ_ℓ |amplitude(ℓ, m)|², indexed by mode.
    pub fn mode_marginal(&self) -> Vec<f64> {
        let mut marginal = vec![0.0; self.mode_count];
        for (label, amp) in self.amps.iter() {
            marginal[label.mode] += amp.norm_sqr();
        }
        marginal
    }

    /// Drop amplitudes with magnitude below [`PRUNE_THRESHOLD`].
    pub fn pruned(mut self) -> Self {
        self.amps
            .retain(|_, amp| amp.norm() >= PRUNE_THRESHOLD);
        self
    }

    /// Smallest and largest OAM value in the support, if nonempty.
    pub fn oam_support(&self) -> Option<(i64, i64)> {
        let lo = self.amps.keys().next()?.ell;
        let hi = self.amps.keys().next_back()?.ell;
        Some((lo, hi))
    }
}

/// The d equally spaced OAM values {ℓ0 + j·p : j = 0..d−1} a cyclic gate
/// permutes, together with the derived correction quantities the builders
/// need.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingSubspace {
    d: usize,
    p: u32,
    ell0: i64,
}

impl CodingSubspace {
    pub fn new(d: usize, p: u32, ell0: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "qudit dimension must be at least 2, got {d}"
            )));
        }
        if p < 1 {
            return Err(Error::InvalidArgument("step must be at least 1".into()));
        }
        Ok(Self { d, p, ell0 })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn step(&self) -> u32 {
        self.p
    }

    pub fn base_oam(&self) -> i64 {
        self.ell0
    }

    /// The coding OAM values in cyclic order, ℓ0 first.
    pub fn values(&self) -> Vec<i64> {
        (0..self.d as i64)
            .map(|j| self.ell0 + j * self.p as i64)
            .collect()
    }

    pub fn contains(&self, ell: i64) -> bool {
        let off = ell - self.ell0;
        let p = self.p as i64;
        off.rem_euclid(p) == 0 && (0..self.d as i64).contains(&(off / p))
    }

    /// Cyclic successor within the coding set: ℓ0 + jp ↦ ℓ0 + ((j+1) mod d)p.
    pub fn successor(&self, ell: i64) -> Option<i64> {
        if !self.contains(ell) {
            return None;
        }
        let p = self.p as i64;
        let j = (ell - self.ell0) / p;
        Some(self.ell0 + ((j + 1).rem_euclid(self.d as i64)) * p)
    }

    /// Offset of ℓ0 within one step period: ℓ0 mod p, in [0, p).
    ///
    /// Nonzero exactly when the coding values are not multiples of the step;
    /// the sorter then needs a ∓offset shift around it before it routes them
    /// onto distinct modes.
    pub fn step_offset(&self) -> i64 {
        self.ell0.rem_euclid(self.p as i64)
    }

    /// The spatial mode on which the wrapped value ℓ0 + d·p exits the sorter
    /// once the step offset has been removed: ((ℓ0 − step_offset)/p) mod d.
    ///
    /// Reduces to ℓ0 mod d for unit step.
    pub fn wrap_mode(&self) -> usize {
        let p = self.p as i64;
        let t = (self.ell0 - self.step_offset()) / p;
        t.rem_euclid(self.d as i64) as usize
    }

    /// Shift that maps the coding set onto {0, p, …, (d−1)p}: ℓ0 mod (p·d).
    ///
    /// Reduces to ℓ0 mod d for unit step.
    pub fn alignment_shift(&self) -> i64 {
        self.ell0.rem_euclid(self.p as i64 * self.d as i64)
    }
}
