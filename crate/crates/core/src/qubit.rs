//! Pure single-qubit states labelled by points of the Riemann sphere:
//! `z ↔ (|0⟩ + z|1⟩)/√(1+|z|²)`, with `∞ ↔ |1⟩`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{ExtComplex, GeneralizedCircle};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used to decide that an overlap circle degenerates into a line.
const LINE_TOL: f64 = 1e-12;

/// Normalized qubit amplitudes with the first nonzero amplitude real and
/// non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: [Complex64; 2],
}

impl PureState {
    /// Normalizes and fixes the global phase of an arbitrary nonzero vector.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        let n = amp0.norm().hypot(amp1.norm());
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain("state vector must be finite and nonzero"));
        }
        let lead = if amp0 != ZERO { amp0 } else { amp1 };
        let phase = lead.conj() / lead.norm();
        Ok(PureState { amplitudes: [amp0 * phase / n, amp1 * phase / n] })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amplitudes[0].conj() * other.amplitudes[0] + self.amplitudes[1].conj() * other.amplitudes[1]
    }
}

/// Unit Bloch vector; `|0⟩` is `+z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

pub fn state_from_z(z: &ExtComplex) -> PureState {
    let amplitudes = match z.finite() {
        None => [ZERO, ONE],
        Some(z) => {
            let n = 1.0f64.hypot(z.norm());
            [Complex64::new(1.0 / n, 0.0), z / n]
        }
    };
    PureState { amplitudes }
}

pub fn z_from_state(s: &PureState) -> ExtComplex {
    let [a0, a1] = s.amplitudes;
    ExtComplex::from_homogeneous(a1, a0)
}

/// Scalar product `⟨ψ_{z1}|ψ_{z2}⟩ = (1 + z̄1 z2)/√((1+|z1|²)(1+|z2|²))`.
pub fn overlap(z1: &ExtComplex, z2: &ExtComplex) -> Complex64 {
    state_from_z(z1).overlap(&state_from_z(z2))
}

/// `|⟨ψ_{z1}|ψ_{z2}⟩|²`.
pub fn overlap_sqr(z1: &ExtComplex, z2: &ExtComplex) -> f64 {
    overlap(z1, z2).norm_sqr()
}

/// `−1/z̄`, the label of the orthogonal state.
pub fn orthogonal_partner(z: &ExtComplex) -> ExtComplex {
    match z.finite() {
        None => ExtComplex::ZERO,
        Some(z) if z == ZERO => ExtComplex::Infinity,
        Some(z) => (-z.conj().inv()).into(),
    }
}

pub fn bloch_vector(z: &ExtComplex) -> BlochVector {
    let [a0, a1] = state_from_z(z).amplitudes;
    let coherence = a0.conj() * a1;
    BlochVector {
        x: 2.0 * coherence.re,
        y: 2.0 * coherence.im,
        z: a0.norm_sqr() - a1.norm_sqr(),
    }
}

/// The locus of states with `|⟨ψ_{z1}|ψ_z⟩| = s_abs`.
///
/// With `S = s²(1+|z1|²)` the locus is
/// `(|z1|² − S)|z|² + 2 Re(z̄1 z) + (1 − S) = 0`: a circle with center
/// `z1/(S − |z1|²)` or, when `S = |z1|²`, a line through the origin.
/// For `z1 = ∞` the overlap with `|1⟩` is traded for the overlap
/// `√(1 − s²)` with `|0⟩`.
pub fn overlap_circle(z1: &ExtComplex, s_abs: f64) -> Result<GeneralizedCircle> {
    check_overlap(s_abs)?;
    let Some(z1) = z1.finite() else {
        return overlap_circle(&ExtComplex::ZERO, (1.0 - s_abs * s_abs).sqrt());
    };
    let m = z1.norm_sqr();
    let big_s = s_abs * s_abs * (1.0 + m);
    let mut a = m - big_s;
    if a.abs() <= LINE_TOL * (1.0 + m) {
        a = 0.0;
    }
    GeneralizedCircle::from_coefficients(a, z1, 1.0 - big_s)
}

/// Where the reference point sits relative to its own overlap circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceSide {
    ReferenceInside,
    Line,
    PartnerInside,
}

/// Compares `s²` with `|s0|² = |z1|²/(1+|z1|²)`.
pub fn reference_inside(z1: Complex64, s_abs: f64) -> Result<ReferenceSide> {
    check_overlap(s_abs)?;
    if z1 == ZERO {
        return Err(Error::domain("reference_inside needs a nonzero reference"));
    }
    let m = z1.norm_sqr();
    let diff = s_abs * s_abs * (1.0 + m) - m;
    Ok(if diff.abs() <= LINE_TOL * (1.0 + m) {
        ReferenceSide::Line
    } else if diff > 0.0 {
        ReferenceSide::ReferenceInside
    } else {
        ReferenceSide::PartnerInside
    })
}

fn check_overlap(s_abs: f64) -> Result<()> {
    if s_abs > 0.0 && s_abs < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("overlap must lie in (0, 1), got {s_abs}")))
    }
}
