//! Measurement-induced nonlinear qubit maps for quantum state matching.
//!
//! Pairs of identically prepared qubits go through a two-qubit gate; one
//! qubit is measured and the other is kept only on outcome `0`. The kept
//! qubit's label `z` then evolves by a quadratic rational map. This crate
//! builds the maps that drive every state to one of two orthogonal
//! superattractive fixed points depending on whether its overlap with a
//! reference state exceeds a threshold, synthesizes gates realizing them
//! and simulates the iterated protocol.

// `!(x < tol)` rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basin;
pub mod complex;
pub mod document;
pub mod dynamics;
pub mod error;
pub mod gate;
pub mod matcher;
pub mod moebius;
pub mod protocol;
pub mod qubit;
mod roots;

pub use complex::{ExtComplex, GeneralizedCircle, PointClass};
pub use dynamics::{FixedPointData, QuadraticRationalMap};
pub use error::{Error, Result};
pub use gate::{SingleQubitGate, TwoQubitGate};
pub use matcher::{Matcher, MatcherSpec, Verdict};
pub use moebius::{MoebiusTransform, UnitaryMoebius};
pub use num_complex::Complex64;
pub use qubit::{BlochVector, PureState};

/// Distance between two coefficient vectors modulo a common nonzero complex
/// factor: both are scaled to unit length and phase-aligned, then compared
/// entrywise. Zero means projectively equal.
pub fn projective_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let nx = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let ny = y.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let inner: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    x.iter()
        .zip(y)
        .map(|(a, b)| (b / ny - phase * a / nx).norm())
        .fold(0.0, f64::max)
}
