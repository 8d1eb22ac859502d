//! Möbius transformations `g(z) = (az + b)/(cz + d)` of the Riemann sphere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{ExtComplex, GeneralizedCircle};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Determinant threshold relative to the squared coefficient scale.
const SINGULAR_EPS: f64 = 1e-14;

/// A Möbius transformation with coefficients scaled so that
/// `max(|a|, |b|, |c|, |d|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::domain("Möbius coefficients must be finite and not all zero"));
        }
        let det = a * d - b * c;
        if !(det.norm() > SINGULAR_EPS * scale * scale) {
            return Err(Error::domain(format!(
                "singular Möbius transformation: |ad - bc| = {:e}",
                det.norm()
            )));
        }
        Ok(MoebiusTransform { a: a / scale, b: b / scale, c: c / scale, d: d / scale })
    }

    pub fn identity() -> Self {
        MoebiusTransform { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// `z ↦ εz`.
    pub fn scaling(epsilon: Complex64) -> Result<Self> {
        if epsilon == ZERO || !(epsilon.re.is_finite() && epsilon.im.is_finite()) {
            return Err(Error::domain(format!("scaling factor must be finite and nonzero, got {epsilon}")));
        }
        Self::new(epsilon, ZERO, ZERO, ONE)
    }

    /// `z ↦ z + t`.
    pub fn translation(t: Complex64) -> Result<Self> {
        Self::new(ONE, t, ZERO, ONE)
    }

    /// `z ↦ 1/z`.
    pub fn reciprocal() -> Self {
        MoebiusTransform { a: ZERO, b: ONE, c: ONE, d: ZERO }
    }

    pub fn coefficients(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub(crate) fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// Adjugate matrix; projectively the inverse.
    pub(crate) fn adjugate(&self) -> [[Complex64; 2]; 2] {
        [[self.d, -self.b], [-self.c, self.a]]
    }

    pub fn apply(&self, z: &ExtComplex) -> ExtComplex {
        let (u, v) = z.to_homogeneous();
        ExtComplex::from_homogeneous(self.a * u + self.b * v, self.c * u + self.d * v)
    }

    /// `self ∘ inner`, i.e. `inner` acts first.
    pub fn compose(&self, inner: &MoebiusTransform) -> MoebiusTransform {
        let m = mat_mul(&self.matrix(), &inner.matrix());
        // the product of two nonsingular matrices stays nonsingular
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1]).expect("composition of Möbius maps is invertible")
    }

    pub fn inverse(&self) -> MoebiusTransform {
        let m = self.adjugate();
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1]).expect("inverse of a Möbius map is invertible")
    }

    /// Splits `g` into elementary factors.
    ///
    /// For `c ≠ 0` these are `z + d/c`, `1/z`, `((bc − ad)/c²) z` and
    /// `z + a/c`, applied in that order. For `c = 0` the map is affine and
    /// splits into a scaling followed by a translation.
    pub fn decompose_elementary(&self) -> Decomposition {
        let MoebiusTransform { a, b, c, d } = *self;
        if c == ZERO {
            return Decomposition::Affine {
                scale: Self::scaling(a / d).expect("a/d is nonzero for an invertible affine map"),
                translate: Self::translation(b / d).expect("finite translation"),
            };
        }
        Decomposition::General([
            Self::translation(d / c).expect("finite translation"),
            Self::reciprocal(),
            Self::scaling((b * c - a * d) / (c * c)).expect("nonzero determinant"),
            Self::translation(a / c).expect("finite translation"),
        ])
    }

    /// Images of the given fixed points; these are the fixed points of the
    /// conjugated map `g ∘ f ∘ g⁻¹`.
    pub fn transport_fixed_points(&self, points: &[ExtComplex]) -> Vec<ExtComplex> {
        points.iter().map(|z| self.apply(z)).collect()
    }

    /// Image of a generalized circle, by congruence of its Hermitian form
    /// with the inverse coefficient matrix.
    pub fn map_circle(&self, gc: &GeneralizedCircle) -> Result<GeneralizedCircle> {
        let adj = self.adjugate();
        let h = gc.hermitian();
        let adj_h = [
            [adj[0][0].conj(), adj[1][0].conj()],
            [adj[0][1].conj(), adj[1][1].conj()],
        ];
        let image = mat_mul(&mat_mul(&adj_h, &h), &adj);
        GeneralizedCircle::from_coefficients(image[0][0].re, image[0][1], image[1][1].re).map_err(|e| {
            Error::degenerate(format!(
                "image of circle {:?} under {:?} is degenerate ({e})",
                gc.coefficients(),
                self.coefficients()
            ))
        })
    }

    /// Equality up to a common complex factor, measured after aligning the
    /// phase of `other` to `self`.
    pub fn projective_distance(&self, other: &MoebiusTransform) -> f64 {
        crate::projective_distance(
            &[self.a, self.b, self.c, self.d],
            &[other.a, other.b, other.c, other.d],
        )
    }
}

/// Result of [`MoebiusTransform::decompose_elementary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decomposition {
    /// Four factors `[g1, g2, g3, g4]`; `g = g4 ∘ g3 ∘ g2 ∘ g1`.
    General([MoebiusTransform; 4]),
    /// `g = translate ∘ scale`.
    Affine {
        scale: MoebiusTransform,
        translate: MoebiusTransform,
    },
}

impl Decomposition {
    /// Composes the factors back into a single transformation.
    pub fn recompose(&self) -> MoebiusTransform {
        match self {
            Decomposition::General(fs) => fs[3].compose(&fs[2].compose(&fs[1].compose(&fs[0]))),
            Decomposition::Affine { scale, translate } => translate.compose(scale),
        }
    }
}

/// Möbius maps `(pz + q)/(−q̄z + p̄)` with `|p|² + |q|² = 1`; these are the
/// actions of single-qubit unitaries on the state label `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitaryMoebius {
    p: Complex64,
    q: Complex64,
}

impl UnitaryMoebius {
    pub fn new(p: Complex64, q: Complex64) -> Result<Self> {
        let n = p.norm_sqr() + q.norm_sqr();
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(Error::domain(format!("|p|^2 + |q|^2 = {n}, expected 1")));
        }
        Ok(UnitaryMoebius { p, q })
    }

    /// The unitary map sending `0 ↦ z1` and `∞ ↦ −1/z̄1`.
    ///
    /// `z1 = ∞` uses `p = 0`, `q = e^{−iα}`, which swaps `0` and `∞`.
    pub fn from_reference(z1: &ExtComplex, alpha_u: f64) -> Self {
        let phase = Complex64::from_polar(1.0, alpha_u);
        match z1 {
            ExtComplex::Infinity => UnitaryMoebius { p: ZERO, q: phase.conj() },
            ExtComplex::Finite(z1) => {
                let n = 1.0f64.hypot(z1.norm());
                UnitaryMoebius { p: phase / n, q: z1 * phase.conj() / n }
            }
        }
    }

    pub fn p(&self) -> Complex64 {
        self.p
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn to_moebius(&self) -> MoebiusTransform {
        MoebiusTransform::new(self.p, self.q, -self.q.conj(), self.p.conj())
            .expect("unitary Möbius maps have unit determinant")
    }

    pub fn apply(&self, z: &ExtComplex) -> ExtComplex {
        self.to_moebius().apply(z)
    }

    pub fn inverse(&self) -> UnitaryMoebius {
        UnitaryMoebius { p: self.p.conj(), q: -self.q }
    }
}

pub(crate) fn mat_mul(x: &[[Complex64; 2]; 2], y: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}
