//! Points of the extended complex plane and generalized circles.
//!
//! A qubit state `|0⟩ + z|1⟩` is labelled by `z` on the Riemann sphere, so
//! `|1⟩` sits at the single point at infinity. All arithmetic that may hit
//! that point goes through homogeneous coordinates `(u : v)` instead of IEEE
//! infinities.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex::Finite(Complex64::new(0.0, 0.0));
    pub const ONE: ExtComplex = ExtComplex::Finite(Complex64::new(1.0, 0.0));
    pub const I: ExtComplex = ExtComplex::Finite(Complex64::new(0.0, 1.0));

    pub fn new(re: f64, im: f64) -> Self {
        Complex64::new(re, im).into()
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    /// Homogeneous coordinates `(u, v)` with `z = u / v` and
    /// `max(|u|, |v|) = 1`.
    pub fn to_homogeneous(&self) -> (Complex64, Complex64) {
        match *self {
            ExtComplex::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            ExtComplex::Finite(z) => {
                if z.norm() <= 1.0 {
                    (z, Complex64::new(1.0, 0.0))
                } else {
                    (Complex64::new(1.0, 0.0), z.inv())
                }
            }
        }
    }

    /// Inverse of [`to_homogeneous`](Self::to_homogeneous); `(u, 0)` is infinity.
    pub fn from_homogeneous(u: Complex64, v: Complex64) -> Self {
        if v == Complex64::new(0.0, 0.0) {
            debug_assert!(u != Complex64::new(0.0, 0.0), "(0 : 0) is not a point");
            return ExtComplex::Infinity;
        }
        (u / v).into()
    }

    /// Chordal distance on the Riemann sphere of diameter 2.
    ///
    /// Lies in `[0, 2]`; antipodal points are at distance 2.
    pub fn chordal_distance(&self, other: &ExtComplex) -> f64 {
        match (*self, *other) {
            (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
            (ExtComplex::Finite(z), ExtComplex::Infinity)
            | (ExtComplex::Infinity, ExtComplex::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (ExtComplex::Finite(z), ExtComplex::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }
}

impl From<Complex64> for ExtComplex {
    /// Non-finite components collapse to the point at infinity.
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtComplex::Finite(z)
        } else {
            ExtComplex::Infinity
        }
    }
}

impl fmt::Display for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Infinity => write!(f, "inf"),
            ExtComplex::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

/// Which side of a generalized circle a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Inside,
    On,
    Outside,
}

/// A circle or a line, stored as the zero set of
/// `A|z|² + 2 Re(conj(B) z) + C`.
///
/// Always held in canonical form: `A = 1` for circles, `A = 0` and `|B| = 1`
/// for lines. For circles the interior is where the form is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCircle {
    a: f64,
    b: Complex64,
    c: f64,
}

/// Relative size of `A` below which a locus is treated as a line.
const LINE_EPS: f64 = 1e-14;
/// Relative size of the discriminant below which a locus is degenerate.
const DEGENERATE_EPS: f64 = 1e-14;

impl GeneralizedCircle {
    /// Builds the locus from raw (possibly unnormalized) coefficients.
    pub fn from_coefficients(a: f64, b: Complex64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.re.is_finite() && b.im.is_finite() && c.is_finite()) {
            return Err(Error::domain("generalized circle with non-finite coefficients"));
        }
        let scale = a.abs().max(b.norm()).max(c.abs());
        if scale == 0.0 {
            return Err(Error::domain("generalized circle with all-zero coefficients"));
        }
        let disc = b.norm_sqr() - a * c;
        if !(disc > DEGENERATE_EPS * scale * scale) {
            return Err(Error::domain(format!(
                "degenerate generalized circle: |B|^2 - AC = {disc:e} at coefficient scale {scale:e}"
            )));
        }
        Ok(if a.abs() <= LINE_EPS * scale {
            let n = b.norm();
            GeneralizedCircle { a: 0.0, b: b / n, c: c / n }
        } else {
            GeneralizedCircle { a: 1.0, b: b / a, c: c / a }
        })
    }

    pub fn from_center_radius(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::domain(format!("circle radius must be positive, got {radius}")));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::domain("circle center must be finite"));
        }
        Self::from_coefficients(1.0, -center, center.norm_sqr() - radius * radius)
    }

    pub fn unit() -> Self {
        GeneralizedCircle { a: 1.0, b: Complex64::new(0.0, 0.0), c: -1.0 }
    }

    pub fn coefficients(&self) -> (f64, Complex64, f64) {
        (self.a, self.b, self.c)
    }

    pub fn is_line(&self) -> bool {
        self.a == 0.0
    }

    pub fn center(&self) -> Option<Complex64> {
        (!self.is_line()).then(|| -self.b)
    }

    pub fn radius(&self) -> Option<f64> {
        (!self.is_line()).then(|| (self.b.norm_sqr() - self.c).sqrt())
    }

    /// Hermitian matrix `H` with `(z̄, 1) H (z, 1)ᵀ` equal to the defining form.
    pub(crate) fn hermitian(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.a, 0.0), self.b],
            [self.b.conj(), Complex64::new(self.c, 0.0)],
        ]
    }

    /// Value of the defining quadratic form at a finite point.
    pub fn form(&self, z: Complex64) -> f64 {
        self.a * z.norm_sqr() + 2.0 * (self.b.conj() * z).re + self.c
    }

    /// Classifies `z`; `|form| ≤ tol·(1+|z|²)` counts as on the locus.
    ///
    /// Infinity lies on every line and outside every circle.
    pub fn classify(&self, z: &ExtComplex, tol: f64) -> PointClass {
        match z {
            ExtComplex::Infinity => {
                if self.is_line() {
                    PointClass::On
                } else {
                    PointClass::Outside
                }
            }
            ExtComplex::Finite(z) => {
                let value = self.form(*z);
                if value.abs() <= tol * (1.0 + z.norm_sqr()) {
                    PointClass::On
                } else if value < 0.0 {
                    PointClass::Inside
                } else {
                    PointClass::Outside
                }
            }
        }
    }

    /// `n` equally spaced points `c + r e^{2πik/n}`.
    pub fn sample(&self, n: usize) -> Result<Vec<Complex64>> {
        if n == 0 {
            return Err(Error::domain("sample count must be at least 1"));
        }
        let (Some(c), Some(r)) = (self.center(), self.radius()) else {
            return Err(Error::Unsupported("sampling a line".into()));
        };
        Ok((0..n)
            .map(|k| c + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
            .collect())
    }

    /// Same locus up to `tol`, comparing unit-normalized coefficient vectors
    /// up to sign.
    pub fn same_locus(&self, other: &GeneralizedCircle, tol: f64) -> bool {
        let unit = |g: &GeneralizedCircle| {
            let n = (g.a * g.a + g.b.norm_sqr() + g.c * g.c).sqrt();
            (g.a / n, g.b / n, g.c / n)
        };
        let (a1, b1, c1) = unit(self);
        let (a2, b2, c2) = unit(other);
        let d = |s: f64| {
            (a1 - s * a2).abs().max((b1 - s * b2).norm()).max((c1 - s * c2).abs())
        };
        d(1.0).min(d(-1.0)) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unit_circle_from_center_radius() {
        let gc = GeneralizedCircle::from_center_radius(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(gc.coefficients(), (1.0, c(0.0, 0.0), -1.0));
        assert_eq!(gc, GeneralizedCircle::unit());
    }

    #[test]
    fn center_radius_round_trip() {
        let gc = GeneralizedCircle::from_center_radius(c(-2.5, 0.75), 3.25).unwrap();
        assert!((gc.center().unwrap() - c(-2.5, 0.75)).norm() < 1e-15);
        assert!((gc.radius().unwrap() - 3.25).abs() < 1e-14);
    }

    #[test]
    fn bad_radius_rejected() {
        for r in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(GeneralizedCircle::from_center_radius(c(0.0, 0.0), r).is_err());
        }
    }

    #[test]
    fn degenerate_loci_rejected() {
        // single point |z|^2 = 0 and the empty set |z|^2 + 1 = 0
        assert!(GeneralizedCircle::from_coefficients(1.0, c(0.0, 0.0), 0.0).is_err());
        assert!(GeneralizedCircle::from_coefficients(1.0, c(0.0, 0.0), 1.0).is_err());
        assert!(GeneralizedCircle::from_coefficients(0.0, c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn classify_unit_circle() {
        let gc = GeneralizedCircle::unit();
        assert_eq!(gc.classify(&ExtComplex::ZERO, 1e-12), PointClass::Inside);
        assert_eq!(gc.classify(&ExtComplex::ONE, 1e-12), PointClass::On);
        assert_eq!(gc.classify(&ExtComplex::new(2.0, 0.0), 1e-12), PointClass::Outside);
        assert_eq!(gc.classify(&ExtComplex::Infinity, 1e-12), PointClass::Outside);
    }

    #[test]
    fn lines_contain_infinity() {
        let line = GeneralizedCircle::from_coefficients(0.0, c(2.0, 0.0), 0.0).unwrap();
        assert!(line.is_line());
        assert_eq!(line.coefficients().1, c(1.0, 0.0));
        assert_eq!(line.classify(&ExtComplex::Infinity, 0.0), PointClass::On);
        assert_eq!(line.classify(&ExtComplex::new(0.0, 7.0), 1e-12), PointClass::On);
        assert!(line.sample(4).is_err());
    }

    #[test]
    fn sample_unit_circle() {
        let pts = GeneralizedCircle::unit().sample(4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (p, w) in pts.iter().zip(want) {
            assert!((p - w).norm() < 1e-15);
        }
        assert_eq!(GeneralizedCircle::unit().sample(1).unwrap(), vec![c(1.0, 0.0)]);
        assert!(GeneralizedCircle::unit().sample(0).is_err());
    }

    #[test]
    fn homogeneous_round_trip() {
        for z in [ExtComplex::ZERO, ExtComplex::Infinity, ExtComplex::new(3.0, -4.0), ExtComplex::new(0.1, 0.2)] {
            let (u, v) = z.to_homogeneous();
            assert!((u.norm().max(v.norm()) - 1.0).abs() < 1e-15);
            assert!(ExtComplex::from_homogeneous(u, v).chordal_distance(&z) < 1e-15);
        }
    }

    #[test]
    fn same_locus_ignores_scale_and_sign() {
        let gc = GeneralizedCircle::from_center_radius(c(1.0, 1.0), 0.5).unwrap();
        let (a, b, cc) = gc.coefficients();
        let neg = GeneralizedCircle::from_coefficients(-3.0 * a, -3.0 * b, -3.0 * cc).unwrap();
        assert!(gc.same_locus(&neg, 1e-15));
        let other = GeneralizedCircle::from_center_radius(c(1.0, 1.0), 0.6).unwrap();
        assert!(!gc.same_locus(&other, 1e-6));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn samples_lie_on_circle(re in -5.0..5.0f64, im in -5.0..5.0f64, r in 0.01..10.0f64, n in 1usize..64) {
                let gc = GeneralizedCircle::from_center_radius(c(re, im), r).unwrap();
                for z in gc.sample(n).unwrap() {
                    prop_assert_eq!(gc.classify(&z.into(), 1e-12), PointClass::On);
                }
            }

            #[test]
            fn canonicalization_preserves_locus(
                a in -3.0..3.0f64, bre in -3.0..3.0f64, bim in -3.0..3.0f64, cc in -3.0..3.0f64,
                lambda in prop_oneof![-10.0..-0.1f64, 0.1..10.0f64],
                probes in proptest::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 100),
            ) {
                let b = c(bre, bim);
                prop_assume!(b.norm_sqr() - a * cc > 1e-3);
                let gc = GeneralizedCircle::from_coefficients(a, b, cc).unwrap();
                let again = GeneralizedCircle::from_coefficients(gc.a, gc.b, gc.c).unwrap();
                prop_assert_eq!(gc, again);
                let scaled = GeneralizedCircle::from_coefficients(lambda * a, lambda * b, lambda * cc).unwrap();
                prop_assert!(gc.same_locus(&scaled, 1e-12));
                // raw form sign agrees with canonical classification up to the orientation flip
                let flip = if gc.is_line() { 1.0 } else { a.signum() };
                for (x, y) in probes {
                    let z = c(x, y);
                    let raw = a * z.norm_sqr() + 2.0 * (b.conj() * z).re + cc;
                    prop_assume!(raw.abs() > 1e-9);
                    let class = gc.classify(&z.into(), 0.0);
                    let raw_inside = flip * raw < 0.0;
                    prop_assert_eq!(class == PointClass::Inside, raw_inside);
                }
            }
        }
    }
}
