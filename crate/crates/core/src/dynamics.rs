//! Quadratic rational maps `f(z) = (a0 z² + a1 z + a2)/(b0 z² + b1 z + b2)`:
//! evaluation, fixed points and multipliers, the fixed-point normal form,
//! conjugation by Möbius transformations and iteration.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::ExtComplex;
use crate::error::{Error, Result};
use crate::moebius::MoebiusTransform;
use crate::roots;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Common-root threshold on the resultant after max-modulus normalization.
const RESULTANT_EPS: f64 = 1e-10;
/// Leading cubic coefficient below which infinity counts as a fixed point.
const INFINITE_ROOT_EPS: f64 = 1e-14;
/// Chordal separation below which two fixed points are treated as one.
const MULTIPLE_ROOT_EPS: f64 = 1e-6;
/// Multipliers closer than this in modulus are ordered by position instead.
const MULTIPLIER_TIE_EPS: f64 = 1e-9;

/// A genuinely quadratic rational map, normalized so that the largest
/// coefficient modulus is 1.
///
/// Coefficients are stored highest degree first: `num = [a0, a1, a2]`,
/// `den = [b0, b1, b2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRationalMap {
    num: [Complex64; 3],
    den: [Complex64; 3],
}

/// Fixed points of a map with their multipliers `μᵢ = f′(zᵢ)`, sorted by
/// ascending `|μ|` (ties by real part, then imaginary part, infinity last).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointData {
    pub points: [ExtComplex; 3],
    pub multipliers: [Complex64; 3],
}

impl QuadraticRationalMap {
    pub fn new(num: [Complex64; 3], den: [Complex64; 3]) -> Result<Self> {
        let scale = num.iter().chain(den.iter()).map(|c| c.norm()).fold(0.0, f64::max);
        if !scale.is_finite() || scale == 0.0 {
            return Err(Error::domain("map coefficients must be finite and not all zero"));
        }
        let num = num.map(|c| c / scale);
        let den = den.map(|c| c / scale);
        if num[0].norm() <= f64::EPSILON && den[0].norm() <= f64::EPSILON {
            return Err(Error::domain("a0 and b0 both vanish: the map is not quadratic"));
        }
        let res = resultant(&num, &den);
        if !(res.norm() > RESULTANT_EPS) {
            return Err(Error::domain(format!(
                "numerator and denominator share a root (|resultant| = {:e})",
                res.norm()
            )));
        }
        Ok(QuadraticRationalMap { num, den })
    }

    /// `z ↦ z²`.
    pub fn z_squared() -> Self {
        QuadraticRationalMap { num: [ONE, ZERO, ZERO], den: [ZERO, ZERO, ONE] }
    }

    /// Fixed-point normal form `z(z + μ1)/(μ2 z + 1)`: fixed points `0` and
    /// `∞` with multipliers `μ1` and `μ2`.
    pub fn normal_form(mu1: Complex64, mu2: Complex64) -> Result<Self> {
        if (mu1 * mu2 - ONE).norm() < 1e-12 {
            return Err(Error::domain("normal form requires mu1 * mu2 != 1"));
        }
        Self::new([ONE, mu1, ZERO], [ZERO, mu2, ONE])
    }

    pub fn numerator(&self) -> [Complex64; 3] {
        self.num
    }

    pub fn denominator(&self) -> [Complex64; 3] {
        self.den
    }

    /// All six coefficients `[a0, a1, a2, b0, b1, b2]`.
    pub fn coefficients(&self) -> [Complex64; 6] {
        let [a0, a1, a2] = self.num;
        let [b0, b1, b2] = self.den;
        [a0, a1, a2, b0, b1, b2]
    }

    /// Relative distance to `other` modulo a common complex factor.
    pub fn projective_distance(&self, other: &QuadraticRationalMap) -> f64 {
        crate::projective_distance(&self.coefficients(), &other.coefficients())
    }

    pub fn eval(&self, z: &ExtComplex) -> ExtComplex {
        let (u, v) = z.to_homogeneous();
        ExtComplex::from_homogeneous(binary_form(&self.num, u, v), binary_form(&self.den, u, v))
    }

    /// Multiplier at a fixed point, computed in the chart `z` or `w = 1/z`
    /// whichever keeps the point inside the unit disk.
    pub fn multiplier_at(&self, z: &ExtComplex) -> Complex64 {
        match z.finite() {
            Some(z) if z.norm() <= 1.0 => quotient_derivative(&self.num, &self.den, z),
            // 1/f(1/w) = (b0 + b1 w + b2 w²)/(a0 + a1 w + a2 w²)
            other => {
                let w = other.map_or(ZERO, |z| z.inv());
                let rev = |p: &[Complex64; 3]| [p[2], p[1], p[0]];
                quotient_derivative(&rev(&self.den), &rev(&self.num), w)
            }
        }
    }

    pub fn fixed_points(&self) -> Result<FixedPointData> {
        let [a0, a1, a2] = self.num;
        let [b0, b1, b2] = self.den;
        // z D(z) - N(z), highest degree first; its reversal is the same binary
        // cubic in the chart w = 1/z
        let cubic = [b0, b1 - a0, b2 - a1, -a2];
        let reversed = [-a2, b2 - a1, b1 - a0, b0];
        let scale = cubic.iter().map(|c| c.norm()).fold(0.0, f64::max);

        let mut points: Vec<ExtComplex> = Vec::with_capacity(3);
        if b0.norm() <= INFINITE_ROOT_EPS * scale {
            points.push(ExtComplex::Infinity);
            if cubic[1].norm() <= INFINITE_ROOT_EPS * scale {
                return Err(Error::Parabolic("infinity is a multiple fixed point".into()));
            }
            points.extend(roots::quadratic(cubic[1], cubic[2], cubic[3]).map(ExtComplex::Finite));
        } else {
            points.extend(roots::cubic(cubic[0], cubic[1], cubic[2], cubic[3]).map(ExtComplex::Finite));
        }
        let points: Vec<ExtComplex> = points
            .into_iter()
            .map(|z| match z.finite() {
                None => ExtComplex::Infinity,
                Some(z) if z.norm() <= 1.0 => roots::polish(&cubic, z).into(),
                Some(z) => {
                    let w = roots::polish(&reversed, z.inv());
                    if w == ZERO {
                        ExtComplex::Infinity
                    } else {
                        w.inv().into()
                    }
                }
            })
            .collect();

        for i in 0..3 {
            for j in i + 1..3 {
                if points[i].chordal_distance(&points[j]) < MULTIPLE_ROOT_EPS {
                    return Err(Error::Parabolic(format!(
                        "fixed points {} and {} coincide",
                        points[i], points[j]
                    )));
                }
            }
        }

        let mut data: Vec<(ExtComplex, Complex64)> =
            points.iter().map(|z| (*z, self.multiplier_at(z))).collect();
        data.sort_by(|x, y| {
            let (mx, my) = (x.1.norm(), y.1.norm());
            if (mx - my).abs() > MULTIPLIER_TIE_EPS {
                return mx.total_cmp(&my);
            }
            position_order(&x.0, &y.0)
        });
        Ok(FixedPointData {
            points: [data[0].0, data[1].0, data[2].0],
            multipliers: [data[0].1, data[1].1, data[2].1],
        })
    }

    /// `g ∘ f ∘ g⁻¹`, composed at the coefficient level.
    pub fn conjugate(&self, g: &MoebiusTransform) -> Result<QuadraticRationalMap> {
        let (a, b, c, d) = g.coefficients();
        // g⁻¹ acts on (u, v) as (d u − b v, −c u + a v)
        let l1 = [d, -b];
        let l2 = [-c, a];
        let n = substitute(&self.num, l1, l2);
        let m = substitute(&self.den, l1, l2);
        let num = [0, 1, 2].map(|k| a * n[k] + b * m[k]);
        let den = [0, 1, 2].map(|k| c * n[k] + d * m[k]);
        Self::new(num, den).map_err(|e| {
            Error::degenerate(format!("conjugated map is not quadratic rational: {e}"))
        })
    }

    /// `[z0, f(z0), …, f⁽ⁿ⁾(z0)]`.
    pub fn iterate(&self, z0: &ExtComplex, n: usize) -> Vec<ExtComplex> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(*z0);
        for k in 0..n {
            out.push(self.eval(&out[k]));
        }
        out
    }
}

fn position_order(x: &ExtComplex, y: &ExtComplex) -> Ordering {
    match (x.finite(), y.finite()) {
        (Some(x), Some(y)) => x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// `p0 u² + p1 uv + p2 v²`.
fn binary_form(p: &[Complex64; 3], u: Complex64, v: Complex64) -> Complex64 {
    p[0] * u * u + p[1] * u * v + p[2] * v * v
}

/// Derivative of `p/q` at `z`, both given highest degree first.
fn quotient_derivative(p: &[Complex64; 3], q: &[Complex64; 3], z: Complex64) -> Complex64 {
    let (pv, dp) = roots::eval_with_derivative(p, z);
    let (qv, dq) = roots::eval_with_derivative(q, z);
    (dp * qv - pv * dq) / (qv * qv)
}

/// Coefficients of `p(l1, l2)` in `(u², uv, v²)` where `l1 = x0 u + x1 v`
/// and `l2 = y0 u + y1 v`.
fn substitute(p: &[Complex64; 3], l1: [Complex64; 2], l2: [Complex64; 2]) -> [Complex64; 3] {
    let [x0, x1] = l1;
    let [y0, y1] = l2;
    let sq1 = [x0 * x0, 2.0 * x0 * x1, x1 * x1];
    let mixed = [x0 * y0, x0 * y1 + x1 * y0, x1 * y1];
    let sq2 = [y0 * y0, 2.0 * y0 * y1, y1 * y1];
    [0, 1, 2].map(|k| p[0] * sq1[k] + p[1] * mixed[k] + p[2] * sq2[k])
}

/// Resultant of the binary quadratics `num` and `den`.
fn resultant(num: &[Complex64; 3], den: &[Complex64; 3]) -> Complex64 {
    let [a0, a1, a2] = *num;
    let [b0, b1, b2] = *den;
    let t = a0 * b2 - a2 * b0;
    t * t - (a0 * b1 - a1 * b0) * (a1 * b2 - a2 * b1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &ExtComplex, b: &ExtComplex, tol: f64) -> bool {
        a.chordal_distance(b) <= tol
    }

    #[test]
    fn rejects_non_quadratic() {
        // a0 = b0 = 0
        assert!(QuadraticRationalMap::new([ZERO, ONE, ZERO], [ZERO, ZERO, ONE]).is_err());
        // common root z = 1: (z - 1)(z + 2) / ((z - 1)(z + 3))
        assert!(QuadraticRationalMap::new([ONE, ONE, c(-2.0, 0.0)], [ONE, c(2.0, 0.0), c(-3.0, 0.0)]).is_err());
    }

    #[test]
    fn z_squared_evaluation() {
        let f = QuadraticRationalMap::z_squared();
        assert!(close(&f.eval(&ExtComplex::new(2.0, 0.0)), &ExtComplex::new(4.0, 0.0), 1e-15));
        assert!(f.eval(&ExtComplex::Infinity).is_infinite());
        assert_eq!(f.eval(&ExtComplex::ZERO), ExtComplex::ZERO);
        let traj = f.iterate(&ExtComplex::new(2.0, 0.0), 3);
        let want = [2.0, 4.0, 16.0, 256.0];
        assert_eq!(traj.len(), 4);
        for (z, w) in traj.iter().zip(want) {
            assert_eq!(*z, ExtComplex::new(w, 0.0));
        }
        assert_eq!(f.iterate(&ExtComplex::ONE, 0), vec![ExtComplex::ONE]);
    }

    #[test]
    fn z_squared_contracts_inside_unit_disk() {
        let f = QuadraticRationalMap::z_squared();
        let traj = f.iterate(&ExtComplex::new(0.6, -0.5), 8);
        assert!(traj[8].finite().unwrap().norm() < 1e-20);
    }

    #[test]
    fn z_squared_fixed_points() {
        let fp = QuadraticRationalMap::z_squared().fixed_points().unwrap();
        assert_eq!(fp.points[0], ExtComplex::ZERO);
        assert!(fp.points[1].is_infinite());
        assert!(close(&fp.points[2], &ExtComplex::ONE, 1e-15));
        assert!(fp.multipliers[0].norm() < 1e-15);
        assert!(fp.multipliers[1].norm() < 1e-15);
        assert!((fp.multipliers[2] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normal_form_fixed_points() {
        assert_eq!(QuadraticRationalMap::normal_form(ZERO, ZERO).unwrap(), QuadraticRationalMap::z_squared());
        let (mu1, mu2) = (c(0.5, 0.0), c(1.0 / 3.0, 0.0));
        let f = QuadraticRationalMap::normal_form(mu1, mu2).unwrap();
        let fp = f.fixed_points().unwrap();
        // sorted by |μ|: ∞ (1/3), 0 (1/2), z3 (7/5)
        assert!(fp.points[0].is_infinite());
        assert!((fp.multipliers[0] - mu2).norm() < 1e-14);
        assert!(close(&fp.points[1], &ExtComplex::ZERO, 1e-15));
        assert!((fp.multipliers[1] - mu1).norm() < 1e-14);
        let z3 = (ONE - mu1) / (ONE - mu2);
        assert!(close(&fp.points[2], &z3.into(), 1e-14));
        assert!((fp.multipliers[2] - c(1.4, 0.0)).norm() < 1e-13);
        // μ3 = (2 − μ1 − μ2)/(1 − μ1μ2)
        let mu3 = (2.0 - mu1 - mu2) / (ONE - mu1 * mu2);
        assert!((fp.multipliers[2] - mu3).norm() < 1e-13);

        let g = QuadraticRationalMap::normal_form(c(0.25, 0.0), ZERO).unwrap();
        assert!(g.denominator()[0] == ZERO && g.denominator()[1] == ZERO);
        assert!(QuadraticRationalMap::normal_form(c(2.0, 0.0), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn multiplier_matches_finite_difference() {
        let f = QuadraticRationalMap::normal_form(c(0.5, 0.0), c(1.0 / 3.0, 0.0)).unwrap();
        let fp = f.fixed_points().unwrap();
        let z3 = fp.points[2].finite().unwrap();
        let h = 1e-6;
        let fz = |z: Complex64| f.eval(&z.into()).finite().unwrap();
        let numeric = (fz(z3 + h) - fz(z3 - h)) / (2.0 * h);
        assert!((numeric - fp.multipliers[2]).norm() < 1e-8);
    }

    #[test]
    fn parabolic_point_reported() {
        let f = QuadraticRationalMap::normal_form(ONE, c(0.5, 0.0)).unwrap();
        assert!(matches!(f.fixed_points(), Err(Error::Parabolic(_))));
    }

    #[test]
    fn conjugation_by_identity() {
        let f = QuadraticRationalMap::z_squared();
        let g = f.conjugate(&MoebiusTransform::identity()).unwrap();
        assert!(g.projective_distance(&f) < 1e-15);
    }

    #[test]
    fn conjugation_commutes_with_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rc = |rng: &mut ChaCha8Rng| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        for _ in 0..20 {
            let Ok(f) = QuadraticRationalMap::new([rc(&mut rng), rc(&mut rng), rc(&mut rng)], [rc(&mut rng), rc(&mut rng), rc(&mut rng)]) else {
                continue;
            };
            let Ok(g) = MoebiusTransform::new(rc(&mut rng), rc(&mut rng), rc(&mut rng), rc(&mut rng)) else {
                continue;
            };
            if g.determinant().norm() < 0.05 {
                continue;
            }
            let h = f.conjugate(&g).unwrap();
            for _ in 0..20 {
                let z: ExtComplex = (3.0 * rc(&mut rng)).into();
                let lhs = h.eval(&g.apply(&z));
                let rhs = g.apply(&f.eval(&z));
                assert!(close(&lhs, &rhs, 1e-9), "{lhs} vs {rhs}");
            }
        }
    }
}
