//! Orthogonalizing superattractive maps for a reference state and an
//! overlap threshold, and the matching loop that iterates them.
//!
//! The map is `f = g ∘ f0 ∘ g⁻¹` with `f0(z) = z²` and `g = g_U ∘ g_ε`:
//! `g_ε(z) = εz` shrinks the unit circle (the Julia set of `f0`) to radius
//! `|ε| = √(1 − s²)/s`, and the unitary `g_U` moves `0 ↦ z1`,
//! `∞ ↦ −1/z̄1`. States with overlap above `s` flow to `z1`, the rest to
//! the orthogonal state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::{ExtComplex, GeneralizedCircle};
use crate::dynamics::QuadraticRationalMap;
use crate::error::{Error, Result};
use crate::moebius::{MoebiusTransform, UnitaryMoebius};
use crate::qubit;

/// Agreement required between the conjugation pipeline and the closed form.
const CROSS_CHECK_TOL: f64 = 1e-10;
/// Agreement required between the two Julia-circle constructions.
const JULIA_TOL: f64 = 1e-9;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;
pub const DEFAULT_TARGET_SQR: f64 = 0.994;
pub const DEFAULT_MAX_ITER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatcherSpec {
    pub z1: ExtComplex,
    /// Minimum accepted overlap `|s_ε|`.
    pub s_eps: f64,
    pub alpha_u: f64,
    pub alpha_eps: f64,
    /// `|ε| = √(1 − s_ε²)/s_ε`.
    epsilon: f64,
}

impl MatcherSpec {
    pub fn new(z1: ExtComplex, s_eps: f64) -> Result<Self> {
        Self::with_phases(z1, s_eps, 0.0, 0.0)
    }

    /// Builds a spec from the squared overlap threshold.
    pub fn from_overlap_sqr(z1: ExtComplex, s_eps_sqr: f64) -> Result<Self> {
        if !(s_eps_sqr > 0.0 && s_eps_sqr < 1.0) {
            return Err(Error::domain(format!("squared overlap must lie in (0, 1), got {s_eps_sqr}")));
        }
        Self::new(z1, s_eps_sqr.sqrt())
    }

    pub fn with_phases(z1: ExtComplex, s_eps: f64, alpha_u: f64, alpha_eps: f64) -> Result<Self> {
        if !(s_eps > 0.0 && s_eps < 1.0) {
            return Err(Error::domain(format!("overlap threshold must lie in (0, 1), got {s_eps}")));
        }
        if !(alpha_u.is_finite() && alpha_eps.is_finite()) {
            return Err(Error::domain("phases must be finite"));
        }
        let epsilon = (1.0 - s_eps * s_eps).sqrt() / s_eps;
        Ok(MatcherSpec { z1, s_eps, alpha_u, alpha_eps, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Initial-state classification by the overlap test alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialClass {
    Match,
    NoMatch,
    Boundary,
}

/// Outcome of iterating the map from a state. The count is the number of
/// map applications needed to cross the target overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Reference(usize),
    Partner(usize),
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matcher {
    spec: MatcherSpec,
    f: QuadraticRationalMap,
    g: MoebiusTransform,
    g_u: UnitaryMoebius,
    julia: GeneralizedCircle,
    partner: ExtComplex,
}

impl Matcher {
    pub fn build(spec: MatcherSpec) -> Result<Self> {
        let eps_phase = Complex64::from_polar(spec.epsilon, spec.alpha_eps);
        let g_eps = MoebiusTransform::scaling(eps_phase)?;
        let g_u = UnitaryMoebius::from_reference(&spec.z1, spec.alpha_u);
        let g = g_u.to_moebius().compose(&g_eps);
        let f = QuadraticRationalMap::z_squared().conjugate(&g)?;

        // g_U with phase α equals g_U with phase 0 after z ↦ e^{2iα} z, so the
        // closed form only needs the effective scaling factor
        let eps_eff = Complex64::from_polar(spec.epsilon, spec.alpha_eps + 2.0 * spec.alpha_u);
        let direct = closed_form(&spec.z1, eps_eff)?;
        let gap = f.projective_distance(&direct);
        if !(gap <= CROSS_CHECK_TOL) {
            return Err(Error::degenerate(format!(
                "conjugated map and closed form disagree by {gap:e} for z1 = {}",
                spec.z1
            )));
        }

        let julia = qubit::overlap_circle(&spec.z1, spec.s_eps)?;
        let image = g.map_circle(&GeneralizedCircle::unit())?;
        if !julia.same_locus(&image, JULIA_TOL) {
            return Err(Error::degenerate(format!(
                "image of the unit circle {:?} differs from the overlap circle {:?}",
                image.coefficients(),
                julia.coefficients()
            )));
        }

        Ok(Matcher { spec, f, g, g_u, julia, partner: qubit::orthogonal_partner(&spec.z1) })
    }

    pub fn spec(&self) -> &MatcherSpec {
        &self.spec
    }

    pub fn map(&self) -> &QuadraticRationalMap {
        &self.f
    }

    /// The conjugating transformation `g = g_U ∘ g_ε`.
    pub fn conjugator(&self) -> &MoebiusTransform {
        &self.g
    }

    pub fn unitary_part(&self) -> &UnitaryMoebius {
        &self.g_u
    }

    pub fn julia_circle(&self) -> &GeneralizedCircle {
        &self.julia
    }

    pub fn reference(&self) -> ExtComplex {
        self.spec.z1
    }

    pub fn partner(&self) -> ExtComplex {
        self.partner
    }

    /// The repelling fixed point `g(1)`.
    pub fn repelling_point(&self) -> ExtComplex {
        self.g.apply(&ExtComplex::ONE)
    }

    pub fn classify_initial(&self, z: &ExtComplex, tol: f64) -> InitialClass {
        let ov = qubit::overlap(&self.spec.z1, z).norm();
        if ov > self.spec.s_eps + tol {
            InitialClass::Match
        } else if ov < self.spec.s_eps - tol {
            InitialClass::NoMatch
        } else {
            InitialClass::Boundary
        }
    }

    /// Iterates `f` from `z` until the squared overlap with either attractor
    /// reaches `target_overlap²`.
    pub fn match_state(&self, z: &ExtComplex, target_overlap: f64, max_iter: usize) -> Result<Verdict> {
        self.match_with(z, target_overlap, max_iter, |z| Ok(self.f.eval(z)))
    }

    /// As [`match_state`](Self::match_state) with a caller-supplied step,
    /// e.g. a simulated protocol round instead of the analytic map.
    pub fn match_with<F>(&self, z: &ExtComplex, target_overlap: f64, max_iter: usize, mut step: F) -> Result<Verdict>
    where
        F: FnMut(&ExtComplex) -> Result<ExtComplex>,
    {
        if !(target_overlap > self.spec.s_eps && target_overlap < 1.0) {
            return Err(Error::domain(format!(
                "target overlap must lie in ({}, 1), got {target_overlap}",
                self.spec.s_eps
            )));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        let target_sqr = target_overlap * target_overlap;
        let mut z = *z;
        for k in 0..=max_iter {
            if qubit::overlap_sqr(&self.spec.z1, &z) >= target_sqr {
                return Ok(Verdict::Reference(k));
            }
            if qubit::overlap_sqr(&self.partner, &z) >= target_sqr {
                return Ok(Verdict::Partner(k));
            }
            if k < max_iter {
                z = step(&z)?;
            }
        }
        Ok(Verdict::Undecided)
    }
}

/// The map `g_U ∘ g_ε ∘ f0 ∘ g_ε⁻¹ ∘ g_U⁻¹` written out in coefficients,
/// with `g_U` taken at phase zero and the scaling factor `eps` complex.
pub fn closed_form(z1: &ExtComplex, eps: Complex64) -> Result<QuadraticRationalMap> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    match z1.finite() {
        // g(z) = −1/(εz) gives f(z) = −ε z²
        None => QuadraticRationalMap::new([-eps, zero, zero], [zero, zero, one]),
        Some(z1) => {
            let zc = z1.conj();
            let m = z1.norm_sqr();
            QuadraticRationalMap::new(
                [eps * zc * m + one, 2.0 * z1 * (eps * zc - one), z1 * (eps + z1)],
                [zc * (eps * zc - one), 2.0 * zc * (eps + z1), eps - z1 * m],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::PointClass;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn matcher_i() -> Matcher {
        Matcher::build(MatcherSpec::from_overlap_sqr(ExtComplex::I, 0.9).unwrap()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(MatcherSpec::new(ExtComplex::I, 0.0).is_err());
        assert!(MatcherSpec::new(ExtComplex::I, 1.0).is_err());
        assert!(MatcherSpec::from_overlap_sqr(ExtComplex::I, 1.2).is_err());
        assert!(MatcherSpec::with_phases(ExtComplex::I, 0.5, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn epsilon_and_coefficients_for_reference_i() {
        let m = matcher_i();
        assert!((m.spec().epsilon() - 1.0 / 3.0).abs() < 1e-12);
        let t = 1.0 / 3.0;
        let want = QuadraticRationalMap::new(
            [c(1.0, -t), c(2.0 * t, -2.0), c(-1.0, t)],
            [c(-t, 1.0), c(2.0, -2.0 * t), c(t, -1.0)],
        )
        .unwrap();
        assert!(m.map().projective_distance(&want) < 1e-12);
        assert!(m.map().eval(&ExtComplex::I).chordal_distance(&ExtComplex::I) < 1e-14);
    }

    #[test]
    fn origin_reference_is_pure_contraction() {
        let m = Matcher::build(MatcherSpec::new(ExtComplex::ZERO, 0.8).unwrap()).unwrap();
        let eps = m.spec().epsilon();
        let want = QuadraticRationalMap::new([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0), c(eps, 0.0)]).unwrap();
        assert!(m.map().projective_distance(&want) < 1e-15);
        let julia = m.julia_circle();
        assert!(julia.center().unwrap().norm() < 1e-15);
        assert!((julia.radius().unwrap() - eps).abs() < 1e-14);
    }

    #[test]
    fn superattractive_orthogonal_fixed_points() {
        for (z1, s) in [(c(0.0, 1.0), 0.9f64.sqrt()), (c(1.0, 1.0), 0.97), (c(-0.3, 0.2), 0.6), (c(2.0, -1.5), 0.8)] {
            let m = Matcher::build(MatcherSpec::new(z1.into(), s).unwrap()).unwrap();
            let fp = m.map().fixed_points().unwrap();
            for k in 0..2 {
                assert!(fp.multipliers[k].norm() < 1e-9);
            }
            let near = |p: &ExtComplex| fp.points.iter().any(|q| q.chordal_distance(p) < 1e-9);
            assert!(near(&z1.into()));
            assert!(near(&m.partner()));
            assert!(near(&m.repelling_point()));
            assert!((fp.multipliers[2] - c(2.0, 0.0)).norm() < 1e-8);
            assert!(qubit::overlap(&z1.into(), &m.partner()).norm() < 1e-15);
        }
    }

    #[test]
    fn infinite_reference() {
        let m = Matcher::build(MatcherSpec::new(ExtComplex::Infinity, 0.8).unwrap()).unwrap();
        assert_eq!(m.partner(), ExtComplex::ZERO);
        assert!(m.map().eval(&ExtComplex::Infinity).is_infinite());
        assert!(matches!(m.match_state(&ExtComplex::new(3.0, 0.0), 0.99, 30).unwrap(), Verdict::Reference(k) if k >= 1));
        assert_eq!(m.classify_initial(&ExtComplex::new(0.1, 0.0), 1e-9), InitialClass::NoMatch);
    }

    #[test]
    fn julia_circle_is_invariant() {
        let m = matcher_i();
        for z in m.julia_circle().sample(24).unwrap() {
            assert_eq!(m.julia_circle().classify(&m.map().eval(&z.into()), 1e-8), PointClass::On);
        }
    }

    #[test]
    fn phases_do_not_move_julia_set_or_fixed_points() {
        let base = matcher_i();
        let base_fp = base.map().fixed_points().unwrap();
        for au in [0.0, 0.7, 2.1] {
            for ae in [0.0, 0.7, 2.1] {
                let spec = MatcherSpec::with_phases(ExtComplex::I, 0.9f64.sqrt(), au, ae).unwrap();
                let m = Matcher::build(spec).unwrap();
                assert!(m.julia_circle().same_locus(base.julia_circle(), 1e-12));
                let fp = m.map().fixed_points().unwrap();
                for p in &base_fp.points[..2] {
                    assert!(fp.points.iter().any(|q| q.chordal_distance(p) < 1e-9));
                }
            }
        }
    }

    #[test]
    fn initial_classification() {
        let m = matcher_i();
        assert_eq!(m.classify_initial(&ExtComplex::I, DEFAULT_BOUNDARY_TOL), InitialClass::Match);
        assert_eq!(m.classify_initial(&m.partner(), DEFAULT_BOUNDARY_TOL), InitialClass::NoMatch);
        for z in m.julia_circle().sample(16).unwrap() {
            assert_eq!(m.classify_initial(&z.into(), DEFAULT_BOUNDARY_TOL), InitialClass::Boundary);
        }
    }

    #[test]
    fn matching_loop() {
        let m = matcher_i();
        let t = DEFAULT_TARGET_SQR.sqrt();
        assert_eq!(m.match_state(&ExtComplex::I, t, 30).unwrap(), Verdict::Reference(0));
        assert_eq!(m.match_state(&m.partner(), t, 30).unwrap(), Verdict::Partner(0));
        assert_eq!(m.match_state(&m.repelling_point(), t, 30).unwrap(), Verdict::Undecided);
        assert!(m.match_state(&ExtComplex::I, 0.5, 30).is_err());
        assert!(m.match_state(&ExtComplex::I, t, 0).is_err());
        // a state with overlap² = 0.95 reaches 0.994 within a handful of steps
        // on the imaginary axis overlap² = (1+y)²/(2(1+y²)); solve 0.9y² − 2y + 0.9 = 0
        let z = ExtComplex::new(0.0, (2.0 + 0.76f64.sqrt()) / 1.8);
        assert!((qubit::overlap_sqr(&ExtComplex::I, &z) - 0.95).abs() < 1e-12);
        match m.match_state(&z, t, 30).unwrap() {
            Verdict::Reference(k) => assert!(k <= 6),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn closed_form_matches_pipeline_for_random_specs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let z1 = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let s = rng.random_range(0.2..0.99);
            let spec = MatcherSpec::with_phases(z1.into(), s, rng.random_range(0.0..6.3), rng.random_range(0.0..6.3)).unwrap();
            Matcher::build(spec).unwrap();
        }
    }
}
