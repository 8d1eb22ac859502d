//! Roots of complex polynomials of degree at most three.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots of `c3 z³ + c2 z² + c1 z + c0` with `c3 ≠ 0`, by Cardano's formula.
///
/// The results are only starting points; callers polish them.
pub(crate) fn cubic(c3: Complex64, c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 3] {
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    let q = (a * a - 3.0 * b) / 9.0;
    let r = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
    let mut sq = (r * r - q * q * q).sqrt();
    // pick the branch that avoids cancellation in r + sq
    if (r.conj() * sq).re < 0.0 {
        sq = -sq;
    }
    let s = -(r + sq).cbrt();
    let t = if s == ZERO { ZERO } else { q / s };
    let shift = a / 3.0;
    let half_sqrt3 = Complex64::new(0.0, 3f64.sqrt() / 2.0);
    [
        s + t - shift,
        -(s + t) / 2.0 - shift + half_sqrt3 * (s - t),
        -(s + t) / 2.0 - shift - half_sqrt3 * (s - t),
    ]
}

/// Roots of `c2 z² + c1 z + c0` with `c2 ≠ 0`, avoiding cancellation.
pub(crate) fn quadratic(c2: Complex64, c1: Complex64, c0: Complex64) -> [Complex64; 2] {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let sign = if (c1.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(c1 + sign * disc) / 2.0;
    if q == ZERO {
        // c1 = 0 and c0 = 0: double root at the origin
        return [ZERO, ZERO];
    }
    [q / c2, c0 / q]
}

/// Horner evaluation of a polynomial given highest degree first, with its
/// derivative.
pub(crate) fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Newton iteration on `coeffs` (highest degree first) started at `z`, kept
/// while the residual shrinks.
pub(crate) fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let (mut p, mut dp) = eval_with_derivative(coeffs, z);
    for _ in 0..12 {
        if p == ZERO || dp == ZERO {
            break;
        }
        let next = z - p / dp;
        let (np, ndp) = eval_with_derivative(coeffs, next);
        if !(np.norm() < p.norm()) {
            break;
        }
        z = next;
        p = np;
        dp = ndp;
    }
    z
}
