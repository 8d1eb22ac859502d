//! Two-qubit gates realizing quadratic rational maps under the protocol
//! "apply U to |ψ⟩_A ⊗ |ψ⟩_B, keep A only if B measures 0", plus the
//! single-qubit gates behind unitary Möbius maps.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with qubit A as the first label.
//! With input `(1, z, z, z²)` the kept amplitudes are rows 1 and 3 of U, so
//! those two rows alone fix the induced map:
//!
//! ```text
//! f(z) = (u31 + (u32 + u33) z + u34 z²) / (u11 + (u12 + u13) z + u14 z²)
//! ```

use num_complex::Complex64;

use crate::complex::ExtComplex;
use crate::dynamics::QuadraticRationalMap;
use crate::error::{Error, Result};
use crate::moebius::UnitaryMoebius;
use crate::qubit::{self, PureState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub const UNITARY_TOL: f64 = 1e-12;

type Row = [Complex64; 4];

/// A 4×4 unitary, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitGate {
    m: [Row; 4],
}

/// A 2×2 unitary, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    m: [[Complex64; 2]; 2],
}

impl TwoQubitGate {
    pub fn new(m: [Row; 4]) -> Result<Self> {
        let gate = TwoQubitGate { m };
        let err = gate.unitarity_error();
        if !(err < UNITARY_TOL) {
            return Err(Error::domain(format!("gate is not unitary: max |U†U − I| = {err:e}")));
        }
        Ok(gate)
    }

    pub fn matrix(&self) -> &[Row; 4] {
        &self.m
    }

    /// `max |U†U − I|` over all entries.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let g: Complex64 = (0..4).map(|k| self.m[k][i].conj() * self.m[k][j]).sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        if worst.is_nan() {
            f64::INFINITY
        } else {
            worst
        }
    }

    pub fn apply(&self, v: &Row) -> Row {
        [0, 1, 2, 3].map(|i| (0..4).map(|k| self.m[i][k] * v[k]).sum())
    }

    /// The map realized by post-selecting qubit B on `|0⟩`.
    pub fn induced_map(&self) -> Result<QuadraticRationalMap> {
        let r1 = &self.m[0];
        let r3 = &self.m[2];
        QuadraticRationalMap::new([r3[3], r3[1] + r3[2], r3[0]], [r1[3], r1[1] + r1[2], r1[0]])
            .map_err(|e| Error::degenerate(format!("gate does not induce a quadratic rational map: {e}")))
    }

    /// `(V ⊗ I) · U · (V† ⊗ V†)`: undo `V` on both inputs, run `U`, redo `V`
    /// on the kept qubit. Induces `g_V ∘ f_U ∘ g_V⁻¹`.
    pub fn conjugated_by(&self, v: &SingleQubitGate) -> TwoQubitGate {
        let vd = v.adjoint();
        let kron = |a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]| {
            let mut out = [[ZERO; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
                }
            }
            out
        };
        let id = [[ONE, ZERO], [ZERO, ONE]];
        let left = kron(&v.m, &id);
        let right = kron(&vd.m, &vd.m);
        TwoQubitGate { m: mat4_mul(&mat4_mul(&left, &self.m), &right) }
    }
}

impl SingleQubitGate {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let gate = SingleQubitGate { m };
        let err = gate.unitarity_error();
        if !(err < UNITARY_TOL) {
            return Err(Error::domain(format!("gate is not unitary: max |V†V − I| = {err:e}")));
        }
        Ok(gate)
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn unitarity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let g = self.m[0][i].conj() * self.m[0][j] + self.m[1][i].conj() * self.m[1][j];
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    pub fn adjoint(&self) -> SingleQubitGate {
        let m = &self.m;
        SingleQubitGate { m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]] }
    }

    pub fn apply(&self, s: &PureState) -> PureState {
        let [a0, a1] = s.amplitudes();
        PureState::new(self.m[0][0] * a0 + self.m[0][1] * a1, self.m[1][0] * a0 + self.m[1][1] * a1)
            .expect("unitaries preserve the norm")
    }

    /// Action on the state label: `z_from_state(V · state_from_z(z))`.
    pub fn apply_z(&self, z: &ExtComplex) -> ExtComplex {
        qubit::z_from_state(&self.apply(&qubit::state_from_z(z)))
    }
}

/// The gate `[[p̄, −q̄], [q, p]]`, whose action on labels is
/// `(pz + q)/(−q̄z + p̄)`.
pub fn single_qubit_gate(g: &UnitaryMoebius) -> SingleQubitGate {
    let (p, q) = (g.p(), g.q());
    SingleQubitGate { m: [[p.conj(), -q.conj()], [q, p]] }
}

/// The fixed gate realizing `f_ε(z) = z²/ε`, `0 < ε < 1`.
pub fn contraction_gate(epsilon: f64) -> Result<TwoQubitGate> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("contraction parameter must lie in (0, 1), got {epsilon}")));
    }
    let r = |x: f64| Complex64::new(x, 0.0);
    let s = (1.0 - epsilon * epsilon).sqrt();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitGate::new([
        [r(epsilon), r(s * h), r(-s * h), ZERO],
        [ZERO, r(h), r(h), ZERO],
        [ZERO, ZERO, ZERO, ONE],
        [r(s), r(-epsilon * h), r(epsilon * h), ZERO],
    ])
}

/// Builds a unitary whose rows 1 and 3 induce `f`.
///
/// Rows 1 and 3 are `(b2, (b1 + b̃)/2, (b1 − b̃)/2, b0)` and
/// `(a2, (a1 + ã)/2, (a1 − ã)/2, a0)`; orthogonality and equal norms fix
/// `|ã|² − |b̃|²` and `ã* b̃`. The phase is chosen with `ã ≥ 0` real. Rows 2
/// and 4 are any orthonormal completion.
pub fn synthesize_unitary(f: &QuadraticRationalMap) -> Result<TwoQubitGate> {
    let [a0, a1, a2] = f.numerator();
    let [b0, b1, b2] = f.denominator();
    let d = 2.0
        * (b2.norm_sqr() + b1.norm_sqr() / 2.0 + b0.norm_sqr()
            - a2.norm_sqr()
            - a1.norm_sqr() / 2.0
            - a0.norm_sqr());
    let w = -2.0 * (a2.conj() * b2 + a1.conj() * b1 / 2.0 + a0.conj() * b0);
    // x − y = d, x y = |w|², x, y ≥ 0
    let root = d.hypot(2.0 * w.norm());
    let (x, y) = if d >= 0.0 {
        let x = (d + root) / 2.0;
        (x, if x > 0.0 { w.norm_sqr() / x } else { 0.0 })
    } else {
        let y = (root - d) / 2.0;
        (w.norm_sqr() / y, y)
    };
    let (a_t, b_t) = if x > 0.0 {
        let a_t = x.sqrt();
        (Complex64::new(a_t, 0.0), w / a_t)
    } else {
        if w.norm() > 0.0 {
            return Err(Error::degenerate(format!("|ã| = 0 but ã*b̃ = {w} is nonzero")));
        }
        (ZERO, Complex64::new(y.sqrt(), 0.0))
    };

    let u1 = [b2, (b1 + b_t) / 2.0, (b1 - b_t) / 2.0, b0];
    let u3 = [a2, (a1 + a_t) / 2.0, (a1 - a_t) / 2.0, a0];
    let (n1, n3) = (norm(&u1), norm(&u3));
    if !(n1 > 0.0) || (n1 - n3).abs() > 1e-10 * n1 {
        return Err(Error::degenerate(format!("row norms differ: |u1| = {n1:e}, |u3| = {n3:e}")));
    }
    let u1 = u1.map(|c| c / n1);
    let u3 = u3.map(|c| c / n1);
    let [c1, c2] = complete(&u1, &u3);
    TwoQubitGate::new([u1, c1, u3, c2])
}

/// Two unit rows orthogonal to `r1`, `r3` and each other, by Gram–Schmidt
/// on the standard basis vector with the largest residual.
fn complete(r1: &Row, r3: &Row) -> [Row; 2] {
    let mut basis = vec![*r1, *r3];
    for _ in 0..2 {
        let best = (0..4)
            .map(|k| {
                let mut e = [ZERO; 4];
                e[k] = ONE;
                // two passes keep the residual orthogonal to working precision
                for _ in 0..2 {
                    for b in &basis {
                        let p = inner(b, &e);
                        for i in 0..4 {
                            e[i] -= p * b[i];
                        }
                    }
                }
                e
            })
            .max_by(|x, y| norm(x).total_cmp(&norm(y)))
            .expect("four candidates");
        let n = norm(&best);
        let lead = best.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).expect("nonempty");
        let phase = lead.conj() / lead.norm();
        basis.push(best.map(|c| c * phase / n));
    }
    [basis[2], basis[3]]
}

fn inner(x: &Row, y: &Row) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &Row) -> f64 {
    x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn mat4_mul(x: &[Row; 4], y: &[Row; 4]) -> [Row; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    out
}

/// An explicit gate for the reference `z1 = i`, `|s_ε|² = 0.9`.
pub fn example_gate() -> TwoQubitGate {
    let c = |re: f64, im: f64| Complex64::new(re, im) / (6.0 * 2f64.sqrt());
    TwoQubitGate::new([
        [c(1.0, -3.0), c(7.0, -1.0), c(-1.0, -1.0), c(-1.0, 3.0)],
        [c(6.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(6.0, 0.0)],
        [c(-3.0, 1.0), c(1.0, 1.0), c(1.0, -7.0), c(3.0, -1.0)],
        [c(-4.0, 0.0), c(2.0, 4.0), c(-2.0, 4.0), c(4.0, 0.0)],
    ])
    .expect("the example gate is unitary")
}
