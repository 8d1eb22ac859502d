//! On-disk formats: JSON documents for matchers and gates, the trajectory
//! table, and number formatting shared by all text output.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::ExtComplex;
use crate::error::{Error, Result};
use crate::gate::{SingleQubitGate, TwoQubitGate};
use crate::matcher::{Matcher, MatcherSpec};
use crate::qubit;

/// Full double precision.
pub const DEFAULT_DIGITS: usize = 17;

pub const BASIS: [&str; 4] = ["|00>", "|01>", "|10>", "|11>"];

/// Projective agreement required between a stored map and the rebuilt one.
const RELOAD_TOL: f64 = 1e-10;

/// `%g`-style formatting with `digits` significant digits and trailing
/// zeros removed.
pub fn format_real(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.clamp(1, 17);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        trim_zeros(&format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses `RE,IM` or `inf`.
pub fn parse_point(s: &str) -> Result<ExtComplex> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(ExtComplex::Infinity);
    }
    let (re, im) = t
        .split_once(',')
        .ok_or_else(|| Error::domain(format!("expected RE,IM or inf, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::domain(format!("not a finite number: {v:?}")))
    };
    Ok(ExtComplex::new(parse(re)?, parse(im)?))
}

/// A point in a document: `[re, im]` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRepr {
    Finite([f64; 2]),
    Infinite(Infinite),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Infinite {
    #[serde(rename = "inf")]
    Inf,
}

impl From<ExtComplex> for PointRepr {
    fn from(z: ExtComplex) -> Self {
        match z.finite() {
            Some(z) => PointRepr::Finite([z.re, z.im]),
            None => PointRepr::Infinite(Infinite::Inf),
        }
    }
}

impl From<PointRepr> for ExtComplex {
    fn from(p: PointRepr) -> Self {
        match p {
            PointRepr::Finite([re, im]) => ExtComplex::new(re, im),
            PointRepr::Infinite(_) => ExtComplex::Infinity,
        }
    }
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JuliaRepr {
    /// `"circle"` or `"line"`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// `A|z|² + 2 Re(conj(B) z) + C = 0` as `[A, [re B, im B], C]`.
    pub coefficients: (f64, [f64; 2], f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatcherDocument {
    pub reference: PointRepr,
    pub overlap2: f64,
    pub s_eps: f64,
    pub alpha_u: f64,
    pub alpha_eps: f64,
    pub epsilon: f64,
    /// `[a0, a1, a2]` of `(a0 z² + a1 z + a2)/(b0 z² + b1 z + b2)`.
    pub numerator: [[f64; 2]; 3],
    pub denominator: [[f64; 2]; 3],
    pub julia: JuliaRepr,
    pub partner: PointRepr,
    pub repelling_point: PointRepr,
}

impl MatcherDocument {
    pub fn from_matcher(m: &Matcher) -> Self {
        let spec = m.spec();
        let j = m.julia_circle();
        let (a, b, c) = j.coefficients();
        MatcherDocument {
            reference: spec.z1.into(),
            overlap2: spec.s_eps * spec.s_eps,
            s_eps: spec.s_eps,
            alpha_u: spec.alpha_u,
            alpha_eps: spec.alpha_eps,
            epsilon: spec.epsilon(),
            numerator: m.map().numerator().map(pair),
            denominator: m.map().denominator().map(pair),
            julia: JuliaRepr {
                kind: if j.is_line() { "line" } else { "circle" }.into(),
                center: j.center().map(pair),
                radius: j.radius(),
                coefficients: (a, pair(b), c),
            },
            partner: m.partner().into(),
            repelling_point: m.repelling_point().into(),
        }
    }

    /// Rebuilds the matcher from the stored parameters and checks that the
    /// stored map agrees with it.
    pub fn to_matcher(&self) -> Result<Matcher> {
        let spec = MatcherSpec::with_phases(self.reference.into(), self.s_eps, self.alpha_u, self.alpha_eps)?;
        let m = Matcher::build(spec)?;
        let stored: Vec<Complex64> = self.numerator.iter().chain(&self.denominator).map(|p| unpair(*p)).collect();
        let gap = crate::projective_distance(&stored, &m.map().coefficients());
        if !(gap <= RELOAD_TOL) {
            return Err(Error::domain(format!("stored map differs from the rebuilt one by {gap:e}")));
        }
        Ok(m)
    }
}

type Matrix4 = [[[f64; 2]; 4]; 4];
type Matrix2 = [[[f64; 2]; 2]; 2];

fn to_matrix4(g: &TwoQubitGate) -> Matrix4 {
    g.matrix().map(|row| row.map(pair))
}

fn to_matrix2(g: &SingleQubitGate) -> Matrix2 {
    g.matrix().map(|row| row.map(pair))
}

/// The gate payload: a single 4×4 unitary, or the contraction gate plus
/// the single-qubit rotation conjugating it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateBody {
    TwoQubit {
        matrix: Matrix4,
    },
    Decomposed {
        epsilon: f64,
        contraction: Matrix4,
        single_qubit: Matrix2,
    },
}

/// Matrices are row-major arrays of `[re, im]` pairs. Qubit A is the first
/// label in `basis`; qubit B is measured and A kept on outcome `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDocument {
    pub basis: [String; 4],
    pub measured_qubit: String,
    pub kept_outcome: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<PointRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap2: Option<f64>,
    #[serde(flatten)]
    pub body: GateBody,
}

impl GateDocument {
    pub fn two_qubit(gate: &TwoQubitGate) -> Self {
        Self::with_body(GateBody::TwoQubit { matrix: to_matrix4(gate) })
    }

    pub fn decomposed(epsilon: f64, contraction: &TwoQubitGate, v: &SingleQubitGate) -> Self {
        Self::with_body(GateBody::Decomposed {
            epsilon,
            contraction: to_matrix4(contraction),
            single_qubit: to_matrix2(v),
        })
    }

    fn with_body(body: GateBody) -> Self {
        GateDocument {
            basis: BASIS.map(String::from),
            measured_qubit: "B".into(),
            kept_outcome: 0,
            reference: None,
            overlap2: None,
            body,
        }
    }

    pub fn with_matcher(mut self, m: &Matcher) -> Self {
        self.reference = Some(m.reference().into());
        self.overlap2 = Some(m.spec().s_eps * m.spec().s_eps);
        self
    }

    /// The two-qubit gate one protocol round applies; for the decomposed
    /// form this is `(V ⊗ I) U_ε (V† ⊗ V†)`.
    pub fn effective_gate(&self) -> Result<TwoQubitGate> {
        if self.basis != BASIS.map(String::from) || self.measured_qubit != "B" || self.kept_outcome != 0 {
            return Err(Error::domain("only the |00>,|01>,|10>,|11> basis with B measured and outcome 0 kept is supported"));
        }
        let m4 = |m: &Matrix4| TwoQubitGate::new(m.map(|row| row.map(unpair)));
        match &self.body {
            GateBody::TwoQubit { matrix } => m4(matrix),
            GateBody::Decomposed { contraction, single_qubit, .. } => {
                let v = SingleQubitGate::new(single_qubit.map(|row| row.map(unpair)))?;
                Ok(m4(contraction)?.conjugated_by(&v))
            }
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("documents serialize");
    fs::write(path, text + "\n").map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Format { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn save_matcher(m: &Matcher, path: &Path) -> Result<()> {
    write_json(&MatcherDocument::from_matcher(m), path)
}

pub fn load_matcher(path: &Path) -> Result<Matcher> {
    read_json::<MatcherDocument>(path)?
        .to_matcher()
        .map_err(|e| Error::Format { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn save_gate(doc: &GateDocument, path: &Path) -> Result<()> {
    write_json(doc, path)
}

/// Reads a gate document and validates its matrices.
pub fn load_gate(path: &Path) -> Result<(GateDocument, TwoQubitGate)> {
    let doc: GateDocument = read_json(path)?;
    let gate = doc
        .effective_gate()
        .map_err(|e| Error::Format { path: path.to_path_buf(), msg: e.to_string() })?;
    Ok((doc, gate))
}

/// Writes `step,re,im,success_prob,overlap2_reference,overlap2_partner`.
/// Row 0 is the input and has no success probability; the overlap columns
/// are empty without a reference.
pub fn write_trajectory<W: Write>(
    out: &mut W,
    zs: &[ExtComplex],
    probs: &[f64],
    reference: Option<&ExtComplex>,
    digits: usize,
) -> std::io::Result<()> {
    writeln!(out, "step,re,im,success_prob,overlap2_reference,overlap2_partner")?;
    let partner = reference.map(qubit::orthogonal_partner);
    for (k, z) in zs.iter().enumerate() {
        let (re, im) = match z.finite() {
            Some(z) => (format_real(z.re, digits), format_real(z.im, digits)),
            None => ("inf".to_string(), "inf".to_string()),
        };
        let p = if k == 0 { String::new() } else { probs.get(k - 1).map_or(String::new(), |p| format_real(*p, digits)) };
        let ov = |w: Option<&ExtComplex>| w.map_or(String::new(), |w| format_real(qubit::overlap_sqr(w, z), digits));
        writeln!(out, "{k},{re},{im},{p},{},{}", ov(reference), ov(partner.as_ref()))?;
    }
    Ok(())
}
