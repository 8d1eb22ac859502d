//! State-vector simulation of the protocol: prepare `|ψ⟩_A ⊗ |ψ⟩_B`, apply a
//! two-qubit gate, measure B and keep A on outcome `0`.
//!
//! The deterministic simulator conditions on the kept branch. The sampling
//! variants flip a coin with the kept-branch probability and abort on the
//! discard branch; they back the Monte Carlo resource estimate.

use num_complex::Complex64;
use rand::Rng;

use crate::complex::ExtComplex;
use crate::error::{Error, Result};
use crate::gate::{SingleQubitGate, TwoQubitGate};
use crate::qubit::{self, PureState};

/// Kept-branch probability below which post-selection is refused.
pub const MIN_SUCCESS_PROB: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`, qubit A first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self> {
        let n = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain("two-qubit state must be finite and nonzero"));
        }
        Ok(TwoQubitState { amplitudes: amplitudes.map(|c| c / n) })
    }

    /// `|ψ_z⟩ ⊗ |ψ_z⟩ ∝ (1, z, z, z²)`; `(0, 0, 0, 1)` for `z = ∞`.
    pub fn product(z: &ExtComplex) -> Self {
        let [a, b] = qubit::state_from_z(z).amplitudes();
        TwoQubitState { amplitudes: [a * a, a * b, b * a, b * b] }
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    /// Qubit A after post-selection.
    pub post_state: PureState,
    pub z_out: ExtComplex,
    /// Probability that B measures `0`.
    pub success_prob: f64,
    /// Probability that B measures `1`.
    pub discard_prob: f64,
}

/// One protocol round on two copies of the state labelled `z`.
pub fn protocol_step(u: &TwoQubitGate, z: &ExtComplex) -> Result<StepResult> {
    step_at(u, z, 1)
}

fn step_at(u: &TwoQubitGate, z: &ExtComplex, step: usize) -> Result<StepResult> {
    let out = u.apply(&TwoQubitState::product(z).amplitudes());
    let (k0, k1) = (out[0], out[2]);
    let success_prob = k0.norm_sqr() + k1.norm_sqr();
    let discard_prob = out[1].norm_sqr() + out[3].norm_sqr();
    if !(success_prob >= MIN_SUCCESS_PROB) {
        return Err(Error::PostSelectionImpossible { step, prob: success_prob });
    }
    let post_state = PureState::new(k0, k1)?;
    Ok(StepResult { post_state, z_out: qubit::z_from_state(&post_state), success_prob, discard_prob })
}

/// `zs[0] = z0` followed by `n` protocol rounds; `probs[k]` is the success
/// probability of the round producing `zs[k + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub zs: Vec<ExtComplex>,
    pub probs: Vec<f64>,
}

pub fn simulate_trajectory(u: &TwoQubitGate, z0: &ExtComplex, n: usize) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::domain("trajectory needs at least one step"));
    }
    let mut zs = vec![*z0];
    let mut probs = Vec::with_capacity(n);
    for k in 1..=n {
        let r = step_at(u, &zs[k - 1], k)?;
        zs.push(r.z_out);
        probs.push(r.success_prob);
    }
    Ok(Trajectory { zs, probs })
}

/// One round with the measurement outcome drawn at random. `None` means B
/// measured `1` and the pair is lost.
pub fn sample_step<R: Rng + ?Sized>(u: &TwoQubitGate, z: &ExtComplex, rng: &mut R) -> Result<Option<StepResult>> {
    let r = protocol_step(u, z)?;
    let total = r.success_prob + r.discard_prob;
    Ok((rng.random::<f64>() * total < r.success_prob).then_some(r))
}

/// A trajectory under sampled outcomes, cut short at the first discard.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    pub zs: Vec<ExtComplex>,
    pub probs: Vec<f64>,
    /// 1-based round at which B measured `1`, if any.
    pub aborted_at: Option<usize>,
}

pub fn sample_trajectory<R: Rng + ?Sized>(
    u: &TwoQubitGate,
    z0: &ExtComplex,
    n: usize,
    rng: &mut R,
) -> Result<SampledTrajectory> {
    if n == 0 {
        return Err(Error::domain("trajectory needs at least one step"));
    }
    let mut zs = vec![*z0];
    let mut probs = Vec::with_capacity(n);
    for k in 1..=n {
        let r = protocol_step(u, &zs[k - 1]).map_err(|e| with_step(e, k))?;
        probs.push(r.success_prob);
        if rng.random::<f64>() * (r.success_prob + r.discard_prob) >= r.success_prob {
            return Ok(SampledTrajectory { zs, probs, aborted_at: Some(k) });
        }
        zs.push(r.z_out);
    }
    Ok(SampledTrajectory { zs, probs, aborted_at: None })
}

fn with_step(e: Error, step: usize) -> Error {
    match e {
        Error::PostSelectionImpossible { prob, .. } => Error::PostSelectionImpossible { step, prob },
        other => other,
    }
}

/// Expected number of fresh input qubits per surviving output after `n`
/// rounds: every round pairs two qubits of the previous level and keeps the
/// result with probability `p_k`, so the count is `∏ 2/p_k`.
pub fn expected_resources(probs: &[f64], n: usize) -> Result<f64> {
    if probs.len() != n {
        return Err(Error::domain(format!("expected {n} probabilities, got {}", probs.len())));
    }
    probs.iter().try_fold(1.0, |acc, &p| {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain(format!("success probability must lie in (0, 1], got {p}")));
        }
        Ok(acc * 2.0 / p)
    })
}

/// Monte Carlo counterpart of [`expected_resources`]: the mean number of
/// fresh qubits consumed to produce one level-`n` qubit, building the
/// pairing tree with sampled measurement outcomes.
pub fn sample_resources<R: Rng + ?Sized>(
    u: &TwoQubitGate,
    z0: &ExtComplex,
    n: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    // every qubit of a level carries the same state, so each level has one
    // kept-branch probability
    let traj = simulate_trajectory(u, z0, n)?;
    let mut total = 0u64;
    for _ in 0..trials {
        total += build(&traj.probs, n, rng);
    }
    Ok(total as f64 / trials as f64)
}

fn build<R: Rng + ?Sized>(probs: &[f64], level: usize, rng: &mut R) -> u64 {
    if level == 0 {
        return 1;
    }
    let mut used = 0;
    loop {
        used += build(probs, level - 1, rng) + build(probs, level - 1, rng);
        if rng.random::<f64>() < probs[level - 1] {
            return used;
        }
    }
}

/// A round of the matcher realized as `V`, the contraction gate, `V†`:
/// the label is rotated back by `V⁻¹`, contracted, and rotated forward.
pub fn decomposed_step(eps_gate: &TwoQubitGate, v: &SingleQubitGate, z: &ExtComplex) -> Result<StepResult> {
    let z_in = v.adjoint().apply_z(z);
    let r = protocol_step(eps_gate, &z_in)?;
    let post_state = v.apply(&r.post_state);
    Ok(StepResult { post_state, z_out: qubit::z_from_state(&post_state), ..r })
}

/// The identity gate on one qubit, handy for undecomposed pipelines.
pub fn identity_gate() -> SingleQubitGate {
    SingleQubitGate::new([[ONE, ZERO], [ZERO, ONE]]).expect("identity is unitary")
}
