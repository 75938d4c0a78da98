//! Statevector engine with trajectory noise and readout error.
//!
//! Qubit q is bit q of the amplitude index.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{Estimate, ShotRow, ShotTable};
use crate::circuits::{Circuit, Gate, MeasurementPlan};
use crate::lattice::{Axis, Pauli, PauliString};

pub const DEFAULT_CAP: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("{n} qubits exceed the dense cap of {cap}")]
    Cap { n: usize, cap: usize },
    #[error("gate on qubit {target} outside a {n}-qubit state")]
    Target { target: usize, n: usize },
    #[error("string {0} is not Hermitian")]
    NonHermitian(String),
    #[error("mid-circuit measurement on qubit {0} is not supported")]
    Measurement(usize),
    #[error("probability {name} = {value} outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amp: Vec<Complex64>,
}

fn rot_matrix(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (angle / 2.0).sin_cos();
    let m = axis.letter().matrix();
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { c } else { 0.0 };
            out[i][j] = Complex64::new(id, 0.0) - I * s * m[i][j];
        }
    }
    out
}

struct Masks {
    x: usize,
    z: usize,
    coef: Complex64,
}

fn masks(p: &PauliString) -> Masks {
    let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
    for (&q, &l) in p.letters() {
        match l {
            Pauli::X => x |= 1 << q,
            Pauli::Z => z |= 1 << q,
            Pauli::Y => {
                x |= 1 << q;
                z |= 1 << q;
                ny += 1;
            }
            Pauli::I => {}
        }
    }
    Masks { x, z, coef: I.powu(p.phase() as u32 + ny) }
}

impl Masks {
    /// P|idx> = factor |idx ^ x>.
    fn factor(&self, idx: usize) -> Complex64 {
        if (idx & self.z).count_ones() % 2 == 1 {
            -self.coef
        } else {
            self.coef
        }
    }
}

impl StateVector {
    pub fn new(n: usize) -> Result<Self, DenseError> {
        Self::with_cap(n, DEFAULT_CAP)
    }

    /// |0...0> on `n` qubits, refusing sizes above `cap`.
    pub fn with_cap(n: usize, cap: usize) -> Result<Self, DenseError> {
        if n > cap {
            return Err(DenseError::Cap { n, cap });
        }
        let mut amp = vec![ZERO; 1 << n];
        amp[0] = ONE;
        Ok(StateVector { n, amp })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn norm(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        self.amp.iter_mut().for_each(|a| *a /= n);
    }

    fn check(&self, q: usize) -> Result<(), DenseError> {
        if q >= self.n {
            return Err(DenseError::Target { target: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<(), DenseError> {
        self.check(q)?;
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amp[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a Pauli string to the components whose `control` bits are all
    /// set (no control when the mask is 0).
    fn apply_pauli_masked(&mut self, p: &PauliString, control: usize) {
        let m = masks(p);
        let src = self.amp.clone();
        for (i, a) in src.iter().enumerate() {
            if i & control == control {
                self.amp[i ^ m.x] = m.factor(i) * a;
            }
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), DenseError> {
        if let Some(q) = p.max_site() {
            self.check(q)?;
        }
        self.apply_pauli_masked(p, 0);
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), DenseError> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match g {
            Gate::Rot { q, axis, angle } => self.apply_single(*q, rot_matrix(*axis, *angle)),
            Gate::H(q) => self.apply_single(*q, [[h, h], [h, -h]]),
            Gate::S(q) => self.apply_single(*q, [[ONE, ZERO], [ZERO, I]]),
            Gate::CPhase { a, b, angle } => {
                self.check(*a)?;
                self.check(*b)?;
                let mask = (1 << a) | (1 << b);
                let ph = Complex64::from_polar(1.0, *angle);
                for (i, x) in self.amp.iter_mut().enumerate() {
                    if i & mask == mask {
                        *x *= ph;
                    }
                }
                Ok(())
            }
            Gate::CPauli { control, string } => {
                self.check(*control)?;
                if let Some(q) = string.max_site() {
                    self.check(q)?;
                }
                if !string.is_hermitian() {
                    return Err(DenseError::NonHermitian(string.to_string()));
                }
                self.apply_pauli_masked(string, 1 << control);
                Ok(())
            }
            Gate::Measure { q, .. } => Err(DenseError::Measurement(*q)),
        }
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<(), DenseError> {
        if c.n_qubits() > self.n {
            return Err(DenseError::Target { target: c.n_qubits() - 1, n: self.n });
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// <psi|P|psi> for Hermitian P.
    pub fn expectation(&self, p: &PauliString) -> Result<f64, DenseError> {
        if !p.is_hermitian() {
            return Err(DenseError::NonHermitian(p.to_string()));
        }
        Ok(self.matrix_element(p)?.re)
    }

    /// <psi|P|psi> for any Pauli string, including non-Hermitian phases.
    pub fn matrix_element(&self, p: &PauliString) -> Result<Complex64, DenseError> {
        if let Some(q) = p.max_site() {
            self.check(q)?;
        }
        let m = masks(p);
        Ok(self.amp.iter().enumerate().map(|(i, a)| self.amp[i ^ m.x].conj() * m.factor(i) * a).sum())
    }

    /// Expectation of P as read out in its eigenbasis through the noise
    /// model's asymmetric readout flips (exact over the Born distribution).
    pub fn readout_expectation(&self, p: &PauliString, noise: &NoiseModel) -> Result<f64, DenseError> {
        if noise.readout_0to1 == 0.0 && noise.readout_1to0 == 0.0 {
            return self.expectation(p);
        }
        if !p.is_hermitian() {
            return Err(DenseError::NonHermitian(p.to_string()));
        }
        let mut rotated = self.clone();
        for (&q, &l) in p.letters() {
            match l {
                Pauli::X => rotated.apply_gate(&Gate::H(q))?,
                Pauli::Y => {
                    rotated.apply_gate(&Gate::Rot { q, axis: Axis::Z, angle: -std::f64::consts::FRAC_PI_2 })?;
                    rotated.apply_gate(&Gate::H(q))?;
                }
                _ => rotated.check(q)?,
            }
        }
        let (m0, m1) = (1.0 - 2.0 * noise.readout_0to1, -(1.0 - 2.0 * noise.readout_1to0));
        let support: Vec<usize> = p.support().collect();
        let total: f64 = rotated
            .amp
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * support.iter().map(|&q| if (i >> q) & 1 == 0 { m0 } else { m1 }).product::<f64>())
            .sum();
        Ok(p.sign() as f64 * total)
    }

    /// Hadamard-test readout <X_a> + i <Y_a>.
    pub fn ancilla_overlap(&self, a: usize) -> Result<Complex64, DenseError> {
        self.noisy_ancilla_overlap(a, &NoiseModel::none())
    }

    pub fn noisy_ancilla_overlap(&self, a: usize, noise: &NoiseModel) -> Result<Complex64, DenseError> {
        let x = self.readout_expectation(&PauliString::single(a, Pauli::X), noise)?;
        let y = self.readout_expectation(&PauliString::single(a, Pauli::Y), noise)?;
        Ok(Complex64::new(x, y))
    }

    pub fn probability_one(&self, q: usize) -> f64 {
        let bit = 1 << q;
        self.amp.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Computational-basis sample of the full register.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, a) in self.amp.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                return i;
            }
        }
        self.amp.len() - 1
    }

    /// Von Neumann entropy of `region`, in units of log 2.
    pub fn entanglement_entropy(&self, region: &[usize]) -> f64 {
        let rest: Vec<usize> = (0..self.n).filter(|q| !region.contains(q)).collect();
        let (da, db) = (1usize << region.len(), 1usize << rest.len());
        let mut m = DMatrix::<Complex64>::zeros(da, db);
        for (i, a) in self.amp.iter().enumerate() {
            let ra = region.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k));
            let rb = rest.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((i >> q) & 1) << k));
            m[(ra, rb)] = *a;
        }
        let sv = m.svd(false, false).singular_values;
        sv.iter()
            .map(|s| s * s)
            .filter(|&p| p > 1e-14)
            .map(|p| -p * p.log2())
            .sum()
    }

    fn damp<R: Rng>(&mut self, q: usize, gamma: f64, rng: &mut R) {
        let bit = 1 << q;
        let jump = gamma * self.probability_one(q);
        if rng.gen::<f64>() < jump {
            for i in 0..self.amp.len() {
                if i & bit == 0 {
                    self.amp[i] = self.amp[i | bit];
                    self.amp[i | bit] = ZERO;
                }
            }
        } else {
            let k = (1.0 - gamma).sqrt();
            for (i, a) in self.amp.iter_mut().enumerate() {
                if i & bit != 0 {
                    *a *= k;
                }
            }
        }
        self.renormalize();
    }
}

/// Trajectory noise: depolarizing after each two-qubit phase gate, amplitude
/// damping at each cycle mark, asymmetric readout flips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Total probability of a non-identity two-qubit Pauli after each cphase.
    pub depolarizing: f64,
    /// Per-pair overrides of `depolarizing`, keyed by the sorted qubit pair.
    #[serde(default)]
    pub pair_depolarizing: Vec<((usize, usize), f64)>,
    /// Amplitude-damping probability per qubit per cycle.
    pub damping: f64,
    /// Damped qubits; all qubits when `None`.
    #[serde(default)]
    pub damped: Option<Vec<usize>>,
    /// p(read 1 | prepared 0).
    pub readout_0to1: f64,
    /// p(read 0 | prepared 1).
    pub readout_1to0: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::none()
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel {
            depolarizing: 0.0,
            pair_depolarizing: Vec::new(),
            damping: 0.0,
            damped: None,
            readout_0to1: 0.0,
            readout_1to0: 0.0,
        }
    }

    /// Qualitative hardware-like defaults; the depolarizing rate is a stand-in.
    pub fn qualitative() -> Self {
        NoiseModel {
            depolarizing: 0.01,
            pair_depolarizing: Vec::new(),
            damping: 0.01,
            damped: None,
            readout_0to1: 0.004,
            readout_1to0: 0.025,
        }
    }

    pub fn validate(&self) -> Result<(), DenseError> {
        let mut all = vec![
            ("depolarizing", self.depolarizing),
            ("damping", self.damping),
            ("readout_0to1", self.readout_0to1),
            ("readout_1to0", self.readout_1to0),
        ];
        all.extend(self.pair_depolarizing.iter().map(|(_, p)| ("pair_depolarizing", *p)));
        for (name, value) in all {
            if !(0.0..=1.0).contains(&value) {
                return Err(DenseError::Probability { name, value });
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing == 0.0
            && self.pair_depolarizing.iter().all(|(_, p)| *p == 0.0)
            && self.damping == 0.0
            && self.readout_0to1 == 0.0
            && self.readout_1to0 == 0.0
    }

    /// True when some channel acts during the circuit, so that trajectories
    /// differ. Readout error alone is applied at measurement.
    pub fn has_channels(&self) -> bool {
        self.depolarizing > 0.0 || self.pair_depolarizing.iter().any(|(_, p)| *p > 0.0) || self.damping > 0.0
    }

    fn depolarizing_for(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        self.pair_depolarizing.iter().find(|(k, _)| *k == key).map_or(self.depolarizing, |(_, p)| *p)
    }
}

fn trajectory_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

/// Applies circuits with the trajectory noise of a model, drawing from its
/// own RNG stream.
pub struct NoisyRunner<'a> {
    noise: &'a NoiseModel,
    rng: ChaCha8Rng,
}

impl<'a> NoisyRunner<'a> {
    pub fn new(noise: &'a NoiseModel, seed: u64, trajectory: usize) -> Self {
        NoisyRunner { noise, rng: trajectory_rng(seed, trajectory) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn apply(&mut self, psi: &mut StateVector, c: &Circuit) -> Result<(), DenseError> {
        let n = psi.n_qubits();
        let damped: Vec<usize> = self.noise.damped.clone().unwrap_or_else(|| (0..n).collect());
        let mut marks = c.cycle_marks().iter().peekable();
        for (i, g) in c.gates().iter().enumerate() {
            psi.apply_gate(g)?;
            if let Gate::CPhase { a, b, .. } = g {
                let p = self.noise.depolarizing_for(*a, *b);
                if p > 0.0 && self.rng.gen::<f64>() < p {
                    let k = self.rng.gen_range(1..16);
                    let s = PauliString::from_letters([(*a, LETTERS[k / 4]), (*b, LETTERS[k % 4])]);
                    psi.apply_pauli(&s)?;
                }
            }
            while marks.next_if(|&&m| m == i + 1).is_some() {
                if self.noise.damping > 0.0 {
                    for &q in &damped {
                        psi.damp(q, self.noise.damping, &mut self.rng);
                    }
                }
            }
        }
        Ok(())
    }
}

/// One noisy trajectory of `c` from |0...0>.
pub fn run_trajectory(
    c: &Circuit,
    n: usize,
    noise: &NoiseModel,
    seed: u64,
    trajectory: usize,
) -> Result<StateVector, DenseError> {
    let mut psi = StateVector::new(n)?;
    NoisyRunner::new(noise, seed, trajectory).apply(&mut psi, c)?;
    Ok(psi)
}

/// Trajectory-averaged expectations including the readout model.
pub fn trajectory_expectations(
    c: &Circuit,
    noise: &NoiseModel,
    observables: &[PauliString],
    n_traj: usize,
    seed: u64,
) -> Result<Vec<Estimate>, DenseError> {
    noise.validate()?;
    for o in observables {
        if !o.is_hermitian() {
            return Err(DenseError::NonHermitian(o.to_string()));
        }
    }
    let per: Vec<Vec<f64>> = (0..n_traj.max(1))
        .into_par_iter()
        .map(|k| {
            let psi = run_trajectory(c, c.n_qubits(), noise, seed, k)?;
            observables.iter().map(|o| psi.readout_expectation(o, noise)).collect()
        })
        .collect::<Result<_, _>>()?;
    let t = per.len() as f64;
    Ok((0..observables.len())
        .map(|j| {
            let mean = per.iter().map(|r| r[j]).sum::<f64>() / t;
            let var = per.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
            Estimate { mean, sigma: (var / t).sqrt(), samples: per.len() }
        })
        .collect())
}

/// Samples `shots` readouts per trajectory in the plan's basis, with readout
/// flips. Rows carry their trajectory id.
pub fn run_trajectories(
    c: &Circuit,
    noise: &NoiseModel,
    plan: &MeasurementPlan,
    n_traj: usize,
    shots: usize,
    seed: u64,
) -> Result<ShotTable, DenseError> {
    noise.validate()?;
    let n = c.n_qubits().max(plan.basis.n_qubits());
    let rows: Vec<Vec<ShotRow>> = (0..n_traj.max(1))
        .into_par_iter()
        .map(|k| {
            let mut runner = NoisyRunner::new(noise, seed, k);
            let mut psi = StateVector::new(n)?;
            runner.apply(&mut psi, c)?;
            psi.apply_circuit(&plan.basis)?;
            let rng = runner.rng();
            Ok((0..shots)
                .map(|_| {
                    let x = psi.sample(rng);
                    let bits = plan
                        .qubits
                        .iter()
                        .map(|&q| {
                            let b = (x >> q) & 1 == 1;
                            let flip = if b { noise.readout_1to0 } else { noise.readout_0to1 };
                            b ^ (flip > 0.0 && rng.gen::<f64>() < flip)
                        })
                        .collect();
                    ShotRow { bits, twirl: 0, disorder: 0, trajectory: k as u32 }
                })
                .collect())
        })
        .collect::<Result<_, DenseError>>()?;
    Ok(ShotTable { qubits: plan.qubits.clone(), rows: rows.into_iter().flatten().collect() })
}
