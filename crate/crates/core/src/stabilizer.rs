//! Tableau simulation of Clifford circuits with destabilizers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::ShotTable;
use crate::circuits::clifford::{gate_image, propagate_backward, GateImage, NonClifford, Single};
use crate::circuits::{Circuit, Gate, MeasurementPlan};
use crate::lattice::{Pauli, PauliString};

#[derive(Debug, Error)]
pub enum StabilizerError {
    #[error("a tableau needs at least one qubit")]
    Empty,
    #[error(transparent)]
    NonClifford(#[from] NonClifford),
    #[error("observable must be Hermitian: {0}")]
    NonHermitian(String),
    #[error("circuit acts on {circuit} qubits, tableau has {tableau}")]
    Size { circuit: usize, tableau: usize },
    #[error("mid-circuit measurement on qubit {0}; use sample_shots")]
    Measurement(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    /// Power of i; 0 or 2 for every row of a valid tableau.
    phase: u8,
}

impl Row {
    fn zero(words: usize) -> Self {
        Row { x: vec![0; words], z: vec![0; words], phase: 0 }
    }

    fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let (w, m) = (q / 64, 1u64 << (q % 64));
        self.x[w] = if p.x_bit() { self.x[w] | m } else { self.x[w] & !m };
        self.z[w] = if p.z_bit() { self.z[w] | m } else { self.z[w] & !m };
    }

    /// self <- self * other, phases tracked exactly.
    fn mul_assign(&mut self, other: &Row) {
        let mut k: i64 = (self.phase + other.phase) as i64;
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[w], self.z[w], other.x[w], other.z[w]);
            let (px1, py1, pz1) = (x1 & !z1, x1 & z1, !x1 & z1);
            let (px2, py2, pz2) = (x2 & !z2, x2 & z2, !x2 & z2);
            let pos = (px1 & py2) | (py1 & pz2) | (pz1 & px2);
            let neg = (py1 & px2) | (pz1 & py2) | (px1 & pz2);
            k += pos.count_ones() as i64 - neg.count_ones() as i64;
            self.x[w] = x1 ^ x2;
            self.z[w] = z1 ^ z2;
        }
        self.phase = k.rem_euclid(4) as u8;
    }

    fn anticommutes(&self, other: &Row) -> bool {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        acc % 2 == 1
    }

    fn from_pauli(p: &PauliString, words: usize) -> Row {
        let mut r = Row::zero(words);
        for (&q, &l) in p.letters() {
            r.set(q, l);
        }
        r.phase = p.phase();
        r
    }

    fn to_pauli(&self, n: usize) -> PauliString {
        PauliString::from_letters((0..n).map(|q| (q, self.get(q)))).with_phase(self.phase)
    }
}

/// Stabilizer state on `n` qubits: rows 0..n are destabilizers, n..2n the
/// stabilizer generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<Row>,
}

impl Tableau {
    /// The all-zeros state.
    pub fn new(n: usize) -> Result<Self, StabilizerError> {
        if n == 0 {
            return Err(StabilizerError::Empty);
        }
        let words = n.div_ceil(64);
        let mut rows = vec![Row::zero(words); 2 * n];
        for q in 0..n {
            rows[q].set(q, Pauli::X);
            rows[n + q].set(q, Pauli::Z);
        }
        Ok(Tableau { n, rows })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        self.rows[self.n..].iter().map(|r| r.to_pauli(self.n)).collect()
    }

    fn single(&mut self, q: usize, u: &Single) {
        for r in &mut self.rows {
            let l = r.get(q);
            if l != Pauli::I {
                let (k, l2) = u.image(l);
                r.set(q, l2);
                r.phase = (r.phase + k) % 4;
            }
        }
    }

    fn apply_image(&mut self, g: &GateImage) {
        match g {
            GateImage::Single(q, u) => self.single(*q, u),
            _ => {
                for r in &mut self.rows {
                    let p = r.to_pauli_sparse(g);
                    if let Some(img) = p {
                        *r = img;
                    }
                }
            }
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), StabilizerError> {
        if let Gate::Measure { q, .. } = g {
            return Err(StabilizerError::Measurement(*q));
        }
        if let Some(&q) = g.support().iter().find(|&&q| q >= self.n) {
            return Err(StabilizerError::Size { circuit: q + 1, tableau: self.n });
        }
        let img = gate_image(g)?;
        self.apply_image(&img);
        Ok(())
    }

    /// Applies every gate of `c` in order.
    pub fn apply(&mut self, c: &Circuit) -> Result<(), StabilizerError> {
        if c.n_qubits() > self.n {
            return Err(StabilizerError::Size { circuit: c.n_qubits(), tableau: self.n });
        }
        for g in c.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Exact expectation value: -1, 0 or +1.
    pub fn expectation(&self, p: &PauliString) -> Result<i8, StabilizerError> {
        if !p.is_hermitian() {
            return Err(StabilizerError::NonHermitian(p.to_string()));
        }
        if p.max_site().is_some_and(|q| q >= self.n) {
            return Err(StabilizerError::Size { circuit: p.max_site().unwrap() + 1, tableau: self.n });
        }
        let words = self.n.div_ceil(64);
        let target = Row::from_pauli(p, words);
        if self.rows[self.n..].iter().any(|s| s.anticommutes(&target)) {
            return Ok(0);
        }
        let mut acc = Row::zero(words);
        for i in 0..self.n {
            if self.rows[i].anticommutes(&target) {
                acc.mul_assign(&self.rows[self.n + i]);
            }
        }
        debug_assert_eq!(acc.x, target.x);
        debug_assert_eq!(acc.z, target.z);
        // target = i^{t} P, acc = i^{a} P with acc = +1 on the state.
        Ok(match (target.phase + 4 - acc.phase) % 4 {
            0 => 1,
            2 => -1,
            _ => unreachable!("Hermitian strings differ by a sign"),
        })
    }

    /// Projective Z measurement with a random outcome where needed.
    pub fn measure_z<R: Rng>(&mut self, q: usize, rng: &mut R) -> bool {
        let n = self.n;
        let words = n.div_ceil(64);
        let mut zq = Row::zero(words);
        zq.set(q, Pauli::Z);
        if let Some(p) = (n..2 * n).find(|&i| self.rows[i].anticommutes(&zq)) {
            let pivot = self.rows[p].clone();
            for i in 0..2 * n {
                if i != p && self.rows[i].anticommutes(&zq) {
                    self.rows[i].mul_assign(&pivot);
                }
            }
            self.rows[p - n] = pivot;
            let outcome = rng.gen_bool(0.5);
            let mut stab = zq;
            stab.phase = if outcome { 2 } else { 0 };
            self.rows[p] = stab;
            outcome
        } else {
            let mut acc = Row::zero(words);
            for i in 0..n {
                if self.rows[i].anticommutes(&zq) {
                    acc.mul_assign(&self.rows[n + i]);
                }
            }
            acc.phase == 2
        }
    }

    /// Binary rank of the generators restricted to `region`, minus |region|:
    /// the entanglement entropy in units of log 2.
    pub fn entanglement_entropy(&self, region: &[usize]) -> usize {
        let mut region = region.to_vec();
        region.sort_unstable();
        region.dedup();
        let cols = 2 * region.len();
        let mut mat: Vec<Vec<u64>> = self.rows[self.n..]
            .iter()
            .map(|r| {
                let mut v = vec![0u64; cols.div_ceil(64).max(1)];
                for (k, &q) in region.iter().enumerate() {
                    let l = r.get(q);
                    if l.x_bit() {
                        v[(2 * k) / 64] |= 1 << ((2 * k) % 64);
                    }
                    if l.z_bit() {
                        v[(2 * k + 1) / 64] |= 1 << ((2 * k + 1) % 64);
                    }
                }
                v
            })
            .collect();
        let rank = gf2_rank(&mut mat, cols);
        rank - region.len()
    }
}

impl Row {
    fn to_pauli_sparse(&self, g: &GateImage) -> Option<Row> {
        let touched: Vec<usize> = match g {
            GateImage::Cz(a, b) => vec![*a, *b],
            GateImage::Controlled(c, s) => std::iter::once(*c).chain(s.support()).collect(),
            _ => return None,
        };
        if touched.iter().all(|&q| self.get(q) == Pauli::I) {
            return None;
        }
        let local = PauliString::from_letters(touched.iter().map(|&q| (q, self.get(q))));
        let img = crate::circuits::clifford::forward(g, &local);
        let mut out = self.clone();
        for &q in &touched {
            out.set(q, img.get(q));
        }
        out.phase = (self.phase + img.phase()) % 4;
        Some(out)
    }
}

fn gf2_rank(mat: &mut [Vec<u64>], cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let (w, m) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..mat.len()).find(|&r| mat[r][w] & m != 0) else {
            continue;
        };
        mat.swap(rank, p);
        let pivot = mat[rank].clone();
        for r in 0..mat.len() {
            if r != rank && mat[r][w] & m != 0 {
                for (a, b) in mat[r].iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// c^dagger P c.
pub fn conjugate_string(p: &PauliString, c: &Circuit) -> Result<PauliString, StabilizerError> {
    Ok(propagate_backward(c.gates(), p)?)
}

/// Samples the plan's readout qubits after its basis change. Shot k uses the
/// RNG stream (seed, k).
pub fn sample_shots(
    t: &Tableau,
    plan: &MeasurementPlan,
    shots: usize,
    seed: u64,
) -> Result<ShotTable, StabilizerError> {
    let mut base = t.clone();
    base.apply(&plan.basis)?;
    let rows: Vec<Vec<bool>> = (0..shots)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut tab = base.clone();
            plan.qubits.iter().map(|&q| tab.measure_z(q, &mut rng)).collect()
        })
        .collect();
    Ok(ShotTable::from_bits(plan.qubits.clone(), rows))
}
