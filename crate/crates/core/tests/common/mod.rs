#![allow(dead_code)]

use floquet_kitaev::circuits::{Circuit, Gate};
use floquet_kitaev::dense::StateVector;
use floquet_kitaev::lattice::{Axis, Lattice, PathSpec, Pauli, PauliString};
use num_complex::Complex64;
use floquet_kitaev::stabilizer::Tableau;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dense_after(c: &Circuit) -> StateVector {
    let mut s = StateVector::new(c.n_qubits()).unwrap();
    s.apply_circuit(c).unwrap();
    s
}

pub fn tableau_after(c: &Circuit) -> Tableau {
    let mut t = Tableau::new(c.n_qubits()).unwrap();
    t.apply(c).unwrap();
    t
}

/// Fluxes, density strings, dangling letters and Hermitian products of
/// them: gauge-closed strings both engines can evaluate.
pub fn random_bilinears(lat: &Lattice, count: usize, seed: u64) -> Vec<PauliString> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = lat.lattice_sites();
    let mut out = lat.flux_strings();
    while out.len() < count {
        let j = sites[rng.gen_range(0..sites.len())];
        let k = sites[rng.gen_range(0..sites.len())];
        if j == k {
            if let Some(l) = lat.dangling_letter(j) {
                out.push(PauliString::single(j, l));
            }
            continue;
        }
        let s = lat.density_string(j, k, &PathSpec::Shortest).unwrap();
        if rng.gen_bool(0.3) {
            let other = out[rng.gen_range(0..out.len())].clone();
            let prod = s.mul(&other);
            if prod.is_hermitian() {
                out.push(prod);
                continue;
            }
        }
        out.push(s);
    }
    out.truncate(count);
    out
}

/// Unitary of a two-qubit circuit, column k = U|k>.
pub fn unitary2(c: &Circuit) -> [[Complex64; 4]; 4] {
    let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
    for k in 0..4 {
        let mut s = StateVector::new(2).unwrap();
        for q in 0..2 {
            if k >> q & 1 == 1 {
                s.apply_gate(&Gate::pauli(q, Axis::X)).unwrap();
            }
        }
        // Pauli X as a pi rotation carries a phase.
        let phase = s.amplitudes()[k].conj();
        s.apply_circuit(c).unwrap();
        for r in 0..4 {
            u[r][k] = s.amplitudes()[r] * phase;
        }
    }
    u
}

/// p (x) p as a 4x4 matrix, qubit 0 least significant.
pub fn kron_letter(p: Pauli) -> [[Complex64; 4]; 4] {
    let m = p.matrix();
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[r & 1][c & 1] * m[r >> 1][c >> 1];
        }
    }
    out
}
