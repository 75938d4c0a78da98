use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{Axis, Lattice, PathSpec, Pauli, PauliString};

use super::{Circuit, CircuitError, Gate};

/// Drive parameters: coupling-period product, disorder bound, per-site
/// fields and the number of cycles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub jt: f64,
    pub delta: f64,
    #[serde(default)]
    pub h: Vec<f64>,
    pub cycles: usize,
}

impl DriveParams {
    pub fn clean(jt: f64, cycles: usize) -> Self {
        DriveParams { jt, delta: 0.0, h: Vec::new(), cycles }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if !self.jt.is_finite() {
            return Err(CircuitError::Angle);
        }
        if self.delta < 0.0 || self.delta.is_nan() {
            return Err(CircuitError::NegativeDelta(self.delta));
        }
        for (site, &h) in self.h.iter().enumerate() {
            if h.abs() > self.delta {
                return Err(CircuitError::Disorder { site, h, delta: self.delta });
            }
        }
        Ok(())
    }

    pub fn has_disorder(&self) -> bool {
        self.h.iter().any(|&h| h != 0.0)
    }
}

/// exp(-i (pi/4) JT alpha_a alpha_b) up to global phase, in time order.
pub fn bond_coupling_gates(axis: Axis, jt: f64, a: usize, b: usize) -> Vec<Gate> {
    let core = [
        Gate::Rot { q: a, axis: Axis::Z, angle: PI * jt / 2.0 },
        Gate::Rot { q: b, axis: Axis::Z, angle: PI * jt / 2.0 },
        Gate::CPhase { a, b, angle: -PI * jt },
    ];
    let sdg = |q| Gate::Rot { q, axis: Axis::Z, angle: -FRAC_PI_2 };
    match axis {
        Axis::Z => core.to_vec(),
        Axis::X => [Gate::H(a), Gate::H(b)]
            .into_iter()
            .chain(core)
            .chain([Gate::H(a), Gate::H(b)])
            .collect(),
        Axis::Y => [sdg(a), sdg(b), Gate::H(a), Gate::H(b)]
            .into_iter()
            .chain(core)
            .chain([Gate::H(a), Gate::H(b), Gate::S(a), Gate::S(b)])
            .collect(),
    }
}

fn push_cycle(c: &mut Circuit, lat: &Lattice, params: &DriveParams) -> Result<(), CircuitError> {
    for axis in Axis::ALL {
        for b in lat.layer(axis) {
            let bond = lat.bonds[b];
            c.extend(bond_coupling_gates(axis, params.jt, bond.a, bond.b))?;
        }
    }
    if params.has_disorder() {
        for s in lat.driven_sites() {
            let h = params.h.get(s).copied().unwrap_or(0.0);
            c.push(Gate::Rot { q: s, axis: Axis::Z, angle: PI * params.jt * h / 2.0 })?;
        }
    }
    c.mark_cycle();
    Ok(())
}

/// One period U_Z U_Y U_X, followed by the disorder layer when any field is
/// non-zero.
pub fn floquet_cycle(lat: &Lattice, params: &DriveParams) -> Result<Circuit, CircuitError> {
    let one = DriveParams { cycles: 1, ..params.clone() };
    floquet_evolution(lat, &one)
}

/// `params.cycles` periods, one cycle mark each.
pub fn floquet_evolution(lat: &Lattice, params: &DriveParams) -> Result<Circuit, CircuitError> {
    params.validate()?;
    let mut c = Circuit::new(lat.n_sites());
    c.meta.jt = Some(params.jt);
    c.meta.delta = Some(params.delta);
    c.meta.cycles = Some(params.cycles);
    for _ in 0..params.cycles {
        push_cycle(&mut c, lat, params)?;
    }
    Ok(c)
}

/// Uniform fields on [-delta, delta] for driven sites, zero elsewhere.
pub fn sample_disorder(lat: &Lattice, delta: f64, seed: u64) -> Result<Vec<f64>, CircuitError> {
    if delta < 0.0 || delta.is_nan() {
        return Err(CircuitError::NegativeDelta(delta));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..lat.n_sites())
        .map(|s| {
            if lat.is_driven(s) && delta > 0.0 {
                rng.gen_range(-delta..=delta)
            } else {
                0.0
            }
        })
        .collect())
}

/// Gates taking |0> to the +1 eigenstate of a single letter.
fn letter_basis(q: usize, l: Pauli) -> Vec<Gate> {
    match l {
        Pauli::I | Pauli::Z => vec![],
        Pauli::X => vec![Gate::H(q)],
        Pauli::Y => vec![Gate::H(q), Gate::S(q)],
    }
}

/// Clifford circuit from |0...0> to the flux-free state: each plaquette in
/// turn is projected onto W_p = +1 through a fresh pivot site.
pub fn flux_free_prep(lat: &Lattice) -> Result<Circuit, CircuitError> {
    let mut c = Circuit::new(lat.n_sites());
    let mut touched = vec![false; lat.n_sites()];
    for p in 0..lat.plaquettes.len() {
        let w = lat.flux_string(p)?;
        let sites = lat.plaquette_sites(p);
        let pivot = [3, 2, 4, 1, 5, 0]
            .iter()
            .map(|&k| sites[k])
            .find(|&s| !touched[s] && w.get(s) != Pauli::Z)
            .ok_or_else(|| CircuitError::NoPrepPlan(format!("plaquette {p} has no free pivot")))?;
        let letter = w.get(pivot);
        c.extend(letter_basis(pivot, letter))?;
        if w.sign() < 0 {
            c.push(Gate::pauli(pivot, Axis::Z))?;
        }
        let rest = w.mul(&PauliString::single(pivot, letter)).with_phase(0);
        c.push(Gate::CPauli { control: pivot, string: rest })?;
        for s in sites {
            touched[s] = true;
        }
    }
    Ok(c)
}

/// M-SWAP sequence: the JT = 1 bond coupling on each listed bond in order.
pub fn mswap_circuit(lat: &Lattice, bonds: &[usize]) -> Result<Circuit, CircuitError> {
    let mut c = Circuit::new(lat.n_sites());
    for &b in bonds {
        let bond = *lat.bonds.get(b).ok_or(crate::lattice::LatticeError::InvalidBond(b))?;
        c.extend(bond_coupling_gates(bond.axis, 1.0, bond.a, bond.b))?;
    }
    Ok(c)
}

/// Fermion pairing after an M-SWAP sequence: each driven z pair of the
/// flux-free state, carried to the sites now holding its two c-Majoranas.
pub fn swapped_pairs(lat: &Lattice, bonds: &[usize]) -> Result<Vec<(usize, usize)>, CircuitError> {
    let mut content: Vec<usize> = (0..lat.n_sites()).collect();
    for &b in bonds {
        let bond = *lat.bonds.get(b).ok_or(crate::lattice::LatticeError::InvalidBond(b))?;
        content.swap(bond.a, bond.b);
    }
    let mut at = vec![0; content.len()];
    for (site, &c) in content.iter().enumerate() {
        at[c] = site;
    }
    Ok(lat
        .bonds
        .iter()
        .enumerate()
        .filter(|&(b, bond)| bond.axis == Axis::Z && lat.is_bond_driven(b))
        .map(|(_, bond)| (at[bond.a], at[bond.b]))
        .collect())
}

/// Hadamard test whose estimator <X_A> + i<Y_A> equals
/// <psi| post(N) pre |psi>, with post(N) the Heisenberg-evolved string.
pub fn hadamard_test(
    prep: &Circuit,
    pre: &PauliString,
    evolve: &Circuit,
    post: &PauliString,
    ancilla: usize,
) -> Result<Circuit, CircuitError> {
    for g in prep.gates().iter().chain(evolve.gates()) {
        if g.support().contains(&ancilla) {
            return Err(CircuitError::AncillaCollision(ancilla));
        }
    }
    for s in [pre, post] {
        if !s.is_hermitian() {
            return Err(CircuitError::NonHermitian(s.to_string()));
        }
        if s.get(ancilla) != Pauli::I {
            return Err(CircuitError::AncillaCollision(ancilla));
        }
    }
    let n = prep.n_qubits().max(evolve.n_qubits()).max(ancilla + 1);
    let mut c = Circuit::new(n);
    c.meta = evolve.meta.clone();
    c.append(&prep.widened(n))?;
    c.push(Gate::H(ancilla))?;
    c.push(Gate::CPauli { control: ancilla, string: pre.clone() })?;
    c.append(&evolve.widened(n))?;
    c.push(Gate::CPauli { control: ancilla, string: post.clone() })?;
    Ok(c)
}

/// Strings of the spectral probe: P_j = S(j, p) with p the protruding site.
pub fn probe_string(lat: &Lattice, j: usize) -> Result<PauliString, CircuitError> {
    let p = lat.protruding.ok_or(CircuitError::NoProtruding)?;
    if !lat.edge_cycle.contains(&j) || j == p.site {
        return Err(CircuitError::NotEdge(j));
    }
    Ok(lat.density_string(j, p.site, &PathSpec::Shortest)?)
}

/// Flux-free state with the protruding pair occupied.
pub fn probe_prep(lat: &Lattice) -> Result<Circuit, CircuitError> {
    let p = lat.protruding.ok_or(CircuitError::NoProtruding)?;
    let mut c = flux_free_prep(lat)?;
    c.push(Gate::pauli(p.site, Axis::X))?;
    Ok(c)
}

/// Hadamard test for C(j, N) = <psi_0| P_j(N) P_0 |psi_0>. Uses the
/// geometry's ancilla, or one extra qubit after the last site.
pub fn spectral_probe_circuit(
    lat: &Lattice,
    j: usize,
    n: usize,
    params: &DriveParams,
) -> Result<Circuit, CircuitError> {
    let origin = spectral_origin(lat)?;
    let pj = probe_string(lat, j)?;
    let p0 = probe_string(lat, origin)?;
    let prep = probe_prep(lat)?;
    let evolve = floquet_evolution(lat, &DriveParams { cycles: n, ..params.clone() })?;
    let ancilla = lat.ancilla.unwrap_or(lat.n_sites());
    hadamard_test(&prep, &p0, &evolve, &pj, ancilla)
}

/// Edge site attached to the protruding bond.
pub fn spectral_origin(lat: &Lattice) -> Result<usize, CircuitError> {
    let p = lat.protruding.ok_or(CircuitError::NoProtruding)?;
    Ok(lat.protocol.origin.unwrap_or_else(|| lat.bonds[p.bond].other(p.site)))
}
