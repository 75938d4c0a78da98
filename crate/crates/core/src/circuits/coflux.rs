use serde::{Deserialize, Serialize};

use crate::lattice::{Lattice, LatticeError, Pauli, PauliString};

use super::clifford::{all_singles, propagate_forward, Gen, Single};
use super::{Circuit, CircuitError, Gate};

/// Maps computational-basis readouts to flux values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxDecoder {
    pub plaquettes: Vec<usize>,
    /// Per plaquette: sign and the qubits whose Z parity carries the flux.
    pub entries: Vec<(i8, Vec<usize>)>,
}

impl FluxDecoder {
    pub fn decode(&self, bits: &[bool]) -> Vec<i8> {
        self.entries
            .iter()
            .map(|(sign, qs)| {
                let odd = qs.iter().filter(|&&q| bits[q]).count() % 2 == 1;
                if odd { -sign } else { *sign }
            })
            .collect()
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.entries.iter().flat_map(|(_, q)| q.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn word_gates(q: usize, word: &[Gen]) -> impl Iterator<Item = Gate> + '_ {
    word.iter().map(move |g| match g {
        Gen::H => Gate::H(q),
        Gen::S => Gate::S(q),
    })
}

fn sends(u: &Single, from: Pauli, to: Pauli) -> bool {
    u.image(from).1 == to
}

/// Basis change after which every requested flux is a Z-parity, plus its
/// decoder. Plaquettes sharing a bond get one CZ on that bond.
pub fn coflux_measurement_plan(
    lat: &Lattice,
    plaquettes: &[usize],
) -> Result<(Circuit, FluxDecoder), CircuitError> {
    let n = lat.n_sites();
    let mut owners = vec![Vec::new(); n];
    for &p in plaquettes {
        if p >= lat.plaquettes.len() {
            return Err(LatticeError::InvalidPlaquette(p).into());
        }
        for s in lat.plaquette_sites(p) {
            owners[s].push(p);
        }
    }
    if let Some(s) = (0..n).find(|&s| owners[s].len() > 2) {
        return Err(CircuitError::CofluxLayers(format!("site {s} lies on three requested plaquettes")));
    }
    let fluxes: Vec<PauliString> = plaquettes.iter().map(|&p| lat.flux_string(p).unwrap()).collect();
    let idx = |p: usize| plaquettes.iter().position(|&q| q == p).unwrap();
    let singles = all_singles();
    let mut c = Circuit::new(n);
    let mut done = vec![false; n];
    let mut shared = Vec::new();
    for b in 0..lat.bonds.len() {
        let bond = lat.bonds[b];
        let (j, k) = (bond.a, bond.b);
        if owners[j].len() < 2 || owners[j] != owners[k] {
            continue;
        }
        let (w1, w2) = (&fluxes[idx(owners[j][0])], &fluxes[idx(owners[j][1])]);
        let mut found = None;
        'search: for (cj, wj) in &singles {
            for (ck, wk) in &singles {
                for (p, q) in [(w1, w2), (w2, w1)] {
                    if sends(cj, p.get(j), Pauli::X)
                        && sends(ck, p.get(k), Pauli::Z)
                        && sends(cj, q.get(j), Pauli::Z)
                        && sends(ck, q.get(k), Pauli::X)
                    {
                        found = Some((wj.clone(), wk.clone()));
                        break 'search;
                    }
                }
            }
        }
        let (wj, wk) = found.ok_or_else(|| CircuitError::CofluxLayers(format!("bond {b} has no eigenbasis")))?;
        c.extend(word_gates(j, &wj))?;
        c.extend(word_gates(k, &wk))?;
        shared.push((j, k));
        done[j] = true;
        done[k] = true;
    }
    for s in 0..n {
        if done[s] || owners[s].is_empty() {
            continue;
        }
        if owners[s].len() == 2 {
            return Err(CircuitError::CofluxLayers(format!("site {s} is shared without a shared bond")));
        }
        let l = fluxes[idx(owners[s][0])].get(s);
        let (_, w) = singles
            .iter()
            .find(|(u, _)| sends(u, l, Pauli::Z))
            .expect("some Clifford sends any letter to Z");
        c.extend(word_gates(s, w))?;
    }
    for &(j, k) in &shared {
        c.push(Gate::cz(j, k))?;
    }
    for &(j, k) in &shared {
        c.extend([Gate::H(j), Gate::H(k)])?;
    }
    let mut entries = Vec::new();
    for w in &fluxes {
        let img = propagate_forward(c.gates(), w).expect("basis change is Clifford");
        if img.letters().values().any(|&l| l != Pauli::Z) || !img.is_hermitian() {
            return Err(CircuitError::CofluxLayers(format!("flux {w} is not diagonalised")));
        }
        entries.push((img.sign(), img.support().collect()));
    }
    Ok((c, FluxDecoder { plaquettes: plaquettes.to_vec(), entries }))
}
