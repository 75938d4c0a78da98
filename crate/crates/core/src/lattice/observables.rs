use std::collections::VecDeque;

use sha2::{Digest, Sha256};

use super::{Axis, Lattice, LatticeError, Pauli, PauliString, Sublattice};
use crate::majorana::{b_mode, c_mode, to_pauli, Monomial};

/// Path choice for a density string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathSpec {
    Shortest,
    Sites(Vec<usize>),
}

impl Lattice {
    /// Plaquette operator: the outward-axis letter on each of the six sites.
    pub fn flux_string(&self, p: usize) -> Result<PauliString, LatticeError> {
        if p >= self.plaquettes.len() {
            return Err(LatticeError::InvalidPlaquette(p));
        }
        let sites = self.plaquette_sites(p);
        let bonds = self.plaquettes[p];
        let letters = (0..6).map(|k| {
            let before = self.bonds[bonds[(k + 5) % 6]].axis;
            let after = self.bonds[bonds[k]].axis;
            (sites[k], Axis::third(before, after).letter())
        });
        Ok(PauliString::from_letters(letters))
    }

    pub fn flux_strings(&self) -> Vec<PauliString> {
        (0..self.plaquettes.len()).map(|p| self.flux_string(p).unwrap()).collect()
    }

    /// The two-site coupling alpha_j alpha_k of a bond.
    pub fn bond_coupling(&self, b: usize) -> Result<PauliString, LatticeError> {
        let bond = self.bonds.get(b).ok_or(LatticeError::InvalidBond(b))?;
        let l = bond.axis.letter();
        Ok(PauliString::from_letters([(bond.a, l), (bond.b, l)]))
    }

    /// Lexicographically smallest shortest path from `j` to `k`.
    pub fn shortest_path(&self, j: usize, k: usize) -> Option<Vec<usize>> {
        let n = self.n_sites();
        if j >= n || k >= n {
            return None;
        }
        let mut dist = vec![usize::MAX; n];
        dist[k] = 0;
        let mut queue = VecDeque::from([k]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbours(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if dist[j] == usize::MAX {
            return None;
        }
        let mut path = vec![j];
        let mut cur = j;
        while cur != k {
            cur = self
                .neighbours(cur)
                .into_iter()
                .find(|&w| dist[w] + 1 == dist[cur])
                .expect("BFS predecessor");
            path.push(cur);
        }
        Some(path)
    }

    /// Product of the oriented gauge bonds i b_A b_B along a site path.
    pub fn gauge_string(&self, path: &[usize]) -> Result<Monomial, LatticeError> {
        let mut m = Monomial::one();
        for w in path.windows(2) {
            let b = self.bond_between(w[0], w[1]).ok_or_else(|| {
                LatticeError::DisconnectedPath(format!("sites {} and {} are not bonded", w[0], w[1]))
            })?;
            let bond = self.bonds[b];
            let u = Monomial::mode(b_mode(bond.a, bond.axis))
                .mul(&Monomial::mode(b_mode(bond.b, bond.axis)))
                .times_i(1);
            m = m.mul(&u);
        }
        Ok(m)
    }

    /// Density string S(j,k) = i phi_jk c_j c_k, with n = (1 + S)/2.
    pub fn density_string(
        &self,
        j: usize,
        k: usize,
        path: &PathSpec,
    ) -> Result<PauliString, LatticeError> {
        let n = self.n_sites();
        for s in [j, k] {
            if s >= n || Some(s) == self.ancilla {
                return Err(LatticeError::InvalidSite(s));
            }
        }
        if j == k {
            return Err(LatticeError::SameSite(j));
        }
        let sites = match path {
            PathSpec::Shortest => self.shortest_path(j, k).ok_or_else(|| {
                LatticeError::DisconnectedPath(format!("no path from {j} to {k}"))
            })?,
            PathSpec::Sites(p) => {
                if p.first() != Some(&j) || p.last() != Some(&k) {
                    return Err(LatticeError::DisconnectedPath(format!(
                        "path must run from {j} to {k}"
                    )));
                }
                p.clone()
            }
        };
        let cc = Monomial::mode(c_mode(j)).mul(&Monomial::mode(c_mode(k))).times_i(1);
        let m = cc.mul(&self.gauge_string(&sites)?);
        to_pauli(&m).ok_or_else(|| LatticeError::DisconnectedPath("path revisits a site".into()))
    }

    /// Where the content of each site lands after one cycle at JT = 1.
    pub fn content_permutation(&self) -> Vec<usize> {
        (0..self.n_sites())
            .map(|s| {
                let mut t = s;
                for ax in Axis::ALL {
                    if let Some(b) = self.bond_at(t, ax) {
                        if self.is_bond_driven(b) && self.is_driven(t) {
                            t = self.bonds[b].other(t);
                        }
                    }
                }
                t
            })
            .collect()
    }

    /// Opposite corners (A first) of a plaquette that share neither a bond
    /// nor a bond-neighbour.
    pub fn diagonal_pair(&self, p: usize) -> Result<(usize, usize), LatticeError> {
        if p >= self.plaquettes.len() {
            return Err(LatticeError::InvalidPlaquette(p));
        }
        let s = self.plaquette_sites(p);
        let (a, b) = (s[0], s[3]);
        Ok(if self.sites[a].sublattice == Sublattice::A { (a, b) } else { (b, a) })
    }

    /// Electric loop operator around plaquette `p`: W_p times the fermion
    /// parity of its diagonal pair.
    pub fn loop_operator(&self, p: usize) -> Result<PauliString, LatticeError> {
        let (a, b) = self.diagonal_pair(p)?;
        let pf = self.density_string(a, b, &PathSpec::Shortest)?.negate();
        Ok(self.flux_string(p)?.mul(&pf))
    }

    /// SHA-256 of the canonical geometry text.
    pub fn geometry_hash(&self) -> String {
        let digest = Sha256::digest(self.source().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Single-site letter whose Majorana form is c_s b^axis_s.
    pub fn dangling_letter(&self, s: usize) -> Option<Pauli> {
        Axis::ALL
            .into_iter()
            .find(|&ax| self.bond_at(s, ax).is_none())
            .map(Axis::letter)
    }
}
