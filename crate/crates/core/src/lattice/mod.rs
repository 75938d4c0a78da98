//! Honeycomb patches, Pauli strings and the gauge-invariant observables built
//! on them.

mod geometry;
mod observables;
mod pauli;

pub use geometry::{build_patch, GeometryFile, GeometrySpec, LatticeError, BUILTINS};
pub use observables::*;
pub use pauli::{Pauli, PauliString};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    pub fn from_letter(p: Pauli) -> Option<Axis> {
        match p {
            Pauli::X => Some(Axis::X),
            Pauli::Y => Some(Axis::Y),
            Pauli::Z => Some(Axis::Z),
            Pauli::I => None,
        }
    }

    /// The axis different from both arguments.
    pub fn third(a: Axis, b: Axis) -> Axis {
        Axis::ALL[3 - a.index() - b.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: usize,
    pub sublattice: Sublattice,
    pub x: f64,
    pub y: f64,
}

/// Bond oriented from its A site `a` to its B site `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub axis: Axis,
}

impl Bond {
    pub fn other(&self, s: usize) -> usize {
        if s == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, s: usize) -> bool {
        self.a == s || self.b == s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Protruding {
    pub site: usize,
    pub bond: usize,
}

/// Per-geometry protocol data shipped alongside the layout.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    /// Bonds swept with M-SWAPs after flux-free preparation.
    #[serde(default)]
    pub mswap: Vec<usize>,
    /// Plaquette hosting the central anyon.
    #[serde(default)]
    pub centre: Option<usize>,
    /// z bonds from the centre to the boundary, in order.
    #[serde(default)]
    pub exit: Vec<usize>,
    /// Density pairs followed by the imaging protocol.
    #[serde(default)]
    pub tracked: Vec<[usize; 2]>,
    /// Edge site whose dangling Pauli splits the braided pair.
    #[serde(default)]
    pub braid_site: Option<usize>,
    /// Edge site attached to the protruding bond.
    #[serde(default)]
    pub origin: Option<usize>,
    /// Region used for entanglement cuts.
    #[serde(default)]
    pub cut: Vec<usize>,
}

/// A validated honeycomb patch.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub name: String,
    pub reconstructed: bool,
    pub reference_qubits: Option<usize>,
    pub sites: Vec<Site>,
    pub bonds: Vec<Bond>,
    pub plaquettes: Vec<[usize; 6]>,
    pub edge_cycle: Vec<usize>,
    pub protruding: Option<Protruding>,
    pub ancilla: Option<usize>,
    pub protocol: Protocol,
    plaquette_sites: Vec<[usize; 6]>,
    nbr: Vec<[Option<usize>; 3]>,
    source: String,
}

impl Lattice {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn is_driven(&self, s: usize) -> bool {
        Some(s) != self.ancilla && self.protruding.map(|p| p.site) != Some(s)
    }

    pub fn driven_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&s| self.is_driven(s)).collect()
    }

    /// Sites carrying a Majorana register (everything but the ancilla).
    pub fn lattice_sites(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&s| Some(s) != self.ancilla).collect()
    }

    pub fn is_bond_driven(&self, b: usize) -> bool {
        self.protruding.map(|p| p.bond) != Some(b)
    }

    /// Driven bond ids of one axis, ascending.
    pub fn layer(&self, axis: Axis) -> Vec<usize> {
        (0..self.bonds.len())
            .filter(|&b| self.bonds[b].axis == axis && self.is_bond_driven(b))
            .collect()
    }

    pub fn bond_at(&self, s: usize, axis: Axis) -> Option<usize> {
        self.nbr[s][axis.index()]
    }

    pub fn neighbour(&self, s: usize, axis: Axis) -> Option<usize> {
        self.bond_at(s, axis).map(|b| self.bonds[b].other(s))
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<usize> {
        Axis::ALL
            .iter()
            .filter_map(|&ax| self.bond_at(a, ax))
            .find(|&id| self.bonds[id].touches(b))
    }

    pub fn neighbours(&self, s: usize) -> Vec<usize> {
        let mut v: Vec<usize> = Axis::ALL.iter().filter_map(|&ax| self.neighbour(s, ax)).collect();
        v.sort_unstable();
        v
    }

    pub fn degree(&self, s: usize) -> usize {
        self.nbr[s].iter().flatten().count()
    }

    /// Sites of plaquette `p` in loop order; bond k joins sites k and k+1.
    pub fn plaquette_sites(&self, p: usize) -> [usize; 6] {
        self.plaquette_sites[p]
    }

    pub fn plaquettes_of(&self, s: usize) -> Vec<usize> {
        (0..self.plaquettes.len())
            .filter(|&p| self.plaquette_sites[p].contains(&s))
            .collect()
    }

    /// Sites on fewer than three plaquettes.
    pub fn boundary_sites(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.n_sites()];
        for ps in &self.plaquette_sites {
            for &s in ps {
                count[s] += 1;
            }
        }
        self.lattice_sites().into_iter().filter(|&s| count[s] < 3).collect()
    }

    /// Boundary walk, counter-clockwise unless `reversed`.
    pub fn edge_cycle(&self, reversed: bool) -> Vec<usize> {
        let mut v = self.edge_cycle.clone();
        if reversed {
            v.reverse();
        }
        v
    }

    /// Canonical JSON text the lattice was built from.
    pub fn source(&self) -> &str {
        &self.source
    }
}
