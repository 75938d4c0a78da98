//! Majorana monomials in the four-Majorana representation of a spin-1/2.
//!
//! Site j carries c_j = 4j, b^x_j = 4j+1, b^y_j = 4j+2, b^z_j = 4j+3, with
//! sigma^a_j = i c_j b^a_j and D_j = c_j b^x_j b^y_j b^z_j = 1 on the physical
//! subspace.

use crate::lattice::{Axis, Pauli, PauliString};

pub fn c_mode(site: usize) -> usize {
    4 * site
}

pub fn b_mode(site: usize, axis: Axis) -> usize {
    4 * site + 1 + axis.index()
}

/// `i^phase * gamma_{m_1} ... gamma_{m_k}` with strictly increasing modes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub phase: u8,
    pub modes: Vec<usize>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { phase: 0, modes: Vec::new() }
    }

    pub fn mode(m: usize) -> Self {
        Monomial { phase: 0, modes: vec![m] }
    }

    pub fn times_i(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.modes, &other.modes);
        let mut inversions = 0usize;
        let mut j = 0;
        for &x in a {
            while j < b.len() && b[j] < x {
                j += 1;
            }
            inversions += j;
        }
        let mut modes = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                modes.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                modes.push(b[j]);
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        let mut phase = (self.phase + other.phase) % 4;
        if inversions % 2 == 1 {
            phase = (phase + 2) % 4;
        }
        Monomial { phase, modes }
    }

    pub fn contains(&self, m: usize) -> bool {
        self.modes.binary_search(&m).is_ok()
    }
}

/// Majorana form of a single-site letter: `i c b^a` or, with `complement`,
/// the two-b form obtained by multiplying with D_j.
pub fn site_monomial(site: usize, p: Pauli, complement: bool) -> Monomial {
    let base = 4 * site;
    let m = |phase: u8, idx: &[usize]| Monomial {
        phase,
        modes: idx.iter().map(|k| base + k).collect(),
    };
    match (p, complement) {
        (Pauli::I, false) => Monomial::one(),
        (Pauli::I, true) => m(0, &[0, 1, 2, 3]),
        (Pauli::X, false) => m(1, &[0, 1]),
        (Pauli::Y, false) => m(1, &[0, 2]),
        (Pauli::Z, false) => m(1, &[0, 3]),
        (Pauli::X, true) => m(3, &[2, 3]),
        (Pauli::Y, true) => m(1, &[1, 3]),
        (Pauli::Z, true) => m(3, &[1, 2]),
    }
}

/// Converts a monomial with even content on every site back into a Pauli
/// string; `None` if some site holds an odd number of Majoranas.
pub fn to_pauli(m: &Monomial) -> Option<PauliString> {
    let mut out = PauliString::identity().with_phase(m.phase);
    let mut k = 0;
    while k < m.modes.len() {
        let site = m.modes[k] / 4;
        let mut block = 0u8;
        while k < m.modes.len() && m.modes[k] / 4 == site {
            block |= 1 << (m.modes[k] % 4);
            k += 1;
        }
        let (phase, letter) = match block {
            0b0011 => (3, Pauli::X),
            0b0101 => (3, Pauli::Y),
            0b1001 => (3, Pauli::Z),
            0b1100 => (1, Pauli::X),
            0b1010 => (3, Pauli::Y),
            0b0110 => (1, Pauli::Z),
            0b1111 => (0, Pauli::I),
            _ => return None,
        };
        out = out.mul(&PauliString::single(site, letter)).times_i(phase);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommuting_square() {
        let a = Monomial::mode(3);
        let b = Monomial::mode(1);
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_eq!(ab.modes, ba.modes);
        assert_eq!((ab.phase + 2) % 4, ba.phase);
        assert_eq!(a.mul(&a), Monomial::one());
    }

    #[test]
    fn letters_roundtrip() {
        for p in Pauli::XYZ {
            for comp in [false, true] {
                let m = site_monomial(2, p, comp);
                assert_eq!(to_pauli(&m).unwrap(), PauliString::single(2, p));
            }
        }
    }

    #[test]
    fn xyz_is_i() {
        let x = site_monomial(0, Pauli::X, false);
        let y = site_monomial(0, Pauli::Y, false);
        let z = site_monomial(0, Pauli::Z, false);
        let d = site_monomial(0, Pauli::I, true);
        assert_eq!(x.mul(&y).mul(&z), d.times_i(1));
    }
}
