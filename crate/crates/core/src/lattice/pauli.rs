//! Signed multi-qubit Pauli strings.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Single-site Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product `self * other` as (power of i, letter).
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// `i^phase` times a tensor product of letters; identity sites are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    phase: u8,
    letters: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(site: usize, p: Pauli) -> Self {
        let mut s = Self::identity();
        s.set(site, p);
        s
    }

    pub fn from_letters<I: IntoIterator<Item = (usize, Pauli)>>(items: I) -> Self {
        let mut s = Self::identity();
        for (q, p) in items {
            s = s.mul(&Self::single(q, p));
        }
        s
    }

    /// Power of i carried by the string.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_value(&self) -> Complex64 {
        ipow(self.phase)
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k % 4;
        self
    }

    pub fn times_i(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn negate(self) -> Self {
        self.times_i(2)
    }

    pub fn letters(&self) -> &BTreeMap<usize, Pauli> {
        &self.letters
    }

    pub fn get(&self, site: usize) -> Pauli {
        self.letters.get(&site).copied().unwrap_or(Pauli::I)
    }

    fn set(&mut self, site: usize, p: Pauli) {
        if p == Pauli::I {
            self.letters.remove(&site);
        } else {
            self.letters.insert(site, p);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// Sign of a Hermitian string (+1 or -1).
    pub fn sign(&self) -> i8 {
        match self.phase {
            0 => 1,
            2 => -1,
            _ => panic!("sign of a non-Hermitian Pauli string"),
        }
    }

    pub fn max_site(&self) -> Option<usize> {
        self.letters.keys().next_back().copied()
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.phase = (out.phase + other.phase) % 4;
        for (&q, &b) in &other.letters {
            let (k, p) = out.get(q).mul(b);
            out.phase = (out.phase + k) % 4;
            out.set(q, p);
        }
        out
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        let (small, big) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut odd = false;
        for (&q, &a) in &small.letters {
            if a.anticommutes(big.get(q)) {
                odd = !odd;
            }
        }
        !odd
    }

    /// Relabel every site through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> PauliString {
        let mut out = PauliString::identity().with_phase(self.phase);
        for (&q, &p) in &self.letters {
            out.set(map(q), p);
        }
        out
    }

    /// Dense matrix on `n` qubits, qubit q being bit q of the basis index.
    pub fn matrix(&self, n: usize) -> Vec<Vec<Complex64>> {
        let dim = 1usize << n;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let (row, amp) = self.apply_basis(col);
            m[row][col] = amp;
        }
        m
    }

    /// Image of the computational basis state `x` as (index, amplitude).
    pub fn apply_basis(&self, x: usize) -> (usize, Complex64) {
        let mut amp = self.phase_value();
        let mut y = x;
        let i = Complex64::new(0.0, 1.0);
        for (&q, &p) in &self.letters {
            let bit = (x >> q) & 1 == 1;
            match p {
                Pauli::X => y ^= 1 << q,
                Pauli::Y => {
                    y ^= 1 << q;
                    amp *= if bit { -i } else { i };
                }
                Pauli::Z => {
                    if bit {
                        amp = -amp;
                    }
                }
                Pauli::I => {}
            }
        }
        (y, amp)
    }
}

pub(crate) fn ipow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{p}")?;
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, l) in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{}", l.symbol(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = String;

    /// Parses strings like `+X0 Y3`, `-iZ2` or `+I`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        let mut out = PauliString::identity().with_phase(phase);
        for tok in rest.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut ch = tok.chars();
            let letter = match ch.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                _ => return Err(format!("bad Pauli token `{tok}`")),
            };
            let q: usize = ch
                .as_str()
                .parse()
                .map_err(|_| format!("bad site in `{tok}`"))?;
            out = out.mul(&PauliString::single(q, letter));
        }
        Ok(out)
    }
}
