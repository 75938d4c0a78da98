//! Pauli propagation through Clifford gates.

use std::f64::consts::FRAC_PI_2;

use crate::lattice::{Axis, Pauli, PauliString};

use super::Gate;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("non-Clifford gate {gate} (angle {angle})")]
pub struct NonClifford {
    pub gate: String,
    pub angle: f64,
}

/// Signed image of one letter: (power of i, letter).
pub type Image = (u8, Pauli);

/// Single-qubit Clifford given by the images of X and Z under U . U^dagger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Single {
    pub x: Image,
    pub z: Image,
}

impl Single {
    pub const ID: Single = Single { x: (0, Pauli::X), z: (0, Pauli::Z) };

    pub fn image(&self, p: Pauli) -> Image {
        match p {
            Pauli::I => (0, Pauli::I),
            Pauli::X => self.x,
            Pauli::Z => self.z,
            Pauli::Y => {
                // Y = i X Z
                let (k, l) = self.x.1.mul(self.z.1);
                ((1 + self.x.0 + self.z.0 + k) % 4, l)
            }
        }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Single) -> Single {
        let map = |(k, l): Image| {
            let (k2, l2) = self.image(l);
            ((k + k2) % 4, l2)
        };
        Single { x: map(first.x), z: map(first.z) }
    }

    pub fn inverse(&self) -> Single {
        for (cand, _) in all_singles() {
            if cand.after(self) == Single::ID {
                return cand;
            }
        }
        unreachable!("single-qubit Clifford group is closed")
    }

    pub fn hadamard() -> Single {
        Single { x: (0, Pauli::Z), z: (0, Pauli::X) }
    }

    pub fn phase() -> Single {
        Single { x: (0, Pauli::Y), z: (0, Pauli::Z) }
    }

    /// rot1(axis, k pi/2).
    pub fn rotation(axis: Axis, k: i64) -> Single {
        let quarter = match axis {
            Axis::X => Single { x: (0, Pauli::X), z: (2, Pauli::Y) },
            Axis::Y => Single { x: (2, Pauli::Z), z: (0, Pauli::X) },
            Axis::Z => Single { x: (0, Pauli::Y), z: (0, Pauli::Z) },
        };
        let mut out = Single::ID;
        for _ in 0..k.rem_euclid(4) {
            out = quarter.after(&out);
        }
        out
    }
}

/// The 24 single-qubit Cliffords with a generating H/S word for each,
/// words in time order.
pub fn all_singles() -> Vec<(Single, Vec<Gen>)> {
    let mut out = vec![(Single::ID, Vec::new())];
    let mut k = 0;
    while k < out.len() {
        let (c, w) = out[k].clone();
        for g in [Gen::H, Gen::S] {
            let m = match g {
                Gen::H => Single::hadamard(),
                Gen::S => Single::phase(),
            };
            let next = m.after(&c);
            if !out.iter().any(|(o, _)| *o == next) {
                let mut w2 = w.clone();
                w2.push(g);
                out.push((next, w2));
            }
        }
        k += 1;
    }
    debug_assert_eq!(out.len(), 24);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gen {
    H,
    S,
}

/// Clifford action of a gate.
#[derive(Clone, Debug)]
pub enum GateImage {
    Single(usize, Single),
    Cz(usize, usize),
    Controlled(usize, PauliString),
    Measure,
}

/// Multiple of pi/2 an angle is, if any (tolerance 1e-12).
pub fn quarter_turns(angle: f64) -> Option<i64> {
    let k = (angle / FRAC_PI_2).round();
    ((angle - k * FRAC_PI_2).abs() < 1e-12).then_some(k as i64)
}

pub fn gate_image(g: &Gate) -> Result<GateImage, NonClifford> {
    Ok(match g {
        Gate::Rot { q, axis, angle } => {
            let k = quarter_turns(*angle).ok_or_else(|| NonClifford {
                gate: format!("rot1({axis:?}) on qubit {q}"),
                angle: *angle,
            })?;
            GateImage::Single(*q, Single::rotation(*axis, k))
        }
        Gate::H(q) => GateImage::Single(*q, Single::hadamard()),
        Gate::S(q) => GateImage::Single(*q, Single::phase()),
        Gate::CPhase { a, b, angle } => {
            if !g.is_cz() {
                if super::angle_is(*angle, 0.0) {
                    return Ok(GateImage::Single(*a, Single::ID));
                }
                return Err(NonClifford { gate: format!("cphase on ({a}, {b})"), angle: *angle });
            }
            GateImage::Cz(*a, *b)
        }
        Gate::CPauli { control, string } => GateImage::Controlled(*control, string.clone()),
        Gate::Measure { .. } => GateImage::Measure,
    })
}

fn letter_image(g: &GateImage, q: usize, l: Pauli) -> PauliString {
    match g {
        GateImage::Single(t, u) if *t == q => {
            let (k, l2) = u.image(l);
            PauliString::single(q, l2).times_i(k)
        }
        GateImage::Cz(a, b) if l.x_bit() && (q == *a || q == *b) => {
            let other = if q == *a { *b } else { *a };
            PauliString::from_letters([(q, l), (other, Pauli::Z)])
        }
        GateImage::Controlled(c, s) => {
            if q == *c {
                if l.x_bit() {
                    PauliString::single(q, l).mul(s)
                } else {
                    PauliString::single(q, l)
                }
            } else if l.anticommutes(s.get(q)) {
                PauliString::from_letters([(*c, Pauli::Z), (q, l)])
            } else {
                PauliString::single(q, l)
            }
        }
        _ => PauliString::single(q, l),
    }
}

/// U P U^dagger for a Clifford gate U.
pub fn forward(g: &GateImage, p: &PauliString) -> PauliString {
    let mut out = PauliString::identity().with_phase(p.phase());
    for (&q, &l) in p.letters() {
        out = out.mul(&letter_image(g, q, l));
    }
    out
}

/// U P U^dagger for a whole gate sequence in time order.
pub fn propagate_forward(gates: &[Gate], p: &PauliString) -> Result<PauliString, NonClifford> {
    let mut out = p.clone();
    for g in gates {
        out = forward(&gate_image(g)?, &out);
    }
    Ok(out)
}

/// U^dagger P U for a whole gate sequence in time order.
pub fn propagate_backward(gates: &[Gate], p: &PauliString) -> Result<PauliString, NonClifford> {
    let mut out = p.clone();
    for g in gates.iter().rev() {
        let img = match gate_image(g)? {
            GateImage::Single(q, u) => GateImage::Single(q, u.inverse()),
            other => other,
        };
        out = forward(&img, &out);
    }
    Ok(out)
}
