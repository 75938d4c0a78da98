use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Axis, Pauli, PauliString};

use super::clifford::{forward, GateImage};
use super::{Circuit, CircuitError, Gate};

fn pauli_gates(p: &PauliString) -> Vec<Gate> {
    p.letters()
        .iter()
        .map(|(&q, &l)| Gate::pauli(q, Axis::from_letter(l).expect("non-identity letter")))
        .collect()
}

/// Dresses every CZ with a random Pauli pair before it and the compensating
/// pair CZ P CZ after it.
pub fn randomized_compile(c: &Circuit, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::with_capacity(c.len());
    let mut marks = c.cycle_marks().iter().peekable();
    let mut new_marks = Vec::new();
    for (i, g) in c.gates().iter().enumerate() {
        while marks.next_if(|&&m| m == i).is_some() {
            new_marks.push(gates.len());
        }
        match g {
            Gate::CPhase { a, b, .. } if g.is_cz() => {
                let pick = |rng: &mut ChaCha8Rng| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)];
                let p = PauliString::from_letters([(*a, pick(&mut rng)), (*b, pick(&mut rng))]);
                let q = forward(&GateImage::Cz(*a, *b), &p);
                gates.extend(pauli_gates(&p));
                gates.push(g.clone());
                gates.extend(pauli_gates(&q));
            }
            _ => gates.push(g.clone()),
        }
    }
    new_marks.extend(marks.map(|_| gates.len()));
    Circuit::from_parts(c.n_qubits(), gates, new_marks, c.meta.clone())
}

/// Inserts an X-X or Y-Y pair on each idle site in every Floquet cycle: one
/// letter at the start of the cycle, its partner at the end.
pub fn dynamical_decoupling(c: &Circuit, idle: &[usize], seed: u64) -> Result<Circuit, CircuitError> {
    if idle.is_empty() {
        return Ok(c.clone());
    }
    for &s in idle {
        if s >= c.n_qubits() {
            return Err(CircuitError::Target { target: s, n: c.n_qubits() });
        }
    }
    let spans = c.cycle_spans();
    for span in &spans {
        for g in &c.gates()[span.clone()] {
            if let Some(&s) = idle.iter().find(|s| g.support().contains(s)) {
                return Err(CircuitError::NotIdle(s));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::new();
    let mut marks = Vec::new();
    let mut pos = 0;
    for span in spans {
        gates.extend_from_slice(&c.gates()[pos..span.start]);
        let letters: Vec<Axis> = idle
            .iter()
            .map(|_| if rng.gen_bool(0.5) { Axis::X } else { Axis::Y })
            .collect();
        gates.extend(idle.iter().zip(&letters).map(|(&q, &a)| Gate::pauli(q, a)));
        gates.extend_from_slice(&c.gates()[span.clone()]);
        gates.extend(idle.iter().zip(&letters).map(|(&q, &a)| Gate::pauli(q, a)));
        marks.push(gates.len());
        pos = span.end;
    }
    gates.extend_from_slice(&c.gates()[pos..]);
    Ok(Circuit::from_parts(c.n_qubits(), gates, marks, c.meta.clone()))
}
