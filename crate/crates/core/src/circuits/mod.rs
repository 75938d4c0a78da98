//! Gate-level circuits and the protocol builders.

mod anyons;
mod builders;
pub mod clifford;
mod coflux;
mod twirl;

pub use anyons::{anyon_creation_string, AnyonKind, Placement};
pub use builders::{
    bond_coupling_gates, flux_free_prep, floquet_cycle, floquet_evolution, hadamard_test,
    mswap_circuit, probe_prep, probe_string, sample_disorder, spectral_origin,
    spectral_probe_circuit, swapped_pairs, DriveParams,
};
pub use coflux::{coflux_measurement_plan, FluxDecoder};
pub use twirl::{dynamical_decoupling, randomized_compile};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Axis, LatticeError, Pauli, PauliString};

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("gate target {target} outside a {n}-qubit circuit")]
    Target { target: usize, n: usize },
    #[error("controlled string must be Hermitian: {0}")]
    NonHermitian(String),
    #[error("|h_{site}| = {h} exceeds disorder bound {delta}")]
    Disorder { site: usize, h: f64, delta: f64 },
    #[error("disorder bound must be non-negative, got {0}")]
    NegativeDelta(f64),
    #[error("angle must be finite")]
    Angle,
    #[error("geometry has no preparation plan: {0}")]
    NoPrepPlan(String),
    #[error("site {0} is not idle in the decorated span")]
    NotIdle(usize),
    #[error("ancilla {0} overlaps the system support")]
    AncillaCollision(usize),
    #[error("site {0} is not on the edge")]
    NotEdge(usize),
    #[error("lattice has no protruding bond")]
    NoProtruding,
    #[error("co-measurement needs more than one extra entangling layer: {0}")]
    CofluxLayers(String),
    #[error("no anyon string satisfies the placement: {0}")]
    Placement(String),
    #[error("measured strings disagree on qubit {0}")]
    NonCommuting(usize),
    #[error("malformed gate record: {0}")]
    Record(String),
}

/// One gate. Rotations follow rot1(a, t) = exp(-i t sigma_a / 2) and
/// cphase(t) = diag(1, 1, 1, e^{i t}).
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Rot { q: usize, axis: Axis, angle: f64 },
    H(usize),
    S(usize),
    CPhase { a: usize, b: usize, angle: f64 },
    CPauli { control: usize, string: PauliString },
    Measure { q: usize, basis: Axis },
}

impl Gate {
    /// Pauli letter as a rotation by pi.
    pub fn pauli(q: usize, axis: Axis) -> Gate {
        Gate::Rot { q, axis, angle: PI }
    }

    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::CPhase { a, b, angle: -PI }
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            Gate::Rot { q, .. } | Gate::H(q) | Gate::S(q) | Gate::Measure { q, .. } => vec![*q],
            Gate::CPhase { a, b, .. } => vec![*a, *b],
            Gate::CPauli { control, string } => {
                let mut v = vec![*control];
                v.extend(string.support());
                v
            }
        }
    }

    /// True for cphase angles equal to -pi modulo 2 pi.
    pub fn is_cz(&self) -> bool {
        match self {
            Gate::CPhase { angle, .. } => angle_is(*angle, -PI),
            _ => false,
        }
    }

    fn check(&self, n: usize) -> Result<(), CircuitError> {
        if let Some(&t) = self.support().iter().find(|&&t| t >= n) {
            return Err(CircuitError::Target { target: t, n });
        }
        match self {
            Gate::Rot { angle, .. } | Gate::CPhase { angle, .. } if !angle.is_finite() => {
                Err(CircuitError::Angle)
            }
            Gate::CPauli { control, string } => {
                if !string.is_hermitian() {
                    return Err(CircuitError::NonHermitian(string.to_string()));
                }
                if string.get(*control) != Pauli::I {
                    return Err(CircuitError::AncillaCollision(*control));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Whether `angle` equals `target` modulo 2 pi within 1e-12.
pub fn angle_is(angle: f64, target: f64) -> bool {
    let d = (angle - target).rem_euclid(2.0 * PI);
    d < 1e-12 || 2.0 * PI - d < 1e-12
}

/// Basis change followed by Z readout of `qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPlan {
    pub basis: Circuit,
    pub qubits: Vec<usize>,
}

impl MeasurementPlan {
    pub fn new(basis: Circuit, qubits: Vec<usize>) -> Self {
        MeasurementPlan { basis, qubits }
    }

    /// Plan for qubit-wise commuting strings. Returns each string's sign and
    /// readout qubits alongside.
    pub fn for_strings(
        n: usize,
        strings: &[PauliString],
    ) -> Result<(Self, Vec<(i8, Vec<usize>)>), CircuitError> {
        let mut letters = vec![Pauli::I; n];
        let mut parities = Vec::new();
        for s in strings {
            if !s.is_hermitian() {
                return Err(CircuitError::NonHermitian(s.to_string()));
            }
            for (&q, &l) in s.letters() {
                if q >= n {
                    return Err(CircuitError::Target { target: q, n });
                }
                if letters[q] != Pauli::I && letters[q] != l {
                    return Err(CircuitError::NonCommuting(q));
                }
                letters[q] = l;
            }
            parities.push((s.sign(), s.support().collect()));
        }
        let mut basis = Circuit::new(n);
        let mut qubits = Vec::new();
        for (q, &l) in letters.iter().enumerate() {
            match l {
                Pauli::I => continue,
                Pauli::X => basis.push(Gate::H(q))?,
                Pauli::Y => {
                    basis.push(Gate::Rot { q, axis: Axis::Z, angle: -PI / 2.0 })?;
                    basis.push(Gate::H(q))?;
                }
                Pauli::Z => {}
            }
            qubits.push(q);
        }
        Ok((MeasurementPlan { basis, qubits }, parities))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Ordered gate list on `n` qubits. `cycle_marks[k]` is the gate index
/// closing Floquet cycle k.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    cycle_marks: Vec<usize>,
    pub meta: CircuitMeta,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, ..Default::default() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cycle_marks(&self) -> &[usize] {
        &self.cycle_marks
    }

    pub fn push(&mut self, g: Gate) -> Result<(), CircuitError> {
        g.check(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Closes a Floquet cycle at the current position.
    pub fn mark_cycle(&mut self) {
        self.cycle_marks.push(self.gates.len());
    }

    /// Appends `other`, carrying its cycle marks along.
    pub fn append(&mut self, other: &Circuit) -> Result<(), CircuitError> {
        let off = self.gates.len();
        self.extend(other.gates.iter().cloned())?;
        self.cycle_marks.extend(other.cycle_marks.iter().map(|m| m + off));
        Ok(())
    }

    /// Same gates on a wider register.
    pub fn widened(&self, n: usize) -> Circuit {
        let mut c = self.clone();
        c.n = c.n.max(n);
        c
    }

    /// Gate index ranges of the Floquet cycles.
    pub fn cycle_spans(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        let mut out = Vec::new();
        for &m in &self.cycle_marks {
            out.push(start..m);
            start = m;
        }
        out
    }

    /// Greedy as-soon-as-possible layering into disjoint-support moments.
    pub fn moments(&self) -> Vec<Vec<usize>> {
        let mut depth = vec![0usize; self.n];
        let mut moments: Vec<Vec<usize>> = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            let sup = g.support();
            let m = sup.iter().map(|&q| depth[q]).max().unwrap_or(0);
            for &q in &sup {
                depth[q] = m + 1;
            }
            if moments.len() <= m {
                moments.resize(m + 1, Vec::new());
            }
            moments[m].push(i);
        }
        moments
    }

    pub fn count_cphase(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::CPhase { .. })).count()
    }

    /// True when every gate is Clifford.
    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| clifford::gate_image(g).is_ok())
    }

    pub(crate) fn from_parts(n: usize, gates: Vec<Gate>, cycle_marks: Vec<usize>, meta: CircuitMeta) -> Self {
        Circuit { n, gates, cycle_marks, meta }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitRecord::from(self)).expect("serializable circuit")
    }

    pub fn from_json(text: &str) -> Result<Circuit, CircuitError> {
        let rec: CircuitRecord =
            serde_json::from_str(text).map_err(|e| CircuitError::Record(e.to_string()))?;
        rec.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    string: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    qubits: usize,
    #[serde(default)]
    meta: CircuitMeta,
    #[serde(default)]
    cycle_marks: Vec<usize>,
    gates: Vec<GateRecord>,
}

impl From<&Gate> for GateRecord {
    fn from(g: &Gate) -> Self {
        let rec = |kind: &str, targets: Vec<usize>| GateRecord {
            kind: kind.into(),
            targets,
            axis: None,
            angle: None,
            string: None,
        };
        match g {
            Gate::Rot { q, axis, angle } => GateRecord {
                axis: Some(*axis),
                angle: Some(*angle),
                ..rec("rot1", vec![*q])
            },
            Gate::H(q) => rec("hadamard", vec![*q]),
            Gate::S(q) => rec("phase-s", vec![*q]),
            Gate::CPhase { a, b, angle } => GateRecord { angle: Some(*angle), ..rec("cphase", vec![*a, *b]) },
            Gate::CPauli { control, string } => GateRecord {
                string: Some(string.to_string()),
                ..rec("controlled-pauli", vec![*control])
            },
            Gate::Measure { q, basis } => GateRecord { axis: Some(*basis), ..rec("measure", vec![*q]) },
        }
    }
}

impl TryFrom<GateRecord> for Gate {
    type Error = CircuitError;

    fn try_from(r: GateRecord) -> Result<Gate, CircuitError> {
        let bad = |what: &str| CircuitError::Record(format!("{} gate: {what}", r.kind));
        let one = || match r.targets.as_slice() {
            [q] => Ok(*q),
            _ => Err(bad("expected one target")),
        };
        Ok(match r.kind.as_str() {
            "rot1" => Gate::Rot {
                q: one()?,
                axis: r.axis.ok_or_else(|| bad("missing axis"))?,
                angle: r.angle.ok_or_else(|| bad("missing angle"))?,
            },
            "hadamard" => Gate::H(one()?),
            "phase-s" => Gate::S(one()?),
            "cphase" => match r.targets.as_slice() {
                [a, b] => Gate::CPhase { a: *a, b: *b, angle: r.angle.ok_or_else(|| bad("missing angle"))? },
                _ => return Err(bad("expected two targets")),
            },
            "controlled-pauli" => Gate::CPauli {
                control: one()?,
                string: r
                    .string
                    .as_deref()
                    .ok_or_else(|| bad("missing string"))?
                    .parse()
                    .map_err(|e: String| bad(&e))?,
            },
            "measure" => Gate::Measure { q: one()?, basis: r.axis.ok_or_else(|| bad("missing axis"))? },
            other => return Err(CircuitError::Record(format!("unknown gate kind `{other}`"))),
        })
    }
}

impl From<&Circuit> for CircuitRecord {
    fn from(c: &Circuit) -> Self {
        CircuitRecord {
            qubits: c.n,
            meta: c.meta.clone(),
            cycle_marks: c.cycle_marks.clone(),
            gates: c.gates.iter().map(GateRecord::from).collect(),
        }
    }
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = CircuitError;

    fn try_from(r: CircuitRecord) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::new(r.qubits);
        c.meta = r.meta;
        for g in r.gates {
            c.push(g.try_into()?)?;
        }
        if r.cycle_marks.iter().any(|&m| m > c.len()) || !r.cycle_marks.is_sorted() {
            return Err(CircuitError::Record("cycle marks out of order".into()));
        }
        c.cycle_marks = r.cycle_marks;
        Ok(c)
    }
}
