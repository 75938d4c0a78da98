use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Axis, Bond, Lattice, Protocol, Protruding, Site, Sublattice};

/// Builtin patch names and their JSON data.
pub const BUILTINS: &[(&str, &str)] = &[
    ("hex1", include_str!("../../data/geometries/hex1.json")),
    ("hex2", include_str!("../../data/geometries/hex2.json")),
    ("hex2+ancilla", include_str!("../../data/geometries/hex2+ancilla.json")),
    ("hex2+probe", include_str!("../../data/geometries/hex2+probe.json")),
    ("row3", include_str!("../../data/geometries/row3.json")),
    ("ring1", include_str!("../../data/geometries/ring1.json")),
    ("ring1+ancilla", include_str!("../../data/geometries/ring1+ancilla.json")),
    ("ring1+probe", include_str!("../../data/geometries/ring1+probe.json")),
    ("ring3", include_str!("../../data/geometries/ring3.json")),
    ("ring4", include_str!("../../data/geometries/ring4.json")),
    ("ring5", include_str!("../../data/geometries/ring5.json")),
    ("ring6", include_str!("../../data/geometries/ring6.json")),
    ("ring7", include_str!("../../data/geometries/ring7.json")),
    ("ring8", include_str!("../../data/geometries/ring8.json")),
];

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("unknown builtin geometry `{0}`")]
    UnknownBuiltin(String),
    #[error("cannot read geometry file: {0}")]
    Io(String),
    #[error("malformed geometry: {0}")]
    Malformed(String),
    #[error("axis degree: site {site} has two {axis:?} bonds")]
    AxisDegree { site: usize, axis: Axis },
    #[error("open plaquette loop: plaquette {plaquette}: {reason}")]
    OpenLoop { plaquette: usize, reason: String },
    #[error("edge cycle: {0}")]
    EdgeCycle(String),
    #[error("invalid plaquette id {0}")]
    InvalidPlaquette(usize),
    #[error("invalid site id {0}")]
    InvalidSite(usize),
    #[error("invalid bond id {0}")]
    InvalidBond(usize),
    #[error("density string needs two distinct sites, got {0} twice")]
    SameSite(usize),
    #[error("disconnected path: {0}")]
    DisconnectedPath(String),
}

/// Either a builtin name or a path to a geometry file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometrySpec {
    Builtin(String),
    File(PathBuf),
}

impl GeometrySpec {
    pub fn parse(s: &str) -> GeometrySpec {
        if BUILTINS.iter().any(|(n, _)| *n == s) {
            GeometrySpec::Builtin(s.to_string())
        } else {
            GeometrySpec::File(PathBuf::from(s))
        }
    }
}

impl std::fmt::Display for GeometrySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometrySpec::Builtin(n) => write!(f, "{n}"),
            GeometrySpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// On-disk geometry format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub reconstructed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_qubits: Option<usize>,
    pub sites: Vec<Site>,
    pub bonds: Vec<Bond>,
    pub plaquettes: Vec<Vec<usize>>,
    pub edge_cycle: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protruding: Option<Protruding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<usize>,
    #[serde(default)]
    pub protocol: Protocol,
}

pub fn build_patch(spec: &GeometrySpec) -> Result<Lattice, LatticeError> {
    match spec {
        GeometrySpec::Builtin(name) => {
            let text = BUILTINS
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| *t)
                .ok_or_else(|| LatticeError::UnknownBuiltin(name.clone()))?;
            Lattice::from_json(text)
        }
        GeometrySpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LatticeError::Io(format!("{}: {e}", path.display())))?;
            Lattice::from_json(&text)
        }
    }
}

impl Lattice {
    pub fn builtin(name: &str) -> Result<Lattice, LatticeError> {
        build_patch(&GeometrySpec::Builtin(name.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Lattice, LatticeError> {
        let file: GeometryFile =
            serde_json::from_str(text).map_err(|e| LatticeError::Malformed(e.to_string()))?;
        Lattice::from_file(file)
    }

    pub fn from_file(mut file: GeometryFile) -> Result<Lattice, LatticeError> {
        let n = file.sites.len();
        for (i, s) in file.sites.iter().enumerate() {
            if s.id != i {
                return Err(LatticeError::Malformed(format!(
                    "site ids must be 0..{n} in order; entry {i} has id {}",
                    s.id
                )));
            }
        }
        let mut nbr = vec![[None; 3]; n];
        for (id, bond) in file.bonds.iter_mut().enumerate() {
            if bond.a >= n || bond.b >= n || bond.a == bond.b {
                return Err(LatticeError::Malformed(format!("bond {id} has invalid endpoints")));
            }
            let (sa, sb) = (file.sites[bond.a].sublattice, file.sites[bond.b].sublattice);
            if sa == sb {
                return Err(LatticeError::Malformed(format!(
                    "bond {id} joins two {sa:?} sites"
                )));
            }
            if sa == Sublattice::B {
                std::mem::swap(&mut bond.a, &mut bond.b);
            }
            for s in [bond.a, bond.b] {
                let slot = &mut nbr[s][bond.axis.index()];
                if slot.is_some() {
                    return Err(LatticeError::AxisDegree { site: s, axis: bond.axis });
                }
                *slot = Some(id);
            }
        }
        if let Some(a) = file.ancilla {
            if a >= n {
                return Err(LatticeError::Malformed(format!("ancilla {a} out of range")));
            }
            if nbr[a].iter().any(|b| b.is_some()) {
                return Err(LatticeError::Malformed(format!("ancilla {a} has bonds")));
            }
        }
        if let Some(p) = file.protruding {
            let ok = p.bond < file.bonds.len()
                && file.bonds[p.bond].touches(p.site)
                && nbr[p.site].iter().flatten().count() == 1;
            if !ok {
                return Err(LatticeError::Malformed(format!(
                    "protruding site {} must be a leaf on bond {}",
                    p.site, p.bond
                )));
            }
        }
        let mut plaquettes = Vec::with_capacity(file.plaquettes.len());
        let mut plaquette_sites = Vec::with_capacity(file.plaquettes.len());
        for (pid, loop_bonds) in file.plaquettes.iter().enumerate() {
            let (bonds, sites) = check_loop(pid, loop_bonds, &file.bonds)?;
            plaquettes.push(bonds);
            plaquette_sites.push(sites);
        }
        let source = serde_json::to_string(&file).expect("serializable geometry");
        let lat = Lattice {
            name: file.name,
            reconstructed: file.reconstructed,
            reference_qubits: file.reference_qubits,
            sites: file.sites,
            bonds: file.bonds,
            plaquettes,
            edge_cycle: file.edge_cycle,
            protruding: file.protruding,
            ancilla: file.ancilla,
            protocol: file.protocol,
            plaquette_sites,
            nbr,
            source,
        };
        lat.check_interior()?;
        lat.check_edge_cycle()?;
        lat.check_protocol()?;
        Ok(lat)
    }

    fn check_interior(&self) -> Result<(), LatticeError> {
        let boundary = self.boundary_sites();
        for s in self.lattice_sites() {
            if !boundary.contains(&s) && self.degree(s) != 3 {
                return Err(LatticeError::Malformed(format!(
                    "interior site {s} lacks a bond"
                )));
            }
        }
        Ok(())
    }

    fn check_edge_cycle(&self) -> Result<(), LatticeError> {
        let mut want = self.boundary_sites();
        let mut got = self.edge_cycle.clone();
        want.sort_unstable();
        got.sort_unstable();
        if want != got {
            return Err(LatticeError::EdgeCycle(format!(
                "expected the {} boundary sites once each, found {} entries",
                want.len(),
                self.edge_cycle.len()
            )));
        }
        let cyc = &self.edge_cycle;
        for k in 0..cyc.len() {
            let (s, t) = (cyc[k], cyc[(k + 1) % cyc.len()]);
            let via_leaf = |leaf: usize, other: usize| {
                self.degree(leaf) == 1
                    && self.neighbours(leaf).iter().any(|&m| self.bond_between(m, other).is_some())
            };
            if self.bond_between(s, t).is_none() && !via_leaf(s, t) && !via_leaf(t, s) {
                return Err(LatticeError::EdgeCycle(format!("sites {s} and {t} are not consecutive")));
            }
        }
        if cyc.len() >= 3 {
            let mut area = 0.0;
            for k in 0..cyc.len() {
                let (p, q) = (&self.sites[cyc[k]], &self.sites[cyc[(k + 1) % cyc.len()]]);
                area += p.x * q.y - q.x * p.y;
            }
            if area <= 0.0 {
                return Err(LatticeError::EdgeCycle("orientation is not counter-clockwise".into()));
            }
        }
        Ok(())
    }

    fn check_protocol(&self) -> Result<(), LatticeError> {
        let p = &self.protocol;
        let nb = self.bonds.len();
        let bad = |what: &str| Err(LatticeError::Malformed(format!("protocol: invalid {what}")));
        if p.mswap.iter().chain(&p.exit).any(|&b| b >= nb) {
            return bad("bond id");
        }
        if p.centre.is_some_and(|c| c >= self.plaquettes.len()) {
            return bad("centre");
        }
        let n = self.n_sites();
        if p.tracked.iter().flatten().chain(&p.cut).any(|&s| s >= n)
            || p.braid_site.is_some_and(|s| s >= n)
            || p.origin.is_some_and(|s| s >= n)
        {
            return bad("site id");
        }
        Ok(())
    }
}

fn check_loop(
    pid: usize,
    loop_bonds: &[usize],
    bonds: &[Bond],
) -> Result<([usize; 6], [usize; 6]), LatticeError> {
    let open = |reason: String| LatticeError::OpenLoop { plaquette: pid, reason };
    if loop_bonds.len() != 6 {
        return Err(open(format!("{} bonds instead of 6", loop_bonds.len())));
    }
    if let Some(&b) = loop_bonds.iter().find(|&&b| b >= bonds.len()) {
        return Err(open(format!("unknown bond {b}")));
    }
    let mut counts = [0; 3];
    for &b in loop_bonds {
        counts[bonds[b].axis.index()] += 1;
    }
    if counts != [2, 2, 2] {
        return Err(open("each axis must appear twice".into()));
    }
    let (b0, b1) = (bonds[loop_bonds[0]], bonds[loop_bonds[1]]);
    let start = if b1.touches(b0.a) { b0.b } else { b0.a };
    let mut sites = [0usize; 6];
    let mut cur = start;
    for k in 0..6 {
        let b = bonds[loop_bonds[k]];
        if !b.touches(cur) {
            return Err(open(format!("bond {} does not continue the loop", loop_bonds[k])));
        }
        sites[k] = cur;
        cur = b.other(cur);
    }
    if cur != start {
        return Err(open("loop does not close".into()));
    }
    let mut sorted = sites;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(open("loop revisits a site".into()));
    }
    let arr: [usize; 6] = loop_bonds.try_into().unwrap();
    Ok((arr, sites))
}
