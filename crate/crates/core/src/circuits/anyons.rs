use serde::{Deserialize, Serialize};

use crate::lattice::{Lattice, PathSpec, Pauli, PauliString};

use super::CircuitError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnyonKind {
    Psi,
    M,
    E,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Two fermions, at the ends of a density string.
    Sites(usize, usize),
    /// Two fluxes, on the plaquettes sharing a bond.
    Bond(usize),
    /// One flux-plus-fermion at a plaquette, partner pushed out along the
    /// geometry's exit bonds. `pairs` is the fermion pairing of the state the
    /// string acts on.
    Plaquette { p: usize, pairs: Vec<(usize, usize)> },
}

/// Pauli string creating the requested anyons.
pub fn anyon_creation_string(
    lat: &Lattice,
    kind: AnyonKind,
    placement: &Placement,
) -> Result<PauliString, CircuitError> {
    match (kind, placement) {
        (AnyonKind::Psi, Placement::Sites(j, k)) => Ok(lat.density_string(*j, *k, &PathSpec::Shortest)?),
        (AnyonKind::M, Placement::Bond(b)) => {
            let bond = *lat.bonds.get(*b).ok_or(crate::lattice::LatticeError::InvalidBond(*b))?;
            Ok(PauliString::single(bond.a, bond.axis.letter()))
        }
        (AnyonKind::E, Placement::Plaquette { p, pairs }) => e_string(lat, *p, pairs),
        _ => Err(CircuitError::Placement(format!("{kind:?} does not take {placement:?}"))),
    }
}

/// One Z per exit bond; the endpoint choice is the first (in binary order)
/// that flips the density of the pair inside `p` and no other.
fn e_string(lat: &Lattice, p: usize, pairs: &[(usize, usize)]) -> Result<PauliString, CircuitError> {
    let exit = &lat.protocol.exit;
    if exit.is_empty() {
        return Err(CircuitError::Placement("geometry lists no exit bonds".into()));
    }
    if p >= lat.plaquettes.len() {
        return Err(crate::lattice::LatticeError::InvalidPlaquette(p).into());
    }
    let inside = lat.plaquette_sites(p);
    let densities = pairs
        .iter()
        .map(|&(j, k)| Ok((inside.contains(&j) && inside.contains(&k), lat.density_string(j, k, &PathSpec::Shortest)?)))
        .collect::<Result<Vec<_>, CircuitError>>()?;
    if !densities.iter().any(|(own, _)| *own) {
        return Err(CircuitError::Placement(format!("no listed pair lies inside plaquette {p}")));
    }
    for mask in 0u32..(1 << exit.len()) {
        let mut s = PauliString::identity();
        for (i, &b) in exit.iter().enumerate() {
            let bond = lat.bonds[b];
            let site = if mask >> i & 1 == 0 { bond.a } else { bond.b };
            s = s.mul(&PauliString::single(site, Pauli::Z));
        }
        if densities.iter().all(|(own, d)| s.commutes(d) != *own) {
            return Ok(s);
        }
    }
    Err(CircuitError::Placement(format!("no exit string isolates plaquette {p}")))
}
