//! Majorana covariance evolution on ring3: purity under the stroboscopic map
//! and a flux read off the gauge sector.

use std::collections::BTreeMap;

use floquet_kitaev::circuits::flux_free_prep;
use floquet_kitaev::gaussian::{covariance_from_state, cycle_rotation, evolve, pauli_expectation, sector_from_fluxes};
use floquet_kitaev::lattice::{Lattice, PathSpec};
use floquet_kitaev::stabilizer::Tableau;

fn main() {
    let lat = Lattice::builtin("ring3").unwrap();
    let sector = sector_from_fluxes(&lat, &BTreeMap::new()).unwrap();
    let mut t = Tableau::new(lat.n_sites()).unwrap();
    t.apply(&flux_free_prep(&lat).unwrap()).unwrap();
    let cov0 = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
    let rot = cycle_rotation(&lat, &sector, 0.7);
    println!("{} Majorana modes, |R^T R - 1| = {:.1e}", cov0.modes.len(), rot.orthogonality_error());
    let s = lat.density_string(0, lat.neighbours(0)[0], &PathSpec::Shortest).unwrap();
    for n in [0, 1, 5, 20, 50] {
        let cov = evolve(&cov0, &rot, n).unwrap();
        let x = pauli_expectation(&lat, &sector, &cov, &s).unwrap();
        println!("N = {n:>2}: <S> = {x:+.4}, purity deviation {:.1e}", cov.purity_deviation());
    }
}
