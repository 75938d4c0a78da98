mod common;

use std::f64::consts::PI;

use floquet_kitaev::circuits::{
    bond_coupling_gates, flux_free_prep, floquet_evolution, hadamard_test, probe_prep, probe_string,
    spectral_origin, Circuit, DriveParams, Gate,
};
use floquet_kitaev::gaussian::{
    covariance_from_state, cycle_rotation, evolve, pauli_expectation, register, sector_from_state,
    two_time_expectation, unequal_time_correlator,
};
use floquet_kitaev::lattice::{Axis, Lattice, PathSpec, Pauli, PauliString};
use num_complex::Complex64;
use common::{dense_after, kron_letter, random_bilinears, tableau_after, unitary2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn bond_gates_match_coupling_exponential() {
    for axis in Axis::ALL {
        let aa = kron_letter(axis.letter());
        for jt in [0.0, 0.25, 0.5, 0.9, 1.0] {
            let mut c = Circuit::new(2);
            c.extend(bond_coupling_gates(axis, jt, 0, 1)).unwrap();
            let u = unitary2(&c);
            let th = PI / 4.0 * jt;
            let mut want = [[Complex64::new(0.0, 0.0); 4]; 4];
            for r in 0..4 {
                for k in 0..4 {
                    let id = if r == k { th.cos() } else { 0.0 };
                    want[r][k] = Complex64::new(id, 0.0) - Complex64::i() * th.sin() * aa[r][k];
                }
            }
            let mut phase = Complex64::new(0.0, 0.0);
            for r in 0..4 {
                for k in 0..4 {
                    phase += want[r][k].conj() * u[r][k];
                }
            }
            let phase = phase / phase.norm();
            for r in 0..4 {
                for k in 0..4 {
                    assert!((u[r][k] - phase * want[r][k]).norm() < 1e-12, "{axis:?} {jt}");
                }
            }
        }
    }
}

fn z_pairs(lat: &Lattice) -> Vec<(usize, usize)> {
    lat.bonds
        .iter()
        .enumerate()
        .filter(|(b, bond)| bond.axis == Axis::Z && lat.is_bond_driven(*b))
        .map(|(_, bond)| (bond.a, bond.b))
        .collect()
}

#[test]
fn flux_free_prep_has_unit_fluxes_and_empty_z_pairs() {
    for name in ["hex1", "hex2", "row3", "ring1", "ring3"] {
        let lat = Lattice::builtin(name).unwrap();
        let t = tableau_after(&flux_free_prep(&lat).unwrap());
        for w in lat.flux_strings() {
            assert_eq!(t.expectation(&w).unwrap(), 1, "{name} {w}");
        }
        for (a, b) in z_pairs(&lat) {
            let s = lat.density_string(a, b, &PathSpec::Shortest).unwrap();
            assert_eq!(t.expectation(&s).unwrap(), -1, "{name} z pair {a}-{b}");
        }
    }
}

#[test]
fn gaussian_matches_dense_on_floquet_states() {
    for name in ["hex1", "hex2"] {
        let lat = Lattice::builtin(name).unwrap();
        let prep = flux_free_prep(&lat).unwrap();
        let t = tableau_after(&prep);
        let sector = sector_from_state(&lat, |p| t.expectation(p).unwrap() as f64).unwrap();
        let cov0 = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
        let observables = random_bilinears(&lat, 50, 11);
        for jt in [0.6, 0.9] {
            let rot = cycle_rotation(&lat, &sector, jt);
            for n in [1, 3] {
                let mut c = prep.clone();
                c.append(&floquet_evolution(&lat, &DriveParams::clean(jt, n)).unwrap()).unwrap();
                let psi = dense_after(&c);
                let cov = evolve(&cov0, &rot, n).unwrap();
                for o in &observables {
                    let g = pauli_expectation(&lat, &sector, &cov, o).unwrap();
                    let d = psi.expectation(o).unwrap();
                    assert!((g - d).abs() < 1e-9, "{name} jt={jt} n={n} {o}: gaussian {g} dense {d}");
                }
            }
        }
    }
}

#[test]
fn covariance_from_dense_state_is_pure() {
    let lat = Lattice::builtin("hex1").unwrap();
    let psi = dense_after(&flux_free_prep(&lat).unwrap());
    let sector = sector_from_state(&lat, |p| psi.expectation(p).unwrap()).unwrap();
    let cov = covariance_from_state(&lat, &sector, |p| psi.expectation(p).unwrap()).unwrap();
    assert!(cov.purity_deviation() < 1e-12);
    assert_eq!(cov.modes, register(&lat));
}

#[test]
fn spectral_probe_matches_gaussian_two_time() {
    let lat = Lattice::builtin("hex2+probe").unwrap();
    let origin = spectral_origin(&lat).unwrap();
    let prep = probe_prep(&lat).unwrap();
    let t = tableau_after(&prep);
    let sector = sector_from_state(&lat, |p| t.expectation(p).unwrap() as f64).unwrap();
    let cov = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
    let p0 = probe_string(&lat, origin).unwrap();
    for jt in [0.9, 1.0] {
        let rot = cycle_rotation(&lat, &sector, jt);
        for &j in lat.edge_cycle.iter().filter(|&&j| Some(j) != lat.protruding.map(|p| p.site)) {
            let pj = probe_string(&lat, j).unwrap();
            for n in [0, 1, 2, 4] {
                let g = two_time_expectation(&lat, &sector, &cov, &rot, n, &pj, &p0).unwrap();
                let evo = floquet_evolution(&lat, &DriveParams::clean(jt, n)).unwrap();
                let anc = lat.n_sites();
                let c = hadamard_test(&prep, &p0, &evo, &pj, anc).unwrap();
                let d = dense_after(&c).ancilla_overlap(anc).unwrap();
                assert!((g - d).norm() < 1e-9, "jt={jt} j={j} n={n}: gaussian {g} dense {d}");
                let cc = unequal_time_correlator(&cov, &rot, j, origin, n).unwrap();
                assert!((g.norm() - cc.norm()).abs() < 1e-9, "gauge factor is a sign");
            }
        }
    }
}

#[test]
fn stabilizer_matches_dense_on_random_cliffords() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let mut c = Circuit::new(n);
        for _ in 0..40 {
            let q = rng.gen_range(0..n);
            let g = match rng.gen_range(0..5) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 => Gate::Rot { q, axis: Axis::ALL[rng.gen_range(0..3)], angle: PI / 2.0 * rng.gen_range(1..4) as f64 },
                _ => {
                    let r = (q + rng.gen_range(1..n)) % n;
                    Gate::cz(q, r)
                }
            };
            c.push(g).unwrap();
        }
        let t = tableau_after(&c);
        let psi = dense_after(&c);
        for _ in 0..20 {
            let letters: Vec<(usize, Pauli)> =
                (0..n).map(|q| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])).collect();
            let mut p = PauliString::from_letters(letters);
            if rng.gen_bool(0.5) {
                p = p.negate();
            }
            let s = t.expectation(&p).unwrap() as f64;
            let d = psi.expectation(&p).unwrap();
            assert!((s - d).abs() < 1e-10, "{p}: {s} vs {d}");
        }
    }
}

#[test]
fn disorder_free_cycle_conserves_fluxes_densely() {
    let lat = Lattice::builtin("hex1").unwrap();
    let mut c = flux_free_prep(&lat).unwrap();
    c.append(&floquet_evolution(&lat, &DriveParams::clean(0.9, 3)).unwrap()).unwrap();
    let psi = dense_after(&c);
    assert!((psi.expectation(&lat.flux_string(0).unwrap()).unwrap() - 1.0).abs() < 1e-12);
}
