//! Property tests for the algebraic and physical invariants of each module.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use common::{dense_after, kron_letter, random_bilinears, tableau_after, unitary2};
use floquet_kitaev::analysis::{
    jackknife, momentum_transform, omega_grid, phase_indicator, postselect, windowed_dft, ShotTable,
};
use floquet_kitaev::circuits::{
    bond_coupling_gates, coflux_measurement_plan, dynamical_decoupling, floquet_cycle, floquet_evolution,
    flux_free_prep, mswap_circuit, randomized_compile, Circuit, DriveParams, Gate,
};
use floquet_kitaev::dense::{trajectory_expectations, NoiseModel, StateVector};
use floquet_kitaev::experiments::{
    edge_orbit, edge_translation, run, EngineChoice, Experiment, ExperimentPlan, ResultTable,
};
use floquet_kitaev::gaussian::{
    covariance_from_state, cycle_rotation, evolve, pauli_expectation, sector_from_fluxes, sector_from_state,
};
use floquet_kitaev::lattice::{Axis, Lattice, PathSpec, Pauli, PauliString};
use floquet_kitaev::stabilizer::{conjugate_string, Tableau};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn random_clifford(n: usize, len: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.gen_range(0..n);
        let g = match rng.gen_range(0..5) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Rot { q, axis: Axis::ALL[rng.gen_range(0..3)], angle: PI / 2.0 * rng.gen_range(1..4) as f64 },
            _ if n > 1 => Gate::cz(q, (q + rng.gen_range(1..n)) % n),
            _ => Gate::H(q),
        };
        c.push(g).unwrap();
    }
    c
}

fn random_pauli(n: usize, rng: &mut ChaCha8Rng) -> PauliString {
    let p = PauliString::from_letters((0..n).map(|q| (q, LETTERS[rng.gen_range(0..4)])));
    if rng.gen_bool(0.5) {
        p.negate()
    } else {
        p
    }
}

/// Random simple path from j to k by depth-first search with shuffled
/// neighbour order.
fn random_path(lat: &Lattice, j: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let allowed: Vec<usize> = lat.lattice_sites();
    let mut seen = vec![false; lat.n_sites()];
    let mut stack = vec![vec![j]];
    seen[j] = true;
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == k {
            return path;
        }
        let mut nb: Vec<usize> = lat.neighbours(last).into_iter().filter(|s| allowed.contains(s)).collect();
        nb.shuffle(rng);
        for s in nb {
            if !seen[s] {
                seen[s] = true;
                let mut p = path.clone();
                p.push(s);
                stack.push(p);
            }
        }
    }
    panic!("no path from {j} to {k}");
}

fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = a.len();
    (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
}

#[test]
fn pauli_mul_matches_matrices_on_two_qubits() {
    for a in 0..16 {
        for b in 0..16 {
            let p = PauliString::from_letters([(0, LETTERS[a % 4]), (1, LETTERS[a / 4])]);
            let q = PauliString::from_letters([(0, LETTERS[b % 4]), (1, LETTERS[b / 4])]);
            let want = matmul(&p.matrix(2), &q.matrix(2));
            let got = p.mul(&q).matrix(2);
            for r in 0..4 {
                for c in 0..4 {
                    assert!((want[r][c] - got[r][c]).norm() < 1e-15, "{p} * {q}");
                }
            }
            assert_eq!(p.commutes(&q), p.mul(&q) == q.mul(&p), "{p} {q}");
        }
    }
}

#[test]
fn flux_strings_commute_with_every_coupling() {
    for name in ["hex1", "hex2", "row3", "ring1", "ring1+probe", "ring3"] {
        let lat = Lattice::builtin(name).unwrap();
        for w in lat.flux_strings() {
            for b in 0..lat.bonds.len() {
                assert!(w.commutes(&lat.bond_coupling(b).unwrap()), "{name} {w} bond {b}");
            }
        }
    }
}

#[test]
fn fixed_point_cycle_conserves_flux_strings() {
    for name in ["hex2", "ring1", "ring1+probe", "ring3"] {
        let lat = Lattice::builtin(name).unwrap();
        let cycle = floquet_cycle(&lat, &DriveParams::clean(1.0, 1)).unwrap();
        for w in lat.flux_strings() {
            assert_eq!(conjugate_string(&w, &cycle).unwrap(), w, "{name}");
        }
    }
}

#[test]
fn gaussian_matches_stabilizer_at_the_fixed_point() {
    let lat = Lattice::builtin("ring1").unwrap();
    let prep = flux_free_prep(&lat).unwrap();
    let t0 = tableau_after(&prep);
    let sector = sector_from_state(&lat, |p| t0.expectation(p).unwrap() as f64).unwrap();
    let mut cov = covariance_from_state(&lat, &sector, |p| t0.expectation(p).unwrap() as f64).unwrap();
    let rot = cycle_rotation(&lat, &sector, 1.0);
    let observables = random_bilinears(&lat, 80, 3);
    let mut t = t0;
    let cycle = floquet_cycle(&lat, &DriveParams::clean(1.0, 1)).unwrap();
    for n in 0..=10 {
        if n > 0 {
            t.apply(&cycle).unwrap();
            cov = evolve(&cov, &rot, 1).unwrap();
        }
        for o in &observables {
            let s = t.expectation(o).unwrap() as f64;
            let g = pauli_expectation(&lat, &sector, &cov, o).unwrap();
            assert!((s - g).abs() < 1e-12, "N={n} {o}: stabilizer {s} gaussian {g}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bond_gates_compose_to_the_coupling(axis in 0usize..3, jt in -1.0f64..1.0) {
        let axis = Axis::ALL[axis];
        let aa = kron_letter(axis.letter());
        let mut c = Circuit::new(2);
        c.extend(bond_coupling_gates(axis, jt, 0, 1)).unwrap();
        let u = unitary2(&c);
        let th = PI / 4.0 * jt;
        let want = |r: usize, k: usize| {
            let id = if r == k { th.cos() } else { 0.0 };
            Complex64::new(id, 0.0) - Complex64::i() * th.sin() * aa[r][k]
        };
        let overlap: Complex64 = (0..16).map(|i| want(i / 4, i % 4).conj() * u[i / 4][i % 4]).sum();
        let phase = overlap / overlap.norm();
        for i in 0..16 {
            prop_assert!((u[i / 4][i % 4] - phase * want(i / 4, i % 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn cycle_preserves_fluxes_on_any_state(jt in 0.0f64..1.0, seed in any::<u64>()) {
        let lat = Lattice::builtin("hex1").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = random_clifford(lat.n_sites(), 30, &mut rng);
        let before = dense_after(&prep);
        let mut c = prep.clone();
        c.append(&floquet_cycle(&lat, &DriveParams::clean(jt, 1)).unwrap()).unwrap();
        let after = dense_after(&c);
        for w in lat.flux_strings() {
            let (a, b) = (before.expectation(&w).unwrap(), after.expectation(&w).unwrap());
            prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
        }
    }

    #[test]
    fn density_strings_are_path_independent(seed in any::<u64>(), jt in 0.3f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice::builtin("ring1").unwrap();
        let prep = flux_free_prep(&lat).unwrap();
        let t = tableau_after(&prep);
        let sector = sector_from_state(&lat, |p| t.expectation(p).unwrap() as f64).unwrap();
        let cov0 = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
        let cov = evolve(&cov0, &cycle_rotation(&lat, &sector, jt), 2).unwrap();
        let sites = lat.lattice_sites();
        for _ in 0..20 {
            let j = sites[rng.gen_range(0..sites.len())];
            let k = sites[rng.gen_range(0..sites.len())];
            if j == k {
                continue;
            }
            let p1 = random_path(&lat, j, k, &mut rng);
            let p2 = random_path(&lat, j, k, &mut rng);
            let s1 = lat.density_string(j, k, &PathSpec::Sites(p1)).unwrap();
            let s2 = lat.density_string(j, k, &PathSpec::Sites(p2)).unwrap();
            let e1 = pauli_expectation(&lat, &sector, &cov, &s1).unwrap();
            let e2 = pauli_expectation(&lat, &sector, &cov, &s2).unwrap();
            prop_assert!((e1 - e2).abs() < 1e-12, "{}-{}: {} vs {}", j, k, e1, e2);
        }
    }

    #[test]
    fn density_paths_agree_densely(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lat = Lattice::builtin("hex2").unwrap();
        let mut c = flux_free_prep(&lat).unwrap();
        c.append(&floquet_evolution(&lat, &DriveParams::clean(0.7, 2)).unwrap()).unwrap();
        let psi = dense_after(&c);
        let sites = lat.lattice_sites();
        for _ in 0..10 {
            let j = sites[rng.gen_range(0..sites.len())];
            let k = sites[rng.gen_range(0..sites.len())];
            if j == k {
                continue;
            }
            let s1 = lat.density_string(j, k, &PathSpec::Sites(random_path(&lat, j, k, &mut rng))).unwrap();
            let s2 = lat.density_string(j, k, &PathSpec::Sites(random_path(&lat, j, k, &mut rng))).unwrap();
            let (e1, e2) = (psi.expectation(&s1).unwrap(), psi.expectation(&s2).unwrap());
            prop_assert!((e1 - e2).abs() < 1e-12, "{}-{}: {} vs {}", j, k, e1, e2);
        }
    }

    #[test]
    fn twirling_and_decoupling_are_noiseless_no_ops(seed in any::<u64>()) {
        let lat = Lattice::builtin("hex2+ancilla").unwrap();
        let anc = lat.ancilla.unwrap();
        let mut c = flux_free_prep(&lat).unwrap();
        c.append(&floquet_evolution(&lat, &DriveParams::clean(1.0, 4)).unwrap()).unwrap();
        let plain = tableau_after(&c);
        let twirled = tableau_after(&randomized_compile(&c, seed));
        let dd = tableau_after(&dynamical_decoupling(&c, &[anc], seed).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..40 {
            let p = random_pauli(c.n_qubits(), &mut rng);
            let e = plain.expectation(&p).unwrap();
            prop_assert_eq!(e, twirled.expectation(&p).unwrap(), "twirl {}", p);
            prop_assert_eq!(e, dd.expectation(&p).unwrap(), "decoupling {}", p);
        }
    }

    #[test]
    fn mswap_preserves_fluxes(seed in any::<u64>()) {
        let lat = Lattice::builtin("hex2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prep = random_clifford(lat.n_sites(), 40, &mut rng);
        let bonds: Vec<usize> = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(0..lat.bonds.len())).collect();
        let before = tableau_after(&prep);
        let mut c = prep.clone();
        c.append(&mswap_circuit(&lat, &bonds).unwrap()).unwrap();
        let after = tableau_after(&c);
        for w in lat.flux_strings() {
            prop_assert_eq!(before.expectation(&w).unwrap(), after.expectation(&w).unwrap());
        }
    }

    #[test]
    fn conjugation_is_a_group_action(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c1 = random_clifford(n, 20, &mut rng);
        let c2 = random_clifford(n, 20, &mut rng);
        let mut both = c1.clone();
        both.append(&c2).unwrap();
        let p = random_pauli(n, &mut rng);
        let stepwise = conjugate_string(&conjugate_string(&p, &c2).unwrap(), &c1).unwrap();
        prop_assert_eq!(stepwise, conjugate_string(&p, &both).unwrap());
    }

    #[test]
    fn stabilizer_entropy_is_subadditive_and_matches_dense(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_clifford(n, 30, &mut rng);
        let t = tableau_after(&c);
        let psi = dense_after(&c);
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(&mut rng);
        let cut_a = rng.gen_range(0..=n);
        let cut_b = rng.gen_range(cut_a..=n);
        let (a, b) = (&qs[..cut_a], &qs[cut_a..cut_b]);
        let ab = &qs[..cut_b];
        prop_assert!(t.entanglement_entropy(ab) <= t.entanglement_entropy(a) + t.entanglement_entropy(b));
        let s = t.entanglement_entropy(ab) as f64;
        prop_assert!((s - psi.entanglement_entropy(ab)).abs() < 1e-9);
        let zero = Tableau::new(n).unwrap();
        prop_assert_eq!(zero.entanglement_entropy(ab), 0);
    }

    #[test]
    fn stroboscopic_map_is_orthogonal(jt in -2.0f64..2.0, cycles in 1usize..60) {
        let lat = Lattice::builtin("ring3").unwrap();
        let sector = sector_from_fluxes(&lat, &BTreeMap::new()).unwrap();
        let rot = cycle_rotation(&lat, &sector, jt);
        prop_assert!(rot.orthogonality_error() < 1e-12);
        let prep = flux_free_prep(&lat).unwrap();
        let t = tableau_after(&prep);
        let cov = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
        let cov = evolve(&cov, &rot, cycles).unwrap();
        prop_assert!(cov.purity_deviation() < 1e-10);
    }

    #[test]
    fn dense_gates_preserve_the_norm(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 6;
        let mut psi = StateVector::new(n).unwrap();
        for _ in 0..60 {
            let q = rng.gen_range(0..n);
            let g = match rng.gen_range(0..4) {
                0 => Gate::H(q),
                1 => Gate::Rot { q, axis: Axis::ALL[rng.gen_range(0..3)], angle: rng.gen_range(-PI..PI) },
                2 => Gate::CPhase { a: q, b: (q + rng.gen_range(1..n)) % n, angle: rng.gen_range(-PI..PI) },
                _ => Gate::CPauli { control: q, string: PauliString::single((q + 1) % n, LETTERS[rng.gen_range(1..4)]) },
            };
            psi.apply_gate(&g).unwrap();
            prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_trajectories_are_exact(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_clifford(5, 30, &mut rng);
        let psi = dense_after(&c);
        let obs: Vec<PauliString> = (0..10).map(|_| random_pauli(5, &mut rng)).collect();
        let est = trajectory_expectations(&c, &NoiseModel::none(), &obs, 8, seed).unwrap();
        for (o, e) in obs.iter().zip(&est) {
            prop_assert!((e.mean - psi.expectation(o).unwrap()).abs() < 1e-12);
            prop_assert!(e.sigma < 1e-12);
        }
    }

    #[test]
    fn jackknife_is_exact_for_linear_estimators(
        xs in prop::collection::vec(-10.0f64..10.0, 2..64),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let groups: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let e = jackknife(&groups, |v| a * v[0] + b).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let want = a * mean + b;
        let scale = xs.iter().map(|x| (a * x).abs()).fold(b.abs(), f64::max).max(1.0);
        prop_assert!((e.mean - want).abs() <= 8.0 * f64::EPSILON * scale, "{} vs {}", e.mean, want);
        prop_assert!(e.sigma >= 0.0);
    }

    #[test]
    fn postselection_never_adds_rows(seed in any::<u64>(), shots in 1usize..200) {
        let lat = Lattice::builtin("hex2").unwrap();
        let (_, decoder) = coflux_measurement_plan(&lat, &[0, 1]).unwrap();
        let qubits: Vec<usize> = (0..lat.n_sites()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<bool>> = (0..shots).map(|_| qubits.iter().map(|_| rng.gen_bool(0.3)).collect()).collect();
        let t = ShotTable::from_bits(qubits, rows);
        let required: BTreeMap<usize, i8> = [(0, 1), (1, 1)].into();
        let (kept, rate) = postselect(&t, &decoder, &required).unwrap();
        prop_assert!(kept.len() <= t.len());
        prop_assert!((0.0..=1.0).contains(&rate));
        prop_assert!((rate - kept.len() as f64 / t.len() as f64).abs() < 1e-15);
    }

    #[test]
    fn windowed_dft_is_linear(
        xs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..24),
        ys in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24),
        a in -2.0f64..2.0,
        c in -2.0f64..2.0,
    ) {
        let x: Vec<Complex64> = xs.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let y: Vec<Complex64> = ys[..x.len()].iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let mix: Vec<Complex64> = x.iter().zip(&y).map(|(p, q)| p * a + q * c).collect();
        let om = omega_grid();
        let (sx, sy, sm) = (
            windowed_dft(&x, 4, &om).unwrap(),
            windowed_dft(&y, 4, &om).unwrap(),
            windowed_dft(&mix, 4, &om).unwrap(),
        );
        for k in 0..om.len() {
            prop_assert!((sm[k] - (sx[k] * a + sy[k] * c)).norm() < 1e-12);
        }
        let constant = vec![Complex64::new(c, 0.0); x.len()];
        let s0 = windowed_dft(&constant, 6, &[0.0]).unwrap()[0];
        prop_assert!((s0 - c).norm() < 1e-12);
    }

    #[test]
    fn momentum_transform_is_unitary(re in prop::collection::vec(-1.0f64..1.0, 12 * 6), im in prop::collection::vec(-1.0f64..1.0, 12 * 6)) {
        let lat = Lattice::builtin("ring1+probe").unwrap();
        let sites = edge_orbit(&lat).unwrap();
        let f = edge_translation(&lat, &sites).unwrap();
        let len = 6;
        let c: Vec<Vec<Complex64>> = (0..sites.len())
            .map(|j| (0..len).map(|n| Complex64::new(re[j * len + n], im[j * len + n])).collect())
            .collect();
        let spec = momentum_transform(&c, &f, &omega_grid()).unwrap();
        for n in 0..len {
            let site: f64 = c.iter().map(|r| r[n].norm_sqr()).sum();
            let momentum: f64 = spec.amplitudes.iter().map(|r| r[n].norm_sqr()).sum();
            prop_assert!((site - momentum).abs() < 1e-10);
        }
    }

    #[test]
    fn phase_indicator_sign_is_scale_free(eta in prop::collection::vec(-1.0f64..1.0, 4..24), scale in 1e-3f64..1e3) {
        let base = phase_indicator(&eta).unwrap();
        let scaled: Vec<f64> = eta.iter().map(|x| x * scale).collect();
        let s = phase_indicator(&scaled).unwrap();
        prop_assume!(base.abs() > 1e-9);
        prop_assert_eq!(base.signum(), s.signum());
    }
}

fn flux_columns(t: &ResultTable) -> BTreeMap<(String, usize, usize), Vec<f64>> {
    let mut cols: BTreeMap<(String, usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for r in t.rows.iter().filter(|r| r.observable == "W") {
        cols.entry((r.sites.clone(), r.twirl, r.realization)).or_default().push((r.cycle, r.re));
    }
    cols.into_iter()
        .map(|(k, mut v)| {
            v.sort_by_key(|x| x.0);
            (k, v.into_iter().map(|x| x.1).collect())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn clean_runs_keep_flux_columns_constant(jt in 0.2f64..1.0, dense in any::<bool>()) {
        let mut plan = ExperimentPlan::new(Experiment::Imaging, "ring1", jt);
        plan.cycles = 6;
        if dense {
            plan.geometry = "row3".into();
            plan.engine = EngineChoice::Dense;
        }
        let t = run(&plan).unwrap();
        let cols = flux_columns(&t);
        prop_assert!(!cols.is_empty());
        for (key, v) in cols {
            prop_assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-12), "{:?}: {:?}", key, v);
        }
    }

    #[test]
    fn identical_plans_reproduce_bit_for_bit(seed in any::<u64>(), jt in 0.5f64..1.0) {
        let mut plan = ExperimentPlan::new(Experiment::Braiding, "hex2+ancilla", jt);
        plan.cycles = 3;
        plan.shots = Some(40);
        plan.twirls = 2;
        plan.randomized_compiling = true;
        plan.noise = NoiseModel::qualitative();
        plan.seed = seed;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let two = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let a = one.install(|| run(&plan)).unwrap();
        let b = two.install(|| run(&plan)).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn spectral_fixed_point_matches_across_engines() {
    let mut plan = ExperimentPlan::new(Experiment::Spectral, "ring1+probe", 1.0);
    plan.cycles = 12;
    plan.engine = EngineChoice::Stabilizer;
    let s = run(&plan).unwrap();
    plan.engine = EngineChoice::Gaussian;
    let g = run(&plan).unwrap();
    assert_eq!(s.rows.len(), g.rows.len());
    for (a, b) in s.rows.iter().zip(&g.rows) {
        assert_eq!((a.cycle, &a.observable, &a.sites), (b.cycle, &b.observable, &b.sites));
        assert!((a.value() - b.value()).norm() < 1e-12, "{a:?} vs {b:?}");
    }
}

/// Uniform depolarizing after a CZ on |00>: with probability p a uniformly
/// drawn non-identity pair Pauli, of which 8 of 15 flip Z0 Z1.
#[test]
fn pair_depolarizing_matches_the_channel() {
    let mut c = Circuit::new(2);
    c.push(Gate::cz(0, 1)).unwrap();
    let zz = PauliString::from_letters([(0, Pauli::Z), (1, Pauli::Z)]);
    for p in [1.0, 15.0 / 16.0] {
        let noise = NoiseModel { depolarizing: p, ..NoiseModel::none() };
        let e = trajectory_expectations(&c, &noise, std::slice::from_ref(&zz), 10_000, 9).unwrap()[0];
        let exact = 1.0 - 16.0 * p / 15.0;
        assert!((e.mean - exact).abs() < 3.0 * e.sigma, "p={p}: {} +- {} vs {exact}", e.mean, e.sigma);
    }
}
