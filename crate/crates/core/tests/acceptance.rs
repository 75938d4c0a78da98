//! Acceptance criteria, one PASS/FAIL line each. Lines go straight to the
//! stderr handle so they show up without `--nocapture`.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use common::{dense_after, random_bilinears, tableau_after, unitary2};
use floquet_kitaev::analysis::{jackknife, momentum_transform, omega_grid, phase_indicator};
use floquet_kitaev::circuits::{bond_coupling_gates, floquet_evolution, flux_free_prep, Circuit, DriveParams, Gate};
use floquet_kitaev::cli::{cmd_reproduce, FIGURES, REPRODUCE_SEED};
use floquet_kitaev::dense::NoiseModel;
use floquet_kitaev::experiments::{
    edge_orbit, edge_translation, eta_from_table, eta_per_realization, rearranged_prep, run, spectral_grid,
    transmutation_entropy, Engine, Experiment, ExperimentPlan, ResultTable,
};
use floquet_kitaev::gaussian::{covariance_from_state, cycle_rotation, evolve, pauli_expectation, sector_from_state};
use floquet_kitaev::lattice::{Axis, Lattice, Pauli, PauliString};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot pass as written; see the README.
const EXPECTED_RED: &[usize] = &[2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn report(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let mut o = f();
    let dt = t0.elapsed();
    if dt > limit {
        o.pass = false;
        o.detail += &format!("; runtime {:.1} s over the {:.0} s limit", dt.as_secs_f64(), limit.as_secs_f64());
    }
    let line = format!(
        "{} {id:>2} {name} ({:.2} s): {}\n",
        if o.pass { "PASS" } else { "FAIL" },
        dt.as_secs_f64(),
        o.detail
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    o.pass
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn series_re(t: &ResultTable, obs: &str, sites: Option<&str>) -> Vec<f64> {
    t.mean_series(obs, sites).iter().map(|z| z.re).collect()
}

fn criterion_1() -> Outcome {
    let lat = Lattice::builtin("ring1").unwrap();
    let t = run(&ExperimentPlan::new(Experiment::Imaging, "ring1", 1.0)).unwrap();
    if t.provenance.engine != Engine::Stabilizer {
        return outcome(false, format!("engine {}", t.provenance.engine));
    }
    let fluxes_ok = t.rows.iter().filter(|r| r.observable == "W").all(|r| r.re == 1.0 && r.im == 0.0);
    let n_w = t.rows.iter().filter(|r| r.observable == "W").count();
    let mut bulk_ok = true;
    let mut edge_ok = true;
    for (i, pair) in lat.protocol.tracked.iter().enumerate() {
        let on_edge = pair.iter().all(|s| lat.edge_cycle.contains(s));
        if on_edge {
            let follow = series_re(&t, &format!("n_follow{i}"), None);
            edge_ok &= follow.len() == 11 && follow.iter().all(|&n| n == follow[0] && (n == 0.0 || n == 1.0));
        } else {
            let track = series_re(&t, &format!("n_track{i}"), None);
            bulk_ok &= track.len() == 11
                && (track[0] == 0.0 || track[0] == 1.0)
                && track.iter().step_by(2).all(|&n| n == track[0]);
        }
    }
    outcome(
        fluxes_ok && bulk_ok && edge_ok,
        format!("{n_w} flux values all +1: {fluxes_ok}; bulk pair sharp at even N: {bulk_ok}; edge occupation sharp on the propagated bond: {edge_ok}"),
    )
}

fn criterion_2() -> Outcome {
    let t = run(&ExperimentPlan::new(Experiment::Braiding, "ring1+ancilla", 1.0)).unwrap();
    let z = t.mean_series("overlap", None);
    let i = Complex64::new(0.0, 1.0);
    let mut bad = Vec::new();
    for (n, v) in z.iter().enumerate().skip(1) {
        let want = if n % 5 == 0 { i } else { Complex64::new(0.0, 0.0) };
        if (v - want).norm() > 1e-12 {
            bad.push(format!("N={n}: {v:.3}"));
        }
    }
    let revivals: Vec<String> = [5, 10, 15, 20].iter().map(|&n| format!("{:.3}", z[n])).collect();
    outcome(
        bad.is_empty(),
        format!("revivals at N=5,10,15,20: {}; mismatches {}", revivals.join(", "), bad.len()),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for axis in Axis::ALL {
        let m = axis.letter().matrix();
        for jt in [0.0, 0.4, 0.5, 0.8, 0.9, 1.0] {
            let mut c = Circuit::new(2);
            c.extend(bond_coupling_gates(axis, jt, 0, 1)).unwrap();
            let u = unitary2(&c);
            let th = PI / 4.0 * jt;
            let want = |r: usize, k: usize| {
                let aa = m[r & 1][k & 1] * m[r >> 1][k >> 1];
                Complex64::new(if r == k { th.cos() } else { 0.0 }, 0.0) - Complex64::i() * th.sin() * aa
            };
            let mut overlap = Complex64::new(0.0, 0.0);
            for r in 0..4 {
                for k in 0..4 {
                    overlap += want(r, k).conj() * u[r][k];
                }
            }
            let phase = overlap / overlap.norm();
            for r in 0..4 {
                for k in 0..4 {
                    worst = worst.max((u[r][k] - phase * want(r, k)).norm());
                }
            }
        }
    }
    let listed = [(0.9, -0.9 * PI), (0.8, -0.8 * PI), (0.5, -0.5 * PI), (0.4, -0.4 * PI)];
    let angles_ok = listed.iter().all(|&(jt, want)| {
        bond_coupling_gates(Axis::Z, jt, 0, 1)
            .iter()
            .filter_map(|g| match g {
                Gate::CPhase { angle, .. } => Some(*angle),
                _ => None,
            })
            .all(|a| (a - want).abs() < 1e-15)
    });
    outcome(worst < 1e-12 && angles_ok, format!("max deviation {worst:.1e}; cphase angles -9pi/10, -4pi/5, -pi/2, -2pi/5: {angles_ok}"))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut clifford_bad = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let mut c = Circuit::new(n);
        for _ in 0..40 {
            let q = rng.gen_range(0..n);
            let g = match rng.gen_range(0..5) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 => Gate::Rot { q, axis: Axis::ALL[rng.gen_range(0..3)], angle: PI / 2.0 * rng.gen_range(1..4) as f64 },
                _ => Gate::cz(q, (q + rng.gen_range(1..n)) % n),
            };
            c.push(g).unwrap();
        }
        let t = tableau_after(&c);
        let psi = dense_after(&c);
        for _ in 0..20 {
            let letters: Vec<_> = (0..n).map(|q| (q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])).collect();
            let p = PauliString::from_letters(letters);
            if (t.expectation(&p).unwrap() as f64 - psi.expectation(&p).unwrap()).abs() > 1e-10 {
                clifford_bad += 1;
            }
        }
    }
    let mut worst = 0.0f64;
    for name in ["hex1", "row3"] {
        let lat = Lattice::builtin(name).unwrap();
        let prep = flux_free_prep(&lat).unwrap();
        let t = tableau_after(&prep);
        let sector = sector_from_state(&lat, |p| t.expectation(p).unwrap() as f64).unwrap();
        let cov0 = covariance_from_state(&lat, &sector, |p| t.expectation(p).unwrap() as f64).unwrap();
        let observables = random_bilinears(&lat, 50, 40);
        for jt in [0.6, 0.9] {
            let rot = cycle_rotation(&lat, &sector, jt);
            let mut c = prep.clone();
            c.append(&floquet_evolution(&lat, &DriveParams::clean(jt, 3)).unwrap()).unwrap();
            let psi = dense_after(&c);
            let cov = evolve(&cov0, &rot, 3).unwrap();
            for o in &observables {
                let g = pauli_expectation(&lat, &sector, &cov, o).unwrap();
                worst = worst.max((g - psi.expectation(o).unwrap()).abs());
            }
        }
    }
    outcome(
        clifford_bad == 0 && worst < 1e-9,
        format!("stabilizer/dense mismatches {clifford_bad} of 2000; gaussian/dense max deviation {worst:.1e} on hex1 and row3 (14 sites)"),
    )
}

fn criterion_5() -> Outcome {
    let lat = Lattice::builtin("ring1+probe").unwrap();
    let t = run(&ExperimentPlan::new(Experiment::Spectral, "ring1+probe", 1.0)).unwrap();
    let sites: Vec<usize> = t.rows.iter().map(|r| r.sites.parse().unwrap()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let grid = spectral_grid(&t, &sites);
    let cycles = grid[0].len();
    let ridge_ok = (0..cycles).all(|n| {
        let mags: Vec<f64> = grid.iter().map(|row| row[n].norm()).collect();
        mags.iter().filter(|&&m| (m - 1.0).abs() < 1e-9).count() == 1
            && mags.iter().filter(|&&m| m > 1e-9 && (m - 1.0).abs() >= 1e-9).count() == 0
    });
    let orbit = edge_orbit(&lat).unwrap();
    let f = edge_translation(&lat, &orbit).unwrap();
    let mut windings = Vec::new();
    for jt in [1.0, 0.9, 0.5] {
        let mut plan = ExperimentPlan::new(Experiment::Spectral, "ring1+probe", jt);
        plan.sites = Some(orbit.clone());
        let t = run(&plan).unwrap();
        let s = momentum_transform(&spectral_grid(&t, &orbit), &f, &omega_grid()).unwrap();
        windings.push(s.winding());
    }
    let winding_ok = (windings[0] - 1.0).abs() < 1e-9 && (windings[1] - 1.0).abs() < 1e-9 && windings[2].abs() < 1e-9;
    outcome(
        ridge_ok && winding_ok,
        format!(
            "one unit-magnitude entry per cycle at JT=1: {ridge_ok}; windings at JT 1.0, 0.9, 0.5: {:.3}, {:.3}, {:.3}",
            windings[0], windings[1], windings[2]
        ),
    )
}

fn criterion_6() -> Outcome {
    let t = run(&ExperimentPlan::new(Experiment::Transmutation, "ring3", 1.0)).unwrap();
    let alt = |n: usize| if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let oe = series_re(&t, "O_e", None);
    let o0 = series_re(&t, "O_0", None);
    let loops_ok = oe.len() == 21 && oe.iter().enumerate().all(|(n, &v)| v == alt(n)) && o0.iter().all(|&v| v == 1.0);
    let eta = eta_from_table(&t).unwrap();
    let eta_dev = eta.iter().enumerate().map(|(n, e)| (e.mean - alt(n) / 1.01).abs()).fold(0.0, f64::max);
    let means: Vec<f64> = eta.iter().map(|e| e.mean).collect();
    let ind = phase_indicator(&means).unwrap();
    outcome(
        t.provenance.engine == Engine::Stabilizer && loops_ok && eta_dev < 1e-15 && ind > 0.9,
        format!("engine {}; loops exact: {loops_ok}; max |eta - (-1)^N/1.01| {eta_dev:.1e}; indicator {ind:.4}", t.provenance.engine),
    )
}

fn criterion_7() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for jt in [0.9, 0.8, 0.5, 0.4] {
        let t = run(&ExperimentPlan::new(Experiment::Transmutation, "ring3", jt)).unwrap();
        let means: Vec<f64> = eta_from_table(&t).unwrap().iter().map(|e| e.mean).collect();
        let ind = phase_indicator(&means).unwrap();
        let fto = jt > 0.7;
        if fto {
            let signs = (0..=10).all(|n| means[n].signum() == if n % 2 == 0 { 1.0 } else { -1.0 });
            ok &= ind > 0.0 && signs;
            parts.push(format!("JT {jt}: {ind:+.3}, alternating signs {signs}"));
        } else {
            ok &= ind < 0.0;
            parts.push(format!("JT {jt}: {ind:+.3}"));
        }
        ok &= t.provenance.engine == Engine::Gaussian;
    }
    outcome(ok, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut plan = ExperimentPlan::new(Experiment::Transmutation, "row3", 1.0);
    plan.delta = 0.2;
    plan.realizations = 20;
    let t = run(&plan).unwrap();
    let per = eta_per_realization(&t).unwrap();
    let good = per
        .iter()
        .filter(|e| (0..=6).all(|n| e[n].signum() == if n % 2 == 0 { 1.0 } else { -1.0 }))
        .count();
    outcome(
        t.provenance.engine == Engine::Dense && per.len() == 20 && good * 5 >= per.len() * 4,
        format!("engine {}; {good}/{} realizations alternate for N <= 6", t.provenance.engine, per.len()),
    )
}

fn criterion_9() -> Outcome {
    let lat = Lattice::builtin("hex2+ancilla").unwrap();
    let clean = run(&ExperimentPlan::new(Experiment::Braiding, "hex2+ancilla", 1.0)).unwrap();
    let revivals: Vec<usize> = clean
        .mean_series("overlap", None)
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, z)| z.norm() > 0.5)
        .map(|(n, _)| n)
        .take(3)
        .collect();
    let mut plan = ExperimentPlan::new(Experiment::Braiding, "hex2+ancilla", 1.0);
    plan.noise = NoiseModel {
        depolarizing: 0.005,
        damping: 0.01,
        damped: Some(vec![lat.ancilla.unwrap_or(lat.n_sites())]),
        readout_0to1: 0.004,
        readout_1to0: 0.025,
        ..NoiseModel::none()
    };
    plan.trajectories = 10_000;
    let t = run(&plan).unwrap();
    let z = t.mean_series("overlap", None);
    let r: Vec<f64> = revivals.iter().map(|&n| z[n].norm()).collect();
    let decreasing = r.len() == 3 && r[0] > r[1] && r[1] > r[2];
    let mut prev = z[0];
    let steps: Vec<f64> = revivals
        .iter()
        .map(|&n| {
            let s = (z[n] / prev).arg();
            prev = z[n];
            s
        })
        .collect();
    let phases_ok = steps.iter().all(|s| (s - PI / 2.0).abs() < 0.15);
    outcome(
        t.provenance.engine == Engine::Dense && decreasing && phases_ok,
        format!(
            "revivals at N={revivals:?}: r = {}; phase steps {} rad",
            r.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", "),
            steps.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_10() -> Outcome {
    let (k, per, reps, p) = (20usize, 1000usize, 1000usize, 0.3);
    let analytic = (p * (1.0 - p) / (k * per) as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut sigma_sum = 0.0;
    let mut mean_dev = 0.0f64;
    for _ in 0..reps {
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| vec![(0..per).filter(|_| rng.gen_bool(p)).count() as f64 / per as f64])
            .collect();
        let e = jackknife(&groups, |v| v[0]).unwrap();
        sigma_sum += e.sigma;
        let sample_mean = groups.iter().map(|g| g[0]).sum::<f64>() / k as f64;
        mean_dev = mean_dev.max((e.mean - sample_mean).abs() / sample_mean.abs());
    }
    let ratio = sigma_sum / reps as f64 / analytic;
    // Equality up to rounding of the K-term sums.
    let ulps = mean_dev / f64::EPSILON;
    outcome(
        (ratio - 1.0).abs() < 0.1 && ulps <= 4.0,
        format!("mean jackknife sigma / analytic SE = {ratio:.4}; identity-estimator mean vs sample mean: {ulps:.1} ulp"),
    )
}

fn criterion_11() -> Outcome {
    let names = ["ring3", "ring4", "ring5", "ring6", "ring7", "ring8"];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for name in names {
        let lat = Lattice::builtin(name).unwrap();
        xs.push((lat.n_sites() as f64).sqrt());
        ys.push(transmutation_entropy(&lat).unwrap() as f64);
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let target = (2.0f64 / 3.0).sqrt();
    let slope_ok = (slope / target - 1.0).abs() < 0.05;
    let row3 = Lattice::builtin("row3").unwrap();
    let stab = transmutation_entropy(&row3).unwrap() as f64;
    let psi = dense_after(&rearranged_prep(&row3).unwrap());
    let dense = psi.entanglement_entropy(&row3.protocol.cut);
    let cross_ok = (stab - dense).abs() < 1e-9;
    outcome(
        slope_ok && cross_ok,
        format!(
            "S/log2 = {ys:?} for N_Q = {:?}; slope in sqrt(N_Q) {slope:.4} vs {target:.4}; row3 stabilizer {stab} vs dense {dense:.6}",
            xs.iter().map(|x| (x * x).round() as usize).collect::<Vec<_>>()
        ),
    )
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_12() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut differing = Vec::new();
    let mut files = 0;
    for id in FIGURES {
        let a = tmp.path().join("a");
        let b = tmp.path().join("b");
        cmd_reproduce(id, &a, REPRODUCE_SEED).unwrap();
        cmd_reproduce(id, &b, REPRODUCE_SEED).unwrap();
        let (ta, tb) = (read_tree(&a.join(id)), read_tree(&b.join(id)));
        files += ta.len();
        if ta != tb || ta.is_empty() {
            differing.push(id);
        }
    }
    outcome(differing.is_empty(), format!("{files} files over {} figure ids; differing ids {differing:?}", FIGURES.len()))
}

#[test]
fn acceptance_criteria() {
    let _ = std::io::stderr().lock().write_all(b"\n");
    let results = [
        report(1, "flux conservation and imaging", secs(1), criterion_1),
        report(2, "braiding interferometry", secs(10), criterion_2),
        report(3, "gate decomposition", secs(10), criterion_3),
        report(4, "cross-engine oracles", secs(300), criterion_4),
        report(5, "spectral function", secs(60), criterion_5),
        report(6, "transmutation at the fixed point", secs(10), criterion_6),
        report(7, "phase discrimination", secs(60), criterion_7),
        report(8, "disordered regime (dense substitute)", secs(600), criterion_8),
        report(9, "noise model qualitative match", secs(900), criterion_9),
        report(10, "statistics", secs(60), criterion_10),
        report(11, "entropy scaling", secs(60), criterion_11),
        report(12, "pipeline determinism", secs(600), criterion_12),
    ];
    let red: Vec<usize> = results.iter().enumerate().filter(|(_, &p)| !p).map(|(i, _)| i + 1).collect();
    assert_eq!(red, EXPECTED_RED, "failing criteria differ from the documented set");
}
