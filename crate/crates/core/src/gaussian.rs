//! Free-fermion engine: fixed gauge sectors, covariance evolution and
//! Pfaffian expectation values.
//!
//! The mode register holds c_j for every non-ancilla site plus the dangling
//! b^a_j of sites without an a-bond. Bonded b's are frozen into
//! u_jk = i b^a_j b^a_k with bonds oriented A to B. The covariance is
//! Gamma_ab = (i/2) <gamma_a gamma_b> for a != b, so that
//! <gamma_a gamma_b> = delta_ab - 2i Gamma_ab.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::{Axis, Lattice, LatticeError, PathSpec, PauliString};
use crate::majorana::{b_mode, c_mode, site_monomial, to_pauli, Monomial};

pub const PFAFFIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GaussianError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix is not antisymmetric (deviation {0:e})")]
    NotAntisymmetric(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("pairing is not a perfect matching: {0}")]
    Matching(String),
    #[error("site {0} carries no Majorana register")]
    NoRegister(usize),
    #[error("flux of plaquette {p} is not sharp (<W> = {value})")]
    Flux { p: usize, value: f64 },
    #[error("state is not Gaussian: purity deviation {0:e}")]
    NotGaussian(f64),
    #[error("string {0} is not Hermitian")]
    NonHermitian(String),
}

/// One Majorana of the register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    C(usize),
    B(usize, Axis),
}

impl Mode {
    pub fn site(self) -> usize {
        match self {
            Mode::C(s) | Mode::B(s, _) => s,
        }
    }

    fn id(self) -> usize {
        match self {
            Mode::C(s) => c_mode(s),
            Mode::B(s, a) => b_mode(s, a),
        }
    }
}

/// Register modes in ascending Majorana order.
pub fn register(lat: &Lattice) -> Vec<Mode> {
    let mut v = Vec::new();
    for s in lat.lattice_sites() {
        v.push(Mode::C(s));
        for ax in Axis::ALL {
            if lat.bond_at(s, ax).is_none() {
                v.push(Mode::B(s, ax));
            }
        }
    }
    v
}

fn index_of(modes: &[Mode]) -> HashMap<usize, usize> {
    modes.iter().enumerate().map(|(i, m)| (m.id(), i)).collect()
}

/// Values of u_jk per bond.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeSector {
    pub u: Vec<i8>,
}

impl GaugeSector {
    pub fn flux(&self, lat: &Lattice, p: usize) -> i8 {
        let s = lat.plaquette_sites(p);
        (0..6)
            .map(|k| self.u[lat.bond_between(s[k], s[(k + 1) % 6]).expect("plaquette bond")])
            .product()
    }

    /// Product of u along a site path.
    pub fn path_sign(&self, lat: &Lattice, path: &[usize]) -> Result<i8, LatticeError> {
        let mut g = 1;
        for w in path.windows(2) {
            let b = lat.bond_between(w[0], w[1]).ok_or_else(|| {
                LatticeError::DisconnectedPath(format!("sites {} and {} are not bonded", w[0], w[1]))
            })?;
            g *= self.u[b];
        }
        Ok(g)
    }
}

/// Gauge with the requested fluxes (unlisted plaquettes are +1). Each
/// defect flips u along the first-found dual path to a plaquette with an
/// unshared bond, then that bond.
pub fn sector_from_fluxes(lat: &Lattice, fluxes: &BTreeMap<usize, i8>) -> Result<GaugeSector, GaussianError> {
    let np = lat.plaquettes.len();
    let mut u = vec![1i8; lat.bonds.len()];
    let loop_bonds: Vec<Vec<usize>> = (0..np)
        .map(|p| {
            let s = lat.plaquette_sites(p);
            let mut v: Vec<usize> =
                (0..6).map(|k| lat.bond_between(s[k], s[(k + 1) % 6]).expect("plaquette bond")).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut owners = vec![Vec::new(); lat.bonds.len()];
    for (p, bs) in loop_bonds.iter().enumerate() {
        for &b in bs {
            owners[b].push(p);
        }
    }
    for (&p, &f) in fluxes {
        if p >= np {
            return Err(LatticeError::InvalidPlaquette(p).into());
        }
        if f >= 0 {
            continue;
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; np];
        let mut seen = vec![false; np];
        seen[p] = true;
        let mut queue = VecDeque::from([p]);
        let mut end = None;
        while let Some(q) = queue.pop_front() {
            if let Some(&b) = loop_bonds[q].iter().find(|&&b| owners[b].len() == 1) {
                end = Some((q, b));
                break;
            }
            for &b in &loop_bonds[q] {
                for &r in &owners[b] {
                    if !seen[r] {
                        seen[r] = true;
                        prev[r] = Some((q, b));
                        queue.push_back(r);
                    }
                }
            }
        }
        let (mut q, b) = end.expect("every open patch has a boundary plaquette");
        u[b] = -u[b];
        while let Some((from, bond)) = prev[q] {
            u[bond] = -u[bond];
            q = from;
        }
    }
    Ok(GaugeSector { u })
}

/// Reads sharp fluxes from a state and builds the matching sector.
pub fn sector_from_state<F>(lat: &Lattice, expect: F) -> Result<GaugeSector, GaussianError>
where
    F: Fn(&PauliString) -> f64,
{
    let mut fluxes = BTreeMap::new();
    for p in 0..lat.plaquettes.len() {
        let value = expect(&lat.flux_string(p)?);
        if (value.abs() - 1.0).abs() > 1e-9 {
            return Err(GaussianError::Flux { p, value });
        }
        fluxes.insert(p, value.signum() as i8);
    }
    sector_from_fluxes(lat, &fluxes)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Covariance {
    pub modes: Vec<Mode>,
    pub gamma: DMatrix<f64>,
}

impl Covariance {
    /// max |Gamma Gamma^T - I/4|.
    pub fn purity_deviation(&self) -> f64 {
        let n = self.gamma.nrows();
        let d = &self.gamma * self.gamma.transpose() - DMatrix::identity(n, n) * 0.25;
        d.amax()
    }

    /// <gamma_a gamma_b> over the register.
    pub fn two_point(&self) -> DMatrix<Complex64> {
        let n = self.gamma.nrows();
        DMatrix::from_fn(n, n, |a, b| {
            let d = if a == b { 1.0 } else { 0.0 };
            Complex64::new(d, -2.0 * self.gamma[(a, b)])
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeRotation {
    pub r: DMatrix<f64>,
}

impl ModeRotation {
    pub fn power(&self, n: usize) -> DMatrix<f64> {
        let mut out = DMatrix::identity(self.r.nrows(), self.r.ncols());
        for _ in 0..n {
            out = &self.r * out;
        }
        out
    }

    pub fn orthogonality_error(&self) -> f64 {
        let n = self.r.nrows();
        (self.r.transpose() * &self.r - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Heisenberg action of one cycle on the register: c_A -> cos c_A - u sin c_B,
/// c_B -> cos c_B + u sin c_A with angle (pi/2) JT, layers x, y, z.
pub fn cycle_rotation(lat: &Lattice, sector: &GaugeSector, jt: f64) -> ModeRotation {
    let modes = register(lat);
    let idx = index_of(&modes);
    let n = modes.len();
    let (sin, cos) = (PI * jt / 2.0).sin_cos();
    let mut r = DMatrix::<f64>::identity(n, n);
    for axis in Axis::ALL {
        let mut layer = DMatrix::<f64>::identity(n, n);
        for b in lat.layer(axis) {
            let bond = lat.bonds[b];
            let (i, j) = (idx[&c_mode(bond.a)], idx[&c_mode(bond.b)]);
            let u = sector.u[b] as f64;
            layer[(i, i)] = cos;
            layer[(i, j)] = -u * sin;
            layer[(j, j)] = cos;
            layer[(j, i)] = u * sin;
        }
        r = layer * r;
    }
    ModeRotation { r }
}

/// Gamma -> R^N Gamma (R^N)^T.
pub fn evolve(cov: &Covariance, rot: &ModeRotation, cycles: usize) -> Result<Covariance, GaussianError> {
    if rot.r.nrows() != cov.gamma.nrows() {
        return Err(GaussianError::Dimension(rot.r.nrows(), cov.gamma.nrows()));
    }
    let rn = rot.power(cycles);
    Ok(Covariance { modes: cov.modes.clone(), gamma: &rn * &cov.gamma * rn.transpose() })
}

fn pfaffian_generic<T>(a: &DMatrix<T>) -> T
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    if n % 2 == 1 {
        return T::zero();
    }
    let mut m = a.clone();
    let mut pf = T::one();
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, m[(k + 1, k)].modulus());
        for i in k + 2..n {
            let v = m[(i, k)].modulus();
            if v > best {
                kp = i;
                best = v;
            }
        }
        if kp != k + 1 {
            m.swap_rows(k + 1, kp);
            m.swap_columns(k + 1, kp);
            pf = -pf;
        }
        if best < PFAFFIAN_TOL {
            return T::zero();
        }
        let piv = m[(k, k + 1)];
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<T> = (k + 2..n).map(|j| m[(k, j)] / piv).collect();
            let col: Vec<T> = (k + 2..n).map(|i| m[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    let upd = tau[ii] * col[jj] - col[ii] * tau[jj];
                    m[(i, j)] += upd;
                }
            }
        }
        k += 2;
    }
    pf
}

fn antisymmetry<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Result<(), GaussianError> {
    if a.nrows() != a.ncols() {
        return Err(GaussianError::Dimension(a.nrows(), a.ncols()));
    }
    let dev = (a + a.transpose()).iter().map(|x| x.modulus()).fold(0.0, f64::max);
    if dev > PFAFFIAN_TOL {
        return Err(GaussianError::NotAntisymmetric(dev));
    }
    Ok(())
}

/// Pfaffian by skew-symmetric elimination with partial pivoting.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64, GaussianError> {
    antisymmetry(a)?;
    Ok(pfaffian_generic(a))
}

pub fn pfaffian_complex(a: &DMatrix<Complex64>) -> Result<Complex64, GaussianError> {
    antisymmetry(a)?;
    Ok(pfaffian_generic(a))
}

/// A Pauli string written as `coef * gamma_{m_1} ... gamma_{m_k}` over
/// register indices (ascending), with the gauge factor folded into `coef`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduced {
    pub coef: Complex64,
    pub modes: Vec<usize>,
}

fn solve_gf2(mut rows: Vec<Vec<bool>>, vars: usize) -> Option<Vec<bool>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..vars {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col]) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col] {
                let src = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(src) {
                    *x ^= y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[vars]) {
        return None;
    }
    let mut x = vec![false; vars];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][vars];
    }
    Some(x)
}

/// Majorana form of `p` in a sector; `None` when the string is not
/// gauge-closed (its expectation then vanishes identically).
pub fn reduce(lat: &Lattice, sector: &GaugeSector, p: &PauliString) -> Result<Option<Reduced>, GaussianError> {
    let modes = register(lat);
    let idx = index_of(&modes);
    let support: Vec<usize> = p.support().collect();
    for &s in &support {
        if s >= lat.n_sites() || Some(s) == lat.ancilla {
            return Err(GaussianError::NoRegister(s));
        }
    }
    let sites = lat.lattice_sites();
    let var: HashMap<usize, usize> = sites.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let nv = sites.len();
    let mut eqs = Vec::new();
    for bond in &lat.bonds {
        let mut row = vec![false; nv + 1];
        for s in [bond.a, bond.b] {
            if let Some(&v) = var.get(&s) {
                row[v] ^= true;
                row[nv] ^= p.get(s) == bond.axis.letter();
            }
        }
        eqs.push(row);
    }
    let Some(x) = solve_gf2(eqs, nv) else {
        return Ok(None);
    };
    let mut m = Monomial::one().times_i(p.phase());
    for (i, &s) in sites.iter().enumerate() {
        m = m.mul(&site_monomial(s, p.get(s), x[i]));
    }
    let mut gauge = 1i8;
    for (b, bond) in lat.bonds.iter().enumerate() {
        let (ja, jb) = (b_mode(bond.a, bond.axis), b_mode(bond.b, bond.axis));
        if m.contains(ja) {
            let u = Monomial::mode(ja).mul(&Monomial::mode(jb)).times_i(1);
            m = u.mul(&m);
            gauge *= sector.u[b];
        }
    }
    let mut out = Vec::with_capacity(m.modes.len());
    for id in &m.modes {
        match idx.get(id) {
            Some(&i) => out.push(i),
            None => return Ok(None),
        }
    }
    let coef = Complex64::i().powu(m.phase as u32) * gauge as f64;
    Ok(Some(Reduced { coef, modes: out }))
}

/// <P> as (gauge sign) x Pfaffian; exactly 0 when P is not gauge-closed.
pub fn pauli_expectation(
    lat: &Lattice,
    sector: &GaugeSector,
    cov: &Covariance,
    p: &PauliString,
) -> Result<f64, GaussianError> {
    if !p.is_hermitian() {
        return Err(GaussianError::NonHermitian(p.to_string()));
    }
    let Some(red) = reduce(lat, sector, p)? else {
        return Ok(0.0);
    };
    let k = red.modes.len();
    if k % 2 == 1 {
        return Ok(0.0);
    }
    let sub = DMatrix::from_fn(k, k, |a, b| cov.gamma[(red.modes[a], red.modes[b])]);
    let pf = pfaffian(&sub)?;
    let scale = Complex64::new(0.0, -2.0).powu((k / 2) as u32);
    Ok((red.coef * scale * pf).re)
}

/// Pauli string equal to i gamma_a gamma_b times the gauge string joining
/// their sites, plus that gauge string's sector value.
pub fn pair_string(
    lat: &Lattice,
    sector: &GaugeSector,
    a: Mode,
    b: Mode,
    path: &PathSpec,
) -> Result<(PauliString, i8), GaussianError> {
    let (sa, sb) = (a.site(), b.site());
    let sites = if sa == sb {
        vec![sa]
    } else {
        match path {
            PathSpec::Shortest => lat
                .shortest_path(sa, sb)
                .ok_or_else(|| LatticeError::DisconnectedPath(format!("no path from {sa} to {sb}")))?,
            PathSpec::Sites(p) => p.clone(),
        }
    };
    let m = Monomial::mode(a.id()).mul(&Monomial::mode(b.id())).times_i(1).mul(&lat.gauge_string(&sites)?);
    let s = to_pauli(&m).ok_or_else(|| LatticeError::DisconnectedPath("path revisits a site".into()))?;
    Ok((s, sector.path_sign(lat, &sites)?))
}

/// One pair of a reference matching: `occupied` sets the pair string to +1.
#[derive(Clone, Debug)]
pub struct Pair {
    pub a: Mode,
    pub b: Mode,
    pub path: PathSpec,
    pub occupied: bool,
}

/// Pure covariance of a perfect matching of the register.
pub fn initial_covariance(lat: &Lattice, sector: &GaugeSector, pairs: &[Pair]) -> Result<Covariance, GaussianError> {
    let modes = register(lat);
    let idx = index_of(&modes);
    let n = modes.len();
    let mut used = vec![false; n];
    let mut gamma = DMatrix::zeros(n, n);
    for pair in pairs {
        let mut ids = [0; 2];
        for (k, m) in [pair.a, pair.b].into_iter().enumerate() {
            let i = *idx.get(&m.id()).ok_or_else(|| GaussianError::Matching(format!("{m:?} is not a register mode")))?;
            if used[i] {
                return Err(GaussianError::Matching(format!("{m:?} is paired twice")));
            }
            used[i] = true;
            ids[k] = i;
        }
        let (_, g) = pair_string(lat, sector, pair.a, pair.b, &pair.path)?;
        let value = if pair.occupied { 1.0 } else { -1.0 };
        gamma[(ids[0], ids[1])] = 0.5 * value * g as f64;
        gamma[(ids[1], ids[0])] = -0.5 * value * g as f64;
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(GaussianError::Matching(format!("{:?} is unpaired", modes[i])));
    }
    Ok(Covariance { modes, gamma })
}

/// Covariance read off any state through its Pauli expectations, e.g. a
/// stabilizer or dense state. Fails if the result is not a pure Gaussian.
pub fn covariance_from_state<F>(lat: &Lattice, sector: &GaugeSector, expect: F) -> Result<Covariance, GaussianError>
where
    F: Fn(&PauliString) -> f64,
{
    let modes = register(lat);
    let n = modes.len();
    let mut gamma = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let (s, g) = pair_string(lat, sector, modes[a], modes[b], &PathSpec::Shortest)?;
            let v = 0.5 * g as f64 * expect(&s);
            gamma[(a, b)] = v;
            gamma[(b, a)] = -v;
        }
    }
    let cov = Covariance { modes, gamma };
    let dev = cov.purity_deviation();
    if dev > 1e-9 {
        return Err(GaussianError::NotGaussian(dev));
    }
    Ok(cov)
}

/// <c_j(N) c_k> = sum_m (R^N)_jm <c_m c_k>.
pub fn unequal_time_correlator(
    cov: &Covariance,
    rot: &ModeRotation,
    j: usize,
    k: usize,
    cycles: usize,
) -> Result<Complex64, GaussianError> {
    let pos = |s: usize| cov.modes.iter().position(|&m| m == Mode::C(s)).ok_or(GaussianError::NoRegister(s));
    let (a, b) = (pos(j)?, pos(k)?);
    let rn = rot.power(cycles);
    let g = cov.two_point();
    Ok((0..cov.modes.len()).map(|m| g[(m, b)] * rn[(a, m)]).sum())
}

/// <P(N) Q> for gauge-closed strings, P evolved by N cycles in the
/// Heisenberg picture, by Wick contraction of the evolved modes.
pub fn two_time_expectation(
    lat: &Lattice,
    sector: &GaugeSector,
    cov: &Covariance,
    rot: &ModeRotation,
    cycles: usize,
    later: &PauliString,
    earlier: &PauliString,
) -> Result<Complex64, GaussianError> {
    let (Some(p), Some(q)) = (reduce(lat, sector, later)?, reduce(lat, sector, earlier)?) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let n = cov.modes.len();
    let rn = rot.power(cycles);
    let mut vecs: Vec<Vec<f64>> = p.modes.iter().map(|&a| rn.row(a).iter().copied().collect()).collect();
    vecs.extend(q.modes.iter().map(|&a| (0..n).map(|m| if m == a { 1.0 } else { 0.0 }).collect()));
    let k = vecs.len();
    if k % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let g = cov.two_point();
    let mut w = DMatrix::<Complex64>::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..n {
                if vecs[i][a] == 0.0 {
                    continue;
                }
                for b in 0..n {
                    if vecs[j][b] != 0.0 {
                        s += g[(a, b)] * vecs[i][a] * vecs[j][b];
                    }
                }
            }
            w[(i, j)] = s;
            w[(j, i)] = -s;
        }
    }
    Ok(p.coef * q.coef * pfaffian_complex(&w)?)
}

/// True when the string's gauge Majoranas pair up across bonds.
pub fn is_gauge_closed(lat: &Lattice, p: &PauliString) -> bool {
    let sector = GaugeSector { u: vec![1; lat.bonds.len()] };
    matches!(reduce(lat, &sector, p), Ok(Some(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Pauli;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pfaffian_small() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, -3.0, 0.0]);
        assert_eq!(pfaffian(&a).unwrap(), 3.0);
        assert_eq!(pfaffian(&DMatrix::zeros(3, 3)).unwrap(), 0.0);
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(pfaffian(&bad).is_err());
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4, 6, 8] {
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let pf = pfaffian(&a).unwrap();
            let det = a.clone().determinant();
            assert!((pf * pf - det).abs() < 1e-9 * det.abs().max(1.0), "{n}");
        }
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 2.0, 3.0, -1.0, 0.0, 4.0, 5.0, -2.0, -4.0, 0.0, 6.0, -3.0, -5.0, -6.0, 0.0],
        );
        assert!((pfaffian(&a).unwrap() - (6.0 - 10.0 + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn canonical_and_defect_sectors() {
        let lat = Lattice::builtin("ring1").unwrap();
        let s = sector_from_fluxes(&lat, &BTreeMap::new()).unwrap();
        assert!(s.u.iter().all(|&u| u == 1));
        let want = BTreeMap::from([(0usize, -1i8)]);
        let s = sector_from_fluxes(&lat, &want).unwrap();
        for p in 0..lat.plaquettes.len() {
            assert_eq!(s.flux(&lat, p), if p == 0 { -1 } else { 1 });
        }
        assert_eq!(s, sector_from_fluxes(&lat, &want).unwrap());
        assert!(sector_from_fluxes(&lat, &BTreeMap::from([(99, -1)])).is_err());
    }

    #[test]
    fn flux_expectation_is_gauge_product() {
        let lat = Lattice::builtin("ring1").unwrap();
        let inner = (0..lat.plaquettes.len())
            .find(|&p| lat.plaquette_sites(p).iter().all(|&s| lat.degree(s) == 3))
            .unwrap();
        let sector = sector_from_fluxes(&lat, &BTreeMap::from([(inner, -1)])).unwrap();
        let modes = register(&lat);
        let cov = Covariance { gamma: DMatrix::zeros(modes.len(), modes.len()), modes };
        let w = lat.flux_string(inner).unwrap();
        assert_eq!(pauli_expectation(&lat, &sector, &cov, &w).unwrap(), -1.0);
        let x = PauliString::single(0, Pauli::X);
        assert_eq!(pauli_expectation(&lat, &sector, &cov, &x).unwrap(), 0.0);
    }

    #[test]
    fn rotation_is_orthogonal_and_period_two() {
        let lat = Lattice::builtin("ring1").unwrap();
        let sector = sector_from_fluxes(&lat, &BTreeMap::new()).unwrap();
        for jt in [0.0, 0.3, 0.9, 1.0] {
            let r = cycle_rotation(&lat, &sector, jt);
            assert!(r.orthogonality_error() < 1e-12);
        }
        let r0 = cycle_rotation(&lat, &sector, 0.0);
        assert_eq!(r0.r, DMatrix::identity(r0.r.nrows(), r0.r.nrows()));
    }
}
