//! Post-selection, jackknife statistics and windowed Fourier analysis.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuits::FluxDecoder;

/// Regularisation added to the flux-free loop expectation in eta.
pub const ETA_SHIFT: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("jackknife needs at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("series lengths differ: {0} vs {1}")]
    Length(usize, usize),
    #[error("empty series")]
    Empty,
    #[error("series too short: {0} points, need {1}")]
    TooShort(usize, usize),
    #[error("decoder reads qubit {0}, which the table does not hold")]
    DecoderMismatch(usize),
    #[error("translation matrix is not a single signed cycle over {0} sites")]
    Translation(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotRow {
    pub bits: Vec<bool>,
    pub twirl: u32,
    pub disorder: u32,
    pub trajectory: u32,
}

/// Sampled bitstrings; bit k of each row is the readout of `qubits[k]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ShotTable {
    pub qubits: Vec<usize>,
    pub rows: Vec<ShotRow>,
}

impl ShotTable {
    pub fn from_bits(qubits: Vec<usize>, rows: Vec<Vec<bool>>) -> Self {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(k, bits)| ShotRow { bits, twirl: 0, disorder: 0, trajectory: k as u32 })
            .collect();
        ShotTable { qubits, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Relabels every row with the given twirl and disorder ids.
    pub fn tagged(mut self, twirl: u32, disorder: u32) -> Self {
        for r in &mut self.rows {
            r.twirl = twirl;
            r.disorder = disorder;
        }
        self
    }

    pub fn merge(tables: impl IntoIterator<Item = ShotTable>) -> ShotTable {
        let mut out = ShotTable::default();
        for t in tables {
            if out.qubits.is_empty() {
                out.qubits = t.qubits.clone();
            }
            out.rows.extend(t.rows);
        }
        out
    }

    fn position(&self, q: usize) -> Option<usize> {
        self.qubits.iter().position(|&x| x == q)
    }

    /// Full-register view of one row (unmeasured qubits read 0).
    pub fn register(&self, row: &ShotRow) -> Vec<bool> {
        let n = self.qubits.iter().max().map_or(0, |m| m + 1);
        let mut v = vec![false; n];
        for (k, &q) in self.qubits.iter().enumerate() {
            v[q] = row.bits[k];
        }
        v
    }

    /// Mean of sign * (-1)^(parity of `qubits`) over all rows.
    pub fn parity_mean(&self, sign: i8, qubits: &[usize]) -> Option<f64> {
        if self.rows.is_empty() {
            return None;
        }
        let pos: Vec<usize> = qubits.iter().map(|&q| self.position(q)).collect::<Option<_>>()?;
        let total: f64 = self
            .rows
            .iter()
            .map(|r| {
                let odd = pos.iter().filter(|&&k| r.bits[k]).count() % 2 == 1;
                if odd { -sign as f64 } else { sign as f64 }
            })
            .sum();
        Some(total / self.rows.len() as f64)
    }
}

/// Keeps rows whose decoded fluxes match `required`; returns the kept table
/// and the retention rate.
pub fn postselect(
    t: &ShotTable,
    decoder: &FluxDecoder,
    required: &BTreeMap<usize, i8>,
) -> Result<(ShotTable, f64), AnalysisError> {
    if let Some(q) = decoder.qubits().into_iter().find(|&q| t.position(q).is_none()) {
        return Err(AnalysisError::DecoderMismatch(q));
    }
    let kept: Vec<ShotRow> = t
        .rows
        .iter()
        .filter(|r| {
            let values = decoder.decode(&t.register(r));
            decoder
                .plaquettes
                .iter()
                .zip(&values)
                .all(|(p, v)| required.get(p).is_none_or(|want| want == v))
        })
        .cloned()
        .collect();
    let rate = if t.is_empty() { 0.0 } else { kept.len() as f64 / t.len() as f64 };
    Ok((ShotTable { qubits: t.qubits.clone(), rows: kept }, rate))
}

/// Mean and jackknife standard error. Error bars are reported as 2 sigma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub sigma: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Estimate { mean, sigma: 0.0, samples: 1 }
    }

    pub fn error_bar(&self) -> f64 {
        2.0 * self.sigma
    }
}

/// Leave-one-out jackknife over K groups. `groups[i]` holds the per-group
/// averages of every variable; `f` maps variable averages to the estimator.
pub fn jackknife<F>(groups: &[Vec<f64>], f: F) -> Result<Estimate, AnalysisError>
where
    F: Fn(&[f64]) -> f64,
{
    let k = groups.len();
    if k < 2 {
        return Err(AnalysisError::TooFewGroups(k));
    }
    let vars = groups[0].len();
    if let Some(g) = groups.iter().find(|g| g.len() != vars) {
        return Err(AnalysisError::Length(vars, g.len()));
    }
    let totals: Vec<f64> = (0..vars).map(|v| groups.iter().map(|g| g[v]).sum()).collect();
    let samples: Vec<f64> = groups
        .iter()
        .map(|g| {
            let loo: Vec<f64> = (0..vars).map(|v| (totals[v] - g[v]) / (k - 1) as f64).collect();
            f(&loo)
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / k as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() * (k - 1) as f64 / k as f64;
    Ok(Estimate { mean, sigma: var.sqrt(), samples: k })
}

/// eta(N) = <O(N)>_e / (<O(N)>_0 + 0.01). `loop_e[i][n]` and `loop_0[i][n]`
/// are group averages; a single group gives the plain ratio.
pub fn eta_series(loop_e: &[Vec<f64>], loop_0: &[Vec<f64>]) -> Result<Vec<Estimate>, AnalysisError> {
    if loop_e.len() != loop_0.len() {
        return Err(AnalysisError::Length(loop_e.len(), loop_0.len()));
    }
    let Some(first) = loop_e.first() else {
        return Err(AnalysisError::Empty);
    };
    let len = first.len();
    for s in loop_e.iter().chain(loop_0) {
        if s.len() != len {
            return Err(AnalysisError::Length(len, s.len()));
        }
    }
    let ratio = |v: &[f64]| v[0] / (v[1] + ETA_SHIFT);
    (0..len)
        .map(|n| {
            if loop_e.len() == 1 {
                return Ok(Estimate::exact(ratio(&[loop_e[0][n], loop_0[0][n]])));
            }
            let groups: Vec<Vec<f64>> =
                loop_e.iter().zip(loop_0).map(|(e, z)| vec![e[n], z[n]]).collect();
            jackknife(&groups, ratio)
        })
        .collect()
}

/// w(n) = cos^p(pi n / (2 N_max)).
pub fn window(len: usize, p: i32) -> Vec<f64> {
    if len <= 1 {
        return vec![1.0; len];
    }
    let nmax = (len - 1) as f64;
    (0..len).map(|n| (PI * n as f64 / (2.0 * nmax)).cos().powi(p)).collect()
}

/// S(omega) = sum_n w(n) s(n) e^{-i omega n} / sum_n w(n).
pub fn windowed_dft(series: &[Complex64], p: i32, omegas: &[f64]) -> Result<Vec<Complex64>, AnalysisError> {
    if series.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let w = window(series.len(), p);
    let norm: f64 = w.iter().sum();
    Ok(omegas
        .iter()
        .map(|&om| {
            series
                .iter()
                .zip(&w)
                .enumerate()
                .map(|(n, (s, wn))| s * wn * Complex64::from_polar(1.0, -om * n as f64))
                .sum::<Complex64>()
                / norm
        })
        .collect())
}

pub fn windowed_dft_real(series: &[f64], p: i32, omegas: &[f64]) -> Result<Vec<Complex64>, AnalysisError> {
    let c: Vec<Complex64> = series.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    windowed_dft(&c, p, omegas)
}

/// 128 uniform points on [-pi, pi) plus pi.
pub fn omega_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..128).map(|k| -PI + 2.0 * PI * k as f64 / 128.0).collect();
    g.push(PI);
    g
}

/// |eta(pi)| - |eta(0)| with the fourth-power window.
pub fn phase_indicator(eta: &[f64]) -> Result<f64, AnalysisError> {
    if eta.len() < 4 {
        return Err(AnalysisError::TooShort(eta.len(), 4));
    }
    let s = windowed_dft_real(eta, 4, &[PI, 0.0])?;
    Ok(s[0].norm() - s[1].norm())
}

/// Spectrum on the edge Brillouin zone.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSpectrum {
    /// Quasi-momenta, ascending in [-pi, pi).
    pub q: Vec<f64>,
    pub omega: Vec<f64>,
    /// |S(q, omega)|, indexed [q][omega].
    pub magnitude: Vec<Vec<f64>>,
    /// Spatial amplitudes Psi_q(N), indexed [q][N].
    pub amplitudes: Vec<Vec<Complex64>>,
}

impl MomentumSpectrum {
    /// Quasi-energy of the ridge: the per-q argmax over omega.
    pub fn ridge(&self) -> Vec<f64> {
        self.magnitude
            .iter()
            .map(|row| {
                let k = row
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                self.omega[k]
            })
            .collect()
    }

    /// Net quasi-energy winding of the ridge across the zone, in units of
    /// 2 pi.
    pub fn winding(&self) -> f64 {
        let r = self.ridge();
        let l = r.len();
        let wrap = |d: f64| (d + PI).rem_euclid(2.0 * PI) - PI;
        (0..l).map(|k| wrap(r[(k + 1) % l] - r[k])).sum::<f64>() / (2.0 * PI)
    }
}

fn wrap_angle(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Eigenvectors of a signed cyclic translation F: F v_q = e^{iq} v_q. `f` is
/// row-major, F[a][b] being the amplitude of site a in the image of site b.
pub fn translation_eigenvectors(f: &[Vec<f64>]) -> Result<Vec<(f64, Vec<Complex64>)>, AnalysisError> {
    let l = f.len();
    let bad = AnalysisError::Translation(l);
    if l == 0 || f.iter().any(|r| r.len() != l) {
        return Err(bad);
    }
    let mut next = vec![0usize; l];
    let mut sign = vec![0.0; l];
    for b in 0..l {
        let nz: Vec<usize> = (0..l).filter(|&a| f[a][b].abs() > 1e-9).collect();
        if nz.len() != 1 || (f[nz[0]][b].abs() - 1.0).abs() > 1e-9 {
            return Err(bad);
        }
        next[b] = nz[0];
        sign[b] = f[nz[0]][b].signum();
    }
    let mut order = vec![0usize];
    while order.len() < l {
        let t = next[*order.last().unwrap()];
        if t == 0 {
            return Err(bad);
        }
        order.push(t);
    }
    if next[order[l - 1]] != 0 {
        return Err(bad);
    }
    let total: f64 = order.iter().map(|&s| sign[s]).product();
    let offset = if total < 0.0 { PI } else { 0.0 };
    let mut out: Vec<(f64, Vec<Complex64>)> = (0..l)
        .map(|k| {
            let q = wrap_angle((2.0 * PI * k as f64 + offset) / l as f64);
            let lambda = Complex64::from_polar(1.0, q);
            let mut v = vec![Complex64::new(0.0, 0.0); l];
            let mut a = Complex64::new(1.0 / (l as f64).sqrt(), 0.0);
            for &s in &order {
                v[s] = a;
                a = a * sign[s] / lambda;
            }
            (q, v)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Spatial transform onto translation eigenvectors, then the sixth-power
/// windowed transform in time. `c[j][n]` is the correlator at edge site j
/// (rows ordered as in `f`) and cycle n.
pub fn momentum_transform(
    c: &[Vec<Complex64>],
    f: &[Vec<f64>],
    omegas: &[f64],
) -> Result<MomentumSpectrum, AnalysisError> {
    if c.len() != f.len() {
        return Err(AnalysisError::Length(c.len(), f.len()));
    }
    let len = c.first().map(|r| r.len()).ok_or(AnalysisError::Empty)?;
    if let Some(r) = c.iter().find(|r| r.len() != len) {
        return Err(AnalysisError::Length(len, r.len()));
    }
    let vecs = translation_eigenvectors(f)?;
    let mut q = Vec::new();
    let mut magnitude = Vec::new();
    let mut amplitudes = Vec::new();
    for (qk, v) in vecs {
        let psi: Vec<Complex64> = (0..len)
            .map(|n| v.iter().zip(c).map(|(a, row)| a.conj() * row[n]).sum())
            .collect();
        let s = windowed_dft(&psi, 6, omegas)?;
        q.push(qk);
        magnitude.push(s.iter().map(|z| z.norm()).collect());
        amplitudes.push(psi);
    }
    Ok(MomentumSpectrum { q, omega: omegas.to_vec(), magnitude, amplitudes })
}
