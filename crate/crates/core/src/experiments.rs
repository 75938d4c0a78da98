//! Drivers for the four protocols: imaging, braiding, spectral probing and
//! anyon transmutation. Each run returns a [`ResultTable`] keyed by
//! (cycle, observable, twirl, realization).

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analysis::{eta_series, postselect, AnalysisError, Estimate, ShotTable};
use crate::circuits::{
    anyon_creation_string, coflux_measurement_plan, dynamical_decoupling, floquet_cycle, flux_free_prep,
    mswap_circuit, probe_prep, probe_string, randomized_compile, sample_disorder, spectral_origin, swapped_pairs,
    AnyonKind, Circuit, CircuitError, DriveParams, FluxDecoder, Gate, MeasurementPlan, Placement,
};
use crate::circuits::clifford::propagate_backward;
use crate::dense::{DenseError, NoiseModel, NoisyRunner, StateVector, DEFAULT_CAP};
use crate::gaussian::{
    covariance_from_state, cycle_rotation, evolve, pauli_expectation, register, sector_from_fluxes, sector_from_state,
    two_time_expectation, Covariance, GaugeSector, GaussianError, Mode, ModeRotation,
};
use crate::lattice::{build_patch, Axis, GeometrySpec, Lattice, LatticeError, PathSpec, Pauli, PauliString};
use crate::stabilizer::{sample_shots, StabilizerError, Tableau};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Dense(DenseError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("dense required but cap exceeded: {n} qubits > cap {cap}")]
    Cap { n: usize, cap: usize },
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("{engine} engine cannot run this plan: {reason}")]
    Engine { engine: Engine, reason: String },
    #[error("geometry {geometry} has no {what}")]
    Protocol { geometry: String, what: &'static str },
    #[error("{0}")]
    Io(String),
    #[error("malformed result table: {0}")]
    Format(String),
}

impl From<DenseError> for ExperimentError {
    fn from(e: DenseError) -> Self {
        match e {
            DenseError::Cap { n, cap } => ExperimentError::Cap { n, cap },
            e => ExperimentError::Dense(e),
        }
    }
}

impl ExperimentError {
    /// Whether the failure is a resource limit rather than a bad request.
    pub fn is_resource(&self) -> bool {
        matches!(self, ExperimentError::Cap { .. })
    }
}

type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Imaging,
    Braiding,
    Spectral,
    Transmutation,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::Imaging, Experiment::Braiding, Experiment::Spectral, Experiment::Transmutation];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Imaging => "imaging",
            Experiment::Braiding => "braiding",
            Experiment::Spectral => "spectral",
            Experiment::Transmutation => "transmutation",
        }
    }

    pub fn default_cycles(self) -> usize {
        match self {
            Experiment::Imaging => 10,
            _ => 20,
        }
    }

    pub fn default_geometry(self) -> &'static str {
        match self {
            Experiment::Imaging => "ring1",
            Experiment::Braiding => "ring1+ancilla",
            Experiment::Spectral => "ring1+probe",
            Experiment::Transmutation => "ring3",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ExperimentError::Plan(format!("unknown experiment `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    #[default]
    Auto,
    Stabilizer,
    Gaussian,
    Dense,
}

impl FromStr for EngineChoice {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EngineChoice::Auto),
            "stabilizer" => Ok(EngineChoice::Stabilizer),
            "gaussian" => Ok(EngineChoice::Gaussian),
            "dense" => Ok(EngineChoice::Dense),
            _ => Err(ExperimentError::Plan(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Stabilizer,
    Gaussian,
    Dense,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Stabilizer => "stabilizer",
            Engine::Gaussian => "gaussian",
            Engine::Dense => "dense",
        })
    }
}

/// Everything a driver needs. `shots = None` asks for exact expectations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub experiment: Experiment,
    pub geometry: String,
    pub jt: f64,
    #[serde(default)]
    pub delta: f64,
    pub cycles: usize,
    #[serde(default)]
    pub engine: EngineChoice,
    #[serde(default)]
    pub shots: Option<usize>,
    #[serde(default = "one")]
    pub twirls: usize,
    #[serde(default = "one")]
    pub realizations: usize,
    /// Noise trajectories per (twirl, realization). Unused without channel
    /// noise; in shot mode every shot is its own trajectory.
    #[serde(default = "one")]
    pub trajectories: usize,
    /// Plaquettes whose flux must read +1 (braiding only).
    #[serde(default)]
    pub postselect: Vec<usize>,
    #[serde(default)]
    pub randomized_compiling: bool,
    #[serde(default)]
    pub decoupling: bool,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Spectral probe sites; the whole edge when absent.
    #[serde(default)]
    pub sites: Option<Vec<usize>>,
}

fn one() -> usize {
    1
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

impl ExperimentPlan {
    pub fn new(experiment: Experiment, geometry: &str, jt: f64) -> Self {
        ExperimentPlan {
            experiment,
            geometry: geometry.to_string(),
            jt,
            delta: 0.0,
            cycles: experiment.default_cycles(),
            engine: EngineChoice::Auto,
            shots: None,
            twirls: 1,
            realizations: 1,
            trajectories: 1,
            postselect: Vec::new(),
            randomized_compiling: false,
            decoupling: false,
            noise: NoiseModel::none(),
            seed: 0,
            cap: DEFAULT_CAP,
            sites: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExperimentError::Plan(m));
        if !self.jt.is_finite() {
            return bad(format!("jt = {} is not finite", self.jt));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta = {} must be finite and >= 0", self.delta));
        }
        if self.shots == Some(0) {
            return bad("shots must be >= 1".into());
        }
        for (name, v) in [("twirls", self.twirls), ("realizations", self.realizations), ("trajectories", self.trajectories)] {
            if v == 0 {
                return bad(format!("{name} must be >= 1"));
            }
        }
        if !self.postselect.is_empty() && self.experiment != Experiment::Braiding {
            return bad("flux post-selection is only defined for braiding".into());
        }
        if self.shots.is_some() && self.experiment == Experiment::Imaging {
            return bad("imaging runs in expectation mode only".into());
        }
        self.noise.validate().map_err(|e| ExperimentError::Plan(e.to_string()))?;
        Ok(())
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Ok(build_patch(&GeometrySpec::parse(&self.geometry))?)
    }

    fn is_fixed_point(&self) -> bool {
        (self.jt - 1.0).abs() < 1e-12
    }
}

/// Qubits the circuit-level engines need for this experiment.
pub fn qubit_count(experiment: Experiment, lat: &Lattice) -> usize {
    match experiment {
        Experiment::Spectral | Experiment::Braiding => lat.n_sites().max(ancilla_of(lat) + 1),
        _ => lat.n_sites(),
    }
}

fn ancilla_of(lat: &Lattice) -> usize {
    lat.ancilla.unwrap_or(lat.n_sites())
}

/// Auto rule: clean fixed point without noise is Clifford; clean noiseless
/// expectation runs are free-fermion; everything else is dense.
pub fn select_engine(plan: &ExperimentPlan, lat: &Lattice) -> Result<Engine> {
    let clean = plan.delta == 0.0;
    let noiseless = plan.noise.is_noiseless();
    let circuit_level = plan.shots.is_some() || !plan.postselect.is_empty();
    let n = qubit_count(plan.experiment, lat);
    let dense = || if n > plan.cap { Err(ExperimentError::Cap { n, cap: plan.cap }) } else { Ok(Engine::Dense) };
    let refuse = |engine, reason: &str| Err(ExperimentError::Engine { engine, reason: reason.to_string() });
    match plan.engine {
        EngineChoice::Auto => {
            if clean && noiseless && plan.is_fixed_point() {
                Ok(Engine::Stabilizer)
            } else if clean && noiseless && !circuit_level {
                Ok(Engine::Gaussian)
            } else {
                dense()
            }
        }
        EngineChoice::Stabilizer => {
            if !plan.is_fixed_point() {
                refuse(Engine::Stabilizer, "JT must be 1")
            } else if !clean {
                refuse(Engine::Stabilizer, "disorder fields are not Clifford")
            } else if !noiseless {
                refuse(Engine::Stabilizer, "noise needs the dense engine")
            } else {
                Ok(Engine::Stabilizer)
            }
        }
        EngineChoice::Gaussian => {
            if !clean {
                refuse(Engine::Gaussian, "disorder fields break the free-fermion form")
            } else if !noiseless {
                refuse(Engine::Gaussian, "noise needs the dense engine")
            } else if circuit_level {
                refuse(Engine::Gaussian, "shots and post-selection need a circuit-level engine")
            } else {
                Ok(Engine::Gaussian)
            }
        }
        EngineChoice::Dense => dense(),
    }
}

const STREAM_TWIRL: u64 = 1;
const STREAM_DISORDER: u64 = 2;
const STREAM_TRAJECTORY: u64 = 3;
const STREAM_SHOTS: u64 = 4;

/// Independent 64-bit seed number `index` of stream `stream` under `seed`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r.set_word_pos(2 * index as u128);
    r.next_u64()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub cycle: usize,
    pub observable: String,
    /// Sites or plaquette the observable refers to, space separated.
    pub sites: String,
    pub twirl: usize,
    pub realization: usize,
    pub re: f64,
    pub im: f64,
    /// Standard errors over trajectories or shots; zero for exact values.
    pub sigma_re: f64,
    pub sigma_im: f64,
}

impl ResultRow {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Retention {
    pub cycle: usize,
    pub twirl: usize,
    pub realization: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub experiment: Experiment,
    pub engine: Engine,
    pub geometry: String,
    pub geometry_hash: String,
    pub plan: ExperimentPlan,
    pub twirl_seeds: Vec<u64>,
    pub disorder_seeds: Vec<u64>,
    pub trajectory_seeds: String,
    pub window: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub provenance: Provenance,
    pub rows: Vec<ResultRow>,
    pub retention: Vec<Retention>,
}

pub const RESULTS_CSV: &str = "results.csv";
pub const RETENTION_CSV: &str = "retention.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

fn io_err(path: &Path, e: impl fmt::Display) -> ExperimentError {
    ExperimentError::Io(format!("{}: {e}", path.display()))
}

/// CSV text with a leading `# manifest sha256:...` comment line.
pub fn csv_with_header<T: Serialize>(hash: &str, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = format!("# manifest sha256:{hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r).map_err(|e| ExperimentError::Format(e.to_string()))?;
        }
        w.flush().map_err(|e| ExperimentError::Format(e.to_string()))?;
    }
    Ok(out)
}

/// Rows of a CSV written by [`csv_with_header`].
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| ExperimentError::Format(format!("{}: {e}", path.display())))).collect()
}

impl ResultTable {
    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(&self.provenance).expect("provenance serializes") + "\n"
    }

    pub fn manifest_hash(&self) -> String {
        Sha256::digest(self.manifest_json().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Writes manifest.json, results.csv and (when post-selecting)
    /// retention.csv into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let hash = self.manifest_hash();
        let mut files = vec![(dir.join(MANIFEST_JSON), self.manifest_json().into_bytes())];
        files.push((dir.join(RESULTS_CSV), csv_with_header(&hash, &self.rows)?));
        if !self.retention.is_empty() {
            files.push((dir.join(RETENTION_CSV), csv_with_header(&hash, &self.retention)?));
        }
        for (path, bytes) in &files {
            let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
            f.write_all(bytes).map_err(|e| io_err(path, e))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }

    pub fn read(dir: &Path) -> Result<ResultTable> {
        let mpath = dir.join(MANIFEST_JSON);
        let text = std::fs::read_to_string(&mpath).map_err(|e| io_err(&mpath, e))?;
        let provenance: Provenance =
            serde_json::from_str(&text).map_err(|e| ExperimentError::Format(format!("{}: {e}", mpath.display())))?;
        let rows = read_csv(&dir.join(RESULTS_CSV))?;
        let rpath = dir.join(RETENTION_CSV);
        let retention = if rpath.exists() { read_csv(&rpath)? } else { Vec::new() };
        Ok(ResultTable { provenance, rows, retention })
    }

    pub fn observables(&self) -> Vec<String> {
        let mut v: Vec<String> = self.rows.iter().map(|r| r.observable.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Values of one observable (and site label, if given) for one twirl
    /// and realization, ordered by cycle.
    pub fn series(&self, observable: &str, sites: Option<&str>, twirl: usize, realization: usize) -> Vec<Complex64> {
        let mut rows: Vec<&ResultRow> = self
            .rows
            .iter()
            .filter(|r| {
                r.observable == observable
                    && sites.is_none_or(|s| r.sites == s)
                    && r.twirl == twirl
                    && r.realization == realization
            })
            .collect();
        rows.sort_by_key(|r| r.cycle);
        rows.iter().map(|r| r.value()).collect()
    }

    pub fn twirl_count(&self) -> usize {
        self.rows.iter().map(|r| r.twirl + 1).max().unwrap_or(0)
    }

    pub fn realization_count(&self) -> usize {
        self.rows.iter().map(|r| r.realization + 1).max().unwrap_or(0)
    }

    /// Per-cycle average over twirls and realizations.
    pub fn mean_series(&self, observable: &str, sites: Option<&str>) -> Vec<Complex64> {
        let (t, r) = (self.twirl_count(), self.realization_count());
        let mut acc: Vec<Complex64> = Vec::new();
        for ti in 0..t {
            for ri in 0..r {
                let s = self.series(observable, sites, ti, ri);
                if acc.is_empty() {
                    acc = vec![Complex64::new(0.0, 0.0); s.len()];
                }
                for (a, v) in acc.iter_mut().zip(&s) {
                    *a += v;
                }
            }
        }
        let k = (t * r).max(1) as f64;
        acc.iter().map(|a| a / k).collect()
    }
}

/// Circuit-level simulator state.
#[derive(Clone)]
enum Sim {
    Stab(Tableau),
    Dense(StateVector),
}

impl Sim {
    fn new(engine: Engine, n: usize, cap: usize) -> Result<Sim> {
        Ok(match engine {
            Engine::Stabilizer => Sim::Stab(Tableau::new(n)?),
            Engine::Dense => Sim::Dense(StateVector::with_cap(n, cap)?),
            Engine::Gaussian => unreachable!("gaussian runs do not step circuits"),
        })
    }

    fn apply(&mut self, c: &Circuit, runner: &mut NoisyRunner) -> Result<()> {
        match self {
            Sim::Stab(t) => t.apply(c)?,
            Sim::Dense(s) => runner.apply(s, c)?,
        }
        Ok(())
    }

    fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match self {
            Sim::Stab(t) => t.apply_gate(g)?,
            Sim::Dense(s) => s.apply_gate(g)?,
        }
        Ok(())
    }

    fn exact(&self, p: &PauliString) -> Result<f64> {
        Ok(match self {
            Sim::Stab(t) => t.expectation(p)? as f64,
            Sim::Dense(s) => s.expectation(p)?,
        })
    }

    /// Expectation as read out through the noise model.
    fn read(&self, p: &PauliString, noise: &NoiseModel) -> Result<f64> {
        Ok(match self {
            Sim::Stab(t) => t.expectation(p)? as f64,
            Sim::Dense(s) => s.readout_expectation(p, noise)?,
        })
    }

    fn sample(&self, plan: &MeasurementPlan, shots: usize, seed: u64, noise: &NoiseModel) -> Result<ShotTable> {
        match self {
            Sim::Stab(t) => Ok(sample_shots(t, plan, shots, seed)?),
            Sim::Dense(s) => {
                let mut rotated = s.clone();
                rotated.apply_circuit(&plan.basis.widened(s.n_qubits()))?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rows = (0..shots)
                    .map(|_| {
                        let x = rotated.sample(&mut rng);
                        plan.qubits
                            .iter()
                            .map(|&q| {
                                let bit = (x >> q) & 1 == 1;
                                let flip = if bit { noise.readout_1to0 } else { noise.readout_0to1 };
                                bit ^ (flip > 0.0 && rand::Rng::gen::<f64>(&mut rng) < flip)
                            })
                            .collect()
                    })
                    .collect();
                Ok(ShotTable::from_bits(plan.qubits.clone(), rows))
            }
        }
    }
}

/// Raw per-cycle quantities of one trajectory: means in expectation mode,
/// sums in shot mode.
type Trace = Vec<Vec<Complex64>>;

struct Setup<'a> {
    lat: &'a Lattice,
    plan: &'a ExperimentPlan,
    engine: Engine,
    n: usize,
    twirl_seeds: Vec<u64>,
    disorder_seeds: Vec<u64>,
    fields: Vec<Vec<f64>>,
}

impl<'a> Setup<'a> {
    fn new(lat: &'a Lattice, plan: &'a ExperimentPlan) -> Result<Self> {
        plan.validate()?;
        let engine = select_engine(plan, lat)?;
        let twirls = if engine == Engine::Gaussian { 1 } else { plan.twirls };
        let realizations = if plan.delta == 0.0 { 1 } else { plan.realizations };
        let twirl_seeds: Vec<u64> = (0..twirls).map(|t| derive_seed(plan.seed, STREAM_TWIRL, t as u64)).collect();
        let disorder_seeds: Vec<u64> =
            (0..realizations).map(|r| derive_seed(plan.seed, STREAM_DISORDER, r as u64)).collect();
        let fields = disorder_seeds
            .iter()
            .map(|&s| sample_disorder(lat, plan.delta, s))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Setup { lat, plan, engine, n: qubit_count(plan.experiment, lat), twirl_seeds, disorder_seeds, fields })
    }

    fn trajectories(&self) -> usize {
        if self.engine != Engine::Dense || !self.plan.noise.has_channels() {
            return 1;
        }
        self.plan.shots.unwrap_or(self.plan.trajectories)
    }

    fn tuple(&self, twirl: usize, realization: usize) -> u64 {
        (twirl * self.fields.len() + realization) as u64
    }

    fn provenance(&self, notes: Vec<String>) -> Provenance {
        Provenance {
            generator: format!("fkh {}", env!("CARGO_PKG_VERSION")),
            experiment: self.plan.experiment,
            engine: self.engine,
            geometry: self.plan.geometry.clone(),
            geometry_hash: self.lat.geometry_hash(),
            plan: self.plan.clone(),
            twirl_seeds: self.twirl_seeds.clone(),
            disorder_seeds: self.disorder_seeds.clone(),
            trajectory_seeds: "trajectory k of (twirl t, realization r) draws from ChaCha8 stream k of \
                               derive_seed(seed, 3, t * realizations + r); shots of cycle n from \
                               derive_seed(seed, 4, ((t * realizations + r) * trajectories + k) * (cycles + 1) + n)"
                .into(),
            window: "w(n) = cos^p(pi n / (2 N_max)), p = 6 spectral, p = 4 order parameter".into(),
            notes,
        }
    }

    /// The Floquet cycle of each step for one twirl and realization.
    fn cycle_circuits(&self, twirl: usize, realization: usize) -> Result<Vec<Circuit>> {
        let params = DriveParams {
            jt: self.plan.jt,
            delta: self.plan.delta,
            h: self.fields[realization].clone(),
            cycles: 1,
        };
        let base = floquet_cycle(self.lat, &params)?.widened(self.n);
        let idle: Vec<usize> = match self.plan.experiment {
            Experiment::Braiding | Experiment::Spectral => vec![ancilla_of(self.lat)],
            _ => Vec::new(),
        };
        (1..=self.plan.cycles)
            .map(|cycle| {
                let s = derive_seed(self.twirl_seeds[twirl], cycle as u64, 0);
                let mut c = base.clone();
                if self.plan.randomized_compiling {
                    c = randomized_compile(&c, s);
                }
                if self.plan.decoupling {
                    c = dynamical_decoupling(&c, &idle, s ^ 1)?;
                }
                Ok(c)
            })
            .collect()
    }

    /// Runs every trajectory of one (twirl, realization) tuple from `init`,
    /// observing after preparation and after each cycle.
    fn trace<O>(&self, init: &Circuit, twirl: usize, realization: usize, observe: O) -> Result<Vec<Trace>>
    where
        O: Fn(&Sim, usize, u64) -> Result<Vec<Complex64>> + Sync,
    {
        let cycles = self.cycle_circuits(twirl, realization)?;
        let tuple = self.tuple(twirl, realization);
        let runner_seed = derive_seed(self.plan.seed, STREAM_TRAJECTORY, tuple);
        let k_total = self.trajectories();
        let steps = self.plan.cycles as u64 + 1;
        let init = init.widened(self.n);
        (0..k_total)
            .into_par_iter()
            .map(|k| {
                let shot_seed = |n: u64| {
                    derive_seed(self.plan.seed, STREAM_SHOTS, (tuple * k_total as u64 + k as u64) * steps + n)
                };
                let mut sim = Sim::new(self.engine, self.n, self.plan.cap)?;
                let mut runner = NoisyRunner::new(&self.plan.noise, runner_seed, k);
                sim.apply(&init, &mut runner)?;
                let mut out = vec![observe(&sim, 0, shot_seed(0))?];
                for (i, c) in cycles.iter().enumerate() {
                    sim.apply(c, &mut runner)?;
                    out.push(observe(&sim, i + 1, shot_seed(i as u64 + 1))?);
                }
                Ok(out)
            })
            .collect()
    }

    fn shots_per_trajectory(&self) -> Option<usize> {
        self.plan.shots.map(|s| s.div_ceil(self.trajectories()))
    }
}

/// Mean and standard error over trajectories, per cycle and quantity.
fn trajectory_stats(traces: &[Trace]) -> Vec<Vec<(Complex64, f64, f64)>> {
    let k = traces.len() as f64;
    (0..traces[0].len())
        .map(|n| {
            (0..traces[0][n].len())
                .map(|q| {
                    let vals: Vec<Complex64> = traces.iter().map(|t| t[n][q]).collect();
                    let mean = vals.iter().sum::<Complex64>() / k;
                    if traces.len() < 2 {
                        return (mean, 0.0, 0.0);
                    }
                    let var = |f: fn(&Complex64) -> f64, m: f64| {
                        (vals.iter().map(|v| (f(v) - m).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
                    };
                    (mean, var(|v| v.re, mean.re), var(|v| v.im, mean.im))
                })
                .collect()
        })
        .collect()
}

fn sum_traces(traces: &[Trace]) -> Trace {
    let mut acc = traces[0].clone();
    for t in &traces[1..] {
        for (a, b) in acc.iter_mut().zip(t) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
    acc
}

fn row(cycle: usize, observable: &str, sites: String, twirl: usize, realization: usize, v: Complex64, s: (f64, f64)) -> ResultRow {
    ResultRow {
        cycle,
        observable: observable.to_string(),
        sites,
        twirl,
        realization,
        re: v.re,
        im: v.im,
        sigma_re: s.0,
        sigma_im: s.1,
    }
}

fn pauli_gates(p: &PauliString) -> Vec<Gate> {
    p.letters()
        .iter()
        .map(|(&q, &l)| Gate::pauli(q, Axis::from_letter(l).expect("letters are non-identity")))
        .collect()
}

fn prepared(lat: &Lattice, c: &Circuit) -> Result<Tableau> {
    let mut t = Tableau::new(c.n_qubits().max(lat.n_sites()))?;
    t.apply(c)?;
    Ok(t)
}

/// Free-fermion data of a Clifford-prepared state.
fn gaussian_start(lat: &Lattice, prep: &Circuit, jt: f64) -> Result<(GaugeSector, Covariance, ModeRotation)> {
    let t = prepared(lat, prep)?;
    let expect = |p: &PauliString| t.expectation(p).map(|v| v as f64).unwrap_or(0.0);
    let sector = sector_from_state(lat, expect)?;
    let cov = covariance_from_state(lat, &sector, expect)?;
    let rot = cycle_rotation(lat, &sector, jt);
    Ok((sector, cov, rot))
}

fn protocol_missing(lat: &Lattice, what: &'static str) -> ExperimentError {
    ExperimentError::Protocol { geometry: lat.name.clone(), what }
}

/// Flux-free preparation followed by the geometry's M-SWAP sequence.
pub fn rearranged_prep(lat: &Lattice) -> Result<Circuit> {
    let mut c = flux_free_prep(lat)?;
    c.append(&mswap_circuit(lat, &lat.protocol.mswap)?)?;
    Ok(c)
}

/// Tracked pairs oriented so the prepared state reads n = 0, and their JT = 1
/// Heisenberg images for cycles 0..=cycles: at cycle N the pair sits on the
/// content-propagated sites, oriented so that the back-propagated density
/// string has the initial sign.
pub fn follow_pairs(lat: &Lattice, prep: &Circuit, cycles: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    let t = prepared(lat, prep)?;
    let perm = lat.content_permutation();
    let one = floquet_cycle(lat, &DriveParams::clean(1.0, 1))?;
    let mut out = Vec::new();
    for &[j, k] in &lat.protocol.tracked {
        let s = t.expectation(&lat.density_string(j, k, &PathSpec::Shortest)?)?;
        let (mut a, mut b) = if s > 0 { (k, j) } else { (j, k) };
        let mut gates: Vec<Gate> = Vec::new();
        let mut seq = vec![(a, b)];
        for _ in 0..cycles {
            gates.extend(one.gates().iter().cloned());
            (a, b) = (perm[a], perm[b]);
            let d = lat.density_string(a, b, &PathSpec::Shortest)?;
            let back = propagate_backward(&gates, &d).map_err(|e| ExperimentError::Plan(e.to_string()))?;
            if t.expectation(&back)? > 0 {
                (a, b) = (b, a);
            }
            seq.push((a, b));
        }
        out.push(seq);
    }
    Ok(out)
}

fn density(lat: &Lattice, (a, b): (usize, usize)) -> Result<PauliString> {
    Ok(lat.density_string(a, b, &PathSpec::Shortest)?)
}

fn pair_label((a, b): (usize, usize)) -> String {
    format!("{a} {b}")
}

/// Fluxes and tracked fermion densities after each cycle. `n_track{i}`
/// stays on the initial pair, `n_follow{i}` moves with the JT = 1
/// Heisenberg image.
pub fn run_imaging(plan: &ExperimentPlan) -> Result<ResultTable> {
    let lat = plan.lattice()?;
    let setup = Setup::new(&lat, plan)?;
    let prep = rearranged_prep(&lat)?;
    let follow = follow_pairs(&lat, &prep, plan.cycles)?;
    let fluxes = lat.flux_strings();
    // (observable, sites label, string) for every cycle.
    let strings = |n: usize| -> Result<Vec<(String, String, PauliString)>> {
        let mut v: Vec<(String, String, PauliString)> =
            fluxes.iter().enumerate().map(|(p, w)| ("W".to_string(), format!("{p}"), w.clone())).collect();
        for (i, seq) in follow.iter().enumerate() {
            v.push((format!("n_track{i}"), pair_label(seq[0]), density(&lat, seq[0])?));
            v.push((format!("n_follow{i}"), pair_label(seq[n]), density(&lat, seq[n])?));
        }
        Ok(v)
    };
    let per_cycle = (0..=plan.cycles).map(strings).collect::<Result<Vec<_>>>()?;
    // Densities are reported as n = (1 + S) / 2.
    let to_value = |name: &str, x: f64| if name == "W" { x } else { (1.0 + x) / 2.0 };
    let mut rows = Vec::new();
    match setup.engine {
        Engine::Gaussian => {
            let (sector, cov0, rot) = gaussian_start(&lat, &prep, plan.jt)?;
            let mut cov = cov0;
            for (n, list) in per_cycle.iter().enumerate() {
                if n > 0 {
                    cov = evolve(&cov, &rot, 1)?;
                }
                for (name, sites, s) in list {
                    let x = pauli_expectation(&lat, &sector, &cov, s)?;
                    rows.push(row(n, name, sites.clone(), 0, 0, Complex64::new(to_value(name, x), 0.0), (0.0, 0.0)));
                }
            }
        }
        _ => {
            for t in 0..setup.twirl_seeds.len() {
                for r in 0..setup.fields.len() {
                    let traces = setup.trace(&prep, t, r, |sim, n, _| {
                        per_cycle[n]
                            .iter()
                            .map(|(name, _, s)| Ok(Complex64::new(to_value(name, sim.read(s, &plan.noise)?), 0.0)))
                            .collect()
                    })?;
                    for (n, qs) in trajectory_stats(&traces).iter().enumerate() {
                        for ((name, sites, _), (v, sr, si)) in per_cycle[n].iter().zip(qs) {
                            rows.push(row(n, name, sites.clone(), t, r, *v, (*sr, *si)));
                        }
                    }
                }
            }
        }
    }
    let notes = vec!["densities n = (1 + S(j,k))/2, each tracked pair oriented so the prepared state has n = 0".to_string()];
    Ok(ResultTable { provenance: setup.provenance(notes), rows, retention: Vec::new() })
}

/// Hadamard-test readout of each `post` string after every cycle.
struct Interferometer<'a> {
    setup: &'a Setup<'a>,
    ancilla: usize,
    posts: Vec<PauliString>,
    /// Flux strings and decoder for post-selection.
    fluxes: Vec<PauliString>,
    decoder: Option<(Circuit, FluxDecoder)>,
}

impl Interferometer<'_> {
    fn observe(&self, sim: &Sim, seed: u64) -> Result<Vec<Complex64>> {
        let noise = &self.setup.plan.noise;
        let x = PauliString::single(self.ancilla, Pauli::X);
        let y = PauliString::single(self.ancilla, Pauli::Y);
        let mut out = Vec::new();
        for (i, post) in self.posts.iter().enumerate() {
            let mut s = sim.clone();
            s.apply_gate(&Gate::CPauli { control: self.ancilla, string: post.clone() })?;
            match self.setup.shots_per_trajectory() {
                None if self.fluxes.is_empty() => {
                    out.push(Complex64::new(s.read(&x, noise)?, s.read(&y, noise)?));
                }
                None => {
                    // Projector onto the required sector, expanded over subsets.
                    let k = self.fluxes.len();
                    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
                    for mask in 0u32..(1 << k) {
                        let w = (0..k)
                            .filter(|i| mask >> i & 1 == 1)
                            .fold(PauliString::identity(), |acc, i| acc.mul(&self.fluxes[i]));
                        num += Complex64::new(s.exact(&w.mul(&x))?, s.exact(&w.mul(&y))?);
                        den += s.exact(&w)?;
                    }
                    let scale = (1u64 << k) as f64;
                    out.push(num / scale);
                    out.push(Complex64::new(den / scale, 0.0));
                }
                Some(shots) => {
                    let mut sums = [0.0; 2];
                    let mut kept = [0.0; 2];
                    let mut total = 0.0;
                    for (b, basis) in [Pauli::X, Pauli::Y].into_iter().enumerate() {
                        let plan = self.readout_plan(basis)?;
                        let table = s.sample(&plan, shots, derive_seed(seed, i as u64, b as u64), noise)?;
                        total = table.len() as f64;
                        let table = match &self.decoder {
                            Some((_, dec)) => {
                                let required = dec.plaquettes.iter().map(|&p| (p, 1i8)).collect();
                                postselect(&table, dec, &required)?.0
                            }
                            None => table,
                        };
                        kept[b] = table.len() as f64;
                        sums[b] = table.parity_mean(1, &[self.ancilla]).unwrap_or(0.0) * kept[b];
                    }
                    out.push(Complex64::new(sums[0], sums[1]));
                    out.push(Complex64::new(kept[0], kept[1]));
                    out.push(Complex64::new(total, 0.0));
                }
            }
        }
        Ok(out)
    }

    fn readout_plan(&self, basis: Pauli) -> Result<MeasurementPlan> {
        let n = self.setup.n;
        let (mut c, mut qubits) = match &self.decoder {
            Some((c, dec)) => (c.widened(n), dec.qubits()),
            None => (Circuit::new(n), Vec::new()),
        };
        let (anc_plan, _) = MeasurementPlan::for_strings(n, &[PauliString::single(self.ancilla, basis)])?;
        c.append(&anc_plan.basis)?;
        qubits.push(self.ancilla);
        Ok(MeasurementPlan::new(c, qubits))
    }

    /// Quantities per post string in each observation.
    fn width(&self) -> usize {
        match (self.setup.plan.shots, self.fluxes.is_empty()) {
            (None, true) => 1,
            (None, false) => 2,
            (Some(_), _) => 3,
        }
    }

    /// Turns per-tuple traces into rows and retention records.
    fn finish(&self, traces: &[Trace], labels: &[String], t: usize, r: usize, rows: &mut Vec<ResultRow>, retention: &mut Vec<Retention>) {
        let name = name_of(self.setup.plan);
        let w = self.width();
        if self.setup.plan.shots.is_none() {
            let stats = trajectory_stats(traces);
            for (n, qs) in stats.iter().enumerate() {
                for (i, label) in labels.iter().enumerate() {
                    let (v, sr, si) = qs[i * w];
                    if w == 1 {
                        rows.push(row(n, name, label.clone(), t, r, v, (sr, si)));
                    } else {
                        let den = qs[i * w + 1].0.re;
                        let ratio = if den > 0.0 { v / den } else { Complex64::new(0.0, 0.0) };
                        let scale = if den > 0.0 { den } else { 1.0 };
                        rows.push(row(n, name, label.clone(), t, r, ratio, (sr / scale, si / scale)));
                        if i == 0 {
                            retention.push(Retention { cycle: n, twirl: t, realization: r, rate: den });
                        }
                    }
                }
            }
        } else {
            let sums = sum_traces(traces);
            for (n, qs) in sums.iter().enumerate() {
                for (i, label) in labels.iter().enumerate() {
                    let (s, k, total) = (qs[i * w], qs[i * w + 1], qs[i * w + 2].re);
                    let mean = |sum: f64, kept: f64| if kept > 0.0 { sum / kept } else { 0.0 };
                    let se = |m: f64, kept: f64| if kept > 0.0 { ((1.0 - m * m).max(0.0) / kept).sqrt() } else { 0.0 };
                    let (mx, my) = (mean(s.re, k.re), mean(s.im, k.im));
                    rows.push(row(n, name, label.clone(), t, r, Complex64::new(mx, my), (se(mx, k.re), se(my, k.im))));
                    if i == 0 && !self.fluxes.is_empty() {
                        let rate = if total > 0.0 { 0.5 * (k.re + k.im) / total } else { 0.0 };
                        retention.push(Retention { cycle: n, twirl: t, realization: r, rate });
                    }
                }
            }
        }
    }
}

/// Complex Hadamard overlap after each cycle, with the dangling Pauli of
/// the braid site as both pre and post string.
pub fn run_braiding(plan: &ExperimentPlan) -> Result<ResultTable> {
    let lat = plan.lattice()?;
    let setup = Setup::new(&lat, plan)?;
    let s0 = lat.protocol.braid_site.ok_or_else(|| protocol_missing(&lat, "braid site"))?;
    let letter = lat.dangling_letter(s0).ok_or_else(|| protocol_missing(&lat, "dangling Pauli at the braid site"))?;
    let split = PauliString::single(s0, letter);
    let prep = rearranged_prep(&lat)?;
    let label = format!("{s0}");
    let mut notes = vec![format!("pre = post = {split}; overlap = <X_A> + i<Y_A> on ancilla {}", ancilla_of(&lat))];
    if !plan.postselect.is_empty() {
        notes.push(if plan.shots.is_none() {
            "post-selection applied exactly through the sector projector; flux readout error not modelled".into()
        } else {
            "post-selection on co-measured fluxes; rows averaged over kept shots".into()
        });
    }
    interferometry(&lat, &setup, &prep, &split, &[(label, split.clone())], notes)
}

fn interferometry(
    lat: &Lattice,
    setup: &Setup,
    prep: &Circuit,
    pre: &PauliString,
    posts: &[(String, PauliString)],
    notes: Vec<String>,
) -> Result<ResultTable> {
    let plan = setup.plan;
    let ancilla = ancilla_of(lat);
    let labels: Vec<String> = posts.iter().map(|(l, _)| l.clone()).collect();
    let mut rows = Vec::new();
    let mut retention = Vec::new();
    if setup.engine == Engine::Gaussian {
        let (sector, cov0, rot) = gaussian_start(lat, prep, plan.jt)?;
        for n in 0..=plan.cycles {
            for (label, post) in posts {
                let v = two_time_expectation(lat, &sector, &cov0, &rot, n, post, pre)?;
                rows.push(row(n, name_of(plan), label.clone(), 0, 0, v, (0.0, 0.0)));
            }
        }
        return Ok(ResultTable { provenance: setup.provenance(notes), rows, retention });
    }
    let mut init = prep.widened(setup.n);
    init.push(Gate::H(ancilla))?;
    init.push(Gate::CPauli { control: ancilla, string: pre.clone() })?;
    let fluxes: Vec<PauliString> =
        plan.postselect.iter().map(|&p| lat.flux_string(p)).collect::<std::result::Result<_, _>>()?;
    let decoder = match (&plan.shots, plan.postselect.is_empty()) {
        (Some(_), false) => Some(coflux_measurement_plan(lat, &plan.postselect)?),
        _ => None,
    };
    let inter = Interferometer {
        setup,
        ancilla,
        posts: posts.iter().map(|(_, p)| p.clone()).collect(),
        fluxes,
        decoder,
    };
    for t in 0..setup.twirl_seeds.len() {
        for r in 0..setup.fields.len() {
            let traces = setup.trace(&init, t, r, |sim, _, seed| inter.observe(sim, seed))?;
            inter.finish(&traces, &labels, t, r, &mut rows, &mut retention);
        }
    }
    Ok(ResultTable { provenance: setup.provenance(notes), rows, retention })
}

fn name_of(plan: &ExperimentPlan) -> &'static str {
    match plan.experiment {
        Experiment::Braiding => "overlap",
        _ => "C",
    }
}

/// Probe sites of a spectral plan: the listed ones, or the edge cycle
/// without the protruding site.
pub fn spectral_sites(lat: &Lattice, plan: &ExperimentPlan) -> Result<Vec<usize>> {
    let p = lat.protruding.ok_or_else(|| protocol_missing(lat, "protruding site"))?;
    let sites = match &plan.sites {
        Some(s) => s.clone(),
        None => lat.edge_cycle.iter().copied().filter(|&j| j != p.site).collect(),
    };
    for &j in &sites {
        probe_string(lat, j)?;
    }
    Ok(sites)
}

/// C(j, N) = <psi_0| P_j(N) P_0 |psi_0> for each probe site j, rows
/// labelled by j. Disordered plans average over realizations downstream.
pub fn run_spectral(plan: &ExperimentPlan) -> Result<ResultTable> {
    let lat = plan.lattice()?;
    let setup = Setup::new(&lat, plan)?;
    let origin = spectral_origin(&lat)?;
    let sites = spectral_sites(&lat, plan)?;
    let pre = probe_string(&lat, origin)?;
    let posts = sites
        .iter()
        .map(|&j| Ok((format!("{j}"), probe_string(&lat, j)?)))
        .collect::<Result<Vec<_>>>()?;
    let notes = vec![format!("P_j = S(j, {}), origin {origin}", lat.protruding.map(|p| p.site).unwrap_or(0))];
    interferometry(&lat, &setup, &probe_prep(&lat)?, &pre, &posts, notes)
}

/// Pauli string placing the central e anyon and pushing its partner out
/// through the exit bonds.
pub fn central_e_string(lat: &Lattice) -> Result<PauliString> {
    let centre = lat.protocol.centre.ok_or_else(|| protocol_missing(lat, "centre plaquette"))?;
    let pairs = swapped_pairs(lat, &lat.protocol.mswap)?;
    Ok(anyon_creation_string(lat, AnyonKind::E, &Placement::Plaquette { p: centre, pairs })?)
}

/// The two transmutation initial states, |psi_0> then |psi_e>.
pub fn transmutation_preps(lat: &Lattice) -> Result<[Circuit; 2]> {
    let base = rearranged_prep(lat)?;
    let mut with_e = base.clone();
    with_e.extend(pauli_gates(&central_e_string(lat)?))?;
    Ok([base, with_e])
}

/// Electric loop around the centre, W_p (1 - 2 n) with the diagonal pair
/// oriented so that `vacuum` reads n = 0, and that pair.
pub fn vacuum_loop(lat: &Lattice, vacuum: &Circuit) -> Result<(PauliString, (usize, usize))> {
    let centre = lat.protocol.centre.ok_or_else(|| protocol_missing(lat, "centre plaquette"))?;
    let (a, b) = lat.diagonal_pair(centre)?;
    let t = prepared(lat, vacuum)?;
    let pair = if t.expectation(&density(lat, (a, b))?)? > 0 { (b, a) } else { (a, b) };
    let parity = density(lat, pair)?.negate();
    Ok((lat.flux_string(centre)?.mul(&parity), pair))
}

/// Electric loop expectation for both initial states, plus the centre
/// flux and diagonal-pair density that make up the loop.
pub fn run_transmutation(plan: &ExperimentPlan) -> Result<ResultTable> {
    let lat = plan.lattice()?;
    let setup = Setup::new(&lat, plan)?;
    let centre = lat.protocol.centre.ok_or_else(|| protocol_missing(&lat, "centre plaquette"))?;
    let preps = transmutation_preps(&lat)?;
    let (loop_op, diag) = vacuum_loop(&lat, &preps[0])?;
    let flux = lat.flux_string(centre)?;
    let dens = density(&lat, diag)?;
    let label_c = format!("{centre}");
    let label_d = pair_label(diag);
    let mut rows = Vec::new();
    let names = [("O_0", "W_0", "n_0"), ("O_e", "W_e", "n_e")];
    for (prep, (o, w, d)) in preps.iter().zip(names) {
        let labels = [(o, label_c.clone()), (w, label_c.clone()), (d, label_d.clone())];
        let to_value = |i: usize, x: f64| if i == 2 { (1.0 + x) / 2.0 } else { x };
        let strings = [&loop_op, &flux, &dens];
        if setup.engine == Engine::Gaussian {
            let (sector, cov0, rot) = gaussian_start(&lat, prep, plan.jt)?;
            let mut cov = cov0;
            for n in 0..=plan.cycles {
                if n > 0 {
                    cov = evolve(&cov, &rot, 1)?;
                }
                for (i, s) in strings.iter().enumerate() {
                    let x = to_value(i, pauli_expectation(&lat, &sector, &cov, s)?);
                    rows.push(row(n, labels[i].0, labels[i].1.clone(), 0, 0, Complex64::new(x, 0.0), (0.0, 0.0)));
                }
            }
            continue;
        }
        for t in 0..setup.twirl_seeds.len() {
            for r in 0..setup.fields.len() {
                match setup.shots_per_trajectory() {
                    None => {
                        let traces = setup.trace(prep, t, r, |sim, _, _| {
                            strings
                                .iter()
                                .enumerate()
                                .map(|(i, s)| Ok(Complex64::new(to_value(i, sim.read(s, &plan.noise)?), 0.0)))
                                .collect()
                        })?;
                        for (n, qs) in trajectory_stats(&traces).iter().enumerate() {
                            for (i, (v, sr, si)) in qs.iter().enumerate() {
                                rows.push(row(n, labels[i].0, labels[i].1.clone(), t, r, *v, (*sr, *si)));
                            }
                        }
                    }
                    Some(shots) => {
                        let (mplan, parities) = MeasurementPlan::for_strings(setup.n, std::slice::from_ref(&loop_op))?;
                        let traces = setup.trace(prep, t, r, |sim, _, seed| {
                            let table = sim.sample(&mplan, shots, seed, &plan.noise)?;
                            let (sign, qs) = &parities[0];
                            let m = table.parity_mean(*sign, qs).unwrap_or(0.0);
                            Ok(vec![Complex64::new(m * table.len() as f64, table.len() as f64)])
                        })?;
                        for (n, q) in sum_traces(&traces).iter().enumerate() {
                            let m = q[0].re / q[0].im;
                            let se = ((1.0 - m * m).max(0.0) / q[0].im).sqrt();
                            rows.push(row(n, o, label_c.clone(), t, r, Complex64::new(m, 0.0), (se, 0.0)));
                        }
                    }
                }
            }
        }
    }
    let notes = vec![format!(
        "O = W_{centre} * (-S({}, {})); e string {}",
        diag.0,
        diag.1,
        central_e_string(&lat)?
    )];
    Ok(ResultTable { provenance: setup.provenance(notes), rows, retention: Vec::new() })
}

pub fn run(plan: &ExperimentPlan) -> Result<ResultTable> {
    match plan.experiment {
        Experiment::Imaging => run_imaging(plan),
        Experiment::Braiding => run_braiding(plan),
        Experiment::Spectral => run_spectral(plan),
        Experiment::Transmutation => run_transmutation(plan),
    }
}

/// Entanglement entropy (in bits) of the transmutation initial state across
/// the geometry's cut.
pub fn transmutation_entropy(lat: &Lattice) -> Result<usize> {
    if lat.protocol.cut.is_empty() {
        return Err(protocol_missing(lat, "entanglement cut"));
    }
    let t = prepared(lat, &rearranged_prep(lat)?)?;
    Ok(t.entanglement_entropy(&lat.protocol.cut))
}

/// Loop series per twirl group, each averaged over realizations.
fn loop_groups(table: &ResultTable, observable: &str) -> Vec<Vec<f64>> {
    (0..table.twirl_count())
        .map(|t| {
            let rs = table.realization_count();
            let series: Vec<Vec<f64>> =
                (0..rs).map(|r| table.series(observable, None, t, r).iter().map(|z| z.re).collect()).collect();
            (0..series[0].len()).map(|n| series.iter().map(|s| s[n]).sum::<f64>() / rs as f64).collect()
        })
        .collect()
}

/// Order parameter from a transmutation table, jackknifed over twirls.
pub fn eta_from_table(table: &ResultTable) -> Result<Vec<Estimate>> {
    if table.provenance.experiment != Experiment::Transmutation {
        return Err(ExperimentError::Format("eta needs a transmutation table".into()));
    }
    Ok(eta_series(&loop_groups(table, "O_e"), &loop_groups(table, "O_0"))?)
}

/// eta(N) of each disorder realization, averaged over twirls.
pub fn eta_per_realization(table: &ResultTable) -> Result<Vec<Vec<f64>>> {
    let t = table.twirl_count();
    (0..table.realization_count())
        .map(|r| {
            let avg = |obs: &str| -> Vec<f64> {
                let s: Vec<Vec<Complex64>> = (0..t).map(|ti| table.series(obs, None, ti, r)).collect();
                (0..s[0].len()).map(|n| s.iter().map(|x| x[n].re).sum::<f64>() / t as f64).collect()
            };
            let eta = eta_series(&[avg("O_e")], &[avg("O_0")])?;
            Ok(eta.iter().map(|e| e.mean).collect())
        })
        .collect()
}

/// C(j, N) averaged over twirls and realizations, rows in the order of
/// `sites`.
pub fn spectral_grid(table: &ResultTable, sites: &[usize]) -> Vec<Vec<Complex64>> {
    sites.iter().map(|j| table.mean_series("C", Some(&format!("{j}")))).collect()
}

/// One-cycle JT = 1 Heisenberg rotation of the flux-free sector restricted
/// to the c-Majoranas of `sites`: c_a(1) = sum_b F[a][b] c_b.
pub fn edge_translation(lat: &Lattice, sites: &[usize]) -> Result<Vec<Vec<f64>>> {
    let sector = sector_from_fluxes(lat, &BTreeMap::new())?;
    let rot = cycle_rotation(lat, &sector, 1.0);
    let modes = register(lat);
    let idx = |s: usize| {
        modes.iter().position(|&m| m == Mode::C(s)).ok_or(ExperimentError::Gaussian(GaussianError::NoRegister(s)))
    };
    let ids = sites.iter().map(|&s| idx(s)).collect::<Result<Vec<_>>>()?;
    Ok(ids.iter().map(|&a| ids.iter().map(|&b| rot.r[(a, b)]).collect()).collect())
}

/// Orbit of the spectral origin under the JT = 1 cycle, listed in edge-cycle
/// order starting at the origin. The one-cycle map is a signed cyclic
/// translation on these sites, which is what the momentum transform needs.
pub fn edge_orbit(lat: &Lattice) -> Result<Vec<usize>> {
    let origin = spectral_origin(lat)?;
    let sector = sector_from_fluxes(lat, &BTreeMap::new())?;
    let rot = cycle_rotation(lat, &sector, 1.0);
    let modes = register(lat);
    let idx = |s: usize| {
        modes.iter().position(|&m| m == Mode::C(s)).ok_or(ExperimentError::Gaussian(GaussianError::NoRegister(s)))
    };
    let not_closed = || ExperimentError::Protocol { geometry: lat.name.clone(), what: "closed edge orbit" };
    let mut orbit = vec![origin];
    loop {
        let a = idx(*orbit.last().unwrap())?;
        let image: Vec<usize> = (0..modes.len()).filter(|&m| rot.r[(m, a)].abs() > 1e-9).collect();
        let next = match image.as_slice() {
            [m] => match modes[*m] {
                Mode::C(s) if lat.edge_cycle.contains(&s) => s,
                _ => return Err(not_closed()),
            },
            _ => return Err(not_closed()),
        };
        if next == origin {
            break;
        }
        if orbit.contains(&next) {
            return Err(not_closed());
        }
        orbit.push(next);
    }
    let start = lat.edge_cycle.iter().position(|&s| s == origin).unwrap_or(0);
    let l = lat.edge_cycle.len();
    Ok((0..l).map(|k| lat.edge_cycle[(start + k) % l]).filter(|s| orbit.contains(s)).collect())
}
