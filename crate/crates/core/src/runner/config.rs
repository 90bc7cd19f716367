//! JSON run configuration: parsing, validation with key paths, and the
//! canonical hash that names output artifacts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bath::{BathKind, BathSpec, Mode, Trajectory, DEFAULT_WIGHTMAN_EPSILON};
use crate::cg::{QuadratureScheme, QuadratureSpec};
use crate::error::{Error, Result};
use crate::evolution::DensityMatrix;
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::oracle::{BathState, CompositeModel, OracleConfig, OracleMode};
use crate::system::{driven_qubit, qutrit_model, static_qubit, SystemModel, HERMITIAN_TOL};
use crate::vdp::{Matching, VdpConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Coefficients,
    Evolve,
    OracleCompare,
    SecularCompare,
    RgDemo,
    Audit,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Coefficients => "coefficients",
            Scenario::Evolve => "evolve",
            Scenario::OracleCompare => "oracle-compare",
            Scenario::SecularCompare => "secular-compare",
            Scenario::RgDemo => "rg-demo",
            Scenario::Audit => "audit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidInput(format!("unknown scenario `{s}`")))
    }
}

/// A number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexEntry {
    pub fn value(self) -> C64 {
        match self {
            ComplexEntry::Real(r) => C64::new(r, 0.0),
            ComplexEntry::Pair([re, im]) => C64::new(re, im),
        }
    }
}

pub type MatrixEntries = Vec<Vec<ComplexEntry>>;

fn to_matrix(rows: &MatrixEntries, path: &str) -> Result<ComplexMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Validation { path: path.into(), reason: "must be a non-empty square matrix".into() });
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn hermitian_matrix(rows: &MatrixEntries, path: &str) -> Result<ComplexMatrix> {
    let m = to_matrix(rows, path)?;
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOL * m.frobenius_norm().max(1.0) {
        return Err(Error::Validation {
            path: path.into(),
            reason: format!("not Hermitian (residual {residual:.3e})"),
        });
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub label: String,
    pub matrix: MatrixEntries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    StaticQubit,
    DrivenQubit { omega0: f64 },
    Qutrit,
    Custom { hamiltonian: MatrixEntries, couplings: Vec<CouplingEntry> },
}

impl SystemConfig {
    pub fn build(&self) -> Result<SystemModel> {
        match self {
            SystemConfig::StaticQubit => Ok(static_qubit()),
            SystemConfig::DrivenQubit { omega0 } => {
                if !omega0.is_finite() {
                    return Err(Error::Validation { path: "system.omega0".into(), reason: "must be finite".into() });
                }
                Ok(driven_qubit(*omega0))
            }
            SystemConfig::Qutrit => Ok(qutrit_model()),
            SystemConfig::Custom { hamiltonian, couplings } => {
                let h = hermitian_matrix(hamiltonian, "system.hamiltonian")?;
                if couplings.is_empty() {
                    return Err(Error::Validation {
                        path: "system.couplings".into(),
                        reason: "at least one coupling is required".into(),
                    });
                }
                let mut ops = Vec::new();
                for (i, c) in couplings.iter().enumerate() {
                    let path = format!("system.couplings[{i}].matrix");
                    let m = hermitian_matrix(&c.matrix, &path)?;
                    if m.rows() != h.rows() {
                        return Err(Error::Validation { path, reason: format!("must be {0}x{0}", h.rows()) });
                    }
                    ops.push(m);
                }
                SystemModel::new(h, ops, couplings.iter().map(|c| c.label.clone()).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossName {
    Diagonal,
    Shared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CrossConfig {
    Named(CrossName),
    Matrix(MatrixEntries),
}

impl Default for CrossConfig {
    fn default() -> Self {
        CrossConfig::Named(CrossName::Diagonal)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub frequency: f64,
    pub coupling: f64,
    #[serde(default)]
    pub occupation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryConfig {
    Inertial,
    Accelerated { acceleration: f64 },
}

fn default_epsilon() -> f64 {
    DEFAULT_WIGHTMAN_EPSILON
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathConfig {
    DeltaCorrelated {
        gamma0: f64,
        #[serde(default)]
        cross: CrossConfig,
    },
    OhmicThermal {
        eta: f64,
        cutoff: f64,
        temperature: f64,
        #[serde(default)]
        cross: CrossConfig,
    },
    DiscreteModes {
        modes: Vec<ModeEntry>,
        broadening: f64,
        #[serde(default)]
        cross: CrossConfig,
    },
    VacuumWightman {
        trajectory: TrajectoryConfig,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default)]
        cross: CrossConfig,
    },
}

impl BathConfig {
    pub fn build(&self, n_couplings: usize) -> Result<BathSpec> {
        let (kind, cross) = match self {
            BathConfig::DeltaCorrelated { gamma0, cross } => (BathKind::DeltaCorrelated { gamma0: *gamma0 }, cross),
            BathConfig::OhmicThermal { eta, cutoff, temperature, cross } => {
                (BathKind::OhmicThermal { eta: *eta, cutoff: *cutoff, temperature: *temperature }, cross)
            }
            BathConfig::DiscreteModes { modes, broadening, cross } => {
                let modes = modes
                    .iter()
                    .map(|m| Mode { frequency: m.frequency, coupling: m.coupling, occupation: m.occupation })
                    .collect();
                (BathKind::DiscreteModes { modes, broadening: *broadening }, cross)
            }
            BathConfig::VacuumWightman { trajectory, epsilon, cross } => {
                let trajectory = match trajectory {
                    TrajectoryConfig::Inertial => Trajectory::Inertial,
                    TrajectoryConfig::Accelerated { acceleration } => {
                        Trajectory::Accelerated { acceleration: *acceleration }
                    }
                };
                (BathKind::VacuumWightman { trajectory, epsilon: *epsilon }, cross)
            }
        };
        let cross = match cross {
            CrossConfig::Named(CrossName::Diagonal) => ComplexMatrix::identity(n_couplings),
            CrossConfig::Named(CrossName::Shared) => {
                ComplexMatrix::from_fn(n_couplings, n_couplings, |_, _| C64::new(1.0, 0.0))
            }
            CrossConfig::Matrix(rows) => {
                let m = hermitian_matrix(rows, "bath.cross")?;
                if m.rows() != n_couplings {
                    return Err(Error::Validation {
                        path: "bath.cross".into(),
                        reason: format!("must be {n_couplings}x{n_couplings}, one row per coupling"),
                    });
                }
                m
            }
        };
        BathSpec::new(kind, cross).map_err(|e| match e {
            Error::Validation { reason, .. } => Error::Validation { path: "bath".into(), reason },
            Error::InvalidInput(reason) => Error::Validation { path: "bath".into(), reason },
            other => other,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    MaximallyMixed,
    Basis(usize),
    Pure(Vec<ComplexEntry>),
    Matrix(MatrixEntries),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Basis(0)
    }
}

impl InitialState {
    pub fn build(&self, d: usize) -> Result<DensityMatrix> {
        let path = "evolution.initial_state";
        let invalid = |reason: String| Error::Validation { path: path.into(), reason };
        match self {
            InitialState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(d)),
            InitialState::Basis(k) => {
                if *k >= d {
                    return Err(invalid(format!("basis index {k} out of range for dimension {d}")));
                }
                let psi: Vec<C64> = (0..d).map(|i| if i == *k { C64::new(1.0, 0.0) } else { ZERO }).collect();
                DensityMatrix::pure(&psi)
            }
            InitialState::Pure(v) => {
                if v.len() != d {
                    return Err(invalid(format!("state vector must have {d} entries")));
                }
                DensityMatrix::pure(&v.iter().map(|z| z.value()).collect::<Vec<_>>())
                    .map_err(|e| invalid(e.to_string()))
            }
            InitialState::Matrix(rows) => {
                let m = to_matrix(rows, path)?;
                if m.rows() != d {
                    return Err(invalid(format!("must be {d}x{d}")));
                }
                DensityMatrix::new(m).map_err(|e| invalid(e.to_string()))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub times: Option<Vec<f64>>,
    pub horizon: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub initial_state: InitialState,
}

impl EvolutionSection {
    pub fn sample_times(&self) -> Result<Vec<f64>> {
        let times = match (&self.times, self.horizon, self.steps) {
            (Some(t), None, None) => t.clone(),
            (None, Some(h), Some(n)) if n > 0 && h > 0.0 => (0..=n).map(|k| h * k as f64 / n as f64).collect(),
            (None, Some(_), Some(_)) => {
                return Err(Error::Validation {
                    path: "evolution.horizon".into(),
                    reason: "horizon and steps must be positive".into(),
                })
            }
            _ => {
                return Err(Error::Validation {
                    path: "evolution".into(),
                    reason: "give either `times` or both `horizon` and `steps`".into(),
                })
            }
        };
        if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation {
                path: "evolution.times".into(),
                reason: "must be non-empty, non-negative and strictly increasing".into(),
            });
        }
        Ok(times)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    #[default]
    GaussLegendreTensor,
    Adaptive,
}

fn default_points() -> usize {
    64
}

fn default_tol() -> f64 {
    1e-8
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default = "default_points")]
    pub points_per_axis: usize,
    #[serde(default = "default_tol")]
    pub target_rel_tol: f64,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        Self { scheme: SchemeName::default(), points_per_axis: default_points(), target_rel_tol: default_tol() }
    }
}

impl QuadratureSection {
    pub fn build(&self) -> Result<QuadratureSpec> {
        let scheme = match self.scheme {
            SchemeName::GaussLegendreTensor => QuadratureScheme::GaussLegendreTensor,
            SchemeName::Adaptive => QuadratureScheme::Adaptive,
        };
        let q = QuadratureSpec { scheme, points_per_axis: self.points_per_axis, target_rel_tol: self.target_rel_tol };
        q.validate()?;
        Ok(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub deltas: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BathStateConfig {
    #[default]
    Vacuum,
    Thermal(f64),
}

fn default_mode_count() -> usize {
    5
}

fn default_band() -> [f64; 2] {
    [0.5, 1.5]
}

fn default_mode_coupling() -> f64 {
    0.2
}

fn default_fock() -> usize {
    2
}

fn default_samples() -> usize {
    81
}

fn default_broadening() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_mode_count")]
    pub mode_count: usize,
    #[serde(default = "default_band")]
    pub band: [f64; 2],
    #[serde(default = "default_mode_coupling")]
    pub mode_coupling: f64,
    #[serde(default = "default_fock")]
    pub fock_cutoff: usize,
    /// Defaults to 0.8 of the recurrence guard.
    pub horizon: Option<f64>,
    #[serde(default = "default_samples")]
    pub sample_count: usize,
    #[serde(default)]
    pub bath_state: BathStateConfig,
    #[serde(default = "default_broadening")]
    pub broadening: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}

impl OracleSection {
    pub fn composite(&self, system: &SystemModel, lambda: f64) -> Result<CompositeModel> {
        if self.mode_count == 0 {
            return Err(Error::Validation { path: "oracle.mode_count".into(), reason: "must be positive".into() });
        }
        if !(self.band[0] > 0.0 && self.band[1] >= self.band[0]) {
            return Err(Error::Validation {
                path: "oracle.band".into(),
                reason: "must be positive and increasing".into(),
            });
        }
        let n = self.mode_count;
        let modes = (0..n)
            .map(|k| OracleMode {
                frequency: if n == 1 {
                    self.band[0]
                } else {
                    self.band[0] + (self.band[1] - self.band[0]) * k as f64 / (n - 1) as f64
                },
                coupling: self.mode_coupling,
                fock_cutoff: self.fock_cutoff,
            })
            .collect();
        let state = match self.bath_state {
            BathStateConfig::Vacuum => BathState::Vacuum,
            BathStateConfig::Thermal(t) => BathState::Thermal(t),
        };
        Ok(CompositeModel::new(system.clone(), modes, lambda, state))
    }

    pub fn config(&self, cm: &CompositeModel) -> Result<OracleConfig> {
        let horizon = self.horizon.unwrap_or(0.8 * cm.recurrence_guard());
        if !(horizon > 0.0) || self.sample_count < 2 {
            return Err(Error::Validation {
                path: "oracle.horizon".into(),
                reason: "horizon must be positive with at least two samples".into(),
            });
        }
        Ok(OracleConfig { horizon, sample_count: self.sample_count, recurrence_guard: true })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingName {
    #[default]
    LeadingOrder,
    FirstOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdpSection {
    pub epsilon: f64,
    pub a0: ComplexEntry,
    pub horizon: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub matching: MatchingName,
}

impl VdpSection {
    pub fn build(&self) -> Result<VdpConfig> {
        let mut cfg = VdpConfig::new(self.epsilon, self.a0.value());
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = t;
        }
        cfg.matching = match self.matching {
            MatchingName::LeadingOrder => Matching::LeadingOrder,
            MatchingName::FirstOrder => Matching::FirstOrder,
        };
        cfg.validate().map_err(|e| match e {
            Error::Validation { path, reason } => Error::Validation { path: format!("vdp.{path}"), reason },
            other => other,
        })?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub system: Option<SystemConfig>,
    pub bath: Option<BathConfig>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub evolution: Option<EvolutionSection>,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub seed: u64,
    pub sweep: Option<SweepSection>,
    pub oracle: Option<OracleSection>,
    pub vdp: Option<VdpSection>,
}

fn missing(path: &str) -> Error {
    Error::Validation { path: path.into(), reason: "required for this scenario".into() }
}

fn positive(value: Option<f64>, path: &str) -> Result<f64> {
    match value {
        Some(v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(_) => Err(Error::Validation { path: path.into(), reason: "must be positive and finite".into() }),
        None => Err(missing(path)),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn system_model(&self) -> Result<SystemModel> {
        self.system.as_ref().ok_or_else(|| missing("system"))?.build()
    }

    pub fn bath_spec(&self, model: &SystemModel) -> Result<BathSpec> {
        self.bath.as_ref().ok_or_else(|| missing("bath"))?.build(model.couplings().len())
    }

    pub fn delta(&self) -> Result<f64> {
        positive(self.delta, "delta")
    }

    pub fn lambda(&self) -> Result<f64> {
        match self.lambda {
            Some(l) if l >= 0.0 && l.is_finite() => Ok(l),
            Some(_) => Err(Error::Validation { path: "lambda".into(), reason: "must be non-negative".into() }),
            None => Err(missing("lambda")),
        }
    }

    pub fn deltas(&self) -> Result<Vec<f64>> {
        match self.sweep.as_ref().and_then(|s| s.deltas.clone()) {
            Some(ds) => {
                for (i, d) in ds.iter().enumerate() {
                    positive(Some(*d), &format!("sweep.deltas[{i}]"))?;
                }
                Ok(ds)
            }
            None => Ok(vec![self.delta()?]),
        }
    }

    pub fn lambdas(&self) -> Result<Vec<f64>> {
        match self.sweep.as_ref().and_then(|s| s.lambdas.clone()) {
            Some(ls) => {
                for (i, l) in ls.iter().enumerate() {
                    if !(*l >= 0.0) {
                        return Err(Error::Validation {
                            path: format!("sweep.lambdas[{i}]"),
                            reason: "must be non-negative".into(),
                        });
                    }
                }
                Ok(ls)
            }
            None => Ok(vec![self.lambda()?]),
        }
    }

    /// Checks everything the scenario will need, so that errors carry key
    /// paths before any computation starts.
    pub fn validate(&self) -> Result<()> {
        self.quadrature.build()?;
        match self.scenario {
            Scenario::Coefficients | Scenario::Evolve => {
                let m = self.system_model()?;
                self.bath_spec(&m)?;
                self.deltas()?;
                self.lambdas()?;
                if self.scenario == Scenario::Evolve {
                    let e = self.evolution.as_ref().ok_or_else(|| missing("evolution"))?;
                    e.sample_times()?;
                    e.initial_state.build(m.dimension())?;
                }
            }
            Scenario::SecularCompare => {
                let m = self.system_model()?;
                self.bath_spec(&m)?;
                self.lambda()?;
            }
            Scenario::OracleCompare => {
                let m = self.system_model()?;
                self.delta()?;
                let o = self.oracle.clone().unwrap_or_default();
                for l in self.lambdas()? {
                    let cm = o.composite(&m, l)?;
                    o.config(&cm)?;
                }
                if let Some(e) = &self.evolution {
                    e.initial_state.build(m.dimension())?;
                }
            }
            Scenario::RgDemo => {
                self.vdp.as_ref().ok_or_else(|| missing("vdp"))?.build()?;
            }
            Scenario::Audit => {}
        }
        Ok(())
    }

    /// Lowercase sha256 of the canonical JSON form, with output settings
    /// excluded so the hash depends only on what is computed.
    pub fn canonical_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output");
        }
        let text = serde_json::to_string(&value).expect("value serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::from_json(r#"{"scenario": "coefficients", "deltaa": 1.0}"#).unwrap_err();
        assert!(e.to_string().contains("deltaa"));
        let e = RunConfig::from_json(
            r#"{"scenario": "coefficients", "bath": {"kind": "delta_correlated", "gamma0": 1, "x": 2}}"#,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
    }

    #[test]
    fn hash_ignores_key_order_and_output() {
        let a = RunConfig::from_json(r#"{"scenario": "rg-demo", "vdp": {"epsilon": 0.1, "a0": 0.25}}"#).unwrap();
        let b = RunConfig::from_json(
            r#"{"vdp": {"a0": 0.25, "epsilon": 0.1}, "output": {"format": "json"}, "scenario": "rg-demo"}"#,
        )
        .unwrap();
        assert_eq!(a.canonical_hash(), b.canonical_hash());
        assert_eq!(a.canonical_hash().len(), 64);
    }

    #[test]
    fn complex_entries_and_custom_system() {
        let cfg = RunConfig::from_json(
            r#"{"scenario": "coefficients", "delta": 1, "lambda": 0.1,
                "system": {"model": "custom", "hamiltonian": [[0.5, 0], [0, -0.5]],
                           "couplings": [{"label": "y", "matrix": [[0, [0, -1]], [[0, 1], 0]]}]},
                "bath": {"kind": "delta_correlated", "gamma0": 0.5}}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        let m = cfg.system_model().unwrap();
        assert_eq!(m.couplings()[0][(0, 1)], C64::new(0.0, -1.0));
    }

    #[test]
    fn validation_names_the_key_path() {
        let cfg = RunConfig::from_json(
            r#"{"scenario": "coefficients", "delta": 1, "lambda": 0.1,
                "system": {"model": "custom", "hamiltonian": [[0, 1], [0, 0]],
                           "couplings": [{"label": "x", "matrix": [[0, 1], [1, 0]]}]},
                "bath": {"kind": "delta_correlated", "gamma0": 0.5}}"#,
        )
        .unwrap();
        match cfg.validate().unwrap_err() {
            Error::Validation { path, .. } => assert_eq!(path, "system.hamiltonian"),
            e => panic!("unexpected {e}"),
        }
        let cfg = RunConfig::from_json(
            r#"{"scenario": "evolve", "delta": -1, "lambda": 0.1, "system": {"model": "static_qubit"},
                "bath": {"kind": "delta_correlated", "gamma0": 0.5}, "evolution": {"times": [0, 1]}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.validate().unwrap_err(), Error::Validation { path, .. } if path == "delta"));
    }

    #[test]
    fn cross_structure_forms() {
        for (cross, ok) in
            [(r#""shared""#, true), (r#"[[1, 0.3], [0.3, 1]]"#, true), (r#"[[1, 0.3], [0.1, 1]]"#, false)]
        {
            let text = format!(
                r#"{{"scenario": "coefficients", "delta": 1, "lambda": 0.1, "system": {{"model": "qutrit"}},
                    "bath": {{"kind": "ohmic_thermal", "eta": 1, "cutoff": 5, "temperature": 0, "cross": {cross}}}}}"#
            );
            let cfg = RunConfig::from_json(&text).unwrap();
            assert_eq!(cfg.validate().is_ok(), ok, "{cross}");
        }
    }
}
