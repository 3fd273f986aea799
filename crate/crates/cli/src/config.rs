use std::path::{Path, PathBuf};

use mpemba_core::davies::{BathStatistics, DaviesModel, DegeneracyPolicy};
use mpemba_core::distances::DistanceMeasure;
use mpemba_core::evolution::{default_grid, geometric_grid};
use mpemba_core::linops::ComplexOperator;
use mpemba_core::models::{
    build_chain, davies_from_hamiltonian, two_level_model, two_level_probe, uniform_superposition_probe,
    BathConfig, SpinChainConfig, TwoLevelConfig, DEFAULT_SITE_CAP,
};
use mpemba_core::davies::LiouvillianSpectrum;
use mpemba_core::protocol::{DressingMode, PermutationSpec};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub protocol: ProtocolSection,
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub measures: MeasuresSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    TwoLevel,
    Tfi,
    Xxz,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
    /// Two-level energies.
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub sites: Option<usize>,
    pub j: Option<f64>,
    pub h: Option<f64>,
    pub delta: Option<f64>,
    pub site_cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistics {
    Bose,
    Fermi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Error,
    SkipPair,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub temperature: f64,
    #[serde(default = "one")]
    pub k_b: f64,
    #[serde(default = "bose")]
    pub statistics: Statistics,
    #[serde(default = "skip_pair")]
    pub degeneracy_policy: Policy,
}

fn one() -> f64 {
    1.0
}
fn bose() -> Statistics {
    Statistics::Bose
}
fn skip_pair() -> Policy {
    Policy::SkipPair
}

impl Default for BathSection {
    fn default() -> Self {
        Self { gamma: 1.0, temperature: 1.0, k_b: 1.0, statistics: Statistics::Bose, degeneracy_policy: Policy::SkipPair }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PermutationChoice {
    Mode(String),
    /// One-based images `π(1), …, π(d)`.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Two-level: the `Λ diag(0,1) Λ†` probe; chains: uniform superposition.
    Default,
    UniformSuperposition,
    SteadyState,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    #[serde(default = "canonical")]
    pub permutation: PermutationChoice,
    #[serde(default = "default_probe")]
    pub probe: ProbeKind,
    /// Refuse to run when the slowest mode is not a coherence mode.
    #[serde(default)]
    pub require_coherence_gap: bool,
}

fn canonical() -> PermutationChoice {
    PermutationChoice::Mode("canonical".into())
}
fn default_probe() -> ProbeKind {
    ProbeKind::Default
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self { permutation: canonical(), probe: ProbeKind::Default, require_coherence_gap: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "geometric")]
    pub spacing: Spacing,
}

fn geometric() -> Spacing {
    Spacing::Geometric
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuresSection {
    #[serde(default = "all_measures")]
    pub include: Vec<String>,
}

fn all_measures() -> Vec<String> {
    DistanceMeasure::ALL.iter().map(|m| m.name().to_string()).collect()
}

impl Default for MeasuresSection {
    fn default() -> Self {
        Self { include: all_measures() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "dot")]
    pub directory: PathBuf,
    #[serde(default = "trajectory_name")]
    pub trajectory: String,
    #[serde(default = "report_name")]
    pub report: String,
    #[serde(default = "spectrum_name")]
    pub spectrum: String,
    #[serde(default = "suppression_name")]
    pub suppression: String,
}

fn dot() -> PathBuf {
    PathBuf::from(".")
}
fn trajectory_name() -> String {
    "trajectory.csv".into()
}
fn report_name() -> String {
    "report.txt".into()
}
fn spectrum_name() -> String {
    "spectrum.csv".into()
}
fn suppression_name() -> String {
    "suppression.csv".into()
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: dot(),
            trajectory: trajectory_name(),
            report: report_name(),
            spectrum: spectrum_name(),
            suppression: suppression_name(),
        }
    }
}

impl OutputSection {
    pub fn path(&self, name: &str) -> PathBuf {
        self.directory.join(name)
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be a positive finite number, got {v}")))
    }
}

fn require<T: Copy>(name: &str, v: Option<T>) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("model.{name} is required for this model kind")))
}

fn forbid<T>(kind: &str, name: &str, v: &Option<T>) -> Result<(), CliError> {
    match v {
        Some(_) => Err(CliError::Config(format!("model.{name} does not apply to kind '{kind}'"))),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("bath.gamma", self.bath.gamma)?;
        positive("bath.temperature", self.bath.temperature)?;
        positive("bath.k_b", self.bath.k_b)?;
        let m = &self.model;
        match m.kind {
            ModelKind::TwoLevel => {
                forbid("two_level", "sites", &m.sites)?;
                forbid("two_level", "site_cap", &m.site_cap)?;
                for (name, v) in [("j", &m.j), ("h", &m.h), ("delta", &m.delta)] {
                    forbid("two_level", name, v)?;
                }
            }
            ModelKind::Tfi => {
                forbid("tfi", "eps1", &m.eps1)?;
                forbid("tfi", "eps2", &m.eps2)?;
                forbid("tfi", "delta", &m.delta)?;
                require("sites", m.sites)?;
            }
            ModelKind::Xxz => {
                forbid("xxz", "eps1", &m.eps1)?;
                forbid("xxz", "eps2", &m.eps2)?;
                forbid("xxz", "h", &m.h)?;
                require("sites", m.sites)?;
            }
        }
        if let Some(j) = m.j {
            positive("model.j", j)?;
        }
        if let Some(g) = &self.grid {
            if g.points < 2 {
                return Err(CliError::Config("grid.points must be at least 2".into()));
            }
            positive("grid.stop", g.stop)?;
            match g.spacing {
                Spacing::Geometric => positive("grid.start", g.start)?,
                Spacing::Linear if !(g.start >= 0.0) => {
                    return Err(CliError::Config(format!("grid.start must be >= 0, got {}", g.start)));
                }
                Spacing::Linear => {}
            }
            if !(g.stop > g.start) {
                return Err(CliError::Config("grid.stop must exceed grid.start".into()));
            }
        }
        self.measures()?;
        if let PermutationChoice::Mode(s) = &self.protocol.permutation {
            s.parse::<DressingMode>().map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn measures(&self) -> Result<Vec<DistanceMeasure>, CliError> {
        if self.measures.include.is_empty() {
            return Err(CliError::Config("measures.include is empty".into()));
        }
        let mut out = Vec::new();
        for name in &self.measures.include {
            let m: DistanceMeasure = name.parse().map_err(|e: mpemba_core::Error| CliError::Config(e.to_string()))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn bath(&self) -> BathConfig {
        BathConfig {
            gamma: self.bath.gamma,
            temperature: self.bath.temperature,
            k_b: self.bath.k_b,
            statistics: match self.bath.statistics {
                Statistics::Bose => BathStatistics::Bose,
                Statistics::Fermi => BathStatistics::Fermi,
            },
            degeneracy_policy: match self.bath.degeneracy_policy {
                Policy::Error => DegeneracyPolicy::Error,
                Policy::SkipPair => DegeneracyPolicy::SkipPair,
            },
        }
    }

    pub fn two_level(&self) -> TwoLevelConfig {
        TwoLevelConfig { eps1: self.model.eps1.unwrap_or(1.0), eps2: self.model.eps2.unwrap_or(0.0), bath: self.bath() }
    }

    fn chain(&self) -> SpinChainConfig {
        let m = &self.model;
        let sites = m.sites.unwrap_or(1);
        let j = m.j.unwrap_or(1.0);
        let mut cfg = match m.kind {
            ModelKind::Xxz => SpinChainConfig::xxz(sites, j, m.delta.unwrap_or(0.5)),
            _ => SpinChainConfig::tfi(sites, j, m.h.unwrap_or(0.5)),
        };
        cfg.site_cap = m.site_cap.unwrap_or(DEFAULT_SITE_CAP);
        cfg
    }

    pub fn build_model(&self) -> Result<DaviesModel, CliError> {
        let model = match self.model.kind {
            ModelKind::TwoLevel => two_level_model(&self.two_level())?,
            ModelKind::Tfi | ModelKind::Xxz => {
                let h = build_chain(&self.chain())?;
                davies_from_hamiltonian(&h, &self.bath())?
            }
        };
        Ok(model)
    }

    pub fn probe(&self, model: &DaviesModel, spectrum: &LiouvillianSpectrum) -> ComplexOperator {
        match (self.protocol.probe, self.model.kind) {
            (ProbeKind::SteadyState, _) => spectrum.steady_state(),
            (ProbeKind::Default, ModelKind::TwoLevel) => two_level_probe(),
            _ => uniform_superposition_probe(model.spectrum()),
        }
    }

    /// Explicit permutation, or the named dressing mode.
    pub fn permutation(&self) -> Result<Result<PermutationSpec, DressingMode>, CliError> {
        match &self.protocol.permutation {
            PermutationChoice::Mode(s) => Ok(Err(s.parse().map_err(|e: mpemba_core::Error| CliError::Config(e.to_string()))?)),
            PermutationChoice::Explicit(list) => Ok(Ok(PermutationSpec::from_one_based(list)?)),
        }
    }

    pub fn grid(&self, spectrum: &LiouvillianSpectrum) -> Result<Vec<f64>, CliError> {
        let Some(g) = &self.grid else {
            return Ok(default_grid(spectrum)?);
        };
        let grid = match g.spacing {
            Spacing::Geometric => geometric_grid(1.0, g.points, g.start, g.stop)?,
            Spacing::Linear => {
                let (head, n, start) = if g.start > 0.0 { (vec![0.0], g.points - 1, g.start) } else { (vec![], g.points, 0.0) };
                let step = if n > 1 { (g.stop - start) / (n - 1) as f64 } else { 0.0 };
                head.into_iter().chain((0..n).map(|i| start + step * i as f64)).collect()
            }
        };
        Ok(grid)
    }
}
