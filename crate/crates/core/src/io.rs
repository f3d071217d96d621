// SPDX-License-Identifier: Apache-2.0

//! TOML network files and analysis reports.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::centrality::CentralityReport;
use crate::classify::{AgentClassification, AgentParams};
use crate::dynamics::{ConvergenceVerdict, SimulationOptions, SinkSpectrum, SteadyState};
use crate::error::Error;
use crate::graph::{Edge, SignedNetwork};
use crate::influence::InfluenceMatrix;
use crate::mason::{CollectiveInfluence, MasonLimits};

pub const SCHEMA_VERSION: u32 = 1;
const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug)]
pub enum FileError {
    Io(String, std::io::Error),
    Parse(String),
    Invalid(Error),
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FileError::Io(path, e) => write!(f, "{path}: {e}"),
            FileError::Parse(msg) => write!(f, "malformed input: {msg}"),
            FileError::Invalid(e) => write!(f, "invalid network: {e}"),
        }
    }
}

impl std::error::Error for FileError {}

impl From<Error> for FileError {
    fn from(e: Error) -> Self {
        FileError::Invalid(e)
    }
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|e| FileError::Io(path.display().to_string(), e))
}

/// On-disk network description. Omitted `beta` means no stubborn agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<Edge>,
    pub gamma: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl NetworkFile {
    pub fn from_toml_str(s: &str) -> Result<Self, FileError> {
        toml::from_str(s).map_err(|e| FileError::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FileError> {
        Self::from_toml_str(&read(path.as_ref())?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("network files always serialise")
    }

    pub fn network(&self) -> Result<SignedNetwork, Error> {
        let edges: Vec<(usize, usize, f64)> = self.edges.iter().map(|e| (e.from, e.to, e.weight)).collect();
        SignedNetwork::new(self.n, &edges)
    }

    pub fn params(&self) -> Result<AgentParams, Error> {
        if self.gamma.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "gamma",
                expected: self.n,
                got: self.gamma.len(),
            });
        }
        let beta = self.beta.clone().unwrap_or_else(|| vec![0.0; self.n]);
        if beta.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "beta",
                expected: self.n,
                got: beta.len(),
            });
        }
        AgentParams::new(self.gamma.clone(), beta)
    }

    pub fn initial_opinions(&self) -> Option<Result<Vec<f64>, Error>> {
        let x0 = self.x0.as_ref()?;
        if x0.len() != self.n {
            return Some(Err(Error::LengthMismatch {
                what: "x0",
                expected: self.n,
                got: x0.len(),
            }));
        }
        Some(Ok(x0.clone()))
    }

    pub fn label(&self, agent: usize) -> String {
        match &self.labels {
            Some(l) if agent < l.len() => l[agent].clone(),
            _ => agent.to_string(),
        }
    }
}

/// `x` rounded to twelve significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(round_sig).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub n: usize,
    pub edge_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinkReport {
    pub id: usize,
    pub members: Vec<usize>,
    pub kind: String,
    pub has_stubborn: bool,
    pub influence_free: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub followers: Vec<usize>,
    pub singleton_leaders: Vec<usize>,
    pub group_leaders: Vec<usize>,
    pub stubborn: Vec<usize>,
    pub influence_free_sinks: Vec<usize>,
    pub sinks: Vec<SinkReport>,
}

impl ClassificationReport {
    pub fn new(c: &AgentClassification) -> Self {
        let sinks = c
            .sinks
            .iter()
            .enumerate()
            .map(|(id, s)| SinkReport {
                id,
                members: s.members.clone(),
                kind: format!("{:?}", s.kind),
                has_stubborn: s.has_stubborn,
                influence_free: c.is_influence_free(id),
                sigma: s.sigma.as_ref().map(|v| v.iter().map(|x| x.value() as i64).collect()),
            })
            .collect();
        Self {
            followers: c.followers.clone(),
            singleton_leaders: c.singleton_leaders.clone(),
            group_leaders: c.group_leaders.clone(),
            stubborn: c.stubborn.clone(),
            influence_free_sinks: c.influence_free_sinks.clone(),
            sinks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub kind: String,
    pub spectral_radius_estimate: f64,
    pub estimate_settled: bool,
    pub unit_eigen_count: usize,
}

impl ConvergenceReport {
    pub fn new(v: &ConvergenceVerdict) -> Self {
        Self {
            kind: format!("{:?}", v.kind),
            spectral_radius_estimate: round_sig(v.spectral_radius_estimate),
            estimate_settled: v.estimate_settled,
            unit_eigen_count: v.unit_eigen_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub sink: usize,
    pub members: Vec<usize>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl SpectrumReport {
    pub fn new(s: &SinkSpectrum) -> Self {
        Self {
            sink: s.sink,
            members: s.members.clone(),
            w: rounded(&s.w),
            v: rounded(&s.v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    pub method: String,
    pub z: Vec<f64>,
    pub z_o: Vec<f64>,
    pub z_s: Vec<f64>,
}

impl SteadyStateReport {
    pub fn new(s: &SteadyState) -> Self {
        Self {
            method: format!("{:?}", s.method),
            z: rounded(&s.z),
            z_o: rounded(&s.z_o),
            z_s: rounded(&s.z_s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub gain_method: String,
    /// Row agents of `collective`.
    pub collective_agents: Vec<usize>,
    pub sources: Vec<String>,
    pub collective: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
}

impl InfluenceReport {
    pub fn new(c: &CollectiveInfluence, theta: &InfluenceMatrix) -> Self {
        let rows = |m: &nalgebra::DMatrix<f64>| {
            m.row_iter()
                .map(|r| r.iter().copied().map(round_sig).collect())
                .collect()
        };
        Self {
            gain_method: format!("{:?}", c.method),
            collective_agents: c.agents.clone(),
            sources: c.sources.iter().map(|s| s.to_string()).collect(),
            collective: rows(&c.values),
            theta: rows(&theta.theta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralitySection {
    pub scores: Vec<f64>,
    pub ranking: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub most_influential: Option<usize>,
}

impl CentralitySection {
    pub fn new(c: &CentralityReport) -> Self {
        Self {
            scores: rounded(&c.scores),
            ranking: c.ranking.clone(),
            most_influential: c.most_influential,
        }
    }
}

/// Settings that produced a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub simulation_tol: f64,
    pub max_iters: usize,
    pub max_enumerated_objects: usize,
    pub max_loop_subsets: usize,
    pub significant_digits: usize,
}

impl Provenance {
    pub fn new(sim: &SimulationOptions, limits: &MasonLimits) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            simulation_tol: sim.tol,
            max_iters: sim.max_iters,
            max_enumerated_objects: limits.max_objects,
            max_loop_subsets: limits.max_subsets,
            significant_digits: SIGNIFICANT_DIGITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub network: NetworkSummary,
    pub provenance: Provenance,
    pub classification: ClassificationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectrumReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_state: Option<SteadyStateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influence: Option<InfluenceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centrality: Option<CentralitySection>,
}

impl AnalysisReport {
    pub fn new(network: &SignedNetwork, classification: &AgentClassification, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            network: NetworkSummary {
                n: network.n(),
                edge_count: network.edge_count(),
            },
            provenance,
            classification: ClassificationReport::new(classification),
            convergence: None,
            spectra: Vec::new(),
            steady_state: None,
            influence: None,
            centrality: None,
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("reports always serialise")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, FileError> {
        toml::from_str(s).map_err(|e| FileError::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FileError> {
        Self::from_toml_str(&read(path.as_ref())?)
    }
}

/// Parses any TOML document into a value tree.
pub fn load_value(path: impl AsRef<Path>) -> Result<toml::Value, FileError> {
    let text = read(path.as_ref())?;
    text.parse::<toml::Table>()
        .map(toml::Value::Table)
        .map_err(|e| FileError::Parse(e.to_string()))
}

/// Differences between two value trees; numbers match within
/// `atol + rtol·max(|a|, |b|)`.
pub fn diff_values(a: &toml::Value, b: &toml::Value, rtol: f64, atol: f64) -> Vec<String> {
    let mut out = Vec::new();
    diff_at("", a, b, rtol, atol, &mut out);
    out
}

fn number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn diff_at(path: &str, a: &toml::Value, b: &toml::Value, rtol: f64, atol: f64, out: &mut Vec<String>) {
    use toml::Value;
    let here = if path.is_empty() { "<root>" } else { path };
    match (a, b) {
        (Value::Table(x), Value::Table(y)) => {
            for (k, va) in x {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                match y.get(k) {
                    Some(vb) => diff_at(&p, va, vb, rtol, atol, out),
                    None => out.push(format!("{p}: only in left")),
                }
            }
            for k in y.keys().filter(|k| !x.contains_key(*k)) {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                out.push(format!("{p}: only in right"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{here}: length {} vs {}", x.len(), y.len()));
                return;
            }
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                diff_at(&format!("{path}[{i}]"), va, vb, rtol, atol, out);
            }
        }
        _ => match (number(a), number(b)) {
            (Some(x), Some(y)) => {
                let same = (x.is_nan() && y.is_nan()) || x == y || (x - y).abs() <= atol + rtol * x.abs().max(y.abs());
                if !same {
                    out.push(format!("{here}: {x} vs {y}"));
                }
            }
            _ if a != b => out.push(format!("{here}: {a} vs {b}")),
            _ => {}
        },
    }
}
