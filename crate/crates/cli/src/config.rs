//! JSON run configuration.
//!
//! ```json
//! {
//!   "group": "su2",
//!   "E0": [[1,0,0],[0,1,0],[0,0,1]],
//!   "S0": [[1,0,0],[0,1,0],[0,0,1]],
//!   "coeffs": {"a": 0.5, "b": 1.0},
//!   "dt": 0.001,
//!   "t_end": 1.0,
//!   "monitors": ["state", "hamiltonian", "constraint", "torsion"],
//!   "stop": {"min_detE": 1e-9, "max_norm": 1e9},
//!   "seed": 0
//! }
//! ```
//!
//! `group` is a preset name or `{"name": "...", "constants": c}` with
//! `c[i][j][k] = c^i_{jk}`.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use g2flow::flow::{HamiltonianCoeffs, IntegrationConfig, StopConditions};
use g2flow::{FlowState, Mat3, StructureConstants};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(String),
    Custom { name: Option<String>, constants: [[[f64; 3]; 3]; 3] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monitor {
    State,
    Hamiltonian,
    Constraint,
    Torsion,
    Adm,
}

impl Monitor {
    pub const DEFAULT: [Monitor; 4] = [Monitor::State, Monitor::Hamiltonian, Monitor::Constraint, Monitor::Torsion];

    pub fn name(self) -> &'static str {
        match self {
            Monitor::State => "state",
            Monitor::Hamiltonian => "hamiltonian",
            Monitor::Constraint => "constraint",
            Monitor::Torsion => "torsion",
            Monitor::Adm => "adm",
        }
    }
}

impl fmt::Display for Monitor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Monitor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "state" => Ok(Monitor::State),
            "hamiltonian" => Ok(Monitor::Hamiltonian),
            "constraint" => Ok(Monitor::Constraint),
            "torsion" => Ok(Monitor::Torsion),
            "adm" => Ok(Monitor::Adm),
            other => Err(format!("unknown monitor `{other}` (expected state, hamiltonian, constraint, torsion, adm)")),
        }
    }
}

pub type MonitorSet = BTreeSet<Monitor>;

/// Parses a comma-separated monitor list such as `state,torsion`.
pub fn parse_monitors(list: &str) -> Result<MonitorSet, String> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_b")]
    pub b: f64,
}

fn default_a() -> f64 {
    HamiltonianCoeffs::default().a
}

fn default_b() -> f64 {
    HamiltonianCoeffs::default().b
}

impl Default for CoeffSpec {
    fn default() -> Self {
        CoeffSpec { a: default_a(), b: default_b() }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    #[serde(rename = "min_detE", default = "default_min_det")]
    pub min_det_e: f64,
    #[serde(default = "default_max_norm")]
    pub max_norm: f64,
}

fn default_min_det() -> f64 {
    StopConditions::default().min_det_e
}

fn default_max_norm() -> f64 {
    StopConditions::default().max_norm
}

impl Default for StopSpec {
    fn default() -> Self {
        StopSpec { min_det_e: default_min_det(), max_norm: default_max_norm() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupSpec,
    #[serde(rename = "E0")]
    pub e0: [[f64; 3]; 3],
    #[serde(rename = "S0")]
    pub s0: [[f64; 3]; 3],
    #[serde(default)]
    pub coeffs: CoeffSpec,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_monitors")]
    pub monitors: Vec<Monitor>,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default)]
    pub seed: u64,
}

fn default_monitors() -> Vec<Monitor> {
    Monitor::DEFAULT.to_vec()
}

/// A validated configuration ready to integrate.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub constants: StructureConstants,
    pub initial: FlowState,
    pub integration: IntegrationConfig,
    pub monitors: MonitorSet,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn constants(&self) -> CliResult<StructureConstants> {
        match &self.group {
            GroupSpec::Preset(name) => {
                StructureConstants::from_name(name).map_err(|e| CliError::field("group", e.to_string()))
            }
            GroupSpec::Custom { name, constants } => {
                let c = StructureConstants::new(*constants)
                    .map_err(|e| CliError::field("group.constants", e.to_string()))?;
                Ok(match name {
                    Some(n) => c.with_name(n),
                    None => c,
                })
            }
        }
    }

    pub fn prepare(&self) -> CliResult<Prepared> {
        positive("dt", self.dt)?;
        positive("t_end", self.t_end)?;
        positive("stop.max_norm", self.stop.max_norm)?;
        if !(self.stop.min_det_e >= 0.0) {
            return Err(CliError::field("stop.min_detE", format!("must be non-negative, got {}", self.stop.min_det_e)));
        }
        finite_matrix("E0", &self.e0)?;
        finite_matrix("S0", &self.s0)?;
        if !(self.coeffs.a.is_finite() && self.coeffs.b.is_finite()) {
            return Err(CliError::field("coeffs", "coefficients must be finite"));
        }
        let constants = self.constants()?;
        let e = Mat3::new(self.e0);
        let s = Mat3::new(self.s0);
        if !s.is_symmetric(1e-12 * (1.0 + s.max_abs())) {
            return Err(CliError::field("S0", format!("must be symmetric (asymmetry {:.3e})", s.asymmetry())));
        }
        if !(e.det() > 0.0) {
            return Err(CliError::field("E0", format!("must have positive determinant, got {}", e.det())));
        }
        let initial = FlowState::new(e, s).map_err(|err| CliError::field("E0/S0", err.to_string()))?;
        let integration = IntegrationConfig {
            dt: self.dt,
            t_end: self.t_end,
            coeffs: HamiltonianCoeffs::new(self.coeffs.a, self.coeffs.b),
            stop: StopConditions { min_det_e: self.stop.min_det_e, max_norm: self.stop.max_norm },
        };
        Ok(Prepared {
            constants,
            initial,
            integration,
            monitors: self.monitors.iter().copied().collect(),
            seed: self.seed,
        })
    }
}

fn positive(field: &'static str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::field(field, format!("must be positive and finite, got {v}")))
    }
}

fn finite_matrix(field: &'static str, m: &[[f64; 3]; 3]) -> CliResult<()> {
    if m.iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::field(field, "entries must be finite"))
    }
}
