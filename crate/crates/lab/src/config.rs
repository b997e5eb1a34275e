//! Versioned scenario configuration files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use uai_core::config::{EnvRef, JointRef, MixtureSpec, PolicyRef};
use uai_core::Prob;

use crate::error::LabError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedJoint {
    pub name: String,
    pub component: JointRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedEnv {
    pub name: String,
    pub component: EnvRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoringCase {
    pub name: String,
    pub envs: MixtureSpec<EnvRef>,
    pub policies: MixtureSpec<PolicyRef>,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumGrid {
    pub l: Vec<u32>,
    pub s: Vec<u64>,
    pub depth: usize,
    pub chron_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumSweep {
    pub l: Vec<u32>,
    pub s: u64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceCase {
    pub name: String,
    pub component: JointRef,
    pub actions: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbePair {
    pub name: String,
    pub chron: EnvRef,
    pub joint: JointRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentPair {
    pub name: String,
    pub joint: JointRef,
    pub chron: EnvRef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case", deny_unknown_fields)]
pub enum Params {
    SanityChecks {
        depth: usize,
        roundtrip_steps: usize,
        predictive_steps: usize,
        joint: Vec<NamedJoint>,
        chron: Vec<NamedEnv>,
        factoring: Vec<FactoringCase>,
        enumeration: EnumGrid,
    },
    Thm7Drop {
        joint: NamedJoint,
        steps: usize,
        threshold: Prob,
        enumeration: EnumSweep,
    },
    Thm8Gap {
        joint: NamedJoint,
        chron: NamedEnv,
        steps: usize,
        threshold: Prob,
        check_steps: usize,
    },
    Thm10Normalized {
        cases: Vec<TraceCase>,
    },
    Thm11Convergence {
        joint: NamedJoint,
        truth: Vec<NamedEnv>,
        length: usize,
        epsilon: Prob,
    },
    Conj9Search {
        steps: usize,
        pairs: Vec<ProbePair>,
        env_ratio: Vec<NamedJoint>,
    },
    AgentsCompare {
        history_steps: usize,
        horizons: Vec<usize>,
        pairs: Vec<AgentPair>,
    },
}

impl Params {
    pub fn scenario(&self) -> &'static str {
        match self {
            Params::SanityChecks { .. } => "sanity_checks",
            Params::Thm7Drop { .. } => "thm7_drop",
            Params::Thm8Gap { .. } => "thm8_gap",
            Params::Thm10Normalized { .. } => "thm10_normalized",
            Params::Thm11Convergence { .. } => "thm11_convergence",
            Params::Conj9Search { .. } => "conj9_search",
            Params::AgentsCompare { .. } => "agents_compare",
        }
    }
}

/// A scenario file: `{"version": 1, "scenario": "<name>", ...}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub version: u32,
    pub params: Params,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| LabError::Config(format!("not valid JSON: {e}")))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| LabError::Config("top level must be an object".into()))?;
        let version = obj
            .remove("version")
            .ok_or_else(|| LabError::Config("missing field `version`".into()))?
            .as_u64()
            .ok_or_else(|| LabError::Config("`version` must be an integer".into()))?;
        if version != CONFIG_VERSION as u64 {
            return Err(LabError::Config(format!("unsupported version {version}, expected {CONFIG_VERSION}")));
        }
        if let Some(name) = obj.get("scenario").and_then(|s| s.as_str()) {
            if !crate::SCENARIOS.contains(&name) {
                return Err(LabError::UnknownScenario(name.to_string()));
            }
        }
        let params: Params = serde_json::from_value(value).map_err(|e| LabError::Config(e.to_string()))?;
        Ok(ScenarioConfig { version: CONFIG_VERSION, params })
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(&self.params).expect("serializable");
        let obj = value.as_object_mut().expect("tagged enum");
        let mut out = serde_json::Map::new();
        out.insert("version".into(), self.version.into());
        out.append(obj);
        serde_json::to_string_pretty(&serde_json::Value::Object(out)).expect("serializable")
    }

    /// The shipped configuration of a scenario.
    pub fn default_for(name: &str) -> Result<Self, LabError> {
        let text = match name {
            "sanity_checks" => include_str!("../configs/sanity_checks.json"),
            "thm7_drop" => include_str!("../configs/thm7_drop.json"),
            "thm8_gap" => include_str!("../configs/thm8_gap.json"),
            "thm10_normalized" => include_str!("../configs/thm10_normalized.json"),
            "thm11_convergence" => include_str!("../configs/thm11_convergence.json"),
            "conj9_search" => include_str!("../configs/conj9_search.json"),
            "agents_compare" => include_str!("../configs/agents_compare.json"),
            other => return Err(LabError::UnknownScenario(other.to_string())),
        };
        Self::from_json(text)
    }
}
