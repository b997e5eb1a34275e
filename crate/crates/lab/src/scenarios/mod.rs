//! Scenario runners. Each fills an [`Outcome`] without touching disk.

mod agents;
mod learning;
mod probes;
mod sanity;
mod traces;

use uai_core::config::{BuildCtx, EnvBuiltin, EnvRef, JointRef};
use uai_core::semimeasure::table::{table_component, TableComponent, TableSpec};
use uai_core::{Action, Prob, SharedJoint};

use crate::config::{Params, ScenarioConfig};
use crate::error::LabError;
use crate::output::Outcome;

pub use sanity::{builtin_chron, builtin_joint};

pub fn execute(cfg: &ScenarioConfig, ctx: &BuildCtx) -> Result<Outcome, LabError> {
    let mut out = Outcome::new(cfg.params.scenario());
    let p = &cfg.params;
    match p {
        Params::SanityChecks { .. } => sanity::run(p, ctx, &mut out)?,
        Params::Thm7Drop { .. } => traces::run_drop(p, ctx, &mut out)?,
        Params::Thm8Gap { .. } => traces::run_gap(p, ctx, &mut out)?,
        Params::Thm10Normalized { .. } => traces::run_normalized(p, ctx, &mut out)?,
        Params::Thm11Convergence { .. } => learning::run(p, ctx, &mut out)?,
        Params::Conj9Search { .. } => probes::run(p, ctx, &mut out)?,
        Params::AgentsCompare { .. } => agents::run(p, ctx, &mut out)?,
    }
    Ok(out)
}

pub type NamedRefs = (Vec<(String, JointRef)>, Vec<(String, EnvRef)>);

/// Named joint and chronological components of the shipped scenarios,
/// deduplicated by name in first-seen order. Enumeration pairs are left out.
pub fn scenario_components() -> Result<NamedRefs, LabError> {
    let mut joint: Vec<(String, JointRef)> = Vec::new();
    let mut chron: Vec<(String, EnvRef)> = Vec::new();
    fn add<T: Clone>(list: &mut Vec<(String, T)>, name: &str, r: &T) {
        if !list.iter().any(|(n, _)| n == name) {
            list.push((name.to_string(), r.clone()));
        }
    }
    for name in crate::SCENARIOS {
        match ScenarioConfig::default_for(name)?.params {
            Params::SanityChecks { joint: j, chron: c, .. } => {
                j.iter().for_each(|x| add(&mut joint, &x.name, &x.component));
                c.iter().for_each(|x| add(&mut chron, &x.name, &x.component));
            }
            Params::Thm7Drop { joint: j, .. } => add(&mut joint, &j.name, &j.component),
            Params::Thm8Gap { joint: j, chron: c, .. } => {
                add(&mut joint, &j.name, &j.component);
                add(&mut chron, &c.name, &c.component);
            }
            Params::Thm10Normalized { cases } => cases.iter().for_each(|x| add(&mut joint, &x.name, &x.component)),
            Params::Thm11Convergence { joint: j, .. } => add(&mut joint, &j.name, &j.component),
            Params::Conj9Search { pairs, env_ratio, .. } => {
                for p in pairs.iter().filter(|p| !matches!(p.chron, EnvRef::Enumeration { .. })) {
                    add(&mut joint, &format!("{}_joint", p.name), &p.joint);
                    add(&mut chron, &format!("{}_chron", p.name), &p.chron);
                }
                env_ratio.iter().for_each(|x| add(&mut joint, &x.name, &x.component));
            }
            Params::AgentsCompare { pairs, .. } => {
                for p in &pairs {
                    add(&mut joint, &format!("{}_joint", p.name), &p.joint);
                    add(&mut chron, &format!("{}_chron", p.name), &p.chron);
                }
            }
        }
    }
    Ok((joint, chron))
}

/// The next symbol repeats the previous one with probability 3/4.
pub fn markov_table() -> SharedJoint {
    let spec: TableSpec = serde_json::from_str(
        r#"{"kind": "joint", "name": "markov_3_4", "matching": "suffix", "declared_measure": true,
            "default_rule": "uniform",
            "conditionals": [
              {"context": [0], "probs": ["3/4", "1/4"]},
              {"context": [1], "probs": ["1/4", "3/4"]}
            ]}"#,
    )
    .expect("static table");
    match table_component(&spec).expect("valid table") {
        TableComponent::Joint(j) => j,
        TableComponent::Chron(_) => unreachable!("joint table"),
    }
}

/// Total prior weight of the echo environment in a chronological mixture.
pub(crate) fn weight_of_identity(r: &EnvRef) -> Option<Prob> {
    let EnvRef::Mixture(m) = r else { return None };
    let weights = m.weights().ok()?;
    let total: Prob = weights
        .iter()
        .zip(&m.components)
        .filter(|(_, c)| matches!(c.component, EnvRef::Builtin(EnvBuiltin::MuId)))
        .map(|(w, _)| w.clone())
        .sum();
    (!total.is_zero()).then_some(total)
}

/// Every binary action sequence of length `n`, lexicographic.
pub(crate) fn binary_actions(n: usize) -> Vec<Vec<Action>> {
    (0u64..1 << n)
        .map(|c| (0..n).rev().map(|i| Action(((c >> i) & 1) as u32)).collect())
        .collect()
}

/// The joint mixture a reference denotes, when it is one.
pub(crate) fn as_mixture(r: &JointRef, ctx: &BuildCtx) -> Result<Option<uai_core::mixture::JointMixture>, LabError> {
    match r {
        JointRef::Mixture(m) => Ok(Some(uai_core::config::build_joint_mixture(m, ctx)?)),
        _ => Ok(None),
    }
}
