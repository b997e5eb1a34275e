//! JSON references to components, used by scenario files.
//!
//! ```json
//! {"mixture": {"components": [
//!   {"weight": "1/2", "component": {"builtin": {"name": "copy"}}},
//!   {"weight": "1/2", "component": {"chron_to_joint": {"env": {"builtin": {"name": "mu_id"}}}}}
//! ]}}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::mixture::{EnvMixture, JointMixture, PolicyMixture, Prior};
use crate::prob::Prob;
use crate::semimeasure::builtin::*;
use crate::semimeasure::table::{ChronTable, JointTable, TableSpec};
use crate::semimeasure::{SharedEnv, SharedJoint, SharedPolicy};
use crate::transforms::{chron_to_joint, chron_to_joint_with, Dual, Env, NormalizedPredictor};
use crate::utm::{BudgetedJoint, ChronEnumEnv, EnumCache};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum JointBuiltin {
    Uniform,
    Copy,
    Anticopy,
    Zeros,
    GeometricDefective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvBuiltin {
    MuId,
    MuNot,
    Uniform,
    NoisyCopy { p: Prob },
    LossyEcho { p: Prob },
    Const { percept: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weighted<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Prob>,
    pub component: T,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec<T> {
    #[serde(default)]
    pub prior: Prior,
    pub components: Vec<Weighted<T>>,
}

impl<T> MixtureSpec<T> {
    pub fn weights(&self) -> Result<Vec<Prob>> {
        let n = self.components.len();
        match self.prior {
            Prior::Uniform => Ok(crate::mixture::uniform_weights(n)),
            Prior::Harmonic => Ok(crate::mixture::harmonic_weights(n)),
            Prior::AsGiven => self
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    c.weight
                        .clone()
                        .ok_or_else(|| UaiError::InvalidWeights(format!("component {i} has no weight")))
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyRef {
    Uniform,
    Iid(Vec<Prob>),
    Constant(u32),
    Cycle(Vec<u32>),
    Mixture(MixtureSpec<PolicyRef>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum JointRef {
    Builtin(JointBuiltin),
    Table(TableSpec),
    Dual { env: Box<EnvRef>, policy: PolicyRef },
    ChronToJoint {
        env: Box<EnvRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        filler: Option<Vec<Prob>>,
    },
    Normalize(Box<JointRef>),
    Mixture(MixtureSpec<JointRef>),
    /// Program enumeration on the joint machine.
    Enumeration {
        l: u32,
        s: u64,
        depth: usize,
        #[serde(default = "default_stride")]
        stride: u64,
    },
}

fn default_stride() -> u64 {
    10
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvRef {
    Builtin(EnvBuiltin),
    Table(TableSpec),
    /// `env(ν)` of a joint component.
    Env(Box<JointRef>),
    Mixture(MixtureSpec<EnvRef>),
    /// Program enumeration on the chronological machine.
    Enumeration { l: u32, s: u64, steps: usize },
}

/// Build-time context.
#[derive(Clone, Debug, Default)]
pub struct BuildCtx {
    pub cache: Option<EnumCache>,
}

impl PolicyRef {
    pub fn build(&self) -> Result<SharedPolicy> {
        let i = Interface::binary();
        Ok(match self {
            PolicyRef::Uniform => Arc::new(IidPolicy::uniform(i)),
            PolicyRef::Iid(d) => Arc::new(IidPolicy::new(i, d.clone())?),
            PolicyRef::Constant(a) => {
                check_symbol(*a, i.actions.len())?;
                Arc::new(DeterministicPolicy::constant(i, Action(*a)))
            }
            PolicyRef::Cycle(p) => {
                for a in p {
                    check_symbol(*a, i.actions.len())?;
                }
                Arc::new(DeterministicPolicy::cycle(i, p.iter().map(|&a| Action(a)).collect())?)
            }
            PolicyRef::Mixture(m) => {
                let w = m.weights()?;
                let parts = w
                    .into_iter()
                    .zip(&m.components)
                    .map(|(w, c)| Ok((w, c.component.build()?)))
                    .collect::<Result<_>>()?;
                Arc::new(PolicyMixture::new(parts)?)
            }
        })
    }
}

fn check_symbol(s: u32, size: usize) -> Result<()> {
    if s as usize >= size {
        return Err(UaiError::SymbolOutOfRange { symbol: s, size });
    }
    Ok(())
}

impl JointRef {
    pub fn build(&self, ctx: &BuildCtx) -> Result<SharedJoint> {
        Ok(match self {
            JointRef::Builtin(b) => match b {
                JointBuiltin::Uniform => Arc::new(uniform_joint()),
                JointBuiltin::Copy => Arc::new(copy_machine()),
                JointBuiltin::Anticopy => Arc::new(anticopy_machine()),
                JointBuiltin::Zeros => Arc::new(zeros_machine()),
                JointBuiltin::GeometricDefective => Arc::new(geometric_defective()),
            },
            JointRef::Table(t) => Arc::new(JointTable::new(t)?),
            JointRef::Dual { env, policy } => Arc::new(Dual::new(env.build(ctx)?, policy.build()?)?),
            JointRef::ChronToJoint { env, filler } => match filler {
                None => Arc::new(chron_to_joint(env.build(ctx)?)),
                Some(f) => Arc::new(chron_to_joint_with(env.build(ctx)?, f.clone())?),
            },
            JointRef::Normalize(inner) => Arc::new(NormalizedPredictor::new(inner.build(ctx)?)),
            JointRef::Mixture(m) => Arc::new(build_joint_mixture(m, ctx)?),
            JointRef::Enumeration { l, s, depth, stride } => {
                let b = BudgetedJoint::new(*l, *s, *stride, *depth)?;
                if let Some(cache) = &ctx.cache {
                    b.preload_top(cache.joint(*l, *s, *depth)?)?;
                }
                Arc::new(b)
            }
        })
    }
}

impl EnvRef {
    pub fn build(&self, ctx: &BuildCtx) -> Result<SharedEnv> {
        Ok(match self {
            EnvRef::Builtin(b) => match b {
                EnvBuiltin::MuId => Arc::new(mu_id()),
                EnvBuiltin::MuNot => Arc::new(mu_not()),
                EnvBuiltin::Uniform => Arc::new(uniform_env()),
                EnvBuiltin::NoisyCopy { p } => Arc::new(noisy_copy(p.clone())?),
                EnvBuiltin::LossyEcho { p } => Arc::new(lossy_echo(p.clone())?),
                EnvBuiltin::Const { percept } => {
                    check_symbol(*percept, 2)?;
                    Arc::new(ConstEnv::new(Interface::binary(), Percept(*percept))?)
                }
            },
            EnvRef::Table(t) => Arc::new(ChronTable::new(t)?),
            EnvRef::Env(j) => Arc::new(Env::new(j.build(ctx)?)),
            EnvRef::Mixture(m) => Arc::new(build_env_mixture(m, ctx)?),
            EnvRef::Enumeration { l, s, steps } => match &ctx.cache {
                Some(cache) => Arc::new(ChronEnumEnv::with_loader(*l, *s, *steps, |tape| cache.chron(*l, *s, tape))?),
                None => Arc::new(ChronEnumEnv::new(*l, *s, *steps)?),
            },
        })
    }
}

pub fn build_joint_mixture(m: &MixtureSpec<JointRef>, ctx: &BuildCtx) -> Result<JointMixture> {
    let w = m.weights()?;
    let parts = w
        .into_iter()
        .zip(&m.components)
        .map(|(w, c)| Ok((w, c.component.build(ctx)?)))
        .collect::<Result<_>>()?;
    JointMixture::new(parts)
}

pub fn build_env_mixture(m: &MixtureSpec<EnvRef>, ctx: &BuildCtx) -> Result<EnvMixture> {
    let w = m.weights()?;
    let parts = w
        .into_iter()
        .zip(&m.components)
        .map(|(w, c)| Ok((w, c.component.build(ctx)?)))
        .collect::<Result<_>>()?;
    EnvMixture::new(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::History;
    use crate::semimeasure::{ChronEnv, JointSemimeasure};

    #[test]
    fn parses_and_builds_mixture() {
        let text = r#"{"mixture": {"components": [
            {"weight": "1/2", "component": {"builtin": {"name": "copy"}}},
            {"weight": "1/2", "component": {"builtin": {"name": "uniform"}}}
        ]}}"#;
        let r: JointRef = serde_json::from_str(text).unwrap();
        let j = r.build(&BuildCtx::default()).unwrap();
        assert_eq!(j.eval(&History::parse("11").unwrap()).unwrap(), Prob::new(3, 8));
        let back: JointRef = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn nested_refs() {
        let text = r#"{"dual": {"env": {"builtin": {"name": "noisy_copy", "p": "3/4"}}, "policy": {"cycle": [0, 1]}}}"#;
        let r: JointRef = serde_json::from_str(text).unwrap();
        let j = r.build(&BuildCtx::default()).unwrap();
        assert_eq!(j.eval(&History::parse("00").unwrap()).unwrap(), Prob::new(3, 4));
        assert_eq!(j.eval(&History::parse("001").unwrap()).unwrap(), Prob::new(3, 4));
        assert_eq!(j.eval(&History::parse("000").unwrap()).unwrap(), Prob::zero());

        let text = r#"{"mixture": {"prior": "uniform", "components": [
            {"component": {"builtin": {"name": "mu_id"}}},
            {"component": {"env": {"builtin": {"name": "copy"}}}}
        ]}}"#;
        let e: EnvRef = serde_json::from_str(text).unwrap();
        let e = e.build(&BuildCtx::default()).unwrap();
        assert_eq!(e.eval(&[Percept(1)], &[Action(1)]).unwrap(), Prob::one());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<JointRef>(r#"{"builtin": {"name": "nope"}}"#).is_err());
        let r: JointRef = serde_json::from_str(r#"{"mixture": {"components": [{"component": {"builtin": {"name": "copy"}}}]}}"#).unwrap();
        assert!(matches!(r.build(&BuildCtx::default()), Err(UaiError::InvalidWeights(_))));
        let p: PolicyRef = serde_json::from_str(r#"{"constant": 3}"#).unwrap();
        assert!(p.build().is_err());
    }
}
