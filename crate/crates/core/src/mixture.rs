//! Finite Bayes mixtures over joint semimeasures, chronological
//! environments and policies.

use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;
use crate::semimeasure::{ChronEnv, JointSemimeasure, Policy, SharedEnv, SharedJoint, SharedPolicy};
use crate::transforms::Dual;

/// Prior weighting schemes for a component list of length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prior {
    /// Use the configured weights unchanged.
    #[default]
    AsGiven,
    /// `1/n` each.
    Uniform,
    /// `w_i = 1 / (i (i + 1))`, `i = 1..n`, for enumeration-ordered lists.
    Harmonic,
}

pub fn uniform_weights(n: usize) -> Vec<Prob> {
    vec![Prob::new(1, n.max(1) as u64); n]
}

pub fn harmonic_weights(n: usize) -> Vec<Prob> {
    (1..=n as u64).map(|i| Prob::new(1, i * (i + 1))).collect()
}

fn validate_weights(weights: &[&Prob]) -> Result<()> {
    if weights.is_empty() {
        return Err(UaiError::InvalidWeights("mixture has no components".into()));
    }
    if let Some(i) = weights.iter().position(|w| w.is_zero()) {
        return Err(UaiError::InvalidWeights(format!("component {i} has zero weight")));
    }
    let total: Prob = weights.iter().copied().sum();
    if total > Prob::one() {
        return Err(UaiError::InvalidWeights(format!("weights sum to {total} > 1")));
    }
    Ok(())
}

fn common_interface<'a>(mut it: impl Iterator<Item = &'a Interface>) -> Result<Interface> {
    let first = it.next().expect("non-empty").clone();
    for i in it {
        if !first.same_shape(i) {
            return Err(UaiError::Alphabet("mixture components disagree on alphabets".into()));
        }
    }
    Ok(first)
}

/// Posterior weights `w_i(x) = w_i ν_i(x) / ξ(x)` at a history `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosteriorState {
    pub history: History,
    pub weights: Vec<Prob>,
}

impl PosteriorState {
    pub fn total(&self) -> Prob {
        self.weights.iter().sum()
    }
}

/// `ξ(x) = Σ_i w_i ν_i(x)` over joint components.
#[derive(Clone)]
pub struct JointMixture {
    interface: Interface,
    components: Vec<(Prob, SharedJoint)>,
    name: String,
}

impl JointMixture {
    pub fn new(components: Vec<(Prob, SharedJoint)>) -> Result<Self> {
        validate_weights(&components.iter().map(|(w, _)| w).collect::<Vec<_>>())?;
        let interface = common_interface(components.iter().map(|(_, c)| c.interface()))?;
        let name = format!(
            "mix[{}]",
            components
                .iter()
                .map(|(w, c)| format!("{w}*{}", c.label()))
                .collect::<Vec<_>>()
                .join(" + ")
        );
        Ok(JointMixture { interface, components, name })
    }

    pub fn with_prior(components: Vec<SharedJoint>, prior: Prior, given: Option<Vec<Prob>>) -> Result<Self> {
        let n = components.len();
        let weights = match prior {
            Prior::Uniform => uniform_weights(n),
            Prior::Harmonic => harmonic_weights(n),
            Prior::AsGiven => given.ok_or_else(|| UaiError::InvalidWeights("no weights given".into()))?,
        };
        if weights.len() != n {
            return Err(UaiError::InvalidWeights(format!("{} weights for {n} components", weights.len())));
        }
        JointMixture::new(weights.into_iter().zip(components).collect())
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn components(&self) -> &[(Prob, SharedJoint)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `ν_i(x)` for every component, in component order.
    pub fn component_values(&self, x: &History) -> Result<Vec<Prob>> {
        self.components.iter().map(|(_, c)| c.eval(x)).collect()
    }

    /// Posterior weights at an arbitrary joint string `x`.
    pub fn posterior_at(&self, x: &History) -> Result<PosteriorState> {
        let values = self.component_values(x)?;
        let weighted: Vec<Prob> =
            self.components.iter().zip(&values).map(|((w, _), v)| w * v).collect();
        let xi: Prob = weighted.iter().sum();
        if xi.is_zero() {
            return Err(UaiError::UndefinedConditional { prefix: x.to_string() });
        }
        Ok(PosteriorState {
            history: x.clone(),
            weights: weighted.iter().map(|wv| wv / &xi).collect(),
        })
    }

    /// Posterior weights `w_i(ae_{<t} a_t)` after the pending action `a`.
    pub fn posterior_weights(&self, h: &History, a: Action) -> Result<PosteriorState> {
        self.posterior_at(&h.with_action(a)?)
    }

    /// `e ↦ ξ(ae_{<t} a_t e) / ξ(ae_{<t} a_t)`, computed as a ratio of
    /// mixture values.
    pub fn predictive(&self, h: &History, a: Action) -> Result<Vec<Prob>> {
        let ctx = h.with_action(a)?;
        let den = self.eval(&ctx)?;
        if den.is_zero() {
            return Err(UaiError::UndefinedConditional { prefix: ctx.to_string() });
        }
        self.interface
            .percepts
            .symbols()
            .map(|e| Ok(&self.eval(&ctx.extended(e.0))? / &den))
            .collect()
    }

    /// The same predictive distribution assembled from posterior weights and
    /// component conditionals, `Σ_i w_i(ae_{<t}a_t) ν_i(e | ae_{<t}a_t)`.
    pub fn predictive_from_posterior(&self, h: &History, a: Action) -> Result<Vec<Prob>> {
        let ctx = h.with_action(a)?;
        let post = self.posterior_at(&ctx)?;
        let mut out = vec![Prob::zero(); self.interface.percepts.len()];
        for ((_, c), w) in self.components.iter().zip(&post.weights) {
            if w.is_zero() {
                continue;
            }
            for (slot, e) in out.iter_mut().zip(self.interface.percepts.symbols()) {
                *slot += &(w * &c.conditional(&ctx, e.0)?);
            }
        }
        Ok(out)
    }

    pub fn tracker(&self) -> Result<PosteriorTracker<'_>> {
        PosteriorTracker::new(self)
    }
}

impl JointSemimeasure for JointMixture {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        let mut acc = Prob::zero();
        for (w, c) in &self.components {
            acc += &(w * &c.eval(x)?);
        }
        Ok(acc)
    }

    fn eval_at_budget(&self, x: &History, budget: u32) -> Result<Prob> {
        let mut acc = Prob::zero();
        for (w, c) in &self.components {
            acc += &(w * &c.eval_at_budget(x, budget)?);
        }
        Ok(acc)
    }

    fn declared_measure(&self) -> bool {
        self.components.iter().all(|(_, c)| c.declared_measure())
            && self.components.iter().map(|(w, _)| w).sum::<Prob>().is_one()
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Incremental posterior updates, `w_i(xs) ∝ w_i(x) ν_i(s | x)`.
///
/// Must agree exactly with [`JointMixture::posterior_at`] recomputed from
/// scratch; that path stays the reference.
pub struct PosteriorTracker<'a> {
    mixture: &'a JointMixture,
    state: PosteriorState,
}

impl<'a> PosteriorTracker<'a> {
    fn new(mixture: &'a JointMixture) -> Result<Self> {
        let state = mixture.posterior_at(&History::empty())?;
        Ok(PosteriorTracker { mixture, state })
    }

    pub fn state(&self) -> &PosteriorState {
        &self.state
    }

    pub fn observe(&mut self, s: u32) -> Result<&PosteriorState> {
        let x = &self.state.history;
        let mut updated = Vec::with_capacity(self.state.weights.len());
        for ((_, c), w) in self.mixture.components.iter().zip(&self.state.weights) {
            updated.push(if w.is_zero() { Prob::zero() } else { w * &c.conditional(x, s)? });
        }
        let total: Prob = updated.iter().sum();
        let next = x.extended(s);
        if total.is_zero() {
            return Err(UaiError::UndefinedConditional { prefix: next.to_string() });
        }
        self.state = PosteriorState {
            history: next,
            weights: updated.iter().map(|u| u / &total).collect(),
        };
        Ok(&self.state)
    }
}

/// `Σ_ν w_ν ν(e_{1:t} ‖ a_{1:t})` over chronological components; the
/// finite analog of both the universal environment mixture and the
/// mixture-of-envs construction.
#[derive(Clone)]
pub struct EnvMixture {
    interface: Interface,
    components: Vec<(Prob, SharedEnv)>,
    name: String,
}

impl EnvMixture {
    pub fn new(components: Vec<(Prob, SharedEnv)>) -> Result<Self> {
        validate_weights(&components.iter().map(|(w, _)| w).collect::<Vec<_>>())?;
        let interface = common_interface(components.iter().map(|(_, c)| c.interface()))?;
        let name = format!(
            "envmix[{}]",
            components
                .iter()
                .map(|(w, c)| format!("{w}*{}", c.label()))
                .collect::<Vec<_>>()
                .join(" + ")
        );
        Ok(EnvMixture { interface, components, name })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn components(&self) -> &[(Prob, SharedEnv)] {
        &self.components
    }

    /// `w_ν(e_{<t} ‖ a_{<t}) = w_ν ν(e_{<t} ‖ a_{<t}) / ξ(e_{<t} ‖ a_{<t})` on a
    /// completed history.
    pub fn posterior_at(&self, h: &History) -> Result<PosteriorState> {
        let weighted: Vec<Prob> = self
            .components
            .iter()
            .map(|(w, c)| Ok(w * &c.eval_history(h)?))
            .collect::<Result<_>>()?;
        let total: Prob = weighted.iter().sum();
        if total.is_zero() {
            return Err(UaiError::UndefinedConditional { prefix: h.to_string() });
        }
        Ok(PosteriorState {
            history: h.clone(),
            weights: weighted.iter().map(|v| v / &total).collect(),
        })
    }
}

impl ChronEnv for EnvMixture {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        let mut acc = Prob::zero();
        for (w, c) in &self.components {
            acc += &(w * &c.eval(percepts, actions)?);
        }
        Ok(acc)
    }

    fn declared_measure(&self) -> bool {
        self.components.iter().all(|(_, c)| c.declared_measure())
            && self.components.iter().map(|(w, _)| w).sum::<Prob>().is_one()
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// `Σ_π ω_π π(a_{1:t} ‖ e_{<t})`.
#[derive(Clone)]
pub struct PolicyMixture {
    interface: Interface,
    components: Vec<(Prob, SharedPolicy)>,
}

impl PolicyMixture {
    pub fn new(components: Vec<(Prob, SharedPolicy)>) -> Result<Self> {
        validate_weights(&components.iter().map(|(w, _)| w).collect::<Vec<_>>())?;
        let interface = common_interface(components.iter().map(|(_, c)| c.interface()))?;
        Ok(PolicyMixture { interface, components })
    }
}

impl Policy for PolicyMixture {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, actions: &[Action], percepts: &[Percept]) -> Result<Prob> {
        let mut acc = Prob::zero();
        for (w, c) in &self.components {
            acc += &(w * &c.eval(actions, percepts)?);
        }
        Ok(acc)
    }

    fn declared_measure(&self) -> bool {
        self.components.iter().all(|(_, c)| c.declared_measure())
            && self.components.iter().map(|(w, _)| w).sum::<Prob>().is_one()
    }

    fn label(&self) -> String {
        format!(
            "polmix[{}]",
            self.components
                .iter()
                .map(|(w, c)| format!("{w}*{}", c.label()))
                .collect::<Vec<_>>()
                .join(" + ")
        )
    }
}

/// Mixture over `dual(ν, π)` for every pair, weighted `ω_π · w_ν`.
/// Components are ordered environment-major.
pub fn dual_mixture(envs: &[(Prob, SharedEnv)], policies: &[(Prob, SharedPolicy)]) -> Result<JointMixture> {
    validate_weights(&envs.iter().map(|(w, _)| w).collect::<Vec<_>>())?;
    validate_weights(&policies.iter().map(|(w, _)| w).collect::<Vec<_>>())?;
    let mut components: Vec<(Prob, SharedJoint)> = Vec::with_capacity(envs.len() * policies.len());
    for (wn, nu) in envs {
        for (wp, pi) in policies {
            let d = Dual::new(nu.clone(), pi.clone())?;
            components.push((wp * wn, Arc::new(d)));
        }
    }
    JointMixture::new(components)
}

/// The mixture-of-envs `Σ_ν w_ν ν`.
pub fn env_mixture(envs: &[(Prob, SharedEnv)]) -> Result<EnvMixture> {
    EnvMixture::new(envs.to_vec())
}

/// `ξ(x) ≥ w μ(x)` for every listed history; returns the first failure.
pub fn inclusion_bound_holds<J: JointSemimeasure + ?Sized, M: JointSemimeasure + ?Sized>(
    xi: &J,
    weight: &Prob,
    mu: &M,
    strings: &[History],
) -> Result<Option<History>> {
    let failures: Vec<Option<History>> = strings
        .par_iter()
        .map(|x| -> Result<Option<History>> {
            let bound = weight * &mu.eval(x)?;
            Ok((xi.eval(x)? < bound).then(|| x.clone()))
        })
        .collect::<Result<_>>()?;
    Ok(failures.into_iter().flatten().next())
}
