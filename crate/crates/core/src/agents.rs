//! Finite-horizon expectimax agents over chronological beliefs.
//!
//! Values are exact rationals. Ties between actions go to the smallest
//! action in alphabet order. A percept branch with zero probability is not
//! explored; an action whose conditionals are undefined is skipped, and a
//! node where every action is undefined is an error.

use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::Zero;

use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;
use crate::semimeasure::{ChronEnv, JointSemimeasure, Policy, SharedJoint};
use crate::transforms::Env;

pub type Value = BigRational;

fn require_complete(h: &History) -> Result<()> {
    if h.is_pending() {
        return Err(UaiError::Alternation(format!("history {h} ends in an action")));
    }
    Ok(())
}

fn reward(interface: &Interface, e: Percept) -> Value {
    interface.percepts.reward(e).clone()
}

/// `V^π_ν = Σ_{t ≤ m} Σ_{ae_{1:t}} r_t π(a_{1:t} ‖ e_{<t}) ν(e_{1:t} ‖ a_{1:t})`
/// from the empty history.
pub fn policy_value<P: Policy + ?Sized, E: ChronEnv + ?Sized>(pi: &P, nu: &E, m: usize) -> Result<Value> {
    let interface = nu.interface().clone();
    let mut total = Value::zero();
    let mut frontier = vec![(History::empty(), Prob::one())];
    for _ in 0..m {
        let mut next = Vec::new();
        for (h, _) in frontier {
            for a in interface.actions.symbols() {
                let ha = h.with_action(a)?;
                for e in interface.percepts.symbols() {
                    let hae = ha.with_percept(e)?;
                    let p = pi.eval(hae.actions(), hae.percepts())?;
                    if p.is_zero() {
                        continue;
                    }
                    let q = &p * &nu.eval_history(&hae)?;
                    if q.is_zero() {
                        continue;
                    }
                    total += reward(&interface, e) * q.as_rational();
                    next.push((hae, q));
                }
            }
        }
        frontier = next;
    }
    Ok(total)
}

/// `Q(h, a)` for every action with `m ≥ 1` steps remaining; `None` marks an
/// action whose subtree hit an undefined conditional.
pub fn action_values<E: ChronEnv + ?Sized>(nu: &E, h: &History, m: usize) -> Result<Vec<Option<Value>>> {
    require_complete(h)?;
    if m == 0 {
        return Err(UaiError::Spec("horizon must be at least 1".into()));
    }
    let interface = nu.interface();
    Ok(interface.actions.symbols().map(|a| q_value(nu, h, a, m).ok()).collect())
}

fn q_value<E: ChronEnv + ?Sized>(nu: &E, h: &History, a: Action, m: usize) -> Result<Value> {
    let interface = nu.interface();
    let ha = h.with_action(a)?;
    let mut q = Value::zero();
    for e in interface.percepts.symbols() {
        let p = nu.conditional(&ha, e)?;
        if p.is_zero() {
            continue;
        }
        let mut v = reward(interface, e);
        if m > 1 {
            v += expectimax_value(nu, &ha.with_percept(e)?, m - 1)?;
        }
        q += v * p.as_rational();
    }
    Ok(q)
}

/// `V*(h)` with `m` steps remaining; `V*(h) = 0` at `m = 0`.
pub fn expectimax_value<E: ChronEnv + ?Sized>(nu: &E, h: &History, m: usize) -> Result<Value> {
    if m == 0 {
        return Ok(Value::zero());
    }
    best(nu, h, m).map(|(_, v)| v)
}

fn best<E: ChronEnv + ?Sized>(nu: &E, h: &History, m: usize) -> Result<(Action, Value)> {
    require_complete(h)?;
    let mut best: Option<(Action, Value)> = None;
    let mut last_err = None;
    for a in nu.interface().actions.symbols() {
        match q_value(nu, h, a, m) {
            Ok(q) => {
                if best.as_ref().is_none_or(|(_, b)| q > *b) {
                    best = Some((a, q));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| match last_err {
        Some(UaiError::UndefinedConditional { prefix }) | Some(UaiError::UndefinedNormalization { context: prefix }) => {
            UaiError::UndefinedConditional { prefix }
        }
        Some(other) => other,
        None => UaiError::Spec("empty action alphabet".into()),
    })
}

/// The expectimax action at `h` for horizon `m`.
pub fn expectimax_action<E: ChronEnv + ?Sized>(nu: &E, h: &History, m: usize) -> Result<Action> {
    best(nu, h, m).map(|(a, _)| a)
}

/// Classical AIXI on a chronological mixture: expectimax with the mixture
/// as belief.
pub fn dualistic_action<E: ChronEnv + ?Sized>(mixture: &E, h: &History, m: usize) -> Result<Action> {
    expectimax_action(mixture, h, m)
}

/// Joint AIXI: expectimax on `env(ξ)` for a joint input.
pub fn jaixi_action(xi: SharedJoint, h: &History, m: usize) -> Result<Action> {
    expectimax_action(&Env::new(xi), h, m)
}

/// One-step lookahead `Σ_e r(e) ν(e | h a)` per action.
pub fn one_step_values<E: ChronEnv + ?Sized>(belief: &E, h: &History) -> Result<Vec<Option<Value>>> {
    require_complete(h)?;
    let interface = belief.interface();
    Ok(interface
        .actions
        .symbols()
        .map(|a| -> Option<Value> {
            let ha = h.with_action(a).ok()?;
            let mut v = Value::zero();
            for e in interface.percepts.symbols() {
                v += reward(interface, e) * belief.conditional(&ha, e).ok()?.as_rational();
            }
            Some(v)
        })
        .collect())
}

/// The smallest action with the largest defined value.
pub fn argmax_action(values: &[Option<Value>], context: &History) -> Result<Action> {
    let mut best: Option<(usize, &Value)> = None;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
    }
    best.map(|(i, _)| Action(i as u32))
        .ok_or_else(|| UaiError::UndefinedConditional { prefix: context.to_string() })
}

/// The one-step self-predictive rule: maximize the supplied action-value
/// map, ties to the smallest action.
pub fn self_step_action_with(
    interface: &Interface,
    h: &History,
    action_value: impl Fn(Action) -> Result<Value>,
) -> Result<Action> {
    let values: Vec<Option<Value>> = interface.actions.symbols().map(|a| action_value(a).ok()).collect();
    argmax_action(&values, h)
}

/// The one-step rule with the belief's own one-step lookahead.
pub fn self_step_action<E: ChronEnv + ?Sized>(belief: &E, h: &History) -> Result<Action> {
    argmax_action(&one_step_values(belief, h)?, h)
}

/// Brute force over every deterministic policy on the tree of depth `m`
/// below `h`, scored by full chronological evaluations
/// `ν(e_{1:τ} ‖ a_{1:τ}) / ν(h)`. Returns the smallest root action among
/// optimal policies, with the optimal value.
pub fn brute_force_action<E: ChronEnv + ?Sized>(nu: &E, h: &History, m: usize) -> Result<(Action, Value)> {
    require_complete(h)?;
    if m == 0 {
        return Err(UaiError::Spec("horizon must be at least 1".into()));
    }
    let interface = nu.interface();
    let na = interface.actions.len();
    let ne = interface.percepts.len();
    let root = nu.eval_history(h)?;
    if root.is_zero() {
        return Err(UaiError::UndefinedConditional { prefix: h.to_string() });
    }
    // node index of a percept path: breadth-first numbering
    let nodes: usize = (0..m).map(|d| ne.pow(d as u32)).sum();
    let total = (na as u128).checked_pow(nodes as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
        UaiError::Spec(format!("{nodes} decision nodes is too many for brute force"))
    })?;
    let paths: Vec<Vec<usize>> = (1..=m)
        .flat_map(|len| {
            (0..ne.pow(len as u32)).map(move |c| {
                let mut p = vec![0; len];
                let mut c = c;
                for slot in p.iter_mut().rev() {
                    *slot = c % ne;
                    c /= ne;
                }
                p
            })
        })
        .collect();
    let node_of = |prefix: &[usize]| -> usize {
        let offset: usize = (0..prefix.len()).map(|d| ne.pow(d as u32)).sum();
        offset + prefix.iter().fold(0, |acc, &e| acc * ne + e)
    };
    let mut best: Option<(Action, Value)> = None;
    for code in 0..total {
        let mut choice = vec![0usize; nodes];
        let mut c = code;
        for slot in choice.iter_mut() {
            *slot = (c % na as u128) as usize;
            c /= na as u128;
        }
        let value = (|| -> Result<Value> {
            let mut v = Value::zero();
            for path in &paths {
                let mut x = h.clone();
                for (d, &e) in path.iter().enumerate() {
                    x.push_symbol(choice[node_of(&path[..d])] as u32);
                    x.push_symbol(e as u32);
                }
                let p = nu.eval_history(&x)?;
                if p.is_zero() {
                    continue;
                }
                let e = Percept(*path.last().expect("nonempty") as u32);
                v += reward(interface, e) * (&p / &root).as_rational();
            }
            Ok(v)
        })();
        let Ok(value) = value else { continue };
        let a = Action(choice[0] as u32);
        let better = match &best {
            None => true,
            Some((ba, bv)) => value > *bv || (value == *bv && a < *ba),
        };
        if better {
            best = Some((a, value));
        }
    }
    best.ok_or_else(|| UaiError::UndefinedConditional { prefix: h.to_string() })
}

/// Result of auditing joint queries made while planning.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub conditionals: usize,
    pub evaluations: usize,
    /// Queries that read actions past the step being predicted, or were made
    /// outside any conditional.
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Default)]
struct AuditLog {
    scope: Option<usize>,
    report: AuditReport,
}

/// Records every joint evaluation and the step of the conditional it
/// serves.
pub struct AuditedJoint {
    inner: SharedJoint,
    log: Mutex<AuditLog>,
}

impl AuditedJoint {
    pub fn new(inner: SharedJoint) -> Self {
        AuditedJoint { inner, log: Mutex::new(AuditLog::default()) }
    }

    pub fn report(&self) -> AuditReport {
        self.log.lock().expect("audit log").report.clone()
    }
}

impl JointSemimeasure for AuditedJoint {
    fn interface(&self) -> &Interface {
        self.inner.interface()
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        {
            let mut log = self.log.lock().expect("audit log");
            log.report.evaluations += 1;
            match log.scope {
                Some(t) if x.actions().len() <= t => {}
                Some(t) => log.report.violations.push(format!("{x} read past step {t}")),
                None => log.report.violations.push(format!("{x} queried outside a conditional")),
            }
        }
        self.inner.eval(x)
    }

    fn declared_measure(&self) -> bool {
        self.inner.declared_measure()
    }

    fn label(&self) -> String {
        self.inner.label()
    }

    fn conditional(&self, x: &History, s: u32) -> Result<Prob> {
        {
            let mut log = self.log.lock().expect("audit log");
            log.report.conditionals += 1;
            log.scope = Some(x.actions().len());
        }
        let num = self.eval(&x.extended(s));
        let den = self.eval(x);
        self.log.lock().expect("audit log").scope = None;
        num?.checked_div(&den?)
            .ok_or_else(|| UaiError::UndefinedConditional { prefix: x.to_string() })
    }
}

/// [`jaixi_action`] with every joint query audited.
pub fn jaixi_action_audited(xi: SharedJoint, h: &History, m: usize) -> Result<(Action, AuditReport)> {
    let audited = Arc::new(AuditedJoint::new(xi));
    let a = expectimax_action(&Env::new(audited.clone()), h, m)?;
    Ok((a, audited.report()))
}
