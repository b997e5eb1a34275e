//! Joint semimeasures, chronological semimeasures and policies.
//!
//! A [`JointSemimeasure`] assigns mass to interleaved strings
//! `a_1 e_1 a_2 ...` and must be subadditive at every position. A
//! [`ChronEnv`] is a two-argument environment `ν(e_{1:t} ‖ a_{1:t})` that is
//! only required to be subadditive over the next percept. A [`Policy`] is the
//! mirror image, generating actions given percepts.

use std::sync::Arc;

use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;

pub mod builtin;
pub mod check;
pub mod table;

pub use builtin::{
    anticopy_machine, copy_machine, geometric_defective, mu_id, mu_id_for, mu_not, noisy_copy,
    lossy_echo, uniform_env, uniform_joint, zeros_machine, ConstEnv, CopyMachine,
    CopyingEnv, DeterministicPolicy, GeometricDefective, IidPolicy, UniformEnv, UniformJoint,
    ZerosMachine,
};
pub use check::{check_chronological, check_semimeasure, CheckReport, CheckRow, Verdict};
pub use table::{table_component, ChronTable, DefaultRule, JointTable, Matching, TableComponent, TableEntry, TableKind, TableSpec};

/// A semimeasure over interleaved action/percept strings.
pub trait JointSemimeasure: Send + Sync {
    fn interface(&self) -> &Interface;

    /// `ν(x)`.
    fn eval(&self, x: &History) -> Result<Prob>;

    /// Lower approximation `φ(x, k)`, nondecreasing in `k` with limit
    /// `eval(x)`. Finite components are exact at every budget.
    fn eval_at_budget(&self, x: &History, _budget: u32) -> Result<Prob> {
        self.eval(x)
    }

    /// Whether the component claims to be a measure (no mass deficit).
    fn declared_measure(&self) -> bool {
        false
    }

    fn label(&self) -> String;

    /// `ν(s | x) = ν(xs) / ν(x)`.
    fn conditional(&self, x: &History, s: u32) -> Result<Prob> {
        let den = self.eval(x)?;
        let num = self.eval(&x.extended(s))?;
        num.checked_div(&den)
            .ok_or_else(|| UaiError::UndefinedConditional { prefix: x.to_string() })
    }
}

/// A chronological semimeasure `ν(e_{1:t} ‖ a_{1:t})`.
pub trait ChronEnv: Send + Sync {
    fn interface(&self) -> &Interface;

    /// `ν(e_{1:t} ‖ a_{1:t})`; callers pass equally long slices.
    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob>;

    fn declared_measure(&self) -> bool {
        false
    }

    fn label(&self) -> String;

    /// `ν(e_t | ae_{<t} a_t)` for a history pending on `a_t`.
    fn conditional(&self, context: &History, e: Percept) -> Result<Prob> {
        debug_assert!(context.is_pending());
        let t = context.actions().len();
        let mut percepts = context.percepts().to_vec();
        let den = self.eval(&percepts, &context.actions()[..t - 1])?;
        percepts.push(e);
        let num = self.eval(&percepts, context.actions())?;
        num.checked_div(&den).ok_or_else(|| UaiError::UndefinedConditional {
            prefix: context.without_pending().to_string(),
        })
    }

    /// Value on a completed history.
    fn eval_history(&self, h: &History) -> Result<Prob> {
        let t = h.steps();
        self.eval(h.percepts(), &h.actions()[..t])
    }
}

/// A policy: a chronological semimeasure over actions given percepts,
/// `π(a_{1:t} ‖ e_{<t})`.
pub trait Policy: Send + Sync {
    fn interface(&self) -> &Interface;

    /// `π(a_{1:t} ‖ e_{1:t-1})`. Only the first `t - 1` percepts are read.
    fn eval(&self, actions: &[Action], percepts: &[Percept]) -> Result<Prob>;

    /// Whether every action conditional sums to one.
    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String;

    /// `π(a_t | ae_{<t})` for a completed history.
    fn conditional(&self, h: &History, a: Action) -> Result<Prob> {
        debug_assert!(!h.is_pending());
        let mut actions = h.actions().to_vec();
        let den = self.eval(&actions, h.percepts())?;
        actions.push(a);
        let num = self.eval(&actions, h.percepts())?;
        num.checked_div(&den)
            .ok_or_else(|| UaiError::UndefinedConditional { prefix: h.to_string() })
    }
}

pub type SharedJoint = Arc<dyn JointSemimeasure>;
pub type SharedEnv = Arc<dyn ChronEnv>;
pub type SharedPolicy = Arc<dyn Policy>;

impl<T: JointSemimeasure + ?Sized> JointSemimeasure for Arc<T> {
    fn interface(&self) -> &Interface {
        (**self).interface()
    }
    fn eval(&self, x: &History) -> Result<Prob> {
        (**self).eval(x)
    }
    fn eval_at_budget(&self, x: &History, budget: u32) -> Result<Prob> {
        (**self).eval_at_budget(x, budget)
    }
    fn declared_measure(&self) -> bool {
        (**self).declared_measure()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn conditional(&self, x: &History, s: u32) -> Result<Prob> {
        (**self).conditional(x, s)
    }
}

impl<T: ChronEnv + ?Sized> ChronEnv for Arc<T> {
    fn interface(&self) -> &Interface {
        (**self).interface()
    }
    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        (**self).eval(percepts, actions)
    }
    fn declared_measure(&self) -> bool {
        (**self).declared_measure()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn conditional(&self, context: &History, e: Percept) -> Result<Prob> {
        (**self).conditional(context, e)
    }
}

impl<T: Policy + ?Sized> Policy for Arc<T> {
    fn interface(&self) -> &Interface {
        (**self).interface()
    }
    fn eval(&self, actions: &[Action], percepts: &[Percept]) -> Result<Prob> {
        (**self).eval(actions, percepts)
    }
    fn declared_measure(&self) -> bool {
        (**self).declared_measure()
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn conditional(&self, h: &History, a: Action) -> Result<Prob> {
        (**self).conditional(h, a)
    }
}
