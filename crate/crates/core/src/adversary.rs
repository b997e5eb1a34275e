//! Adversarial action sequences against copy prediction, and domination
//! probes.

use rayon::prelude::*;

use crate::alphabet::Action;
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;
use crate::semimeasure::{ChronEnv, JointSemimeasure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based step.
    pub t: usize,
    pub action: Action,
    /// `ξ(e_t = a_t | ae_{<t} a_t)`.
    pub conditional: Prob,
    /// `Π_{i ≤ t}` of the recorded conditionals.
    pub product: Prob,
    /// The copy conditional of every action at this step, `None` where
    /// undefined.
    pub candidates: Vec<Option<Prob>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryTrace {
    pub steps: Vec<TraceStep>,
    /// Set when a step had no defined conditional; names the prefix.
    pub truncated: Option<String>,
}

impl AdversaryTrace {
    pub fn actions(&self) -> Vec<Action> {
        self.steps.iter().map(|s| s.action).collect()
    }

    pub fn products(&self) -> Vec<Prob> {
        self.steps.iter().map(|s| s.product.clone()).collect()
    }

    /// The diagonal history `a_1 a_1 … a_t a_t` after `t` steps.
    pub fn history(&self, t: usize) -> History {
        let bits: Vec<u32> = self.steps[..t].iter().map(|s| s.action.0).collect();
        History::diagonal(&bits)
    }

    /// First step whose product is strictly below `threshold`.
    pub fn first_below(&self, threshold: &Prob) -> Option<usize> {
        self.steps.iter().find(|s| s.product < *threshold).map(|s| s.t)
    }

    pub fn non_increasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].product <= w[0].product)
    }

    /// Products equal the running product of conditionals.
    pub fn telescopes(&self) -> bool {
        let mut acc = Prob::one();
        self.steps.iter().all(|s| {
            acc *= &s.conditional;
            acc == s.product
        })
    }

    /// The chosen action attains the minimum defined candidate and is the
    /// smallest such action.
    pub fn greedy_optimal(&self) -> bool {
        self.steps.iter().all(|s| {
            let min = s.candidates.iter().flatten().min();
            let first = s.candidates.iter().position(|c| c.as_ref() == min);
            min == Some(&s.conditional) && first == Some(s.action.index())
        })
    }
}

/// The greedy anti-copy adversary: at each step play the action with the
/// smallest copy conditional (ties to the smallest action), then observe
/// the copied percept.
pub fn greedy_antipredict<J: JointSemimeasure + ?Sized>(xi: &J, steps: usize) -> AdversaryTrace {
    let interface = xi.interface();
    let mut h = History::empty();
    let mut product = Prob::one();
    let mut out = Vec::with_capacity(steps);
    for t in 1..=steps {
        let candidates: Vec<Option<Prob>> = interface
            .actions
            .symbols()
            .map(|a| (a.index() < interface.percepts.len()).then_some(a))
            .map(|a| a.and_then(|a| xi.conditional(&h.extended(a.0), a.0).ok()))
            .collect();
        let mut pick: Option<(usize, &Prob)> = None;
        for (i, c) in candidates.iter().enumerate() {
            if let Some(c) = c {
                if pick.is_none_or(|(_, b)| c < b) {
                    pick = Some((i, c));
                }
            }
        }
        let Some((i, c)) = pick else {
            return AdversaryTrace { steps: out, truncated: Some(h.to_string()) };
        };
        let conditional = c.clone();
        product *= &conditional;
        let action = Action(i as u32);
        h.push_symbol(action.0);
        h.push_symbol(action.0);
        out.push(TraceStep { t, action, conditional, product: product.clone(), candidates });
    }
    AdversaryTrace { steps: out, truncated: None }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalTrace {
    /// `ξ(e_t = a_t | ae_{<t} a_t)` for `t = 1, 2, …`.
    pub conditionals: Vec<Prob>,
    pub truncated: Option<String>,
}

impl ConditionalTrace {
    pub fn strictly_increasing(&self) -> bool {
        self.conditionals.windows(2).all(|w| w[0] < w[1])
    }
}

/// Copy conditionals along `a_1 a_1 a_2 a_2 …` under `xi`; a normalized
/// predictor yields normalized conditionals.
pub fn copy_conditional_trace<J: JointSemimeasure + ?Sized>(xi: &J, actions: &[Action]) -> ConditionalTrace {
    let mut h = History::empty();
    let mut conditionals = Vec::with_capacity(actions.len());
    for a in actions {
        let ctx = h.extended(a.0);
        match xi.conditional(&ctx, a.0) {
            Ok(c) => conditionals.push(c),
            Err(_) => return ConditionalTrace { conditionals, truncated: Some(ctx.to_string()) },
        }
        h = ctx.extended(a.0);
    }
    ConditionalTrace { conditionals, truncated: None }
}

/// `ν(a_{1:t} ‖ a_{1:t})` for `t = 1..=len`.
pub fn chron_copy_products<E: ChronEnv + ?Sized>(nu: &E, actions: &[Action]) -> Result<Vec<Prob>> {
    (1..=actions.len())
        .map(|t| {
            let percepts: Vec<_> = actions[..t].iter().map(|a| crate::alphabet::Percept(a.0)).collect();
            nu.eval(&percepts, &actions[..t])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeLevel {
    /// String length (joint) or steps (chronological).
    pub length: usize,
    pub compared: usize,
    /// Largest `μ / ξ` with its witness, over pairs with `ξ > 0`.
    pub max_ratio: Option<(Prob, String)>,
    /// Witnesses with `μ > 0 = ξ`.
    pub unbounded: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub levels: Vec<ProbeLevel>,
    /// Pairs where either side was undefined.
    pub skipped: usize,
}

impl ProbeReport {
    pub fn max_ratio(&self) -> Option<&(Prob, String)> {
        self.levels.iter().filter_map(|l| l.max_ratio.as_ref()).max_by(|a, b| a.0.cmp(&b.0))
    }

    pub fn bounded(&self) -> bool {
        self.levels.iter().all(|l| l.unbounded.is_empty())
    }

    /// `μ ≤ c ξ` on every compared pair.
    pub fn within(&self, c: &Prob) -> bool {
        self.bounded() && self.max_ratio().is_none_or(|(r, _)| r <= c)
    }
}

enum Cmp {
    Skip,
    Undefined,
    Unbounded(String),
    Ratio(Prob, String),
}

fn level(length: usize, cmps: Vec<Cmp>, skipped: &mut usize) -> ProbeLevel {
    let mut lv = ProbeLevel { length, compared: 0, max_ratio: None, unbounded: vec![] };
    for c in cmps {
        match c {
            Cmp::Skip => {}
            Cmp::Undefined => *skipped += 1,
            Cmp::Unbounded(w) => {
                lv.compared += 1;
                lv.unbounded.push(w);
            }
            Cmp::Ratio(r, w) => {
                lv.compared += 1;
                if lv.max_ratio.as_ref().is_none_or(|(b, _)| r > *b) {
                    lv.max_ratio = Some((r, w));
                }
            }
        }
    }
    lv
}

fn compare(mu: Result<Prob>, xi: Result<Prob>, witness: String) -> Cmp {
    match (mu, xi) {
        (Ok(m), Ok(x)) => match (m.is_zero(), x.is_zero()) {
            (true, _) => Cmp::Skip,
            (false, true) => Cmp::Unbounded(witness),
            (false, false) => Cmp::Ratio(&m / &x, witness),
        },
        _ => Cmp::Undefined,
    }
}

/// Per-length maximum of `μ(x) / ξ(x)` over joint strings of length
/// `1..=depth`; `0/0` is skipped and `x/0` recorded as unbounded.
pub fn domination_probe_joint<M, X>(mu: &M, xi: &X, depth: usize) -> Result<ProbeReport>
where
    M: JointSemimeasure + ?Sized,
    X: JointSemimeasure + ?Sized,
{
    if !mu.interface().same_shape(xi.interface()) {
        return Err(UaiError::Alphabet("probe sides disagree on alphabets".into()));
    }
    let mut skipped = 0;
    let levels = (1..=depth)
        .map(|len| {
            let cmps = History::all_of_len(mu.interface(), len)
                .par_iter()
                .map(|x| compare(mu.eval(x), xi.eval(x), x.to_string()))
                .collect();
            level(len, cmps, &mut skipped)
        })
        .collect();
    Ok(ProbeReport { levels, skipped })
}

/// Per-step maximum of `μ(e ‖ a) / ξ(e ‖ a)` over complete histories of
/// `1..=steps` steps.
pub fn domination_probe_chron<M, X>(mu: &M, xi: &X, steps: usize) -> Result<ProbeReport>
where
    M: ChronEnv + ?Sized,
    X: ChronEnv + ?Sized,
{
    if !mu.interface().same_shape(xi.interface()) {
        return Err(UaiError::Alphabet("probe sides disagree on alphabets".into()));
    }
    let mut skipped = 0;
    let levels = (1..=steps)
        .map(|t| {
            let cmps = History::all_complete(mu.interface(), t)
                .par_iter()
                .map(|h| compare(mu.eval_history(h), xi.eval_history(h), h.to_string()))
                .collect();
            level(t, cmps, &mut skipped)
        })
        .collect();
    Ok(ProbeReport { levels, skipped })
}
