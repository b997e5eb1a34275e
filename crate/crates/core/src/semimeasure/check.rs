//! Exhaustive checkers for the semimeasure and chronological conditions.
//!
//! Violations are data: every context up to the requested depth produces a
//! [`CheckRow`], and the report is ordered shortest-first, then
//! lexicographically, regardless of how the work was scheduled.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::alphabet::{Action, Percept};
use crate::history::History;
use crate::prob::Prob;

use super::{ChronEnv, JointSemimeasure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `lhs == rhs`: no mass lost at this context.
    Equal,
    /// `lhs > rhs`: a strict deficit.
    Strict,
    /// `lhs < rhs`: the defining inequality fails.
    Violation,
    /// Evaluation was undefined (e.g. a zero conditioning prefix).
    Undefined(String),
}

impl Verdict {
    fn of(lhs: &Prob, rhs: &Prob) -> Verdict {
        match lhs.cmp(rhs) {
            std::cmp::Ordering::Equal => Verdict::Equal,
            std::cmp::Ordering::Greater => Verdict::Strict,
            std::cmp::Ordering::Less => Verdict::Violation,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::Strict => "strict",
            Verdict::Violation => "violation",
            Verdict::Undefined(_) => "undefined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    /// For joint checks the context `x`; for chronological checks the
    /// history `ae_{1:t}` followed by the next action `a_{t+1}`.
    pub witness: String,
    /// `ν(x)`, resp. `ν(e_{1:t} ‖ a_{1:t})`.
    pub lhs: Prob,
    /// `Σ_s ν(xs)`, resp. `Σ_e ν(e_{1:t}e ‖ a_{1:t+1})`.
    pub rhs: Prob,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub subject: String,
    pub depth: usize,
    /// Value on the empty string; must not exceed one.
    pub root: Option<Prob>,
    pub rows: Vec<CheckRow>,
    /// Extensions `xs` with `ν(xs) > ν(x)`.
    pub monotone_violations: Vec<String>,
    pub declared_measure: bool,
}

impl CheckReport {
    pub fn violations(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Violation)
    }

    pub fn root_ok(&self) -> bool {
        self.root.as_ref().is_none_or(|r| *r <= Prob::one())
    }

    pub fn passed(&self) -> bool {
        self.root_ok() && self.violations().next().is_none() && self.monotone_violations.is_empty()
    }

    pub fn undefined(&self) -> usize {
        self.rows.iter().filter(|r| matches!(r.verdict, Verdict::Undefined(_))).count()
    }

    pub fn count(&self, verdict: &Verdict) -> usize {
        self.rows.iter().filter(|r| &r.verdict == verdict).count()
    }

    /// Every defined row holds with equality and the root has mass one.
    pub fn all_equal(&self) -> bool {
        self.root.as_ref().is_none_or(|r| r.is_one())
            && self
                .rows
                .iter()
                .all(|r| matches!(r.verdict, Verdict::Equal | Verdict::Undefined(_)))
    }

    pub fn all_strict(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Strict)
    }

    /// The component's measure/defective declaration matches the checked
    /// region.
    pub fn declaration_consistent(&self) -> bool {
        self.declared_measure == self.all_equal()
    }

    /// CSV rows `witness,lhs,rhs,verdict`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("witness,lhs,rhs,verdict\n");
        for r in &self.rows {
            let witness = if r.witness.is_empty() { "ε" } else { &r.witness };
            let _ = writeln!(out, "{},{},{},{}", witness, r.lhs, r.rhs, r.verdict.as_str());
        }
        out
    }
}

/// Checks `ν(x) ≥ Σ_s ν(xs)` for every `x` with `l(x) < depth`, plus
/// `ν(ε) ≤ 1` and pointwise monotonicity.
pub fn check_semimeasure<J: JointSemimeasure + ?Sized>(nu: &J, depth: usize) -> CheckReport {
    let interface = nu.interface();
    let contexts = History::all_up_to_len(interface, depth.saturating_sub(1));
    let results: Vec<(CheckRow, Vec<String>)> = contexts
        .par_iter()
        .map(|x| {
            let witness = x.to_string();
            let lhs = match nu.eval(x) {
                Ok(v) => v,
                Err(e) => return (undefined_row(witness, e.to_string()), vec![]),
            };
            let mut rhs = Prob::zero();
            let mut monotone = Vec::new();
            for s in 0..interface.size(x.next_slot()) as u32 {
                let xs = x.extended(s);
                match nu.eval(&xs) {
                    Ok(v) => {
                        if v > lhs {
                            monotone.push(xs.to_string());
                        }
                        rhs += &v;
                    }
                    Err(e) => return (undefined_row(witness, e.to_string()), vec![]),
                }
            }
            let verdict = Verdict::of(&lhs, &rhs);
            (CheckRow { witness, lhs, rhs, verdict }, monotone)
        })
        .collect();
    let root = nu.eval(&History::empty()).ok();
    let mut rows = Vec::with_capacity(results.len());
    let mut monotone_violations = Vec::new();
    for (row, m) in results {
        rows.push(row);
        monotone_violations.extend(m);
    }
    CheckReport {
        subject: nu.label(),
        depth,
        root,
        rows,
        monotone_violations,
        declared_measure: nu.declared_measure(),
    }
}

/// Checks `ν(e_{1:t} ‖ a_{1:t}) ≥ Σ_e ν(e_{1:t}e ‖ a_{1:t+1})` for every
/// history with `t < depth` steps and every next action.
pub fn check_chronological<E: ChronEnv + ?Sized>(nu: &E, depth: usize) -> CheckReport {
    let interface = nu.interface();
    let contexts: Vec<History> = (0..depth)
        .flat_map(|t| History::all_complete(interface, t))
        .flat_map(|h| {
            interface
                .actions
                .symbols()
                .map(move |a| h.with_action(a).expect("complete history"))
        })
        .collect();
    let rows: Vec<CheckRow> = contexts
        .par_iter()
        .map(|ctx| {
            let witness = ctx.to_string();
            let t = ctx.steps();
            let actions: Vec<Action> = ctx.actions().to_vec();
            let mut percepts: Vec<Percept> = ctx.percepts().to_vec();
            let lhs = match nu.eval(&percepts, &actions[..t]) {
                Ok(v) => v,
                Err(e) => return undefined_row(witness, e.to_string()),
            };
            let mut rhs = Prob::zero();
            for e in interface.percepts.symbols() {
                percepts.push(e);
                match nu.eval(&percepts, &actions) {
                    Ok(v) => rhs += &v,
                    Err(err) => return undefined_row(witness, err.to_string()),
                }
                percepts.pop();
            }
            let verdict = Verdict::of(&lhs, &rhs);
            CheckRow { witness, lhs, rhs, verdict }
        })
        .collect();
    let root = nu.eval(&[], &[]).ok();
    CheckReport {
        subject: nu.label(),
        depth,
        root,
        rows,
        monotone_violations: Vec::new(),
        declared_measure: nu.declared_measure(),
    }
}

fn undefined_row(witness: String, why: String) -> CheckRow {
    CheckRow { witness, lhs: Prob::zero(), rhs: Prob::zero(), verdict: Verdict::Undefined(why) }
}
