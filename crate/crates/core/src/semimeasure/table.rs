//! Explicit conditional tables: finite stand-ins for lower semicomputable
//! components, loaded from JSON.
//!
//! A table lists conditionals keyed by a context (a string of symbol
//! indices). In `suffix` mode the longest listed suffix of the current
//! history applies; in `exact` mode the whole history must match. Contexts
//! with no entry, or beyond `depth`, fall back to `default_rule`.

use serde::{Deserialize, Serialize};

use crate::alphabet::{Action, Interface, Percept, Slot};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;

use super::{ChronEnv, JointSemimeasure, SharedEnv, SharedJoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Joint,
    Chron,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matching {
    Exact,
    #[default]
    Suffix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefaultRule {
    Uniform,
    #[default]
    Halt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub context: Vec<u32>,
    /// Slot the conditional predicts. Joint suffix tables may leave it unset
    /// to match either slot; chronological tables always predict percepts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Slot>,
    pub probs: Vec<Prob>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub kind: TableKind,
    #[serde(default = "Interface::binary")]
    pub alphabet: Interface,
    #[serde(default)]
    pub matching: Matching,
    /// Joint tables: number of symbols; chronological tables: number of
    /// steps. Positions past it use the default rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default)]
    pub conditionals: Vec<TableEntry>,
    #[serde(default)]
    pub default_rule: DefaultRule,
    #[serde(default)]
    pub declared_measure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn context_string(ctx: &[u32]) -> String {
    History::from_symbols(ctx.iter().copied()).to_string()
}

/// Slot of the symbol that follows a context of length `len`.
fn slot_after(len: usize) -> Slot {
    if len % 2 == 0 {
        Slot::Action
    } else {
        Slot::Percept
    }
}

#[derive(Clone, Debug)]
struct Rows {
    interface: Interface,
    matching: Matching,
    depth: Option<usize>,
    entries: Vec<TableEntry>,
    default_rule: DefaultRule,
}

impl Rows {
    fn validate(spec: &TableSpec) -> Result<Rows> {
        let interface = spec.alphabet.clone();
        let mut entries: Vec<TableEntry> = Vec::with_capacity(spec.conditionals.len());
        for entry in &spec.conditionals {
            let ctx = context_string(&entry.context);
            let reject = |reason: String| UaiError::InvalidTable { context: ctx.clone(), reason };
            let mut entry = entry.clone();
            match (spec.kind, spec.matching) {
                (TableKind::Chron, _) => {
                    if entry.at == Some(Slot::Action) {
                        return Err(reject("chronological tables predict percepts only".into()));
                    }
                    entry.at = Some(Slot::Percept);
                    if spec.matching == Matching::Exact && entry.context.len() % 2 == 0 {
                        return Err(reject("exact chronological context must end with an action".into()));
                    }
                }
                (TableKind::Joint, Matching::Exact) => {
                    let slot = slot_after(entry.context.len());
                    if entry.at.is_some_and(|s| s != slot) {
                        return Err(reject(format!("context length implies {slot:?}")));
                    }
                    entry.at = Some(slot);
                }
                (TableKind::Joint, Matching::Suffix) => {}
            }
            let slots: Vec<Slot> = match entry.at {
                Some(s) => vec![s],
                None => vec![Slot::Action, Slot::Percept],
            };
            for &slot in &slots {
                if entry.probs.len() != interface.size(slot) {
                    return Err(reject(format!(
                        "{} probabilities for a {:?} alphabet of size {}",
                        entry.probs.len(),
                        slot,
                        interface.size(slot)
                    )));
                }
                // symbols in the context alternate backwards from the slot
                for (back, &s) in entry.context.iter().rev().enumerate() {
                    let s_slot = match (slot, back % 2) {
                        (Slot::Action, 0) | (Slot::Percept, 1) => Slot::Percept,
                        _ => Slot::Action,
                    };
                    if s as usize >= interface.size(s_slot) {
                        return Err(reject(format!("symbol {s} out of range")));
                    }
                }
            }
            let total: Prob = entry.probs.iter().sum();
            if total > Prob::one() {
                return Err(reject(format!("conditionals sum to {total} > 1")));
            }
            if entries.iter().any(|e| e.context == entry.context && e.at == entry.at) {
                return Err(reject("duplicate context".into()));
            }
            entries.push(entry);
        }
        Ok(Rows {
            interface,
            matching: spec.matching,
            depth: spec.depth,
            entries,
            default_rule: spec.default_rule,
        })
    }

    fn default_prob(&self, slot: Slot) -> Prob {
        match self.default_rule {
            DefaultRule::Uniform => Prob::new(1, self.interface.size(slot) as u64),
            DefaultRule::Halt => Prob::zero(),
        }
    }

    /// Conditional of `next` after the symbol string `ctx`; `position` is the
    /// table-depth coordinate of the prediction.
    fn lookup(&self, ctx: &[u32], slot: Slot, next: u32, position: usize) -> Prob {
        if self.depth.is_some_and(|d| position >= d) {
            return self.default_prob(slot);
        }
        let applies = |e: &&TableEntry| e.at.is_none_or(|s| s == slot);
        let hit = match self.matching {
            Matching::Exact => self.entries.iter().filter(applies).find(|e| e.context == ctx),
            Matching::Suffix => self
                .entries
                .iter()
                .filter(applies)
                .filter(|e| ctx.ends_with(&e.context))
                .max_by_key(|e| e.context.len()),
        };
        match hit {
            Some(e) => e.probs[next as usize].clone(),
            None => self.default_prob(slot),
        }
    }
}

/// A joint semimeasure given by an explicit conditional table.
#[derive(Clone, Debug)]
pub struct JointTable {
    rows: Rows,
    declared_measure: bool,
    name: String,
}

/// A chronological semimeasure given by an explicit conditional table over
/// contexts `ae_{<t} a_t`.
#[derive(Clone, Debug)]
pub struct ChronTable {
    rows: Rows,
    declared_measure: bool,
    name: String,
}

impl JointTable {
    pub fn new(spec: &TableSpec) -> Result<Self> {
        if spec.kind != TableKind::Joint {
            return Err(UaiError::Spec("expected a joint table".into()));
        }
        Ok(JointTable {
            rows: Rows::validate(spec)?,
            declared_measure: spec.declared_measure,
            name: spec.name.clone().unwrap_or_else(|| "joint_table".into()),
        })
    }
}

impl ChronTable {
    pub fn new(spec: &TableSpec) -> Result<Self> {
        if spec.kind != TableKind::Chron {
            return Err(UaiError::Spec("expected a chronological table".into()));
        }
        Ok(ChronTable {
            rows: Rows::validate(spec)?,
            declared_measure: spec.declared_measure,
            name: spec.name.clone().unwrap_or_else(|| "chron_table".into()),
        })
    }
}

impl JointSemimeasure for JointTable {
    fn interface(&self) -> &Interface {
        &self.rows.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        x.validate(&self.rows.interface)?;
        let symbols: Vec<u32> = x.symbols().map(|(_, s)| s).collect();
        let mut v = Prob::one();
        for (i, (slot, s)) in x.symbols().enumerate() {
            v *= &self.rows.lookup(&symbols[..i], slot, s, i);
            if v.is_zero() {
                break;
            }
        }
        Ok(v)
    }

    fn declared_measure(&self) -> bool {
        self.declared_measure
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

impl ChronEnv for ChronTable {
    fn interface(&self) -> &Interface {
        &self.rows.interface
    }

    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        let mut ctx: Vec<u32> = Vec::with_capacity(2 * actions.len());
        let mut v = Prob::one();
        for (t, (a, e)) in actions.iter().zip(percepts).enumerate() {
            ctx.push(a.0);
            v *= &self.rows.lookup(&ctx, Slot::Percept, e.0, t);
            if v.is_zero() {
                break;
            }
            ctx.push(e.0);
        }
        Ok(v)
    }

    fn declared_measure(&self) -> bool {
        self.declared_measure
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// A table component of either kind.
#[derive(Clone)]
pub enum TableComponent {
    Joint(SharedJoint),
    Chron(SharedEnv),
}

pub fn table_component(spec: &TableSpec) -> Result<TableComponent> {
    Ok(match spec.kind {
        TableKind::Joint => TableComponent::Joint(std::sync::Arc::new(JointTable::new(spec)?)),
        TableKind::Chron => TableComponent::Chron(std::sync::Arc::new(ChronTable::new(spec)?)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semimeasure::check::{check_chronological, check_semimeasure};

    fn markov_spec() -> TableSpec {
        serde_json::from_str(
            r#"{
                "kind": "joint",
                "conditionals": [
                    {"context": [], "at": "action", "probs": ["1/2", "1/2"]},
                    {"context": [0], "probs": ["3/4", "1/4"]},
                    {"context": [1], "probs": ["1/4", "3/4"]}
                ],
                "declared_measure": true
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn markov_table_passes_depth_five() {
        let t = JointTable::new(&markov_spec()).unwrap();
        let report = check_semimeasure(&t, 5);
        assert!(report.passed(), "{:?}", report.violations().collect::<Vec<_>>());
        assert!(report.all_equal());
        assert_eq!(t.eval(&History::parse("0010").unwrap()).unwrap(), Prob::new(3, 128));
    }

    #[test]
    fn empty_uniform_table_is_uniform() {
        let spec: TableSpec =
            serde_json::from_str(r#"{"kind":"joint","default_rule":"uniform","declared_measure":true}"#).unwrap();
        let t = JointTable::new(&spec).unwrap();
        for x in History::all_up_to_len(&Interface::binary(), 4) {
            assert_eq!(t.eval(&x).unwrap(), Prob::dyadic(x.len() as u32));
        }
    }

    #[test]
    fn excess_mass_is_rejected_with_context() {
        let spec: TableSpec = serde_json::from_str(
            r#"{"kind":"joint","conditionals":[{"context":[1],"at":"percept","probs":["6/10","5/10"]}]}"#,
        )
        .unwrap();
        match JointTable::new(&spec) {
            Err(UaiError::InvalidTable { context, reason }) => {
                assert_eq!(context, "1");
                assert!(reason.contains("11/10"), "{reason}");
            }
            other => panic!("expected rejection, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn halt_default_beyond_depth() {
        let mut spec = markov_spec();
        spec.depth = Some(2);
        let t = JointTable::new(&spec).unwrap();
        assert_eq!(t.eval(&History::parse("00").unwrap()).unwrap(), Prob::new(3, 8));
        assert_eq!(t.eval(&History::parse("000").unwrap()).unwrap(), Prob::zero());
        let report = check_semimeasure(&t, 4);
        assert!(report.passed());
        assert!(!report.all_equal());
        assert!(!report.declaration_consistent(), "declared measure but halts past depth");
    }

    #[test]
    fn chron_table_checks() {
        let spec: TableSpec = serde_json::from_str(
            r#"{"kind":"chron","conditionals":[
                {"context":[0],"probs":["3/4","1/4"]},
                {"context":[1],"probs":["1/4","3/4"]}
            ],"declared_measure":true}"#,
        )
        .unwrap();
        let t = ChronTable::new(&spec).unwrap();
        assert!(check_chronological(&t, 4).passed());
        let bad: TableSpec = serde_json::from_str(
            r#"{"kind":"chron","conditionals":[{"context":[0],"at":"action","probs":["1/2","1/2"]}]}"#,
        )
        .unwrap();
        assert!(ChronTable::new(&bad).is_err());
    }

    #[test]
    fn exact_mode_uses_parity() {
        let spec: TableSpec = serde_json::from_str(
            r#"{"kind":"joint","matching":"exact","default_rule":"uniform","conditionals":[
                {"context":[1],"probs":["0","1"]}
            ]}"#,
        )
        .unwrap();
        let t = JointTable::new(&spec).unwrap();
        assert_eq!(t.eval(&History::parse("11").unwrap()).unwrap(), Prob::new(1, 2));
        assert_eq!(t.eval(&History::parse("10").unwrap()).unwrap(), Prob::zero());
        let wrong: TableSpec = serde_json::from_str(
            r#"{"kind":"joint","matching":"exact","conditionals":[{"context":[1],"at":"action","probs":["1/2","1/2"]}]}"#,
        )
        .unwrap();
        assert!(JointTable::new(&wrong).is_err());
    }
}
