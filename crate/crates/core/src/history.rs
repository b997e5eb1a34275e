//! Interleaved action/percept histories.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Action, Interface, Percept, Slot};
use crate::error::{Result, UaiError};

/// A finite history `a_1 e_1 a_2 e_2 ...`, possibly ending after an action.
///
/// Alternation is structural: there are as many percepts as actions, or one
/// fewer when an action is pending.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct History {
    actions: Vec<Action>,
    percepts: Vec<Percept>,
}

impl History {
    pub fn empty() -> Self {
        History::default()
    }

    pub fn interleave(actions: Vec<Action>, percepts: Vec<Percept>) -> Result<Self> {
        let (na, ne) = (actions.len(), percepts.len());
        if na == ne || na == ne + 1 {
            Ok(History { actions, percepts })
        } else {
            Err(UaiError::LengthMismatch { actions: na, percepts: ne })
        }
    }

    pub fn split(&self) -> (Vec<Action>, Vec<Percept>) {
        (self.actions.clone(), self.percepts.clone())
    }

    pub fn into_split(self) -> (Vec<Action>, Vec<Percept>) {
        (self.actions, self.percepts)
    }

    /// Builds a history from raw symbol indices; odd positions (1-based) are
    /// actions.
    pub fn from_symbols(symbols: impl IntoIterator<Item = u32>) -> Self {
        let mut h = History::empty();
        for s in symbols {
            h.push_symbol(s);
        }
        h
    }

    /// Parses a string of decimal digits, one symbol per digit.
    pub fn parse(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| UaiError::Alternation(format!("bad symbol `{c}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(History::from_symbols(symbols))
    }

    /// Diagonal history `a_1 a_1 a_2 a_2 ...` where every percept repeats the
    /// preceding action's index.
    pub fn diagonal(bits: &[u32]) -> Self {
        History {
            actions: bits.iter().map(|&b| Action(b)).collect(),
            percepts: bits.iter().map(|&b| Percept(b)).collect(),
        }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn percepts(&self) -> &[Percept] {
        &self.percepts
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.actions.len() + self.percepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Number of completed action/percept cycles.
    pub fn steps(&self) -> usize {
        self.percepts.len()
    }

    /// True if the history ends with an action awaiting its percept.
    pub fn is_pending(&self) -> bool {
        self.actions.len() > self.percepts.len()
    }

    pub fn next_slot(&self) -> Slot {
        if self.is_pending() {
            Slot::Percept
        } else {
            Slot::Action
        }
    }

    /// Symbol index at 0-based position `i`.
    pub fn symbol(&self, i: usize) -> u32 {
        if i % 2 == 0 {
            self.actions[i / 2].0
        } else {
            self.percepts[i / 2].0
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = (Slot, u32)> + '_ {
        (0..self.len()).map(move |i| {
            let slot = if i % 2 == 0 { Slot::Action } else { Slot::Percept };
            (slot, self.symbol(i))
        })
    }

    pub fn last_action(&self) -> Option<Action> {
        self.actions.last().copied()
    }

    pub fn push_symbol(&mut self, s: u32) {
        match self.next_slot() {
            Slot::Action => self.actions.push(Action(s)),
            Slot::Percept => self.percepts.push(Percept(s)),
        }
    }

    pub fn pop_symbol(&mut self) -> Option<u32> {
        if self.is_pending() {
            self.actions.pop().map(|a| a.0)
        } else {
            self.percepts.pop().map(|e| e.0)
        }
    }

    /// `self` followed by symbol `s` in the next slot.
    pub fn extended(&self, s: u32) -> History {
        let mut h = self.clone();
        h.push_symbol(s);
        h
    }

    pub fn with_action(&self, a: Action) -> Result<History> {
        if self.is_pending() {
            return Err(UaiError::Alternation(format!("action after pending action in `{self}`")));
        }
        Ok(self.extended(a.0))
    }

    pub fn with_percept(&self, e: Percept) -> Result<History> {
        if !self.is_pending() {
            return Err(UaiError::Alternation(format!("percept without pending action in `{self}`")));
        }
        Ok(self.extended(e.0))
    }

    /// Symbol prefix of length `n`.
    pub fn prefix(&self, n: usize) -> History {
        let n = n.min(self.len());
        History {
            actions: self.actions[..n.div_ceil(2)].to_vec(),
            percepts: self.percepts[..n / 2].to_vec(),
        }
    }

    /// The completed history `ae_{<t}` when this one is pending on `a_t`.
    pub fn without_pending(&self) -> History {
        if self.is_pending() {
            self.prefix(self.len() - 1)
        } else {
            self.clone()
        }
    }

    pub fn validate(&self, interface: &Interface) -> Result<()> {
        for (slot, s) in self.symbols() {
            let size = interface.size(slot);
            if s as usize >= size {
                return Err(UaiError::SymbolOutOfRange { symbol: s, size });
            }
        }
        Ok(())
    }

    /// Every string of exactly `len` symbols, in lexicographic order.
    pub fn all_of_len(interface: &Interface, len: usize) -> Vec<History> {
        let mut out = vec![History::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * 2);
            for h in &out {
                for s in 0..interface.size(h.next_slot()) as u32 {
                    next.push(h.extended(s));
                }
            }
            out = next;
        }
        out
    }

    /// Every string of at most `len` symbols, shorter first.
    pub fn all_up_to_len(interface: &Interface, len: usize) -> Vec<History> {
        (0..=len).flat_map(|l| History::all_of_len(interface, l)).collect()
    }

    /// Every completed history of exactly `steps` cycles.
    pub fn all_complete(interface: &Interface, steps: usize) -> Vec<History> {
        History::all_of_len(interface, 2 * steps)
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let compact = self.symbols().all(|(_, s)| s < 10);
        for (i, (_, s)) in self.symbols().enumerate() {
            if !compact && i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}
