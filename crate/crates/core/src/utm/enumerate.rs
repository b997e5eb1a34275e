//! Budget-bounded program enumeration.
//!
//! A depth-first walk over the program tape: whenever the machine asks for
//! a bit and fewer than `L` bits have been read, both continuations are
//! explored. When a run first emits an output `y`, the prefix `p` read so
//! far is the minimal program for `y` on that branch, and `2^{-l(p)}` is
//! added to `mass(y)`. Masses are kept as integer counts over `2^L`.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::machine::{MachineKind, State, Stop};
use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;
use crate::semimeasure::{ChronEnv, JointSemimeasure};

/// Largest supported program-length budget.
pub const MAX_L: u32 = 24;
/// Largest supported output depth.
pub const MAX_DEPTH: usize = 40;

const SPLIT_BITS: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumParams {
    pub kind: MachineKind,
    /// Maximum program bits read.
    pub l: u32,
    /// Maximum executed instructions.
    pub s: u64,
    /// Maximum output length.
    pub depth: usize,
}

impl EnumParams {
    fn validate(&self) -> Result<()> {
        if self.l > MAX_L {
            return Err(UaiError::Spec(format!("L = {} exceeds {MAX_L}", self.l)));
        }
        if self.depth > MAX_DEPTH {
            return Err(UaiError::Spec(format!("depth {} exceeds {MAX_DEPTH}", self.depth)));
        }
        Ok(())
    }
}

fn key(y: &[u8]) -> u64 {
    y.iter().fold(1u64, |k, &b| (k << 1) | b as u64)
}

/// The lower approximation `ξ^{L,S}` on outputs up to `depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumApprox {
    pub params: EnumParams,
    /// The action tape (chronological machine only).
    pub actions: Vec<u8>,
    counts: HashMap<u64, u64>,
    interface: Interface,
}

impl EnumApprox {
    /// `2^L · mass(y)`.
    pub fn count(&self, y: &[u8]) -> u64 {
        if y.len() > self.params.depth {
            return 0;
        }
        self.counts.get(&key(y)).copied().unwrap_or(0)
    }

    pub fn mass(&self, y: &[u8]) -> Prob {
        Prob::dyadic_count(self.count(y), self.params.l)
    }

    /// Nonzero counts ordered by key, for serialization and comparison.
    pub fn sorted_counts(&self) -> Vec<(u64, u64)> {
        let sorted: BTreeMap<u64, u64> = self.counts.iter().map(|(k, v)| (*k, *v)).collect();
        sorted.into_iter().collect()
    }

    pub(crate) fn from_parts(params: EnumParams, actions: Vec<u8>, counts: Vec<(u64, u64)>) -> Self {
        EnumApprox { params, actions, counts: counts.into_iter().collect(), interface: Interface::binary() }
    }
}

fn walk(
    mut st: State,
    params: &EnumParams,
    actions: &[u8],
    forced: &[u8],
    counts: &mut HashMap<u64, u64>,
) {
    let mut stack = vec![];
    loop {
        let stop = st.run(actions, params.s, params.depth, |s| {
            let j = s.bits_read;
            if j < forced.len() && forced[j..].iter().any(|&b| b != 0) {
                return;
            }
            *counts.entry(key(&s.output)).or_insert(0) += 1u64 << (params.l as usize - j);
        });
        if stop == Stop::NeedBit && st.bits_read < params.l as usize {
            let j = st.bits_read;
            if j < forced.len() {
                st.feed(forced[j]);
                continue;
            }
            let mut other = st.clone();
            other.feed(1);
            stack.push(other);
            st.feed(0);
            continue;
        }
        match stack.pop() {
            Some(next) => st = next,
            None => return,
        }
    }
}

fn enumerate(params: EnumParams, actions: Vec<u8>) -> Result<EnumApprox> {
    params.validate()?;
    let k = params.l.min(SPLIT_BITS);
    let parts: Vec<HashMap<u64, u64>> = (0u64..1 << k)
        .into_par_iter()
        .map(|code| {
            let forced: Vec<u8> = (0..k).rev().map(|i| ((code >> i) & 1) as u8).collect();
            let mut counts = HashMap::new();
            walk(State::new(params.kind), &params, &actions, &forced, &mut counts);
            counts
        })
        .collect();
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for part in parts {
        for (k, v) in part {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    // the empty program already "outputs" the empty string
    counts.insert(key(&[]), 1u64 << params.l);
    Ok(EnumApprox { params, actions, counts, interface: Interface::binary() })
}

/// `ξ^{L,S}` on the joint machine, for outputs up to `depth` symbols.
pub fn enumerate_joint(l: u32, s: u64, depth: usize) -> Result<EnumApprox> {
    enumerate(EnumParams { kind: MachineKind::Joint, l, s, depth }, vec![])
}

/// `ξ^{L,S}(· ‖ a)` on the chronological machine for one action tape; the
/// percept depth equals the tape length.
pub fn enumerate_chron(l: u32, s: u64, actions: &[u8]) -> Result<EnumApprox> {
    if actions.iter().any(|&a| a > 1) {
        return Err(UaiError::Alphabet("the machine reads binary actions".into()));
    }
    enumerate(EnumParams { kind: MachineKind::Chron, l, s, depth: actions.len() }, actions.to_vec())
}

fn binary_symbols(x: &History) -> Result<Vec<u8>> {
    x.symbols()
        .map(|(_, s)| {
            if s > 1 {
                Err(UaiError::SymbolOutOfRange { symbol: s, size: 2 })
            } else {
                Ok(s as u8)
            }
        })
        .collect()
}

impl JointSemimeasure for EnumApprox {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    /// Strings longer than the enumeration depth get mass 0.
    fn eval(&self, x: &History) -> Result<Prob> {
        if self.params.kind != MachineKind::Joint {
            return Err(UaiError::Spec("chronological enumeration used as a joint semimeasure".into()));
        }
        Ok(self.mass(&binary_symbols(x)?))
    }

    fn label(&self) -> String {
        format!("enum_joint(L={},S={})", self.params.l, self.params.s)
    }
}

/// `ξ^{L,S}(e ‖ a)` for every binary action sequence up to `n` steps,
/// built from one chronological enumeration per length-`n` action tape.
///
/// The action discipline means percepts `e_{1:t}` never depend on `a_{>t}`,
/// so shorter queries read the table of the zero-padded tape.
#[derive(Clone, Debug)]
pub struct ChronEnumEnv {
    pub l: u32,
    pub s: u64,
    pub n: usize,
    tables: Vec<EnumApprox>,
    interface: Interface,
}

impl ChronEnumEnv {
    pub fn new(l: u32, s: u64, n: usize) -> Result<Self> {
        Self::with_loader(l, s, n, |tape| enumerate_chron(l, s, tape))
    }

    /// Builds the tables through `load`, e.g. a cache lookup.
    pub fn with_loader(l: u32, s: u64, n: usize, load: impl Fn(&[u8]) -> Result<EnumApprox> + Sync) -> Result<Self> {
        if n > 16 {
            return Err(UaiError::Spec(format!("{n} steps is too many action tapes")));
        }
        let tables: Vec<EnumApprox> = (0u64..1 << n)
            .into_par_iter()
            .map(|code| {
                let tape: Vec<u8> = (0..n).rev().map(|i| ((code >> i) & 1) as u8).collect();
                load(&tape)
            })
            .collect::<Result<_>>()?;
        Ok(ChronEnumEnv { l, s, n, tables, interface: Interface::binary() })
    }

    pub fn table(&self, actions: &[u8]) -> &EnumApprox {
        let code = actions.iter().fold(0usize, |c, &a| (c << 1) | a as usize) << (self.n - actions.len());
        &self.tables[code]
    }

    pub fn tables(&self) -> &[EnumApprox] {
        &self.tables
    }
}

impl ChronEnv for ChronEnumEnv {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    /// Histories longer than `n` steps get mass 0.
    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        if percepts.len() != actions.len() {
            return Err(UaiError::LengthMismatch { actions: actions.len(), percepts: percepts.len() });
        }
        if actions.len() > self.n {
            return Ok(Prob::zero());
        }
        let to_bits = |v: &mut dyn Iterator<Item = u32>| -> Result<Vec<u8>> {
            v.map(|s| if s > 1 { Err(UaiError::SymbolOutOfRange { symbol: s, size: 2 }) } else { Ok(s as u8) })
                .collect()
        };
        let a = to_bits(&mut actions.iter().map(|a| a.0))?;
        let e = to_bits(&mut percepts.iter().map(|e| e.0))?;
        Ok(self.table(&a).mass(&e))
    }

    fn label(&self) -> String {
        format!("enum_chron(L={},S={})", self.l, self.s)
    }
}

/// A joint enumeration exposing the diagonal budget schedule
/// `k ↦ ξ^{min(k, L), min(k·stride, S)}` through `eval_at_budget`; levels are
/// enumerated on first use.
pub struct BudgetedJoint {
    l: u32,
    s: u64,
    stride: u64,
    depth: usize,
    levels: Vec<OnceLock<EnumApprox>>,
    interface: Interface,
}

impl BudgetedJoint {
    pub fn new(l: u32, s: u64, stride: u64, depth: usize) -> Result<Self> {
        if stride == 0 {
            return Err(UaiError::Spec("budget stride must be positive".into()));
        }
        EnumParams { kind: MachineKind::Joint, l, s, depth }.validate()?;
        let top = (l as u64).max(s.div_ceil(stride)) as usize;
        Ok(BudgetedJoint {
            l,
            s,
            stride,
            depth,
            levels: (0..=top).map(|_| OnceLock::new()).collect(),
            interface: Interface::binary(),
        })
    }

    pub fn top_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn budget(&self, k: u32) -> (u32, u64) {
        let k = k.min(self.top_level());
        (k.min(self.l), (k as u64 * self.stride).min(self.s))
    }

    /// Installs a precomputed table (e.g. from a cache) for the full budget.
    pub fn preload_top(&self, approx: EnumApprox) -> Result<()> {
        let expected = EnumParams { kind: MachineKind::Joint, l: self.l, s: self.s, depth: self.depth };
        if approx.params != expected {
            return Err(UaiError::Cache("preloaded table has different budgets".into()));
        }
        let _ = self.levels[self.top_level() as usize].set(approx);
        Ok(())
    }

    pub fn level(&self, k: u32) -> &EnumApprox {
        let k = k.min(self.top_level());
        self.levels[k as usize].get_or_init(|| {
            let (l, s) = self.budget(k);
            enumerate_joint(l, s, self.depth).expect("validated parameters")
        })
    }
}

impl JointSemimeasure for BudgetedJoint {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        self.level(self.top_level()).eval(x)
    }

    fn eval_at_budget(&self, x: &History, budget: u32) -> Result<Prob> {
        self.level(budget).eval(x)
    }

    fn label(&self) -> String {
        format!("enum_joint(L={},S={},stride={})", self.l, self.s, self.stride)
    }
}
