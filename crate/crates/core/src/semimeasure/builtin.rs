//! Built-in components over the default binary interface.

use std::collections::HashMap;
use std::sync::Arc;

use crate::alphabet::{Action, Interface, Percept, Slot};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::prob::Prob;

use super::{ChronEnv, JointSemimeasure, Policy};

fn require_binary(interface: &Interface, what: &str) -> Result<()> {
    if interface.is_binary() {
        Ok(())
    } else {
        Err(UaiError::Alphabet(format!("{what} needs binary actions and percepts")))
    }
}

/// `ν(x) = Π 1/|slot alphabet|`.
#[derive(Clone, Debug)]
pub struct UniformJoint {
    interface: Interface,
}

impl UniformJoint {
    pub fn new(interface: Interface) -> Self {
        UniformJoint { interface }
    }
}

pub fn uniform_joint() -> UniformJoint {
    UniformJoint::new(Interface::binary())
}

impl JointSemimeasure for UniformJoint {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        let mut v = Prob::one();
        for (slot, _) in x.symbols() {
            v *= &Prob::new(1, self.interface.size(slot) as u64);
        }
        Ok(v)
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "uniform".into()
    }
}

/// Uniform actions; each percept copies (or, for the anti-copier,
/// complements) the action just before it.
///
/// On a consistent string the value is `2^{-⌈l(x)/2⌉}`, otherwise 0.
#[derive(Clone, Debug)]
pub struct CopyMachine {
    interface: Interface,
    complement: bool,
}

pub fn copy_machine() -> CopyMachine {
    CopyMachine { interface: Interface::binary(), complement: false }
}

pub fn anticopy_machine() -> CopyMachine {
    CopyMachine { interface: Interface::binary(), complement: true }
}

impl JointSemimeasure for CopyMachine {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        x.validate(&self.interface)?;
        let consistent = x
            .actions()
            .iter()
            .zip(x.percepts())
            .all(|(a, e)| (a.0 == e.0) != self.complement);
        Ok(if consistent { Prob::dyadic(x.actions().len() as u32) } else { Prob::zero() })
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        if self.complement { "anticopy".into() } else { "copy".into() }
    }
}

/// Point mass on the all-zero string; the semimeasure induced by the
/// constant-zero program.
#[derive(Clone, Debug)]
pub struct ZerosMachine {
    interface: Interface,
}

pub fn zeros_machine() -> ZerosMachine {
    ZerosMachine { interface: Interface::binary() }
}

impl JointSemimeasure for ZerosMachine {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        Ok(if x.symbols().all(|(_, s)| s == 0) { Prob::one() } else { Prob::zero() })
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "zeros".into()
    }
}

/// `ν(x) = 2^{-2 l(x)}`: strictly defective at every context.
#[derive(Clone, Debug)]
pub struct GeometricDefective {
    interface: Interface,
}

pub fn geometric_defective() -> GeometricDefective {
    GeometricDefective { interface: Interface::binary() }
}

impl JointSemimeasure for GeometricDefective {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        Ok(Prob::dyadic(2 * x.len() as u32))
    }

    fn label(&self) -> String {
        "geometric_defective".into()
    }
}

/// Memoryless binary environment: `P(e_t = a_t) = hit`, `P(e_t ≠ a_t) = miss`.
///
/// `μ^id` is `(1, 0)`, its complement `(0, 1)`, the uniform environment
/// `(1/2, 1/2)`; `hit + miss < 1` gives a halting (defective) environment.
#[derive(Clone, Debug)]
pub struct CopyingEnv {
    interface: Interface,
    hit: Prob,
    miss: Prob,
    name: String,
}

impl CopyingEnv {
    pub fn new(hit: Prob, miss: Prob, name: impl Into<String>) -> Result<Self> {
        if &hit + &miss > Prob::one() {
            return Err(UaiError::InvalidWeights(format!("hit {hit} + miss {miss} exceeds 1")));
        }
        Ok(CopyingEnv { interface: Interface::binary(), hit, miss, name: name.into() })
    }

    fn step(&self, a: Action, e: Percept) -> &Prob {
        if a.0 == e.0 {
            &self.hit
        } else {
            &self.miss
        }
    }
}

/// `μ^id(e_t | ae_{<t} a_t) = [e_t = a_t]`.
pub fn mu_id() -> CopyingEnv {
    CopyingEnv::new(Prob::one(), Prob::zero(), "mu_id").expect("valid")
}

/// `μ^id` over a caller-supplied interface, which must be binary.
pub fn mu_id_for(interface: &Interface) -> Result<CopyingEnv> {
    require_binary(interface, "mu_id")?;
    let mut env = mu_id();
    env.interface = interface.clone();
    Ok(env)
}

pub fn mu_not() -> CopyingEnv {
    CopyingEnv::new(Prob::zero(), Prob::one(), "mu_not").expect("valid")
}

pub fn noisy_copy(hit: Prob) -> Result<CopyingEnv> {
    let miss = Prob::one()
        .checked_sub(&hit)
        .ok_or_else(|| UaiError::InvalidWeights(format!("noisy_copy({hit})")))?;
    let name = format!("noisy_copy({hit})");
    CopyingEnv::new(hit, miss, name)
}

/// Copies the action with probability `hit`, halts otherwise.
pub fn lossy_echo(hit: Prob) -> Result<CopyingEnv> {
    let name = format!("lossy_echo({hit})");
    CopyingEnv::new(hit, Prob::zero(), name)
}

impl ChronEnv for CopyingEnv {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        let mut v = Prob::one();
        for (&a, &e) in actions.iter().zip(percepts) {
            v *= self.step(a, e);
            if v.is_zero() {
                break;
            }
        }
        Ok(v)
    }

    fn declared_measure(&self) -> bool {
        (&self.hit + &self.miss).is_one()
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Emits the same percept whatever the actions.
#[derive(Clone, Debug)]
pub struct ConstEnv {
    interface: Interface,
    percept: Percept,
}

impl ConstEnv {
    pub fn new(interface: Interface, percept: Percept) -> Result<Self> {
        if percept.index() >= interface.percepts.len() {
            return Err(UaiError::SymbolOutOfRange {
                symbol: percept.0,
                size: interface.percepts.len(),
            });
        }
        Ok(ConstEnv { interface, percept })
    }

    pub fn binary(bit: u32) -> Result<Self> {
        ConstEnv::new(Interface::binary(), Percept(bit))
    }
}

impl ChronEnv for ConstEnv {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, percepts: &[Percept], _actions: &[Action]) -> Result<Prob> {
        Ok(if percepts.iter().all(|&e| e == self.percept) { Prob::one() } else { Prob::zero() })
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("const_env({})", self.percept.0)
    }
}

/// `ν(e_{1:t} ‖ a_{1:t}) = |E|^{-t}`.
#[derive(Clone, Debug)]
pub struct UniformEnv {
    interface: Interface,
}

impl UniformEnv {
    pub fn new(interface: Interface) -> Self {
        UniformEnv { interface }
    }
}

pub fn uniform_env() -> UniformEnv {
    UniformEnv::new(Interface::binary())
}

impl ChronEnv for UniformEnv {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, percepts: &[Percept], _actions: &[Action]) -> Result<Prob> {
        let n = self.interface.size(Slot::Percept) as u64;
        Ok(Prob::new(1, n).pow(percepts.len() as u32))
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "uniform_env".into()
    }
}

/// Actions drawn i.i.d. from a fixed distribution over the action alphabet;
/// the action filler of the semimeasure representation.
#[derive(Clone, Debug)]
pub struct IidPolicy {
    interface: Interface,
    dist: Vec<Prob>,
}

impl IidPolicy {
    pub fn new(interface: Interface, dist: Vec<Prob>) -> Result<Self> {
        if dist.len() != interface.actions.len() {
            return Err(UaiError::InvalidWeights(format!(
                "filler has {} entries for {} actions",
                dist.len(),
                interface.actions.len()
            )));
        }
        if dist.iter().sum::<Prob>() > Prob::one() {
            return Err(UaiError::InvalidWeights("filler sums above 1".into()));
        }
        Ok(IidPolicy { interface, dist })
    }

    pub fn uniform(interface: Interface) -> Self {
        let n = interface.actions.len() as u64;
        let dist = vec![Prob::new(1, n); n as usize];
        IidPolicy { interface, dist }
    }

    pub fn binary_uniform() -> Self {
        IidPolicy::uniform(Interface::binary())
    }

    pub fn dist(&self) -> &[Prob] {
        &self.dist
    }
}

impl Policy for IidPolicy {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, actions: &[Action], _percepts: &[Percept]) -> Result<Prob> {
        let mut v = Prob::one();
        for a in actions {
            let p = self.dist.get(a.index()).ok_or(UaiError::SymbolOutOfRange {
                symbol: a.0,
                size: self.dist.len(),
            })?;
            v *= p;
        }
        Ok(v)
    }

    fn declared_measure(&self) -> bool {
        self.dist.iter().sum::<Prob>().is_one()
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.dist.iter().map(|p| p.to_string()).collect();
        format!("iid[{}]", parts.join(","))
    }
}

type Rule = Arc<dyn Fn(&History) -> Action + Send + Sync>;

/// A deterministic policy: a total map from completed histories to actions.
#[derive(Clone)]
pub struct DeterministicPolicy {
    interface: Interface,
    rule: Rule,
    name: String,
}

impl DeterministicPolicy {
    pub fn from_fn(
        interface: Interface,
        name: impl Into<String>,
        rule: impl Fn(&History) -> Action + Send + Sync + 'static,
    ) -> Self {
        DeterministicPolicy { interface, rule: Arc::new(rule), name: name.into() }
    }

    pub fn constant(interface: Interface, a: Action) -> Self {
        DeterministicPolicy::from_fn(interface, format!("constant({})", a.0), move |_| a)
    }

    /// Plays `pattern[t mod len]` at step `t` (0-based).
    pub fn cycle(interface: Interface, pattern: Vec<Action>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(UaiError::Spec("empty cycle pattern".into()));
        }
        let name = format!(
            "cycle({})",
            pattern.iter().map(|a| a.0.to_string()).collect::<Vec<_>>().join("")
        );
        Ok(DeterministicPolicy::from_fn(interface, name, move |h| {
            pattern[h.steps() % pattern.len()]
        }))
    }

    /// Table lookup with a fallback action for unlisted histories.
    pub fn from_table(interface: Interface, table: HashMap<History, Action>, fallback: Action) -> Self {
        DeterministicPolicy::from_fn(interface, "table", move |h| {
            table.get(h).copied().unwrap_or(fallback)
        })
    }

    pub fn act(&self, h: &History) -> Action {
        (self.rule)(h)
    }
}

impl std::fmt::Debug for DeterministicPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DeterministicPolicy({})", self.name)
    }
}

impl Policy for DeterministicPolicy {
    fn interface(&self) -> &Interface {
        &self.interface
    }

    fn eval(&self, actions: &[Action], percepts: &[Percept]) -> Result<Prob> {
        let mut h = History::empty();
        for (t, &a) in actions.iter().enumerate() {
            if self.act(&h) != a {
                return Ok(Prob::zero());
            }
            if t + 1 < actions.len() {
                h.push_symbol(a.0);
                h.push_symbol(percepts[t].0);
            }
        }
        Ok(Prob::one())
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> History {
        History::parse(s).unwrap()
    }

    #[test]
    fn copy_machine_values() {
        let c = copy_machine();
        assert_eq!(c.eval(&h("11")).unwrap(), Prob::new(1, 2));
        assert_eq!(c.eval(&h("10")).unwrap(), Prob::zero());
        assert_eq!(c.eval(&h("1")).unwrap(), Prob::new(1, 2));
        assert_eq!(c.eval(&h("0011")).unwrap(), Prob::new(1, 4));
        assert_eq!(anticopy_machine().eval(&h("10")).unwrap(), Prob::new(1, 2));
    }

    #[test]
    fn copy_machine_mass_per_length_class() {
        let c = copy_machine();
        let i = Interface::binary();
        for n in 0..=3 {
            let total: Prob = History::all_of_len(&i, 2 * n)
                .iter()
                .map(|x| c.eval(x).unwrap())
                .sum();
            assert_eq!(total, Prob::one(), "n = {n}");
        }
    }

    #[test]
    fn mu_id_conditionals() {
        let mu = mu_id();
        assert_eq!(mu.conditional(&h("1"), Percept(1)).unwrap(), Prob::one());
        assert_eq!(mu.conditional(&h("0"), Percept(1)).unwrap(), Prob::zero());
        // no history dependence along every history mu_id can produce
        for bits in [vec![], vec![0], vec![1, 1], vec![0, 1, 0]] {
            let past = History::diagonal(&bits);
            for a in 0..2 {
                let ctx = past.with_action(Action(a)).unwrap();
                assert_eq!(mu.conditional(&ctx, Percept(a)).unwrap(), Prob::one());
                assert_eq!(mu.conditional(&ctx, Percept(1 - a)).unwrap(), Prob::zero());
            }
        }
    }

    #[test]
    fn mu_id_rejects_non_binary() {
        use crate::alphabet::ActionAlphabet;
        let i = Interface {
            actions: ActionAlphabet::new(vec!["a".into(), "b".into(), "c".into()]).unwrap(),
            percepts: crate::alphabet::PerceptAlphabet::binary_reward(),
        };
        assert!(mu_id_for(&i).is_err());
        assert!(mu_id_for(&Interface::binary()).is_ok());
    }

    #[test]
    fn deterministic_policy_eval() {
        let p = DeterministicPolicy::constant(Interface::binary(), Action(1));
        assert_eq!(p.eval(&[Action(1), Action(1)], &[Percept(0)]).unwrap(), Prob::one());
        assert_eq!(p.eval(&[Action(1), Action(0)], &[Percept(0)]).unwrap(), Prob::zero());
        let c = DeterministicPolicy::cycle(Interface::binary(), vec![Action(0), Action(1)]).unwrap();
        assert_eq!(c.act(&h("00")), Action(1));
        assert_eq!(c.conditional(&h("00"), Action(1)).unwrap(), Prob::one());
    }

    #[test]
    fn copying_env_rejects_excess_mass() {
        assert!(CopyingEnv::new(Prob::new(3, 4), Prob::new(1, 2), "bad").is_err());
        assert!(noisy_copy(Prob::new(3, 2)).is_err());
        assert!(!lossy_echo(Prob::new(1, 2)).unwrap().declared_measure());
    }
}
