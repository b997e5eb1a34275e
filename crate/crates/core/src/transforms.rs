//! Perspective maps between joint history distributions and
//! environment/policy pairs, and Solomonoff normalization.

use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{Action, Interface, Percept};
use crate::error::{Result, UaiError};
use crate::history::History;
use crate::mixture::{EnvMixture, JointMixture, PolicyMixture};
use crate::prob::Prob;
use crate::semimeasure::builtin::IidPolicy;
use crate::semimeasure::check::{CheckReport, CheckRow, Verdict};
use crate::semimeasure::{ChronEnv, JointSemimeasure, Policy, SharedEnv, SharedJoint, SharedPolicy};

/// `env(ν)(e_{1:t} ‖ a_{1:t}) = Π_i ν(e_i | ae_{<i} a_i)`, evaluated lazily.
#[derive(Clone)]
pub struct Env {
    nu: SharedJoint,
}

impl Env {
    pub fn new(nu: SharedJoint) -> Self {
        Env { nu }
    }

    pub fn base(&self) -> &SharedJoint {
        &self.nu
    }
}

pub fn env(nu: SharedJoint) -> Env {
    Env::new(nu)
}

impl ChronEnv for Env {
    fn interface(&self) -> &Interface {
        self.nu.interface()
    }

    fn eval(&self, percepts: &[Percept], actions: &[Action]) -> Result<Prob> {
        if percepts.len() != actions.len() {
            return Err(UaiError::LengthMismatch { actions: actions.len(), percepts: percepts.len() });
        }
        let mut ctx = History::empty();
        let mut acc = Prob::one();
        for (a, e) in actions.iter().zip(percepts) {
            ctx.push_symbol(a.0);
            acc *= &self.nu.conditional(&ctx, e.0)?;
            if acc.is_zero() {
                return Ok(acc);
            }
            ctx.push_symbol(e.0);
        }
        Ok(acc)
    }

    fn declared_measure(&self) -> bool {
        self.nu.declared_measure()
    }

    fn label(&self) -> String {
        format!("env({})", self.nu.label())
    }

    fn conditional(&self, context: &History, e: Percept) -> Result<Prob> {
        self.nu.conditional(context, e.0)
    }
}

/// `dual(ν, π)(x) = π(a_{1:k} ‖ e_{<k}) · ν(e_{1:j} ‖ a_{1:j})`.
#[derive(Clone)]
pub struct Dual {
    nu: SharedEnv,
    pi: SharedPolicy,
}

impl Dual {
    pub fn new(nu: SharedEnv, pi: SharedPolicy) -> Result<Self> {
        if !nu.interface().same_shape(pi.interface()) {
            return Err(UaiError::Alphabet("environment and policy disagree on alphabets".into()));
        }
        Ok(Dual { nu, pi })
    }

    pub fn env(&self) -> &SharedEnv {
        &self.nu
    }

    pub fn policy(&self) -> &SharedPolicy {
        &self.pi
    }
}

pub fn dual(nu: SharedEnv, pi: SharedPolicy) -> Result<Dual> {
    Dual::new(nu, pi)
}

impl JointSemimeasure for Dual {
    fn interface(&self) -> &Interface {
        self.nu.interface()
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        let p = self.pi.eval(x.actions(), x.percepts())?;
        if p.is_zero() {
            return Ok(p);
        }
        let j = x.percepts().len();
        Ok(&p * &self.nu.eval(x.percepts(), &x.actions()[..j])?)
    }

    fn declared_measure(&self) -> bool {
        self.nu.declared_measure() && self.pi.declared_measure()
    }

    fn label(&self) -> String {
        format!("dual({}, {})", self.nu.label(), self.pi.label())
    }
}

/// The semimeasure representation of a chronological environment, with
/// the uniform action filler.
pub fn chron_to_joint(nu: SharedEnv) -> Dual {
    let filler = IidPolicy::uniform(nu.interface().clone());
    Dual { nu, pi: Arc::new(filler) }
}

/// As [`chron_to_joint`] with an arbitrary filler distribution over actions.
pub fn chron_to_joint_with(nu: SharedEnv, filler: Vec<Prob>) -> Result<Dual> {
    let filler = IidPolicy::new(nu.interface().clone(), filler)?;
    Ok(Dual { nu, pi: Arc::new(filler) })
}

/// Solomonoff normalization of a joint semimeasure, applied per symbol at
/// both action and percept positions.
#[derive(Clone)]
pub struct NormalizedPredictor {
    base: SharedJoint,
}

impl NormalizedPredictor {
    pub fn new(base: SharedJoint) -> Self {
        NormalizedPredictor { base }
    }

    pub fn base(&self) -> &SharedJoint {
        &self.base
    }

    /// All normalized conditionals at context `x`, in symbol order.
    pub fn conditionals(&self, x: &History) -> Result<Vec<Prob>> {
        let n = self.base.interface().size(x.next_slot()) as u32;
        let raw: Vec<Prob> = (0..n).map(|s| self.base.eval(&x.extended(s))).collect::<Result<_>>()?;
        normalize_values(&raw).ok_or_else(|| UaiError::UndefinedNormalization { context: x.to_string() })
    }
}

pub fn normalize(base: SharedJoint) -> NormalizedPredictor {
    NormalizedPredictor::new(base)
}

/// `p_s / Σ p` for a list of conditionals (or unnormalized masses); `None`
/// when every entry is zero.
pub fn normalize_values(values: &[Prob]) -> Option<Vec<Prob>> {
    let total: Prob = values.iter().sum();
    if total.is_zero() {
        return None;
    }
    Some(values.iter().map(|v| v / &total).collect())
}

impl JointSemimeasure for NormalizedPredictor {
    fn interface(&self) -> &Interface {
        self.base.interface()
    }

    fn eval(&self, x: &History) -> Result<Prob> {
        let mut ctx = History::empty();
        let mut acc = Prob::one();
        for (_, s) in x.symbols() {
            acc *= &self.conditional(&ctx, s)?;
            if acc.is_zero() {
                return Ok(acc);
            }
            ctx.push_symbol(s);
        }
        Ok(acc)
    }

    fn declared_measure(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        format!("normalize({})", self.base.label())
    }

    fn conditional(&self, x: &History, s: u32) -> Result<Prob> {
        let n = self.base.interface().size(x.next_slot()) as u32;
        if s >= n {
            return Err(UaiError::SymbolOutOfRange { symbol: s, size: n as usize });
        }
        let mut total = Prob::zero();
        let mut hit = Prob::zero();
        for t in 0..n {
            let v = self.base.eval(&x.extended(t))?;
            if t == s {
                hit = v.clone();
            }
            total += &v;
        }
        hit.checked_div(&total)
            .ok_or_else(|| UaiError::UndefinedNormalization { context: x.to_string() })
    }
}

/// Outcome of the two factoring identities.
#[derive(Clone, Debug)]
pub struct FactoringReport {
    /// `ξ_dual(x)` against `dual(Σ ω_π π, Σ w_ν ν)(x)` on every joint string.
    pub joint: CheckReport,
    /// `env(ξ_dual)(e ‖ a)` against `Σ w_ν ν(e ‖ a) / Σ w_ν ν(ε ‖ ε)` on every
    /// history whose action sequence has positive policy-mixture mass.
    pub env: CheckReport,
}

impl FactoringReport {
    pub fn holds(&self) -> bool {
        self.joint.all_equal_rows() && self.env.all_equal_rows()
    }

    /// First mismatching witness of the env identity.
    pub fn env_witness(&self) -> Option<&CheckRow> {
        self.env.rows.iter().find(|r| r.verdict != Verdict::Equal)
    }
}

/// Both identities for the factored prior `w^π_ν = ω_π w_ν`.
pub fn factoring_check(
    envs: &[(Prob, SharedEnv)],
    policies: &[(Prob, SharedPolicy)],
    depth: usize,
) -> Result<FactoringReport> {
    let grid: Vec<Vec<Prob>> = envs
        .iter()
        .map(|(wn, _)| policies.iter().map(|(wp, _)| wp * wn).collect())
        .collect();
    let envs: Vec<SharedEnv> = envs.iter().map(|(_, e)| e.clone()).collect();
    let policies: Vec<SharedPolicy> = policies.iter().map(|(_, p)| p.clone()).collect();
    factoring_check_grid(&envs, &policies, &grid, depth)
}

/// Both identities for an arbitrary weight grid `weights[env][policy]`.
///
/// The comparison side uses the marginals `w_ν = Σ_π W_{νπ}` and
/// `ω_π = Σ_ν W_{νπ} / Σ W`, which reproduce `w` and `ω` exactly when the
/// grid is a product with `Σ ω = 1`.
pub fn factoring_check_grid(
    envs: &[SharedEnv],
    policies: &[SharedPolicy],
    weights: &[Vec<Prob>],
    depth: usize,
) -> Result<FactoringReport> {
    if weights.len() != envs.len() || weights.iter().any(|row| row.len() != policies.len()) {
        return Err(UaiError::InvalidWeights("weight grid does not match components".into()));
    }
    let mut components: Vec<(Prob, SharedJoint)> = Vec::new();
    for (row, nu) in weights.iter().zip(envs) {
        for (w, pi) in row.iter().zip(policies) {
            if !w.is_zero() {
                components.push((w.clone(), Arc::new(Dual::new(nu.clone(), pi.clone())?)));
            }
        }
    }
    let xi = JointMixture::new(components)?;
    let total: Prob = weights.iter().flatten().sum();
    let env_w: Vec<(Prob, SharedEnv)> = weights
        .iter()
        .zip(envs)
        .filter_map(|(row, nu)| {
            let w: Prob = row.iter().sum();
            (!w.is_zero()).then(|| (w, nu.clone()))
        })
        .collect();
    let pol_w: Vec<(Prob, SharedPolicy)> = policies
        .iter()
        .enumerate()
        .filter_map(|(k, pi)| {
            let w: Prob = weights.iter().map(|row| &row[k]).sum();
            (!w.is_zero()).then(|| (&w / &total, pi.clone()))
        })
        .collect();
    let nu_mix = Arc::new(EnvMixture::new(env_w)?);
    let pi_mix = Arc::new(PolicyMixture::new(pol_w)?);
    let factored = Dual::new(nu_mix.clone(), pi_mix.clone())?;
    let interface = xi.interface().clone();

    let strings = History::all_up_to_len(&interface, 2 * depth);
    let joint_rows: Vec<CheckRow> = strings
        .par_iter()
        .map(|x| -> Result<CheckRow> { equality_row(x.to_string(), xi.eval(x)?, factored.eval(x)?) })
        .collect::<Result<_>>()?;

    let root = nu_mix.eval(&[], &[])?;
    let env_xi = Env::new(Arc::new(xi.clone()));
    let histories: Vec<History> = (1..=depth).flat_map(|t| History::all_complete(&interface, t)).collect();
    let env_rows: Vec<Option<CheckRow>> = histories
        .par_iter()
        .map(|h| -> Result<Option<CheckRow>> {
            if pi_mix.eval(h.actions(), h.percepts())?.is_zero() || root.is_zero() {
                return Ok(None);
            }
            let lhs = env_xi.eval_history(h)?;
            let rhs = &nu_mix.eval_history(h)? / &root;
            Ok(Some(equality_row(h.to_string(), lhs, rhs)?))
        })
        .collect::<Result<_>>()?;

    let report = |subject: String, rows: Vec<CheckRow>| CheckReport {
        subject,
        depth,
        root: None,
        rows,
        monotone_violations: vec![],
        declared_measure: false,
    };
    Ok(FactoringReport {
        joint: report(format!("{} vs {}", xi.label(), factored.label()), joint_rows),
        env: report(format!("{} vs {}", env_xi.label(), nu_mix.label()), env_rows.into_iter().flatten().collect()),
    })
}

fn equality_row(witness: String, lhs: Prob, rhs: Prob) -> Result<CheckRow> {
    let verdict = if lhs == rhs { Verdict::Equal } else { Verdict::Violation };
    Ok(CheckRow { witness, lhs, rhs, verdict })
}

/// Compares `env(ν)` against a chronological environment on every history
/// to `steps` where `ν` restricted to the history's actions is positive.
/// Rows are `(history, env(ν), target)`; contexts with an undefined
/// conditional are recorded as undefined rather than skipped.
pub fn env_roundtrip<J: JointSemimeasure + ?Sized, E: ChronEnv + ?Sized>(
    nu: &J,
    target: &E,
    steps: usize,
) -> CheckReport {
    let interface = nu.interface().clone();
    let histories: Vec<History> = (1..=steps).flat_map(|t| History::all_complete(&interface, t)).collect();
    let rows: Vec<Option<CheckRow>> = histories
        .par_iter()
        .map(|h| {
            let witness = h.to_string();
            let rhs = match target.eval_history(h) {
                Ok(v) => v,
                Err(e) => return Some(undefined(witness, e)),
            };
            let mut ctx = History::empty();
            let mut lhs = Prob::one();
            for (a, e) in h.actions().iter().zip(h.percepts()) {
                ctx.push_symbol(a.0);
                match nu.eval(&ctx) {
                    Ok(v) if v.is_zero() => return None,
                    Ok(_) => {}
                    Err(e) => return Some(undefined(witness, e)),
                }
                match nu.conditional(&ctx, e.0) {
                    Ok(c) => lhs *= &c,
                    Err(e) => return Some(undefined(witness, e)),
                }
                if lhs.is_zero() {
                    break;
                }
                ctx.push_symbol(e.0);
            }
            let verdict = if lhs == rhs { Verdict::Equal } else { Verdict::Violation };
            Some(CheckRow { witness, lhs, rhs, verdict })
        })
        .collect();
    CheckReport {
        subject: format!("env({}) vs {}", nu.label(), target.label()),
        depth: steps,
        root: None,
        rows: rows.into_iter().flatten().collect(),
        monotone_violations: vec![],
        declared_measure: false,
    }
}

fn undefined(witness: String, e: UaiError) -> CheckRow {
    CheckRow { witness, lhs: Prob::zero(), rhs: Prob::zero(), verdict: Verdict::Undefined(e.to_string()) }
}

/// Pointwise comparison of normalized and raw conditionals: every defined
/// normalized conditional is at least the raw one. Returns violating
/// contexts.
pub fn normalization_dominance<J: JointSemimeasure + ?Sized>(base: &J, depth: usize) -> Result<Vec<String>> {
    let interface = base.interface().clone();
    let contexts = History::all_up_to_len(&interface, depth.saturating_sub(1));
    let bad: Vec<Vec<String>> = contexts
        .par_iter()
        .map(|x| -> Result<Vec<String>> {
            let den = base.eval(x)?;
            if den.is_zero() {
                return Ok(vec![]);
            }
            let n = interface.size(x.next_slot()) as u32;
            let raw: Vec<Prob> = (0..n).map(|s| Ok(&base.eval(&x.extended(s))? / &den)).collect::<Result<_>>()?;
            let Some(norm) = normalize_values(&raw) else { return Ok(vec![]) };
            Ok(raw
                .iter()
                .zip(&norm)
                .enumerate()
                .filter(|(_, (r, n))| n < r)
                .map(|(s, _)| x.extended(s as u32).to_string())
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(bad.into_iter().flatten().collect())
}

/// Per-step maximum of `env(ξ)(e ‖ a) / Σ_i w_i env(ν_i)(e ‖ a)` for a joint
/// mixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvRatioProbe {
    /// `(steps, max ratio, witness history)`; `None` when no history at that
    /// length had both sides defined and positive.
    pub per_step: Vec<(usize, Option<(Prob, String)>)>,
    /// Histories where some side was undefined.
    pub undefined: usize,
    /// Histories with `env(ξ) > 0` but mixture-of-envs `= 0`.
    pub unbounded: Vec<String>,
}

pub fn env_of_mixture_probe(xi: &JointMixture, steps: usize) -> Result<EnvRatioProbe> {
    let interface = xi.interface().clone();
    let env_xi = Env::new(Arc::new(xi.clone()));
    let comps: Vec<(Prob, Env)> = xi.components().iter().map(|(w, c)| (w.clone(), Env::new(c.clone()))).collect();
    let mut per_step = Vec::new();
    let mut undefined = 0;
    let mut unbounded = Vec::new();
    for t in 1..=steps {
        let rows: Vec<Option<std::result::Result<(Prob, Prob, String), ()>>> = History::all_complete(&interface, t)
            .par_iter()
            .map(|h| {
                let lhs = env_xi.eval_history(h).ok()?;
                let mut rhs = Prob::zero();
                for (w, c) in &comps {
                    match c.eval_history(h) {
                        Ok(v) => rhs += &(w * &v),
                        Err(_) => return Some(Err(())),
                    }
                }
                Some(Ok((lhs, rhs, h.to_string())))
            })
            .collect();
        let mut best: Option<(Prob, String)> = None;
        for r in rows {
            match r {
                None | Some(Err(())) => undefined += 1,
                Some(Ok((lhs, rhs, w))) => {
                    if lhs.is_zero() {
                        continue;
                    }
                    if rhs.is_zero() {
                        unbounded.push(w);
                        continue;
                    }
                    let ratio = &lhs / &rhs;
                    if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
                        best = Some((ratio, w));
                    }
                }
            }
        }
        per_step.push((t, best));
    }
    Ok(EnvRatioProbe { per_step, undefined, unbounded })
}

impl CheckReport {
    /// Every row is [`Verdict::Equal`].
    pub fn all_equal_rows(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Equal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::dual_mixture;
    use crate::semimeasure::builtin::*;
    use crate::semimeasure::check::{check_chronological, check_semimeasure};
    use crate::semimeasure::table::{JointTable, TableSpec};

    fn h(s: &str) -> History {
        History::parse(s).unwrap()
    }

    fn uniform_policy() -> SharedPolicy {
        Arc::new(IidPolicy::binary_uniform())
    }

    #[test]
    fn env_examples() {
        let e = env(Arc::new(uniform_joint()));
        for hist in History::all_complete(&Interface::binary(), 3) {
            assert_eq!(e.eval_history(&hist).unwrap(), Prob::new(1, 8));
        }
        let c = env(Arc::new(copy_machine()));
        assert_eq!(c.eval(&[Percept(1)], &[Action(1)]).unwrap(), Prob::one());
        assert!(check_chronological(&c, 4).passed());

        let spec: TableSpec = serde_json::from_str(
            r#"{"kind":"joint","matching":"exact","conditionals":[{"context":[],"probs":["0","1"]}],"default_rule":"uniform"}"#,
        )
        .unwrap();
        let zero_first = env(Arc::new(JointTable::new(&spec).unwrap()));
        assert!(matches!(
            zero_first.eval(&[Percept(0)], &[Action(0)]),
            Err(UaiError::UndefinedConditional { .. })
        ));
    }

    #[test]
    fn dual_examples() {
        let d = dual(Arc::new(uniform_env()), uniform_policy()).unwrap();
        for x in History::all_up_to_len(d.interface(), 6) {
            assert_eq!(d.eval(&x).unwrap(), uniform_joint().eval(&x).unwrap());
        }
        let d = dual(Arc::new(mu_id()), uniform_policy()).unwrap();
        assert_eq!(d.eval(&h("11")).unwrap(), Prob::new(1, 2));
        let one = Arc::new(DeterministicPolicy::constant(Interface::binary(), Action(1)));
        let d = dual(Arc::new(mu_id()), one).unwrap();
        assert_eq!(d.eval(&h("00")).unwrap(), Prob::zero());
        assert!(check_semimeasure(&d, 6).passed());
    }

    #[test]
    fn chron_to_joint_examples() {
        let j = chron_to_joint(Arc::new(mu_id()));
        assert_eq!(j.eval(&h("11")).unwrap(), Prob::new(1, 2));
        let r = env_roundtrip(&j, &mu_id(), 4);
        assert!(r.all_equal_rows());
        let j = chron_to_joint_with(Arc::new(mu_id()), vec![Prob::one(), Prob::zero()]).unwrap();
        assert_eq!(j.eval(&h("1")).unwrap(), Prob::zero());
        assert_eq!(j.eval(&h("10")).unwrap(), Prob::zero());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize_values(&[Prob::new(1, 4), Prob::new(1, 4)]).unwrap(),
            vec![Prob::new(1, 2), Prob::new(1, 2)]
        );
        assert_eq!(normalize_values(&[Prob::zero(), Prob::zero()]), None);
        let n = normalize(Arc::new(uniform_joint()));
        for x in History::all_up_to_len(n.interface(), 5) {
            assert_eq!(n.eval(&x).unwrap(), uniform_joint().eval(&x).unwrap());
        }
        let g = normalize(Arc::new(geometric_defective()));
        assert_eq!(g.conditionals(&h("01")).unwrap(), vec![Prob::new(1, 2), Prob::new(1, 2)]);
        let z = normalize(Arc::new(zeros_machine()));
        assert!(matches!(z.conditional(&h("1"), 0), Err(UaiError::UndefinedNormalization { .. })));
        assert!(normalization_dominance(&geometric_defective(), 5).unwrap().is_empty());
        assert!(check_semimeasure(&g, 5).all_equal());
    }

    #[test]
    fn factoring_examples() {
        let envs: Vec<(Prob, SharedEnv)> =
            vec![(Prob::new(1, 2), Arc::new(mu_id())), (Prob::new(1, 2), Arc::new(uniform_env()))];
        let pols = vec![(Prob::one(), uniform_policy())];
        let r = factoring_check(&envs, &pols, 3).unwrap();
        assert!(r.holds());
        let single = factoring_check(&envs[..1], &pols, 3).unwrap();
        assert!(single.holds());

        let envs: Vec<SharedEnv> = vec![Arc::new(mu_id()), Arc::new(mu_not())];
        let pols: Vec<SharedPolicy> = vec![
            Arc::new(DeterministicPolicy::constant(Interface::binary(), Action(0))),
            Arc::new(DeterministicPolicy::constant(Interface::binary(), Action(1))),
        ];
        let half = Prob::new(1, 2);
        let grid = vec![vec![half.clone(), Prob::zero()], vec![Prob::zero(), half]];
        let r = factoring_check_grid(&envs, &pols, &grid, 3).unwrap();
        assert!(!r.holds());
        let w = r.env_witness().unwrap();
        assert_eq!(w.witness, "00");
        assert_eq!((w.lhs.clone(), w.rhs.clone()), (Prob::one(), Prob::new(1, 2)));
    }

    #[test]
    fn env_of_mixture_probe_on_dual_mixture() {
        let xi = dual_mixture(
            &[(Prob::new(1, 2), Arc::new(mu_id()) as SharedEnv), (Prob::new(1, 2), Arc::new(uniform_env()))],
            &[(Prob::one(), uniform_policy())],
        )
        .unwrap();
        let p = env_of_mixture_probe(&xi, 3).unwrap();
        assert_eq!(p.undefined, 0);
        for (_, best) in &p.per_step {
            assert_eq!(best.as_ref().unwrap().0, Prob::one());
        }
    }
}
