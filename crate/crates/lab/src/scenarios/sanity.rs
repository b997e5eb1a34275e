//! Definitional invariants, perspective round trips, factoring, and
//! predictive/posterior consistency.

use std::sync::Arc;

use rayon::prelude::*;
use uai_core::config::{build_env_mixture, build_joint_mixture, BuildCtx, EnvRef, JointRef, PolicyRef};
use uai_core::mixture::{inclusion_bound_holds, JointMixture};
use uai_core::semimeasure::builtin::*;
use uai_core::semimeasure::check::{check_chronological, check_semimeasure, CheckReport, Verdict};
use uai_core::transforms::{
    chron_to_joint, chron_to_joint_with, env_roundtrip, factoring_check, factoring_check_grid,
    normalization_dominance, Dual,
};
use uai_core::utm::{joint_cached, EnumApprox};
use uai_core::{Action, History, Interface, JointSemimeasure, Prob, SharedEnv, SharedJoint, SharedPolicy};

use crate::config::{FactoringCase, Params};
use crate::error::LabError;
use crate::output::{frac, witness, Csv, Outcome};

/// Every built-in joint component plus the Markov table.
pub fn builtin_joint() -> Vec<(String, SharedJoint)> {
    vec![
        ("uniform".into(), Arc::new(uniform_joint()) as SharedJoint),
        ("copy".into(), Arc::new(copy_machine())),
        ("anticopy".into(), Arc::new(anticopy_machine())),
        ("zeros".into(), Arc::new(zeros_machine())),
        ("geometric_defective".into(), Arc::new(geometric_defective())),
        ("markov_3_4".into(), super::markov_table()),
    ]
}

/// Every built-in chronological environment, at the parameters the shipped
/// scenarios use.
pub fn builtin_chron() -> Vec<(String, SharedEnv)> {
    let p = |n, d| Prob::new(n, d);
    vec![
        ("mu_id".into(), Arc::new(mu_id()) as SharedEnv),
        ("mu_not".into(), Arc::new(mu_not())),
        ("uniform".into(), Arc::new(uniform_env())),
        ("noisy_copy_3_4".into(), Arc::new(noisy_copy(p(3, 4)).expect("valid"))),
        ("noisy_copy_2_3".into(), Arc::new(noisy_copy(p(2, 3)).expect("valid"))),
        ("lossy_echo_1_2".into(), Arc::new(lossy_echo(p(1, 2)).expect("valid"))),
        ("const_0".into(), Arc::new(ConstEnv::binary(0).expect("valid"))),
        ("const_1".into(), Arc::new(ConstEnv::binary(1).expect("valid"))),
    ]
}

fn policies() -> Vec<(String, SharedPolicy)> {
    let i = Interface::binary();
    vec![
        ("uniform".into(), Arc::new(IidPolicy::uniform(i.clone())) as SharedPolicy),
        ("iid_1_3".into(), Arc::new(IidPolicy::new(i.clone(), vec![Prob::new(1, 3), Prob::new(2, 3)]).expect("valid"))),
        ("constant_1".into(), Arc::new(DeterministicPolicy::constant(i.clone(), Action(1)))),
        ("cycle_01".into(), Arc::new(DeterministicPolicy::cycle(i, vec![Action(0), Action(1)]).expect("valid"))),
    ]
}

const CHECK_HEADER: &[&str] = &[
    "kind", "name", "depth", "rows", "equal", "strict", "violations", "undefined", "root",
    "declared_measure", "passed",
];

fn check_row(csv: &mut Csv, out: &mut Outcome, kind: &str, name: &str, r: &CheckReport) {
    let root = r.root.as_ref().map(frac).unwrap_or_else(|| "-".into());
    // a declared measure must not lose mass anywhere it was checked
    let lying = r.declared_measure && !r.all_equal();
    let passed = r.passed() && !lying;
    csv.row(&[
        kind.to_string(),
        name.to_string(),
        r.depth.to_string(),
        r.rows.len().to_string(),
        r.count(&Verdict::Equal).to_string(),
        r.count(&Verdict::Strict).to_string(),
        r.violations().count().to_string(),
        r.undefined().to_string(),
        root,
        r.declared_measure.to_string(),
        passed.to_string(),
    ]);
    if !passed {
        let first = r
            .violations()
            .next()
            .map(|v| witness(&v.witness))
            .or_else(|| r.monotone_violations.first().cloned())
            .unwrap_or_else(|| "root or declaration".into());
        out.violation(format!("{kind} check failed for {name} at {first}"));
    }
}

pub(super) fn run(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::SanityChecks { depth, roundtrip_steps, predictive_steps, joint, chron, factoring, enumeration } = p
    else {
        unreachable!()
    };
    let depth = *depth;

    let mut joint_built: Vec<(String, SharedJoint)> = builtin_joint();
    let mut chron_built: Vec<(String, SharedEnv)> = builtin_chron();
    let n_builtin = (joint_built.len(), chron_built.len());
    for j in joint {
        joint_built.push((j.name.clone(), j.component.build(ctx)?));
    }
    for c in chron {
        chron_built.push((c.name.clone(), c.component.build(ctx)?));
    }

    let mut checks = Csv::new(CHECK_HEADER);
    for (name, j) in &joint_built {
        check_row(&mut checks, out, "joint", name, &check_semimeasure(j.as_ref(), depth));
    }
    for (name, c) in &chron_built {
        check_row(&mut checks, out, "chron", name, &check_chronological(c.as_ref(), depth));
    }
    out.note(format!(
        "checked {} built-in and {} scenario components to depth {depth}",
        n_builtin.0 + n_builtin.1,
        joint_built.len() + chron_built.len() - n_builtin.0 - n_builtin.1
    ));

    enumeration_checks(enumeration, ctx, &mut checks, out)?;
    out.file("checks.csv", checks);

    roundtrips(&chron_built, *roundtrip_steps, out);
    factoring_cases(factoring, ctx, out)?;

    let mixtures: Vec<(String, JointMixture)> = joint
        .iter()
        .filter_map(|j| match &j.component {
            JointRef::Mixture(m) => Some(build_joint_mixture(m, ctx).map(|x| (j.name.clone(), x))),
            _ => None,
        })
        .collect::<Result<_, _>>()?;
    predictive(&mixtures, *predictive_steps, out)?;
    dominance(&mixtures, depth, out)?;
    Ok(())
}

fn enumeration_checks(
    grid: &crate::config::EnumGrid,
    ctx: &BuildCtx,
    checks: &mut Csv,
    out: &mut Outcome,
) -> Result<(), LabError> {
    let mut approx: Vec<Vec<EnumApprox>> = Vec::new();
    for &l in &grid.l {
        let row = grid
            .s
            .iter()
            .map(|&s| joint_cached(ctx.cache.as_ref(), l, s, grid.depth))
            .collect::<Result<Vec<_>, _>>()?;
        approx.push(row);
    }
    for (i, &l) in grid.l.iter().enumerate() {
        for (k, &s) in grid.s.iter().enumerate() {
            let name = format!("enum_joint_L{l}_S{s}");
            check_row(checks, out, "joint", &name, &check_semimeasure(&approx[i][k], grid.depth));
            let env = EnvRef::Enumeration { l, s, steps: grid.chron_steps }.build(ctx)?;
            let name = format!("enum_chron_L{l}_S{s}");
            check_row(checks, out, "chron", &name, &check_chronological(env.as_ref(), grid.chron_steps));
        }
    }

    let strings = History::all_up_to_len(&Interface::binary(), grid.depth);
    let below = |a: &EnumApprox, b: &EnumApprox| -> Option<String> {
        strings
            .par_iter()
            .find_first(|x| a.eval(x).ok() > b.eval(x).ok())
            .map(|x| witness(&x.to_string()))
    };
    let mut mono = Csv::new(&["l", "s", "mass_root", "monotone_in_l", "monotone_in_s"]);
    for (i, &l) in grid.l.iter().enumerate() {
        for (k, &s) in grid.s.iter().enumerate() {
            let in_l = if i == 0 { None } else { below(&approx[i - 1][k], &approx[i][k]) };
            let in_s = if k == 0 { None } else { below(&approx[i][k - 1], &approx[i][k]) };
            for (axis, w) in [("L", &in_l), ("S", &in_s)] {
                if let Some(w) = w {
                    out.violation(format!("enumeration at L={l} S={s} not monotone in {axis} at {w}"));
                }
            }
            mono.row(&[
                l.to_string(),
                s.to_string(),
                frac(&approx[i][k].mass(&[])),
                in_l.is_none().to_string(),
                in_s.is_none().to_string(),
            ]);
        }
    }
    out.file("enumeration.csv", mono);
    out.note(format!(
        "enumeration grid L in {:?}, S in {:?} checked to depth {} (chronological {} steps)",
        grid.l, grid.s, grid.depth, grid.chron_steps
    ));
    Ok(())
}

fn roundtrips(envs: &[(String, SharedEnv)], steps: usize, out: &mut Outcome) {
    let mut csv = Csv::new(&["env", "construction", "rows", "equal", "violations", "undefined"]);
    let record = |csv: &mut Csv, out: &mut Outcome, env: &str, how: &str, r: CheckReport| {
        let bad = r.rows.iter().filter(|x| x.verdict != Verdict::Equal).count();
        csv.row(&[
            env.to_string(),
            how.to_string(),
            r.rows.len().to_string(),
            r.count(&Verdict::Equal).to_string(),
            r.violations().count().to_string(),
            r.undefined().to_string(),
        ]);
        if bad > 0 {
            out.violation(format!("round trip {how} failed for {env}"));
        }
    };
    let fillers = [("uniform", None), ("filler_1_3", Some(vec![Prob::new(1, 3), Prob::new(2, 3)]))];
    for (name, nu) in envs {
        for (pname, pi) in policies() {
            match Dual::new(nu.clone(), pi) {
                Ok(d) => record(&mut csv, out, name, &format!("env_dual_{pname}"), env_roundtrip(&d, nu.as_ref(), steps)),
                Err(e) => out.violation(format!("dual({name}, {pname}) failed: {e}")),
            }
        }
        for (fname, filler) in &fillers {
            let joint = match filler {
                None => Ok(chron_to_joint(nu.clone())),
                Some(f) => chron_to_joint_with(nu.clone(), f.clone()),
            };
            match joint {
                Ok(j) => record(&mut csv, out, name, &format!("env_chron_to_joint_{fname}"), env_roundtrip(&j, nu.as_ref(), steps)),
                Err(e) => out.violation(format!("chron_to_joint({name}) failed: {e}")),
            }
        }
    }
    out.note(format!("perspective round trips on {} environments to {steps} steps", envs.len()));
    out.file("roundtrips.csv", csv);
}

fn build_weighted_envs(m: &uai_core::config::MixtureSpec<EnvRef>, ctx: &BuildCtx) -> Result<Vec<(Prob, SharedEnv)>, LabError> {
    let w = m.weights()?;
    w.into_iter()
        .zip(&m.components)
        .map(|(w, c)| Ok((w, c.component.build(ctx)?)))
        .collect()
}

fn build_weighted_policies(m: &uai_core::config::MixtureSpec<PolicyRef>) -> Result<Vec<(Prob, SharedPolicy)>, LabError> {
    let w = m.weights()?;
    w.into_iter()
        .zip(&m.components)
        .map(|(w, c)| Ok((w, c.component.build()?)))
        .collect()
}

fn factoring_cases(cases: &[FactoringCase], ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let mut csv = Csv::new(&[
        "case", "factored", "joint_rows", "joint_equal", "env_rows", "env_equal", "holds", "witness", "lhs", "rhs",
    ]);
    let emit = |csv: &mut Csv, name: &str, factored: bool, r: uai_core::transforms::FactoringReport| {
        let w = r.env_witness();
        csv.row(&[
            name.to_string(),
            factored.to_string(),
            r.joint.rows.len().to_string(),
            r.joint.count(&Verdict::Equal).to_string(),
            r.env.rows.len().to_string(),
            r.env.count(&Verdict::Equal).to_string(),
            r.holds().to_string(),
            w.map(|w| witness(&w.witness)).unwrap_or_else(|| "-".into()),
            w.map(|w| frac(&w.lhs)).unwrap_or_else(|| "-".into()),
            w.map(|w| frac(&w.rhs)).unwrap_or_else(|| "-".into()),
        ]);
        r.holds()
    };
    for case in cases {
        build_env_mixture(&case.envs, ctx)?;
        let envs = build_weighted_envs(&case.envs, ctx)?;
        let pols = build_weighted_policies(&case.policies)?;
        let r = factoring_check(&envs, &pols, case.steps)?;
        if !emit(&mut csv, &case.name, true, r) {
            out.violation(format!("factoring identities fail for factored case {}", case.name));
        }
    }

    // weight only on (mu_id, always 0) and (mu_not, always 1)
    let i = Interface::binary();
    let envs: Vec<SharedEnv> = vec![Arc::new(mu_id()), Arc::new(mu_not())];
    let pols: Vec<SharedPolicy> = vec![
        Arc::new(DeterministicPolicy::constant(i.clone(), Action(0))),
        Arc::new(DeterministicPolicy::constant(i, Action(1))),
    ];
    let half = Prob::new(1, 2);
    let grid = vec![vec![half.clone(), Prob::zero()], vec![Prob::zero(), half]];
    let r = factoring_check_grid(&envs, &pols, &grid, 3)?;
    let w = r.env_witness().map(|w| witness(&w.witness));
    if emit(&mut csv, "non_factored", false, r) {
        out.violation("non-factored counterexample unexpectedly satisfies the factoring identities");
    } else {
        out.note(format!(
            "non-factored counterexample fails the env identity as expected, witness {}",
            w.unwrap_or_else(|| "-".into())
        ));
    }
    out.file("factoring.csv", csv);
    Ok(())
}

#[derive(Default)]
struct PredictiveTally {
    contexts: usize,
    defined: usize,
    undefined: usize,
    mismatch: usize,
    tracker: usize,
    unnormalized: usize,
}

fn predictive(mixtures: &[(String, JointMixture)], steps: usize, out: &mut Outcome) -> Result<(), LabError> {
    let mut csv = Csv::new(&[
        "mixture", "contexts", "defined", "undefined", "predictive_mismatch", "tracker_mismatch", "posterior_not_normalized",
    ]);
    let interface = Interface::binary();
    let contexts: Vec<(History, Action)> = (0..steps)
        .flat_map(|t| History::all_complete(&interface, t))
        .flat_map(|h| interface.actions.symbols().map(move |a| (h.clone(), a)))
        .collect();
    for (name, xi) in mixtures {
        let rows: Vec<PredictiveTally> = contexts
            .par_iter()
            .map(|(h, a)| {
                let mut t = PredictiveTally { contexts: 1, ..Default::default() };
                match (xi.predictive(h, *a), xi.predictive_from_posterior(h, *a)) {
                    (Ok(d), Ok(w)) => {
                        t.defined = 1;
                        t.mismatch = usize::from(d != w);
                        let post = xi.posterior_weights(h, *a).ok();
                        t.unnormalized = usize::from(!post.as_ref().is_some_and(|p| p.total().is_one()));
                        t.tracker = usize::from(tracked(xi, &h.with_action(*a).expect("complete")) != post);
                    }
                    (Err(_), Err(_)) => t.undefined = 1,
                    _ => t.mismatch = 1,
                }
                t
            })
            .collect();
        let s = rows.iter().fold(PredictiveTally::default(), |acc, t| PredictiveTally {
            contexts: acc.contexts + t.contexts,
            defined: acc.defined + t.defined,
            undefined: acc.undefined + t.undefined,
            mismatch: acc.mismatch + t.mismatch,
            tracker: acc.tracker + t.tracker,
            unnormalized: acc.unnormalized + t.unnormalized,
        });
        csv.row(&[
            name.clone(),
            s.contexts.to_string(),
            s.defined.to_string(),
            s.undefined.to_string(),
            s.mismatch.to_string(),
            s.tracker.to_string(),
            s.unnormalized.to_string(),
        ]);
        if s.mismatch + s.tracker + s.unnormalized > 0 {
            out.violation(format!("predictive/posterior mismatch for {name}"));
        }
    }
    out.note(format!("predictive consistency on {} mixtures, histories below {steps} steps", mixtures.len()));
    out.file("predictive.csv", csv);
    Ok(())
}

fn tracked(xi: &JointMixture, x: &History) -> Option<uai_core::mixture::PosteriorState> {
    let mut t = xi.tracker().ok()?;
    for i in 0..x.len() {
        t.observe(x.symbol(i)).ok()?;
    }
    Some(t.state().clone())
}

fn dominance(mixtures: &[(String, JointMixture)], depth: usize, out: &mut Outcome) -> Result<(), LabError> {
    let mut csv = Csv::new(&["mixture", "component", "weight", "inclusion_holds", "witness"]);
    let strings = History::all_up_to_len(&Interface::binary(), depth);
    for (name, xi) in mixtures {
        for (i, (w, c)) in xi.components().iter().enumerate() {
            let fail = inclusion_bound_holds(xi, w, c.as_ref(), &strings)?;
            csv.row(&[
                name.clone(),
                i.to_string(),
                frac(w),
                fail.is_none().to_string(),
                fail.as_ref().map(|f| witness(&f.to_string())).unwrap_or_else(|| "-".into()),
            ]);
            if fail.is_some() {
                out.violation(format!("inclusion bound fails for {name} component {i}"));
            }
        }
        let bad = normalization_dominance(xi, depth)?;
        if let Some(b) = bad.first() {
            out.violation(format!("normalized conditional below raw for {name} at {b}"));
        }
    }
    out.file("dominance.csv", csv);
    Ok(())
}
