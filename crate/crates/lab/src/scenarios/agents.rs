//! Joint, dualistic and one-step agents on shared mixtures.

use rayon::prelude::*;
use uai_core::agents::{
    action_values, brute_force_action, dualistic_action, expectimax_action, jaixi_action_audited, self_step_action,
};
use uai_core::config::BuildCtx;
use uai_core::transforms::Env;
use uai_core::{Action, ChronEnv, History, Interface, Result as CoreResult};

use crate::config::Params;
use crate::error::LabError;
use crate::output::{witness, Csv, Outcome};

const AGENTS: [&str; 3] = ["jaixi", "dualistic", "self_step"];

struct Decision {
    history: History,
    m: usize,
    actions: [Option<Action>; 3],
    audit_clean: bool,
    values: Vec<(String, Vec<Option<String>>)>,
    oracle_failures: Vec<String>,
}

fn show(a: &Option<Action>) -> String {
    a.map(|a| a.0.to_string()).unwrap_or_else(|| "undefined".into())
}

/// Expectimax against brute force over deterministic policies.
fn oracle<E: ChronEnv + ?Sized>(belief: &E, name: &str, h: &History, m: usize) -> Option<String> {
    match (expectimax_action(belief, h, m), brute_force_action(belief, h, m)) {
        (Ok(a), Ok((b, _))) if a == b => None,
        (Err(_), Err(_)) => None,
        (a, b) => Some(format!(
            "{name} at {} m={m}: expectimax {:?}, brute force {:?}",
            witness(&h.to_string()),
            a.ok(),
            b.ok().map(|x| x.0)
        )),
    }
}

fn values_of<E: ChronEnv + ?Sized>(belief: &E, h: &History, m: usize) -> Vec<Option<String>> {
    match action_values(belief, h, m) {
        Ok(v) => v.into_iter().map(|x| x.map(|x| x.to_string())).collect(),
        Err(_) => vec![None; belief.interface().actions.len()],
    }
}

pub(super) fn run(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::AgentsCompare { history_steps, horizons, pairs } = p else { unreachable!() };
    let interface = Interface::binary();
    let histories: Vec<History> = (0..=*history_steps).flat_map(|t| History::all_complete(&interface, t)).collect();
    let jobs: Vec<(History, usize)> =
        histories.iter().flat_map(|h| horizons.iter().map(move |&m| (h.clone(), m))).collect();

    let mut decisions = Csv::new(&["pair", "history", "m", "jaixi", "dualistic", "self_step", "audit_clean"]);
    let mut values = Csv::new(&["pair", "history", "m", "belief", "action", "value"]);
    let mut agreement = Csv::new(&["pair", "m", "agents", "both_defined", "agree"]);
    for pair in pairs {
        let xi = pair.joint.build(ctx)?;
        let chron = pair.chron.build(ctx)?;
        let env_xi = Env::new(xi.clone());
        let rows: Vec<Decision> = jobs
            .par_iter()
            .map(|(h, m)| {
                let (jaixi, audit_clean) = match jaixi_action_audited(xi.clone(), h, *m) {
                    Ok((a, r)) => (Some(a), r.clean()),
                    Err(_) => (None, true),
                };
                let dual = dualistic_action(chron.as_ref(), h, *m).ok();
                let step: CoreResult<Action> = self_step_action(&env_xi, h);
                let oracle_failures = [oracle(&env_xi, "env(joint)", h, *m), oracle(chron.as_ref(), "chron", h, *m)]
                    .into_iter()
                    .flatten()
                    .collect();
                Decision {
                    history: h.clone(),
                    m: *m,
                    actions: [jaixi, dual, step.ok()],
                    audit_clean,
                    values: vec![
                        ("env_joint".into(), values_of(&env_xi, h, *m)),
                        ("chron".into(), values_of(chron.as_ref(), h, *m)),
                    ],
                    oracle_failures,
                }
            })
            .collect();

        for d in &rows {
            let hs = witness(&d.history.to_string());
            decisions.row(&[
                pair.name.clone(),
                hs.clone(),
                d.m.to_string(),
                show(&d.actions[0]),
                show(&d.actions[1]),
                show(&d.actions[2]),
                d.audit_clean.to_string(),
            ]);
            for (belief, vs) in &d.values {
                for (a, v) in vs.iter().enumerate() {
                    values.row(&[
                        pair.name.clone(),
                        hs.clone(),
                        d.m.to_string(),
                        belief.clone(),
                        a.to_string(),
                        v.clone().unwrap_or_else(|| "undefined".into()),
                    ]);
                }
            }
            if !d.audit_clean {
                out.violation(format!("{}: joint agent read future actions at {hs} m={}", pair.name, d.m));
            }
            for f in &d.oracle_failures {
                out.violation(format!("{}: {f}", pair.name));
            }
        }

        for &m in horizons {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let (mut both, mut agree) = (0, 0);
                for d in rows.iter().filter(|d| d.m == m) {
                    if let (Some(a), Some(b)) = (d.actions[i], d.actions[j]) {
                        both += 1;
                        agree += usize::from(a == b);
                    }
                }
                agreement.row(&[
                    pair.name.clone(),
                    m.to_string(),
                    format!("{}_vs_{}", AGENTS[i], AGENTS[j]),
                    both.to_string(),
                    agree.to_string(),
                ]);
            }
        }
        let disagree = rows.iter().filter(|d| matches!(d.actions, [Some(a), Some(b), _] if a != b)).count();
        out.note(format!(
            "{}: joint and dualistic agents disagree on {disagree} of {} (history, horizon) cases",
            pair.name,
            rows.len()
        ));
    }
    out.note(format!("expectimax checked against brute force over deterministic policies, horizons {horizons:?}"));
    out.file("decisions.csv", decisions);
    out.file("agreement.csv", agreement);
    out.file("values.csv", values);
    Ok(())
}
