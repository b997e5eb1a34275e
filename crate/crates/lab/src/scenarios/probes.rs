//! Finite-depth domination probes between chronological mixtures and the
//! env of joint mixtures. Descriptive only.

use uai_core::adversary::{domination_probe_chron, ProbeReport};
use uai_core::config::BuildCtx;
use uai_core::transforms::{env_of_mixture_probe, Env};

use crate::config::Params;
use crate::error::LabError;
use crate::output::{float, frac, witness, Csv, Outcome};

fn probe_rows(csv: &mut Csv, pair: &str, direction: &str, r: &ProbeReport) {
    for lv in &r.levels {
        let (ratio, fl, w) = match &lv.max_ratio {
            Some((p, w)) => (frac(p), float(p), witness(w)),
            None => ("-".into(), "-".into(), "-".into()),
        };
        csv.row(&[
            pair.to_string(),
            direction.to_string(),
            lv.length.to_string(),
            lv.compared.to_string(),
            ratio,
            fl,
            w,
            lv.unbounded.len().to_string(),
        ]);
    }
}

fn describe(r: &ProbeReport) -> String {
    match r.max_ratio() {
        _ if !r.bounded() => "unbounded".to_string(),
        Some((p, w)) => format!("max ratio {p} at {}", witness(w)),
        None => "no comparable histories".to_string(),
    }
}

pub(super) fn run(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::Conj9Search { steps, pairs, env_ratio } = p else { unreachable!() };
    let mut csv = Csv::new(&["pair", "direction", "steps", "compared", "max_ratio", "max_ratio_float", "witness", "unbounded"]);
    for pair in pairs {
        let chron = pair.chron.build(ctx)?;
        let env_joint = Env::new(pair.joint.build(ctx)?);
        let forward = domination_probe_chron(chron.as_ref(), &env_joint, *steps)?;
        let reverse = domination_probe_chron(&env_joint, chron.as_ref(), *steps)?;
        probe_rows(&mut csv, &pair.name, "chron_over_env_joint", &forward);
        probe_rows(&mut csv, &pair.name, "env_joint_over_chron", &reverse);
        out.note(format!("{}: chron / env(joint) {}", pair.name, describe(&forward)));
        out.note(format!("{}: env(joint) / chron {}", pair.name, describe(&reverse)));
    }
    out.file("probes.csv", csv);

    let mut csv = Csv::new(&["mixture", "steps", "max_ratio", "max_ratio_float", "witness", "undefined", "unbounded"]);
    for j in env_ratio {
        let xi = super::as_mixture(&j.component, ctx)?
            .ok_or_else(|| LabError::Config(format!("env_ratio entry {} is not a mixture", j.name)))?;
        let r = env_of_mixture_probe(&xi, *steps)?;
        for (t, m) in &r.per_step {
            let (ratio, fl, w) = match m {
                Some((p, w)) => (frac(p), float(p), witness(w)),
                None => ("-".into(), "-".into(), "-".into()),
            };
            csv.row(&[j.name.clone(), t.to_string(), ratio, fl, w, r.undefined.to_string(), r.unbounded.len().to_string()]);
        }
        let top = r.per_step.iter().filter_map(|(_, m)| m.as_ref()).max_by(|a, b| a.0.cmp(&b.0));
        out.note(format!(
            "{}: env of mixture over mixture of envs, max ratio {} to {steps} steps, {} histories undefined",
            j.name,
            top.map(|(p, _)| p.to_string()).unwrap_or_else(|| "-".into()),
            r.undefined
        ));
    }
    out.file("env_ratio.csv", csv);
    Ok(())
}
