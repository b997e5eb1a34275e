//! Normalized-predictor learning of deterministic environments, over every
//! action sequence.

use rayon::prelude::*;
use uai_core::config::BuildCtx;
use uai_core::transforms::NormalizedPredictor;
use uai_core::{ChronEnv, History, JointSemimeasure, Percept, Prob, SharedEnv, UaiError};

use crate::config::Params;
use crate::error::LabError;
use crate::output::{float, frac, witness, Csv, Outcome};

struct Step {
    next: History,
    normalized: Prob,
    raw: Prob,
    context: String,
}

/// The percept the truth assigns conditional one.
fn forced_percept(truth: &SharedEnv, ctx: &History) -> Result<Percept, LabError> {
    for e in truth.interface().percepts.symbols() {
        if truth.conditional(ctx, e)?.is_one() {
            return Ok(e);
        }
    }
    Err(LabError::Config(format!("{} is not deterministic after {ctx}", truth.label())))
}

fn min_by_value<'a>(steps: impl Iterator<Item = (&'a Prob, &'a String)>) -> Option<(Prob, String)> {
    let mut best: Option<(&Prob, &String)> = None;
    for (v, w) in steps {
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, w));
        }
    }
    best.map(|(v, w)| (v.clone(), w.clone()))
}

pub(super) fn run(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::Thm11Convergence { joint, truth, length, epsilon } = p else { unreachable!() };
    let xi = joint.component.build(ctx)?;
    let norm = NormalizedPredictor::new(xi.clone());
    let truths: Vec<(String, SharedEnv)> =
        truth.iter().map(|t| Ok((t.name.clone(), t.component.build(ctx)?))).collect::<Result<_, LabError>>()?;
    let bound = Prob::one().checked_sub(epsilon).ok_or_else(|| LabError::Config("epsilon exceeds one".into()))?;

    let mut min_norm: Vec<Option<(Prob, String)>> = vec![None; *length];
    let mut min_raw: Vec<Option<(Prob, String)>> = vec![None; *length];
    for (name, nu) in &truths {
        let mut frontier = vec![History::empty()];
        for t in 0..*length {
            let level: Vec<Step> = frontier
                .par_iter()
                .flat_map_iter(|h| nu.interface().actions.symbols().map(move |a| (h, a)))
                .map(|(h, a)| -> Result<Step, LabError> {
                    let ctx = h.with_action(a)?;
                    let e = forced_percept(nu, &ctx)?;
                    let normalized = norm.conditional(&ctx, e.0)?;
                    let raw = xi.conditional(&ctx, e.0)?;
                    let next = ctx.with_percept(e)?;
                    Ok(Step { context: format!("{name}:{ctx}"), next, normalized, raw })
                })
                .collect::<Result<_, _>>()?;
            for (slot, pick) in [
                (&mut min_norm[t], min_by_value(level.iter().map(|s| (&s.normalized, &s.context)))),
                (&mut min_raw[t], min_by_value(level.iter().map(|s| (&s.raw, &s.context)))),
            ] {
                if let Some((v, w)) = pick {
                    if slot.as_ref().is_none_or(|(b, _)| v < *b) {
                        *slot = Some((v, w));
                    }
                }
            }
            frontier = level.into_iter().map(|s| s.next).collect();
        }
    }
    let unwrap = |v: Vec<Option<(Prob, String)>>| -> Result<Vec<(Prob, String)>, LabError> {
        v.into_iter()
            .map(|x| x.ok_or_else(|| LabError::Core(UaiError::Spec("no histories at some step".into()))))
            .collect()
    };
    let (min_norm, min_raw) = (unwrap(min_norm)?, unwrap(min_raw)?);

    let t_star = (1..=*length).find(|&t| min_norm[t - 1..].iter().all(|(m, _)| *m > bound));
    let mut csv = Csv::new(&[
        "t", "min_normalized", "min_normalized_float", "normalized_above_bound", "min_raw", "min_raw_float",
        "raw_above_bound", "normalized_witness", "raw_witness",
    ]);
    for t in 0..*length {
        let (n, nw) = &min_norm[t];
        let (r, rw) = &min_raw[t];
        csv.row(&[
            (t + 1).to_string(),
            frac(n),
            float(n),
            (*n > bound).to_string(),
            frac(r),
            float(r),
            (*r > bound).to_string(),
            witness(nw),
            witness(rw),
        ]);
    }
    out.file("convergence.csv", csv);
    out.note(format!(
        "{} truth environments, all {} action sequences of length {length}, bound 1 - {epsilon} = {bound}",
        truths.len(),
        1u64 << *length
    ));
    match t_star {
        Some(t) => {
            out.note(format!("normalized correct-percept conditional exceeds the bound from step t* = {t}"));
            let raw_fails: Vec<String> =
                (t..=*length).filter(|&s| min_raw[s - 1].0 <= bound).map(|s| s.to_string()).collect();
            if raw_fails.is_empty() {
                out.violation("unnormalized contrast meets the bound from t* on; expected it to fail");
            } else {
                out.note(format!("unnormalized conditional fails the bound at steps {}", raw_fails.join(" ")));
            }
        }
        None => out.violation(format!("normalized conditional never stays above {bound}")),
    }
    Ok(())
}
