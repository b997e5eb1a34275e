//! Adversarial traces against joint mixtures.

use uai_core::adversary::{chron_copy_products, copy_conditional_trace, greedy_antipredict, AdversaryTrace};
use uai_core::config::BuildCtx;
use uai_core::utm::joint_cached;
use uai_core::{Action, ChronEnv, Prob};

use crate::config::Params;
use crate::error::LabError;
use crate::output::{float, frac, Csv, Outcome};

const TRACE_HEADER: &[&str] =
    &["t", "action", "conditional", "cumulative_product_exact_as_fraction", "cumulative_product_float"];

fn trace_csv(trace: &AdversaryTrace) -> Csv {
    let mut csv = Csv::new(TRACE_HEADER);
    for s in &trace.steps {
        csv.row(&[s.t.to_string(), s.action.0.to_string(), frac(&s.conditional), frac(&s.product), float(&s.product)]);
    }
    csv
}

fn trace_invariants(name: &str, trace: &AdversaryTrace, out: &mut Outcome) {
    if !trace.non_increasing() {
        out.violation(format!("{name}: cumulative product increased"));
    }
    if !trace.telescopes() {
        out.violation(format!("{name}: cumulative product does not telescope"));
    }
    if !trace.greedy_optimal() {
        out.violation(format!("{name}: adversary did not pick the smallest conditional"));
    }
}

fn crossing(name: &str, trace: &AdversaryTrace, threshold: &Prob, out: &mut Outcome) -> Option<usize> {
    if let Some(h) = &trace.truncated {
        out.note(format!("{name}: trace stopped at undefined context {h}"));
    }
    let t = trace.first_below(threshold);
    match t {
        Some(t) => out.note(format!("{name}: product fell below {threshold} at step {t}")),
        None => out.violation(format!(
            "{name}: product stayed at or above {threshold} for {} steps",
            trace.steps.len()
        )),
    }
    t
}

pub(super) fn run_drop(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::Thm7Drop { joint, steps, threshold, enumeration } = p else { unreachable!() };
    let xi = joint.component.build(ctx)?;
    let trace = greedy_antipredict(xi.as_ref(), *steps);
    trace_invariants(&joint.name, &trace, out);
    crossing(&joint.name, &trace, threshold, out);
    out.file("trace.csv", trace_csv(&trace));

    let mut sweep = Csv::new(&["l", "s", "t", "action", "conditional", "product", "product_float"]);
    let mut finals = Csv::new(&["l", "s", "steps_completed", "final_product", "final_product_float", "strictly_decreasing"]);
    for &l in &enumeration.l {
        let approx = joint_cached(ctx.cache.as_ref(), l, enumeration.s, 2 * enumeration.steps)?;
        let trace = greedy_antipredict(&approx, enumeration.steps);
        let name = format!("enumeration L={l}");
        trace_invariants(&name, &trace, out);
        for s in &trace.steps {
            sweep.row(&[
                l.to_string(),
                enumeration.s.to_string(),
                s.t.to_string(),
                s.action.0.to_string(),
                frac(&s.conditional),
                frac(&s.product),
                float(&s.product),
            ]);
        }
        if let Some(h) = &trace.truncated {
            out.note(format!("{name}: trace stopped at undefined context {h}"));
        }
        let products = trace.products();
        let last = products.last().cloned().unwrap_or_else(Prob::one);
        let decreasing =
            products.first().is_some_and(|f| *f < Prob::one()) && products.windows(2).all(|w| w[1] < w[0]);
        finals.row(&[
            l.to_string(),
            enumeration.s.to_string(),
            trace.steps.len().to_string(),
            frac(&last),
            float(&last),
            decreasing.to_string(),
        ]);
        out.note(format!(
            "{name}: product after {} steps is {} ({})",
            trace.steps.len(),
            last,
            if decreasing { "strictly decreasing" } else { "not strictly decreasing" }
        ));
    }
    out.file("enumeration_sweep.csv", sweep);
    out.file("enumeration_final.csv", finals);
    Ok(())
}

pub(super) fn run_gap(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::Thm8Gap { joint, chron, steps, threshold, check_steps } = p else { unreachable!() };
    let w_id = super::weight_of_identity(&chron.component)
        .ok_or_else(|| LabError::Config(format!("{} has no echo environment component", chron.name)))?;
    let xi = joint.component.build(ctx)?;
    let nu = chron.component.build(ctx)?;

    let trace = greedy_antipredict(xi.as_ref(), *steps);
    trace_invariants(&joint.name, &trace, out);
    crossing(&joint.name, &trace, threshold, out);
    out.file("trace.csv", trace_csv(&trace));

    let actions = trace.actions();
    let chron_products = chron_copy_products(nu.as_ref(), &actions)?;
    let mut gap = Csv::new(&[
        "t", "joint_product", "joint_product_float", "chron_value", "chron_value_float", "ratio", "ratio_float",
        "chron_at_least_w_id",
    ]);
    let mut ratios: Vec<Option<Prob>> = Vec::new();
    for (s, c) in trace.steps.iter().zip(&chron_products) {
        let ratio = c.checked_div(&s.product);
        let ok = *c >= w_id;
        if !ok {
            out.violation(format!("chronological value {c} below {w_id} at step {}", s.t));
        }
        gap.row(&[
            s.t.to_string(),
            frac(&s.product),
            float(&s.product),
            frac(c),
            float(c),
            ratio.as_ref().map(frac).unwrap_or_else(|| "inf".into()),
            ratio.as_ref().map(float).unwrap_or_else(|| "inf".into()),
            ok.to_string(),
        ]);
        ratios.push(ratio);
    }
    let increasing = ratios.windows(2).all(|w| match (&w[0], &w[1]) {
        (Some(a), Some(b)) => b > a,
        _ => false,
    });
    if increasing {
        out.note("ratio of chronological value to joint product is strictly increasing along the trace");
    } else {
        out.violation("ratio of chronological value to joint product is not strictly increasing");
    }
    out.file("gap.csv", gap);

    let mut bound = Csv::new(&["steps", "sequences", "min_value", "min_value_float", "witness", "at_least_w_id"]);
    for n in 1..=*check_steps {
        let mut min: Option<(Prob, Vec<Action>)> = None;
        let seqs = super::binary_actions(n);
        for a in &seqs {
            let e: Vec<_> = a.iter().map(|x| uai_core::Percept(x.0)).collect();
            let v = nu.eval(&e, a)?;
            if min.as_ref().is_none_or(|(m, _)| v < *m) {
                min = Some((v, a.clone()));
            }
        }
        let (m, w) = min.expect("nonempty");
        let ok = m >= w_id;
        if !ok {
            out.violation(format!("chronological value {m} below {w_id} after {n} steps"));
        }
        let w: String = w.iter().map(|a| a.0.to_string()).collect();
        bound.row(&[n.to_string(), seqs.len().to_string(), frac(&m), float(&m), w, ok.to_string()]);
    }
    out.note(format!("chronological echo value checked against w_id = {w_id} on all sequences up to {check_steps} steps"));
    out.file("bound.csv", bound);
    Ok(())
}

pub(super) fn run_normalized(p: &Params, ctx: &BuildCtx, out: &mut Outcome) -> Result<(), LabError> {
    let Params::Thm10Normalized { cases } = p else { unreachable!() };
    let mut csv = Csv::new(&["case", "t", "action", "conditional", "conditional_float"]);
    let mut adv = Csv::new(&["case", "t", "action", "conditional", "conditional_float"]);
    for case in cases {
        let j = case.component.build(ctx)?;
        let actions: Vec<Action> = case.actions.iter().map(|&a| Action(a)).collect();
        let trace = copy_conditional_trace(j.as_ref(), &actions);
        for (i, c) in trace.conditionals.iter().enumerate() {
            csv.row(&[case.name.clone(), (i + 1).to_string(), actions[i].0.to_string(), frac(c), float(c)]);
        }
        if let Some(h) = &trace.truncated {
            out.note(format!("{}: copy trace stopped at undefined context {h}", case.name));
        }
        let last = trace.conditionals.last().map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        out.note(format!(
            "{}: copy conditional {} along the fixed actions, last value {last}",
            case.name,
            if trace.strictly_increasing() { "strictly increasing" } else { "not strictly increasing" },
        ));

        let greedy = greedy_antipredict(j.as_ref(), actions.len());
        for s in &greedy.steps {
            adv.row(&[case.name.clone(), s.t.to_string(), s.action.0.to_string(), frac(&s.conditional), float(&s.conditional)]);
        }
        let rising = greedy.steps.windows(2).all(|w| w[1].conditional > w[0].conditional);
        out.note(format!(
            "{}: adversarial copy conditional {}",
            case.name,
            if rising { "strictly increasing" } else { "not strictly increasing" }
        ));
    }
    out.file("conditionals.csv", csv);
    out.file("adversary.csv", adv);
    Ok(())
}
