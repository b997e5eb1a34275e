//! Which result each scenario exercises.

/// `(claim, description, scenarios)`.
pub const CLAIMS: &[(&str, &str, &[&str])] = &[
    ("mixture_prior", "finite Bayes mixture over joint semimeasures", &["sanity_checks", "thm8_gap"]),
    ("enumeration_prior", "program-enumeration prior on the joint machine", &["sanity_checks", "thm7_drop", "conj9_search"]),
    ("chron_mixture", "finite Bayes mixture over chronological environments", &["sanity_checks", "thm8_gap"]),
    ("chron_enumeration", "program-enumeration prior on the chronological machine", &["sanity_checks", "conj9_search"]),
    ("policy_value", "finite-horizon expected return of a policy", &["agents_compare"]),
    ("expectimax", "expectimax action choice", &["agents_compare"]),
    ("joint_predictive", "predictive conditional as posterior-weighted component conditionals", &["sanity_checks"]),
    ("posterior_weights", "action-dependent posterior weights", &["sanity_checks", "agents_compare"]),
    ("joint_aixi", "Bayes-optimal policy for the env of a joint mixture", &["agents_compare"]),
    ("echo_environment", "the environment whose percept equals the action", &["thm8_gap", "thm11_convergence"]),
    ("normalization", "per-symbol Solomonoff normalization", &["thm10_normalized", "thm11_convergence"]),
    ("adversarial_nonconvergence", "copy prediction of a joint mixture fails to converge under adversarial actions", &["thm7_drop", "thm10_normalized"]),
    ("copy_probability_vanishes", "joint-mixture probability of the echo history is driven to zero", &["thm7_drop", "thm8_gap"]),
    ("domination_gap", "env of the joint mixture does not dominate the chronological mixture", &["thm8_gap"]),
    ("reverse_domination", "exploratory search for domination failing the other way", &["conj9_search"]),
    ("normalized_adversarial_learning", "normalized copy prediction converges under adversarial actions", &["thm10_normalized"]),
    ("normalized_environment_learning", "normalized predictor learns deterministic environments in the class", &["thm11_convergence"]),
    ("perspective_maps", "env, dual and the semimeasure representation round-trip", &["sanity_checks"]),
    ("one_step_agent", "one-step self-predictive action rule", &["agents_compare"]),
];

/// Claims exercised by a scenario, in table order.
pub fn claims_for(scenario: &str) -> Vec<&'static str> {
    CLAIMS.iter().filter(|(_, _, s)| s.contains(&scenario)).map(|(c, _, _)| *c).collect()
}

pub fn describe(claim: &str) -> Option<&'static str> {
    CLAIMS.iter().find(|(c, _, _)| *c == claim).map(|(_, d, _)| *d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_exercises_a_claim() {
        for s in crate::SCENARIOS {
            assert!(!claims_for(s).is_empty(), "{s}");
        }
    }

    #[test]
    fn every_claim_is_exercised_by_a_shipped_scenario() {
        for (c, d, scenarios) in CLAIMS {
            assert!(!d.is_empty());
            assert!(!scenarios.is_empty(), "{c}");
            assert!(scenarios.iter().all(|s| crate::SCENARIOS.contains(s)), "{c}");
        }
    }

    #[test]
    fn claim_slugs_are_unique() {
        let mut slugs: Vec<_> = CLAIMS.iter().map(|(c, _, _)| *c).collect();
        slugs.sort();
        slugs.dedup();
        assert_eq!(slugs.len(), CLAIMS.len());
    }

    #[test]
    fn covers_the_exercised_results() {
        let required = [
            "mixture_prior", "enumeration_prior", "chron_mixture", "chron_enumeration", "policy_value", "expectimax",
            "joint_predictive", "posterior_weights", "joint_aixi", "echo_environment", "normalization",
            "adversarial_nonconvergence", "copy_probability_vanishes", "domination_gap", "reverse_domination",
            "normalized_adversarial_learning", "normalized_environment_learning",
        ];
        for r in required {
            assert!(describe(r).is_some(), "{r}");
        }
    }
}
