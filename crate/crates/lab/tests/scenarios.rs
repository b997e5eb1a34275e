use uai_core::config::BuildCtx;
use uai_lab::{execute, ScenarioConfig, SCENARIOS};

#[test]
fn shipped_scenarios_run_without_violations() {
    for s in SCENARIOS {
        let cfg = ScenarioConfig::default_for(s).unwrap();
        let out = execute(&cfg, &BuildCtx::default()).unwrap();
        assert!(out.passed(), "{s}: {:?}", out.violations);
        assert!(!out.files.is_empty(), "{s}");
        for (name, body) in &out.files {
            let mut lines = body.lines();
            let width = lines.next().unwrap().split(',').count();
            assert!(lines.all(|l| l.split(',').count() == width), "{s}/{name}");
        }
    }
}

#[test]
fn summary_names_the_claims() {
    let cfg = ScenarioConfig::default_for("thm11_convergence").unwrap();
    let out = execute(&cfg, &BuildCtx::default()).unwrap();
    let body = out.summary_body();
    assert!(body.contains("normalized_environment_learning"));
    assert!(body.contains("t* = 5"));
}
