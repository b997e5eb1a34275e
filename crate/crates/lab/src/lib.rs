//! Scenario harness over `uai-core`: versioned JSON configs in, CSV tables
//! and a plain-text summary out.

pub mod claims;
pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use uai_core::config::BuildCtx;
use uai_core::utm::EnumCache;

pub use config::ScenarioConfig;
pub use error::LabError;
pub use output::Outcome;
pub use scenarios::execute;

pub const SCENARIOS: &[&str] = &[
    "sanity_checks",
    "thm7_drop",
    "thm8_gap",
    "thm10_normalized",
    "thm11_convergence",
    "conj9_search",
    "agents_compare",
];

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
    /// Recorded in the header only: every scenario is deterministic.
    pub seed: u64,
    /// Overrides the cache directory from the environment.
    pub cache: Option<PathBuf>,
}

pub fn build_ctx(cache: Option<&Path>) -> BuildCtx {
    BuildCtx { cache: cache.map(EnumCache::new).or_else(EnumCache::from_env) }
}

/// Runs a scenario on a dedicated pool of `jobs` threads.
pub fn execute_with_jobs(cfg: &ScenarioConfig, ctx: &BuildCtx, jobs: Option<usize>) -> Result<Outcome, LabError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = pool.build().map_err(|e| LabError::Pool(e.to_string()))?;
    pool.install(|| execute(cfg, ctx))
}

pub fn header(opts: &RunOptions) -> String {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let jobs = opts.jobs.map(|j| j.to_string()).unwrap_or_else(|| "default".into());
    format!("generated at unix time {now}, jobs {jobs}, seed {}", opts.seed)
}

/// Executes and writes every output file plus `summary.txt`.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Outcome, LabError> {
    let ctx = build_ctx(opts.cache.as_deref());
    let outcome = execute_with_jobs(cfg, &ctx, opts.jobs)?;
    outcome.write(&opts.out, &header(opts))?;
    Ok(outcome)
}
