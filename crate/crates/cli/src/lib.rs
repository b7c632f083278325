//! Scenario runner: loads a config, builds the scenario and runs its checks.

pub mod checks;
pub mod config;
pub mod report;

use plectic::scenarios::{build, Scenario};

use crate::checks::{run_check, Ctx};
use crate::config::{ConfigError, ScenarioConfig, DEFAULT_SEED};
use crate::report::{RunReport, Status, SCHEMA_VERSION};

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol_scale: f64,
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: None, tol_scale: 1.0, parallel: false }
    }
}

/// Seed of the `index`-th check when the config does not pin one.
pub fn check_seed(run_seed: u64, index: usize) -> u64 {
    run_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn run(cfg: &ScenarioConfig, opts: RunOptions) -> Result<RunReport, ConfigError> {
    if !(opts.tol_scale.is_finite() && opts.tol_scale > 0.0) {
        return Err(ConfigError::Invalid("tol-scale must be positive".into()));
    }
    let scenario: Scenario = build(&cfg.scenario.name, &cfg.scenario.params)
        .map_err(|e| ConfigError::Invalid(format!("scenario `{}`: {e}", cfg.scenario.name)))?;
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let ctxs: Vec<Ctx> = cfg
        .checks
        .iter()
        .enumerate()
        .map(|(i, c)| Ctx { scenario: &scenario, cfg: c, tol_scale: opts.tol_scale, seed: c.seed.unwrap_or(check_seed(seed, i)) })
        .collect();
    let checks = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = ctxs.iter().map(|c| s.spawn(move || run_check(c))).collect();
            handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
        })
    } else {
        ctxs.iter().map(run_check).collect::<Vec<_>>()
    };
    let all_passed = checks.iter().all(|c| matches!(c.status, Status::Pass | Status::Skipped | Status::Vacuous));
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.clone(),
        seed,
        tol_scale: opts.tol_scale,
        checks,
        all_passed,
    })
}

/// Process exit code for a finished run.
pub fn exit_code(report: &RunReport) -> i32 {
    if report.all_passed {
        0
    } else {
        1
    }
}
