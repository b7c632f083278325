//! Scenario configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use plectic::quadrature::PhaseConvention;
use plectic::scenarios::ScenarioParams;
use serde::{Deserialize, Serialize};

/// Seed used when neither the config nor the command line sets one.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Nondegeneracy,
    ActionCheck,
    MomentCheck,
    BracketLaws,
    LeafRestrict,
    CriticalVanishing,
    SplitLevelSet,
    EquivariantClosed,
    FixedPoints,
    CheckBasic,
    ReducedForm,
    ReduceDynamics,
    ConnectionCurvature,
    DescendEta,
    VariationSlope,
    StationaryPhaseCompare,
    GaussianCheck,
    LocalizationCompare,
    WeylLevelSet,
}

impl CheckName {
    pub const ALL: [CheckName; 19] = [
        CheckName::Nondegeneracy,
        CheckName::ActionCheck,
        CheckName::MomentCheck,
        CheckName::BracketLaws,
        CheckName::LeafRestrict,
        CheckName::CriticalVanishing,
        CheckName::SplitLevelSet,
        CheckName::EquivariantClosed,
        CheckName::FixedPoints,
        CheckName::CheckBasic,
        CheckName::ReducedForm,
        CheckName::ReduceDynamics,
        CheckName::ConnectionCurvature,
        CheckName::DescendEta,
        CheckName::VariationSlope,
        CheckName::StationaryPhaseCompare,
        CheckName::GaussianCheck,
        CheckName::LocalizationCompare,
        CheckName::WeylLevelSet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Nondegeneracy => "nondegeneracy",
            CheckName::ActionCheck => "action_check",
            CheckName::MomentCheck => "moment_check",
            CheckName::BracketLaws => "bracket_laws",
            CheckName::LeafRestrict => "leaf_restrict",
            CheckName::CriticalVanishing => "critical_vanishing",
            CheckName::SplitLevelSet => "split_level_set",
            CheckName::EquivariantClosed => "equivariant_closed",
            CheckName::FixedPoints => "fixed_points",
            CheckName::CheckBasic => "check_basic",
            CheckName::ReducedForm => "reduced_form",
            CheckName::ReduceDynamics => "reduce_dynamics",
            CheckName::ConnectionCurvature => "connection_curvature",
            CheckName::DescendEta => "descend_eta",
            CheckName::VariationSlope => "variation_slope",
            CheckName::StationaryPhaseCompare => "stationary_phase_compare",
            CheckName::GaussianCheck => "gaussian_check",
            CheckName::LocalizationCompare => "localization_compare",
            CheckName::WeylLevelSet => "weyl_level_set",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioRef {
    pub name: String,
    #[serde(default)]
    pub params: ScenarioParams,
}

/// One check with its optional overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub name: CheckName,
    /// Default tolerance for every gap of the check.
    pub tol: Option<f64>,
    /// Per-gap tolerances, keyed by gap name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub samples: Option<usize>,
    pub triples: Option<usize>,
    pub seed: Option<u64>,
    pub t_values: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub ell_values: Option<Vec<usize>>,
    pub level: Option<Vec<f64>>,
    pub nodes: Option<Vec<usize>>,
    pub convention: Option<PhaseConvention>,
    /// Complex parameter `[re, im]` of the equivariant exponential.
    pub z: Option<[f64; 2]>,
    pub fit_tol: Option<f64>,
    pub lemma_t: Option<f64>,
    pub hermite_nodes: Option<usize>,
    pub starts: Option<usize>,
    /// Function override in prefix syntax, e.g. `(sin x0)`.
    pub f: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioRef,
    pub seed: Option<u64>,
    pub checks: Vec<CheckConfig>,
    pub output: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|source| ConfigError::Parse { path: origin.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every numeric override must be positive.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.checks.is_empty() {
            return Err(ConfigError::Invalid("no checks listed".into()));
        }
        for c in &self.checks {
            let name = c.name.as_str();
            let bad = |what: &str| Err(ConfigError::Invalid(format!("check `{name}`: {what} must be positive")));
            let pos = |v: f64| v.is_finite() && v > 0.0;
            if c.tol.is_some_and(|v| !pos(v)) {
                return bad("tol");
            }
            if let Some((k, _)) = c.tolerances.iter().find(|(_, v)| !pos(**v)) {
                return bad(&format!("tolerance `{k}`"));
            }
            for (label, v) in [("samples", c.samples), ("triples", c.triples), ("hermite_nodes", c.hermite_nodes), ("starts", c.starts)] {
                if v == Some(0) {
                    return bad(label);
                }
            }
            for (label, v) in [("fit_tol", c.fit_tol), ("lemma_t", c.lemma_t)] {
                if v.is_some_and(|v| !pos(v)) {
                    return bad(label);
                }
            }
            for (label, v) in [("t_values", &c.t_values), ("lambdas", &c.lambdas)] {
                if let Some(v) = v {
                    if v.is_empty() || v.iter().any(|x| !pos(*x)) {
                        return bad(label);
                    }
                }
            }
            if c.nodes.as_ref().is_some_and(|v| v.iter().any(|&n| n == 0)) {
                return bad("nodes");
            }
            if c.ell_values.as_ref().is_some_and(|v| v.is_empty() || v.iter().any(|&n| n == 0)) {
                return bad("ell_values");
            }
            if let Some(f) = &c.f {
                plectic::expr::ScalarExpr::parse(f)
                    .map_err(|e| ConfigError::Invalid(format!("check `{name}`: f: {e}")))?;
            }
        }
        Ok(())
    }
}
