//! Machine-readable run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ScenarioRef;

pub const SCHEMA_VERSION: u32 = 1;

/// The published JSON schema of [`RunReport`].
pub const REPORT_SCHEMA: &str = include_str!("../../../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Vacuous,
}

/// A measured quantity compared against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub gaps: Vec<Gap>,
    /// Boolean requirements that are not numeric comparisons.
    pub requirements: BTreeMap<String, bool>,
    pub reason: Option<String>,
    pub seed: u64,
    pub grid: Value,
    pub details: Value,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub scenario: ScenarioRef,
    pub seed: u64,
    pub tol_scale: f64,
    pub checks: Vec<CheckReport>,
    pub all_passed: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports are always serializable") + "\n"
    }

    /// The report with every wall-time field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.wall_time_ms = 0.0;
        }
        r
    }
}
