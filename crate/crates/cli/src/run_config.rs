//! Schema-versioned run configuration files.

use std::path::{Path, PathBuf};

use ccshape_core::solver::{SearchMode, SolverConfig, SolverError, TargetBand};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub schema_version: u32,
    pub solver: SolverConfig,
    #[serde(default = "default_mode")]
    pub mode: SearchMode,
    #[serde(default)]
    pub band: Option<TargetBand>,
    #[serde(default)]
    pub analysis: AnalysisOptions,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_mode() -> SearchMode {
    SearchMode::Minima
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisOptions {
    pub bins: usize,
    pub gap: f64,
    pub inner_fraction: f64,
    pub voids: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            bins: 10,
            gap: ccshape_core::analysis::DEFAULT_GAP,
            inner_fraction: ccshape_core::analysis::DEFAULT_INNER_FRACTION,
            voids: 5,
        }
    }
}

impl AnalysisOptions {
    /// `prefix` is prepended to field names in diagnostics.
    pub fn validate(&self, prefix: &str) -> Result<(), CliError> {
        if self.bins < 2 {
            return Err(CliError::config(format!("{prefix}bins: must be at least 2, got {}", self.bins)));
        }
        if !(self.gap > 0.0 && self.gap.is_finite()) {
            return Err(CliError::config(format!("{prefix}gap: must be positive, got {}", self.gap)));
        }
        if !(self.inner_fraction > 0.0 && self.inner_fraction <= 1.0) {
            return Err(CliError::config(format!(
                "{prefix}inner_fraction: must lie in (0, 1], got {}",
                self.inner_fraction
            )));
        }
        Ok(())
    }
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let parsed: Self = serde_json::from_str(&text).map_err(|e| {
            CliError::config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
        })?;
        parsed.validate()?;
        Ok(parsed)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::config(format!(
                "schema_version: unsupported version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        match self.solver.validate() {
            Err(SolverError::InvalidConfig { field, message }) => {
                return Err(CliError::config(format!("solver.{field}: {message}")))
            }
            Err(e) => return Err(CliError::config(e.to_string())),
            Ok(()) => {}
        }
        if let Some(band) = self.band {
            let (lo, hi) = match band {
                TargetBand::Absolute { lo, hi } | TargetBand::RelativeToMin { lo, hi } => (lo, hi),
            };
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(CliError::config(format!("band: need finite lo <= hi, got [{lo}, {hi}]")));
            }
        }
        self.analysis.validate("analysis.")
    }
}
