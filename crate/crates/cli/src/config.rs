use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tteig::problems::ProblemSpec;
use tteig::SolverConfig;

use crate::failure::Failure;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Subspace,
    Power,
    Lanczos,
}

/// One experiment, read from a JSON document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run_id: String,
    pub problem: ProblemSpec,
    pub method: Method,
    pub solver: SolverConfig,
    /// Krylov steps for the Lanczos method.
    #[serde(default = "default_lanczos_steps")]
    pub lanczos_steps: usize,
    /// Compare against a dense eigendecomposition at the end.
    #[serde(default)]
    pub oracle: bool,
    /// Output directory; `--out` and `TTEIG_OUT` take precedence.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_lanczos_steps() -> usize {
    20
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        if self.run_id.is_empty() || self.run_id.contains(['/', '\\']) {
            return Err(Failure::config("run_id must be a non-empty file name".into()));
        }
        self.problem.validate().map_err(Failure::from)?;
        self.solver.validate().map_err(|e| Failure::config(format!("solver.{}", e.to_string().trim_start_matches("invalid configuration: "))))?;
        match self.method {
            Method::Power if self.solver.m != 1 || self.solver.guard != 0 => {
                Err(Failure::config("solver.m must be 1 and solver.guard 0 for the power method".into()))
            }
            Method::Lanczos if self.lanczos_steps < 2 || self.lanczos_steps < self.solver.m => {
                Err(Failure::config(format!("lanczos_steps must be at least max(2, solver.m), got {}", self.lanczos_steps)))
            }
            _ => Ok(()),
        }
    }

    /// Output directory after flag and environment overrides.
    pub fn output(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = std::env::var_os("TTEIG_OUT") {
            return PathBuf::from(p);
        }
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}
