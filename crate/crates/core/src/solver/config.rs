use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rounding::RoundingStrategy;

/// Which end of the spectrum is wanted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    #[default]
    SmallestAlgebraic,
    DominantMagnitude,
}

/// How the Chebyshev filter is set up and updated.
///
/// For the smallest-algebraic target the damped interval `[a, b]` covers the
/// unwanted upper spectrum: `b` is estimated once by truncated Lanczos and
/// `a` follows the largest kept Ritz value. A fixed `interval` disables both
/// updates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterPolicy {
    pub degree: usize,
    #[serde(default = "default_initial_a")]
    pub initial_a: f64,
    #[serde(default)]
    pub interval: Option<(f64, f64)>,
    #[serde(default = "default_upper_edge_iters")]
    pub upper_edge_iters: usize,
    /// Re-estimate `b` every iteration instead of freezing it.
    #[serde(default)]
    pub reestimate_upper: bool,
}

fn default_initial_a() -> f64 {
    -1.0
}

fn default_upper_edge_iters() -> usize {
    20
}

impl FilterPolicy {
    pub fn new(degree: usize) -> Self {
        Self { degree, initial_a: default_initial_a(), interval: None, upper_edge_iters: default_upper_edge_iters(), reestimate_upper: false }
    }

    pub fn fixed(degree: usize, a: f64, b: f64) -> Self {
        Self { interval: Some((a, b)), ..Self::new(degree) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Number of eigenpairs reported.
    pub m: usize,
    /// Extra block vectors iterated alongside the reported ones.
    #[serde(default)]
    pub guard: usize,
    #[serde(default)]
    pub filter: Option<FilterPolicy>,
    pub strategy: RoundingStrategy,
    /// Truncation for the Ritz-vector combinations; defaults to `strategy`.
    #[serde(default)]
    pub combine_strategy: Option<RoundingStrategy>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Relative residual `‖Av − λv‖ / max(1, |λ|)` at which a pair counts as converged.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub locking: bool,
    /// Residual below which a vector is locked; defaults to `tol`.
    #[serde(default)]
    pub lock_tol: Option<f64>,
    /// Omit Ritz coefficients below `strategy.tol` from the combinations
    /// (only while locking is on).
    #[serde(default = "default_true")]
    pub drop_small_coefficients: bool,
    #[serde(default)]
    pub target: Target,
    #[serde(default)]
    pub seed: u64,
    /// Bond rank of the random starting vectors.
    #[serde(default = "default_initial_rank")]
    pub initial_rank: usize,
}

fn default_max_iterations() -> usize {
    500
}

fn default_tol() -> f64 {
    1e-8
}

fn default_true() -> bool {
    true
}

fn default_initial_rank() -> usize {
    2
}

impl SolverConfig {
    pub fn new(m: usize, strategy: RoundingStrategy) -> Self {
        Self {
            m,
            guard: 0,
            filter: None,
            strategy,
            combine_strategy: None,
            max_iterations: default_max_iterations(),
            tol: default_tol(),
            locking: false,
            lock_tol: None,
            drop_small_coefficients: true,
            target: Target::SmallestAlgebraic,
            seed: 0,
            initial_rank: default_initial_rank(),
        }
    }

    pub fn with_filter(mut self, filter: FilterPolicy) -> Self {
        self.filter = Some(filter);
        self
    }

    pub fn block_size(&self) -> usize {
        self.m + self.guard
    }

    pub fn combine(&self) -> &RoundingStrategy {
        self.combine_strategy.as_ref().unwrap_or(&self.strategy)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.initial_rank == 0 {
            return Err(Error::Config("initial_rank must be at least 1".into()));
        }
        if let Some(t) = self.lock_tol {
            if !(t > 0.0) {
                return Err(Error::Config(format!("lock_tol must be positive, got {t}")));
            }
        }
        if let Some(f) = &self.filter {
            if let Some((a, b)) = f.interval {
                if !(a < b) {
                    return Err(Error::Config(format!("filter.interval must satisfy a < b, got [{a}, {b}]")));
                }
            } else if self.target == Target::DominantMagnitude {
                return Err(Error::Config("filter.interval is required for the dominant_magnitude target".into()));
            } else if f.upper_edge_iters < 2 {
                return Err(Error::Config("filter.upper_edge_iters must be at least 2".into()));
            }
        }
        self.strategy.validate()?;
        if let Some(s) = &self.combine_strategy {
            s.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_unknown_keys() {
        let cfg: SolverConfig = serde_json::from_str(r#"{"m": 3, "strategy": {"kind": "svd", "max_rank": 4}}"#).unwrap();
        assert_eq!(cfg.m, 3);
        assert_eq!(cfg.max_iterations, 500);
        assert!(cfg.drop_small_coefficients);
        assert_eq!(cfg.target, Target::SmallestAlgebraic);
        cfg.validate().unwrap();
        assert!(serde_json::from_str::<SolverConfig>(r#"{"m": 3, "strategy": {"kind": "svd"}, "bogus": 1}"#).is_err());
    }

    #[test]
    fn validation_names_fields() {
        let mut cfg = SolverConfig::new(0, RoundingStrategy::exact());
        assert!(cfg.validate().unwrap_err().to_string().contains("m must"));
        cfg.m = 2;
        cfg.tol = 0.0;
        assert!(cfg.validate().unwrap_err().to_string().contains("tol"));
        cfg.tol = 1e-6;
        cfg.target = Target::DominantMagnitude;
        cfg.filter = Some(FilterPolicy::new(4));
        assert!(cfg.validate().unwrap_err().to_string().contains("filter.interval"));
    }
}
