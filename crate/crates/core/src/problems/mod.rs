//! Test operators: Heisenberg spin chains, the finite-difference Laplacian
//! and the Hénon–Heiles potential, built from sums of Kronecker products.

pub mod cp;
pub mod henon_heiles;
pub mod hermite;
pub mod laplacian;
pub mod spin;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpo::TTMatrix;

pub use cp::{mpo_from_cp, CPOperator};
pub use henon_heiles::{henon_heiles, henon_heiles_cp, HENON_HEILES_TOL};
pub use hermite::hermite_collocation;
pub use laplacian::{laplacian, laplacian_1d_eigenvalues, laplacian_cp, sine_mode};
pub use spin::{heisenberg, heisenberg_cp, spin_matrices, Boundary, Spin};

fn one() -> f64 {
    1.0
}

fn default_mpo_tol() -> f64 {
    1e-12
}

fn default_hh_tol() -> f64 {
    HENON_HEILES_TOL
}

/// JSON-facing description of a test operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Heisenberg {
        length: usize,
        #[serde(default)]
        spin: Spin,
        #[serde(default = "one")]
        j: f64,
        #[serde(default = "one")]
        h: f64,
        #[serde(default)]
        boundary: Boundary,
        #[serde(default = "default_mpo_tol")]
        mpo_tol: f64,
    },
    Laplacian {
        d: usize,
        n: usize,
    },
    HenonHeiles {
        d: usize,
        n: usize,
        mu: f64,
        #[serde(default = "default_hh_tol")]
        mpo_tol: f64,
    },
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            ProblemSpec::Heisenberg { length, j, h, mpo_tol, .. } => {
                if length < 2 {
                    return bad(format!("problem.length must be at least 2, got {length}"));
                }
                if !j.is_finite() || !h.is_finite() {
                    return bad("problem.j and problem.h must be finite".into());
                }
                if !(mpo_tol >= 0.0) {
                    return bad("problem.mpo_tol must be non-negative".into());
                }
            }
            ProblemSpec::Laplacian { d, n } => {
                if d == 0 || n < 2 {
                    return bad(format!("problem.d must be >= 1 and problem.n >= 2, got d={d}, n={n}"));
                }
            }
            ProblemSpec::HenonHeiles { d, n, mu, mpo_tol } => {
                if d < 2 || n < 2 {
                    return bad(format!("problem.d and problem.n must be >= 2, got d={d}, n={n}"));
                }
                if !mu.is_finite() || !(mpo_tol >= 0.0) {
                    return bad("problem.mu must be finite and problem.mpo_tol non-negative".into());
                }
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<TTMatrix> {
        self.validate()?;
        match *self {
            ProblemSpec::Heisenberg { length, spin, j, h, boundary, mpo_tol } => heisenberg(length, spin, j, h, boundary, mpo_tol),
            ProblemSpec::Laplacian { d, n } => laplacian(d, n),
            ProblemSpec::HenonHeiles { d, n, mu, mpo_tol } => henon_heiles(d, n, mu, mpo_tol),
        }
    }

    /// Mode sizes of the operator.
    pub fn mode_sizes(&self) -> Vec<usize> {
        match *self {
            ProblemSpec::Heisenberg { length, spin, .. } => vec![if spin == Spin::Half { 2 } else { 3 }; length],
            ProblemSpec::Laplacian { d, n } | ProblemSpec::HenonHeiles { d, n, .. } => vec![n; d],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_fields() {
        let e = ProblemSpec::Laplacian { d: 0, n: 4 }.validate().unwrap_err();
        assert!(e.to_string().contains("problem.d"));
    }
}
