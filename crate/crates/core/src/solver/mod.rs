//! Rank-truncated power and subspace iteration with Chebyshev filtering.

pub mod chebyshev;
pub mod config;
pub mod power;
pub mod ritz;
pub mod subspace;
pub mod trace;

pub use chebyshev::{cheb_apply, chebyshev, derive_seed, ChebFilter};
pub use config::{FilterPolicy, SolverConfig, Target};
pub use power::{power_iterate, PowerResult};
pub use ritz::{rayleigh_ritz, RitzOutcome};
pub use subspace::{random_block, subspace_iterate, RitzState, SubspaceResult};
pub use trace::{IterationRecord, IterationTrace};

use crate::error::Result;
use crate::lanczos::{lanczos_ritz, lanczos_truncated};
use crate::linalg::C64;
use crate::mpo::TTMatrix;
use crate::rounding::RoundingStrategy;
use crate::tt::TensorTrain;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperEdge {
    pub b: f64,
    /// The Lanczos recurrence broke down before `iters` steps.
    pub breakdown: bool,
}

/// Upper spectral edge from a few truncated Lanczos steps: the largest Ritz
/// value plus the norm of the final residual vector as a safeguard.
pub fn estimate_upper_edge(a: &TTMatrix, iters: usize, strategy: &RoundingStrategy, seed: u64) -> Result<UpperEdge> {
    let dims = a.col_sizes();
    let mut ranks = vec![1; dims.len() + 1];
    for r in &mut ranks[1..dims.len()] {
        *r = 2;
    }
    let v = TensorTrain::random(&dims, &ranks, seed)?;
    let v = v.scale(C64::new(1.0 / v.norm(), 0.0));
    let basis = lanczos_truncated(a, &v, iters, &strategy.with_seed(derive_seed(seed, &[1])))?;
    let k = basis.len();
    let ritz = lanczos_ritz(a, &basis, k, k)?;
    // whitening may drop directions, so fewer than k values can come back
    let top = ritz.values.last().copied().unwrap_or(f64::NAN);
    Ok(UpperEdge { b: top + basis.last_beta, breakdown: basis.breakdown })
}

/// `‖A v − λ v‖`, evaluated exactly.
pub fn residual(a: &TTMatrix, v: &TensorTrain, lambda: C64) -> Result<f64> {
    Ok(a.apply(v)?.add(&v.scale(-lambda))?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::laplacian::laplacian;

    #[test]
    fn identity_upper_edge() {
        let e = estimate_upper_edge(&TTMatrix::identity(&[2, 3]), 2, &RoundingStrategy::exact(), 1).unwrap();
        assert!((e.b - 1.0).abs() < 1e-10);
        assert!(e.breakdown);
    }

    #[test]
    fn laplacian_upper_edge_is_safe_and_deterministic() {
        let a = laplacian(2, 4).unwrap();
        let s = RoundingStrategy::svd(Some(4), 0.0);
        let e1 = estimate_upper_edge(&a, 6, &s, 3).unwrap();
        let e2 = estimate_upper_edge(&a, 6, &s, 3).unwrap();
        let top = 8.0 * (0.4 * std::f64::consts::PI).sin().powi(2);
        assert!(e1.b >= top - 1e-9, "{} < {top}", e1.b);
        assert_eq!(e1, e2);
    }
}
