use std::time::Instant;

use super::chebyshev::{cheb_apply, derive_seed, ChebFilter};
use super::config::SolverConfig;
use super::trace::{IterationRecord, IterationTrace};
use super::{estimate_upper_edge, residual};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mpo::{expectation, TTMatrix};
use crate::rounding::truncated_matvec;
use crate::tt::TensorTrain;

#[derive(Clone, Debug)]
pub struct PowerResult {
    pub vector: TensorTrain,
    pub value: C64,
    pub trace: IterationTrace,
    pub converged: bool,
}

/// Power iteration `v ← 𝔗(p(A) v) / ‖·‖` with `p` the configured filter or
/// the identity. Stops once the Rayleigh quotient moves by less than
/// `tol · max(1, |λ|)`.
pub fn power_iterate(a: &TTMatrix, v0: &TensorTrain, config: &SolverConfig) -> Result<PowerResult> {
    config.validate()?;
    let n0 = v0.norm();
    if !(n0 > 0.0) {
        return Err(Error::Config("power iteration needs a nonzero start vector".into()));
    }
    let filter = match &config.filter {
        None => None,
        Some(f) => {
            let (lo, hi) = match f.interval {
                Some(iv) => iv,
                None => (f.initial_a, estimate_upper_edge(a, f.upper_edge_iters, &config.strategy, derive_seed(config.seed, &[u64::MAX]))?.b),
            };
            Some(ChebFilter::new(f.degree, lo, hi)?)
        }
    };
    let mut v = v0.scale(C64::new(1.0 / n0, 0.0));
    let mut lambda = expectation(&v, a, &v)?;
    let mut trace = IterationTrace::default();
    let mut converged = false;
    let start = Instant::now();
    for iter in 1..=config.max_iterations {
        let strategy = config.strategy.with_seed(derive_seed(config.seed, &[iter as u64]));
        let (z, err) = match &filter {
            Some(f) => cheb_apply(a, &v, f, &strategy)?,
            None => {
                let (z, e) = truncated_matvec(a, &v, &strategy)?;
                let n = z.norm();
                (z, if n > 0.0 { e / n } else { e })
            }
        };
        let nz = z.norm();
        if !(nz > 0.0) {
            return Err(Error::Breakdown(format!("truncation annihilated the iterate at step {iter}; increase max_rank")));
        }
        v = z.scale(C64::new(1.0 / nz, 0.0));
        let next = expectation(&v, a, &v)?;
        let res = residual(a, &v, next)?;
        let (fa, fb) = filter.map_or((f64::NAN, f64::NAN), |f| (f.a, f.b));
        trace.push(IterationRecord {
            iter,
            ritz_values: vec![next.re],
            max_imag: next.im.abs(),
            residuals: vec![res],
            ranks: vec![v.max_rank()],
            trunc_err: err,
            a: fa,
            b: fb,
            seconds: start.elapsed().as_secs_f64(),
            locked: 0,
            dropped: 0,
            reseeded: 0,
        });
        let moved = (next - lambda).norm();
        lambda = next;
        if moved < config.tol * lambda.norm().max(1.0) {
            converged = true;
            break;
        }
    }
    Ok(PowerResult { vector: v, value: lambda, trace, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rounding::RoundingStrategy;
    use crate::solver::config::Target;
    use ndarray::array;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn diagonal_error_ratio() {
        let a = TTMatrix::diagonal(&[c(1.0), c(4.0), c(2.0)]);
        let v0 = TensorTrain::rank_one(&[array![c(1.0), c(1.0), c(1.0)]]).unwrap();
        let mut cfg = SolverConfig::new(1, RoundingStrategy::exact());
        cfg.target = Target::DominantMagnitude;
        cfg.max_iterations = 12;
        cfg.tol = 1e-300;
        let out = power_iterate(&a, &v0, &cfg).unwrap();
        let errs: Vec<f64> = out.trace.records.iter().map(|r| 4.0 - r.ritz_values[0]).collect();
        let ratio = errs[11] / errs[10];
        // eigenvalue error decays with the square of |λ₂/λ₁|
        assert!((ratio - 0.25).abs() < 1e-3, "{ratio}");
        let v = out.vector.to_vector().unwrap();
        assert!((v[1].norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn eigenvector_start_converges_at_once() {
        let a = TTMatrix::diagonal(&[c(1.0), c(4.0), c(2.0)]);
        let v0 = TensorTrain::rank_one(&[array![c(0.0), c(1.0), c(0.0)]]).unwrap();
        let mut cfg = SolverConfig::new(1, RoundingStrategy::exact());
        cfg.target = Target::DominantMagnitude;
        let out = power_iterate(&a, &v0, &cfg).unwrap();
        assert!(out.converged);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn annihilated_iterate_is_a_breakdown() {
        let a = TTMatrix::diagonal(&[c(0.0), c(1.0)]);
        let v0 = TensorTrain::rank_one(&[array![c(1.0), c(0.0)]]).unwrap();
        let cfg = SolverConfig::new(1, RoundingStrategy::exact());
        assert!(matches!(power_iterate(&a, &v0, &cfg), Err(Error::Breakdown(_))));
    }
}
