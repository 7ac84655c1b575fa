use std::time::Instant;

use rayon::prelude::*;

use super::chebyshev::{cheb_apply, derive_seed, ChebFilter};
use super::config::{SolverConfig, Target};
use super::ritz::rayleigh_ritz_with;
use super::trace::{IterationRecord, IterationTrace};
use super::{estimate_upper_edge, residual};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mpo::TTMatrix;
use crate::rounding::truncated_matvec;
use crate::tt::TensorTrain;

/// Consecutive basis collapses tolerated before giving up.
const MAX_COLLAPSES: usize = 3;

#[derive(Clone, Debug)]
pub struct RitzState {
    /// Unit-norm Ritz vectors in target order.
    pub basis: Vec<TensorTrain>,
    pub ritz_values: Vec<C64>,
    pub residual_norms: Vec<f64>,
    pub locked: Vec<bool>,
    pub iteration: usize,
}

#[derive(Clone, Debug)]
pub struct SubspaceResult {
    /// The `m` reported pairs.
    pub state: RitzState,
    pub trace: IterationTrace,
    pub converged: bool,
    /// The upper-edge estimate hit a Lanczos breakdown.
    pub edge_breakdown: bool,
}

/// Random unit-norm starting block of `config.block_size()` vectors.
pub fn random_block(dims: &[usize], config: &SolverConfig) -> Result<Vec<TensorTrain>> {
    let mut ranks = vec![config.initial_rank; dims.len() + 1];
    ranks[0] = 1;
    ranks[dims.len()] = 1;
    (0..config.block_size())
        .map(|j| {
            let v = TensorTrain::random(dims, &ranks, derive_seed(config.seed, &[0, j as u64]))?;
            Ok(v.scale(C64::new(1.0 / v.norm(), 0.0)))
        })
        .collect()
}

/// Filtered subspace iteration with rank truncation.
///
/// Each sweep filters every unlocked vector, `z_j = 𝔗(p_k(A) v_j)` (or
/// `𝔗(A v_j)` without a filter), then extracts Ritz pairs. For the
/// smallest-algebraic target the filter damps `[a, b]` with `b` from
/// [`estimate_upper_edge`] and `a` the largest Ritz value of the block.
/// Converged when all `m` reported pairs satisfy
/// `‖A v − λ v‖ < tol · max(1, |λ|)`.
pub fn subspace_iterate(a: &TTMatrix, v0: Vec<TensorTrain>, config: &SolverConfig) -> Result<SubspaceResult> {
    config.validate()?;
    let block = config.block_size();
    if v0.len() != block {
        return Err(Error::Config(format!("expected {block} starting vectors, got {}", v0.len())));
    }
    if v0.iter().any(|v| !(v.norm() > 0.0)) {
        return Err(Error::Config("starting vectors must be nonzero".into()));
    }
    let dims = a.col_sizes();
    let hermitian = a.is_hermitian(1e-12);
    let edge_seed = derive_seed(config.seed, &[u64::MAX]);
    let adaptive = config.filter.as_ref().is_some_and(|f| f.interval.is_none());
    let mut edge_breakdown = false;
    let (mut lo, mut hi) = match &config.filter {
        None => (f64::NAN, f64::NAN),
        Some(f) => match f.interval {
            Some(iv) => iv,
            None => {
                let e = estimate_upper_edge(a, f.upper_edge_iters, &config.strategy, edge_seed)?;
                edge_breakdown = e.breakdown;
                (f.initial_a, e.b)
            }
        },
    };
    let lock_tol = config.lock_tol.unwrap_or(config.tol);
    let drop_below = if config.locking && config.drop_small_coefficients { config.combine().tol } else { 0.0 };

    let mut basis = v0;
    let mut values = vec![C64::new(0.0, 0.0); block];
    let mut residuals = vec![f64::INFINITY; block];
    let mut locked = vec![false; block];
    let mut trace = IterationTrace::default();
    let mut converged = false;
    let mut collapses = 0;
    let start = Instant::now();
    let mut iteration = 0;

    for iter in 1..=config.max_iterations {
        iteration = iter;
        if adaptive && config.filter.as_ref().is_some_and(|f| f.reestimate_upper) && iter > 1 {
            let f = config.filter.as_ref().unwrap();
            let e = estimate_upper_edge(a, f.upper_edge_iters, &config.strategy, derive_seed(edge_seed, &[iter as u64]))?;
            edge_breakdown |= e.breakdown;
            hi = e.b;
        }
        // the interval collapses when the block already spans the spectrum
        let filter = config.filter.as_ref().and_then(|f| ChebFilter::new(f.degree, lo, hi).ok());
        let filtered: Vec<Result<(TensorTrain, f64)>> = basis
            .par_iter()
            .enumerate()
            .map(|(j, v)| {
                if locked[j] {
                    return Ok((v.clone(), 0.0));
                }
                let strategy = config.strategy.with_seed(derive_seed(config.seed, &[iter as u64, j as u64]));
                match (&config.filter, &filter) {
                    (Some(_), Some(f)) => cheb_apply(a, v, f, &strategy),
                    (Some(_), None) => Ok((v.clone(), 0.0)),
                    (None, _) => {
                        let (z, e) = truncated_matvec(a, v, &strategy)?;
                        let n = z.norm();
                        Ok((z, if n > 0.0 { e / n } else { e }))
                    }
                }
            })
            .collect();
        let mut zs = Vec::with_capacity(block);
        let mut filter_err = 0.0f64;
        for r in filtered {
            let (z, e) = r?;
            filter_err = filter_err.max(e);
            zs.push(z);
        }
        let combine = config.combine().with_seed(derive_seed(config.seed, &[iter as u64, u64::MAX]));
        let ritz = rayleigh_ritz_with(a, &zs, &combine, config.target, hermitian, drop_below)?;
        let mut reseeded = 0;
        basis = ritz.basis;
        values = ritz.values;
        if basis.len() < block {
            collapses += 1;
            if collapses > MAX_COLLAPSES {
                return Err(Error::Breakdown(format!("basis collapsed in {collapses} consecutive iterations")));
            }
            let mut ranks = vec![config.initial_rank; dims.len() + 1];
            ranks[0] = 1;
            ranks[dims.len()] = 1;
            while basis.len() < block {
                let v = TensorTrain::random(&dims, &ranks, derive_seed(config.seed, &[iter as u64, basis.len() as u64, 1]))?;
                basis.push(v.scale(C64::new(1.0 / v.norm(), 0.0)));
                values.push(C64::new(f64::NAN, 0.0));
                reseeded += 1;
            }
        } else {
            collapses = 0;
        }
        residuals = basis
            .par_iter()
            .zip(values.par_iter())
            .map(|(v, &l)| if l.re.is_nan() { Ok(f64::INFINITY) } else { residual(a, v, l) })
            .collect::<Result<Vec<f64>>>()?;
        let relative = |j: usize| residuals[j] / values[j].norm().max(1.0);
        if config.locking {
            for (j, flag) in locked.iter_mut().enumerate() {
                *flag = j < config.m && relative(j) < lock_tol;
            }
        }
        if adaptive && config.target == Target::SmallestAlgebraic {
            lo = values.iter().map(|z| z.re).filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
        }
        trace.push(IterationRecord {
            iter,
            ritz_values: values[..config.m].iter().map(|z| z.re).collect(),
            max_imag: values[..config.m].iter().map(|z| z.im.abs()).fold(0.0, f64::max),
            residuals: residuals[..config.m].to_vec(),
            ranks: basis[..config.m].iter().map(|v| v.max_rank()).collect(),
            trunc_err: filter_err.max(ritz.trunc_err),
            a: filter.map_or(f64::NAN, |f| f.a),
            b: filter.map_or(f64::NAN, |f| f.b),
            seconds: start.elapsed().as_secs_f64(),
            locked: locked.iter().filter(|&&l| l).count(),
            dropped: ritz.dropped,
            reseeded,
        });
        if reseeded == 0 && (0..config.m).all(|j| relative(j) < config.tol) {
            converged = true;
            break;
        }
    }
    basis.truncate(config.m);
    values.truncate(config.m);
    residuals.truncate(config.m);
    locked.truncate(config.m);
    Ok(SubspaceResult {
        state: RitzState { basis, ritz_values: values, residual_norms: residuals, locked, iteration },
        trace,
        converged,
        edge_breakdown,
    })
}
