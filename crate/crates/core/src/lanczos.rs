//! Lanczos iteration with rank truncation, kept as a baseline.
//!
//! Every vector of the recurrence is truncated, so the basis loses
//! orthogonality and the coefficients `α`, `β` no longer define the projected
//! matrix. Ritz values are therefore extracted from the Gram matrix and an
//! exactly assembled projection.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::{expectation, TTMatrix};
use crate::rounding::{truncate_terms, truncated_matvec, RoundingStrategy, TargetTerm};
use crate::solver::chebyshev::derive_seed;
use crate::tt::TensorTrain;

/// Relative size of `β_j` below which the recurrence is considered broken down.
pub const BREAKDOWN_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct LanczosBasis {
    pub vectors: Vec<TensorTrain>,
    /// `α_0, …, α_{m−1}` (real parts).
    pub alphas: Vec<f64>,
    /// `β_1, …, β_{m−1}`.
    pub betas: Vec<f64>,
    /// Norm of the unnormalized `v_m` left over after the last step.
    pub last_beta: f64,
    /// `gram[i, j] = ⟨v_i, v_j⟩`.
    pub gram: Array2<C64>,
    pub breakdown: bool,
}

impl LanczosBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// 2-norm condition number of the Gram matrix.
    pub fn gram_condition(&self) -> Result<f64> {
        let w = linalg::eigvalsh(&linalg::hermitian_part(&self.gram.view()).view())?;
        let lo = w[0].max(0.0);
        let hi = w[w.len() - 1];
        Ok(if lo > 0.0 { hi / lo } else { f64::INFINITY })
    }

    /// Gram matrix of the leading `k` vectors.
    pub fn leading_gram(&self, k: usize) -> Array2<C64> {
        self.gram.slice(ndarray::s![..k, ..k]).to_owned()
    }
}

/// Rank-truncated Lanczos from a unit vector `v0`, run for `m` steps.
///
/// Follows the textbook recurrence with every new vector passed through the
/// truncation: `v_{j+1} = 𝔗(𝔗(A v_j) − α_j v_j − β_j v_{j−1})` with
/// `α_j = ⟨v_j, 𝔗(A v_j)⟩` and `β_j = ‖v_j‖` taken after truncation. The
/// recurrence stops early when `β_j` falls below [`BREAKDOWN_TOL`] times the
/// norm of the last matvec, returning the shorter basis with the flag set.
pub fn lanczos_truncated(a: &TTMatrix, v0: &TensorTrain, m: usize, strategy: &RoundingStrategy) -> Result<LanczosBasis> {
    if m < 2 {
        return Err(Error::Config(format!("lanczos needs m >= 2, got {m}")));
    }
    let n0 = v0.norm();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!("lanczos start vector must have unit norm, got {n0}")));
    }
    let step = |j: usize, part: u64| strategy.with_seed(derive_seed(strategy.seed, &[j as u64, part]));
    let one = C64::new(1.0, 0.0);

    let mut vectors = vec![v0.clone()];
    let mut alphas = Vec::with_capacity(m);
    let mut betas = Vec::with_capacity(m);
    let (av, _) = truncated_matvec(a, v0, &step(0, 0))?;
    let mut scale = av.norm().max(1.0);
    let alpha = v0.inner(&av)?;
    alphas.push(alpha.re);
    let (mut next, _) = truncate_terms(
        &[TargetTerm::Vector { coeff: one, tt: &av }, TargetTerm::Vector { coeff: -alpha, tt: v0 }],
        &av,
        &step(0, 1),
    )?;
    let mut breakdown = false;
    for j in 1..m {
        let beta = next.norm();
        if beta < BREAKDOWN_TOL * scale {
            breakdown = true;
            next = TensorTrain::zeros(&v0.mode_sizes());
            break;
        }
        betas.push(beta);
        let vj = next.scale(C64::new(1.0 / beta, 0.0));
        let (av, _) = truncated_matvec(a, &vj, &step(j, 0))?;
        scale = av.norm().max(1.0);
        // ⟨v_j, A v_j⟩, conjugate-linear in the first slot
        let alpha = vj.inner(&av)?;
        alphas.push(alpha.re);
        let prev = &vectors[j - 1];
        let (w, _) = truncate_terms(
            &[
                TargetTerm::Vector { coeff: one, tt: &av },
                TargetTerm::Vector { coeff: -alpha, tt: &vj },
                TargetTerm::Vector { coeff: C64::new(-beta, 0.0), tt: prev },
            ],
            &av,
            &step(j, 1),
        )?;
        vectors.push(vj);
        next = w;
    }
    let last_beta = next.norm();
    let k = vectors.len();
    let mut gram = Array2::<C64>::zeros((k, k));
    for i in 0..k {
        for j in i..k {
            let g = vectors[i].inner(&vectors[j])?;
            gram[[i, j]] = g;
            gram[[j, i]] = g.conj();
        }
    }
    Ok(LanczosBasis { vectors, alphas, betas, last_beta, gram, breakdown })
}

/// How the Gram matrix was factored during Ritz extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Whitening {
    Cholesky,
    /// Cholesky after a diagonal shift of `1e-14 · trace(G) / m`.
    Jitter,
    /// Eigenvalue whitening with near-null directions removed.
    Eigen { dropped: usize },
}

#[derive(Clone, Debug)]
pub struct LanczosRitz {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` holds the coefficients of the `j`-th Ritz vector in the basis.
    pub coefficients: Array2<C64>,
    pub whitening: Whitening,
}

/// Ritz values of `A` on the span of the leading `len` basis vectors.
///
/// Solves `T̃ = R^{−H} (V^H A V) R^{−1}` with `G = R^H R`; the projected
/// matrix is assembled exactly and `A` is taken to be Hermitian. Returns the
/// `num_eigs` smallest Ritz values.
pub fn lanczos_ritz(a: &TTMatrix, basis: &LanczosBasis, len: usize, num_eigs: usize) -> Result<LanczosRitz> {
    if len == 0 || len > basis.len() {
        return Err(Error::Config(format!("ritz extraction over {len} of {} basis vectors", basis.len())));
    }
    if num_eigs == 0 || num_eigs > len {
        return Err(Error::Config(format!("num_eigs must lie in 1..={len}, got {num_eigs}")));
    }
    let v = &basis.vectors[..len];
    let mut p = Array2::<C64>::zeros((len, len));
    for i in 0..len {
        for j in 0..len {
            p[[i, j]] = expectation(&v[i], a, &v[j])?;
        }
    }
    let p = linalg::hermitian_part(&p.view());
    let g = basis.leading_gram(len);
    let (s, whitening) = whiten(&g)?;
    let h = linalg::hermitian_part(&linalg::adjoint(&s.view()).dot(&p).dot(&s).view());
    let (w, y) = linalg::eigh(&h.view())?;
    let k = num_eigs.min(w.len());
    let coefficients = s.dot(&y.slice(ndarray::s![.., ..k]));
    Ok(LanczosRitz { values: w.iter().take(k).cloned().collect(), coefficients, whitening })
}

/// `S` with `S^H G S = I`, trying Cholesky first.
fn whiten(g: &Array2<C64>) -> Result<(Array2<C64>, Whitening)> {
    let m = g.nrows();
    let inverse = |r: &Array2<C64>| linalg::solve_upper(&r.view(), &linalg::identity(m).view());
    // a factor is accepted when its pivots stay within a 1e12 condition range
    let usable = |r: &Array2<C64>| {
        let d: Vec<f64> = r.diag().iter().map(|z| z.re).collect();
        let hi = d.iter().cloned().fold(0.0f64, f64::max);
        d.iter().all(|&x| x.is_finite() && x > 1e-6 * hi)
    };
    if let Ok(r) = linalg::cholesky_upper(&g.view()) {
        if usable(&r) {
            return Ok((inverse(&r), Whitening::Cholesky));
        }
    }
    let trace: f64 = g.diag().iter().map(|z| z.re).sum();
    let shifted = g + &Array2::from_diag(&Array1::from_elem(m, C64::new(1e-14 * trace / m as f64, 0.0)));
    if let Ok(r) = linalg::cholesky_upper(&shifted.view()) {
        if usable(&r) {
            return Ok((inverse(&r), Whitening::Jitter));
        }
    }
    let (s, dropped) = linalg::whitening(&g.view(), 1e-12)?;
    Ok((s, Whitening::Eigen { dropped }))
}

/// Ranks needed to represent an exact Krylov basis: runs dense Lanczos with
/// full reorthogonalization from `v0` for `m` steps, converts each basis
/// vector to TT at relative tolerance `1e-10` and reports its largest bond.
pub fn krylov_ranks(a: &TTMatrix, v0: &TensorTrain, m: usize) -> Result<Vec<usize>> {
    let dense = a.to_dense()?;
    let dims = v0.mode_sizes();
    let mut q = v0.to_vector()?;
    let nrm = q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    q.mapv_inplace(|z| z / nrm);
    let mut basis: Vec<Array1<C64>> = Vec::with_capacity(m);
    let mut ranks = Vec::with_capacity(m);
    for _ in 0..m {
        ranks.push(TensorTrain::from_vector(&q, &dims, 1e-10, None)?.max_rank());
        basis.push(q.clone());
        let mut w = dense.dot(&q);
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                w.zip_mut_with(b, |y, x| *y -= c * x);
            }
        }
        let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nw < BREAKDOWN_TOL {
            break;
        }
        q = w.mapv(|z| z / nw);
    }
    Ok(ranks)
}
