use ndarray::Array2;
use rayon::prelude::*;

use super::chebyshev::derive_seed;
use super::config::Target;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::{expectation, TTMatrix};
use crate::rounding::{truncated_combine, LinearCombination, RoundingStrategy};
use crate::tt::TensorTrain;

/// Gram eigenvalues below this fraction of the largest are discarded.
pub const WHITENING_CUT: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RitzOutcome {
    /// Normalized, truncated Ritz vectors in target order.
    pub basis: Vec<TensorTrain>,
    pub values: Vec<C64>,
    /// Column `j` expresses Ritz vector `j` in the normalized input vectors.
    pub coefficients: Array2<C64>,
    /// Directions removed by whitening; nonzero means the inputs were
    /// numerically dependent and fewer vectors than inputs came back.
    pub dropped: usize,
    /// Largest truncation error of the combinations, relative to the result.
    pub trunc_err: f64,
}

/// Rayleigh–Ritz projection of `A` onto `span(zs)`.
///
/// Hermitian operators go through the Hermitian eigensolver; anything else
/// through the general one with complex Ritz values.
pub fn rayleigh_ritz(a: &TTMatrix, zs: &[TensorTrain], strategy: &RoundingStrategy, target: Target) -> Result<RitzOutcome> {
    rayleigh_ritz_with(a, zs, strategy, target, a.is_hermitian(1e-12), 0.0)
}

/// As [`rayleigh_ritz`], with the symmetry known and coefficients of modulus
/// below `drop_below` left out of the combinations.
pub fn rayleigh_ritz_with(
    a: &TTMatrix,
    zs: &[TensorTrain],
    strategy: &RoundingStrategy,
    target: Target,
    hermitian: bool,
    drop_below: f64,
) -> Result<RitzOutcome> {
    if zs.is_empty() {
        return Err(Error::Config("rayleigh-ritz needs at least one vector".into()));
    }
    let m = zs.len();
    let zs: Vec<TensorTrain> = zs
        .iter()
        .map(|z| {
            let n = z.norm();
            if n > 0.0 { z.scale(C64::new(1.0 / n, 0.0)) } else { z.clone() }
        })
        .collect();
    let mut w = Array2::<C64>::zeros((m, m));
    let mut p = Array2::<C64>::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            if j >= i {
                let g = zs[i].inner(&zs[j])?;
                w[[i, j]] = g;
                w[[j, i]] = g.conj();
            }
            p[[i, j]] = expectation(&zs[i], a, &zs[j])?;
        }
    }
    let (s, dropped) = linalg::whitening(&w.view(), WHITENING_CUT)?;
    if s.ncols() == 0 {
        return Err(Error::Breakdown("all filtered vectors vanished".into()));
    }
    let h = linalg::adjoint(&s.view()).dot(&p).dot(&s);
    let (values, y) = if hermitian {
        let (w, y) = linalg::eigh(&linalg::hermitian_part(&h.view()).view())?;
        (w.mapv(|x| C64::new(x, 0.0)), y)
    } else {
        linalg::eig(&h.view())?
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    match target {
        Target::SmallestAlgebraic => order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re)),
        Target::DominantMagnitude => order.sort_by(|&i, &j| values[j].norm().total_cmp(&values[i].norm())),
    }
    let phi_all = s.dot(&y);
    let mut phi = Array2::<C64>::zeros((m, order.len()));
    for (c, &k) in order.iter().enumerate() {
        phi.column_mut(c).assign(&phi_all.column(k));
    }
    let values: Vec<C64> = order.iter().map(|&k| values[k]).collect();

    let combos: Vec<Result<(TensorTrain, f64)>> = (0..order.len())
        .into_par_iter()
        .map(|j| {
            let col = phi.column(j);
            let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let (terms, coeffs): (Vec<TensorTrain>, Vec<C64>) = col
                .iter()
                .zip(&zs)
                .filter(|(c, _)| c.norm() >= drop_below || c.norm() == peak)
                .map(|(c, z)| (z.clone(), *c))
                .unzip();
            let lc = LinearCombination::new(terms, coeffs)?;
            let (v, err) = truncated_combine(&lc, &strategy.with_seed(derive_seed(strategy.seed, &[j as u64])))?;
            let n = v.norm();
            if !(n > 0.0) {
                return Err(Error::Breakdown(format!("ritz vector {j} vanished under truncation; increase max_rank")));
            }
            Ok((v.scale(C64::new(1.0 / n, 0.0)), err / n))
        })
        .collect();
    let mut basis = Vec::with_capacity(combos.len());
    let mut trunc_err = 0.0f64;
    for r in combos {
        let (v, e) = r?;
        trunc_err = trunc_err.max(e);
        basis.push(v);
    }
    Ok(RitzOutcome { basis, values, coefficients: phi, dropped, trunc_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::laplacian::{laplacian, laplacian_1d_eigenvalues, sine_mode};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn single_vector_gives_rayleigh_quotient() {
        let a = laplacian(2, 3).unwrap();
        let z = TensorTrain::random(&[3, 3], &[1, 2, 1], 5).unwrap().scale(c(3.0));
        let out = rayleigh_ritz(&a, &[z.clone()], &RoundingStrategy::exact(), Target::SmallestAlgebraic).unwrap();
        let rq = expectation(&z, &a, &z).unwrap() / z.inner(&z).unwrap();
        assert!((out.values[0] - rq).norm() < 1e-12);
        let diff = out.basis[0].to_vector().unwrap() - z.to_vector().unwrap().mapv(|x| x / z.norm());
        assert!(diff.iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn exact_eigenvectors_are_reproduced() {
        let n = 5;
        let a = laplacian(2, n).unwrap();
        let ev = laplacian_1d_eigenvalues(n);
        let pairs = [(1, 1), (2, 1), (1, 3), (2, 2)];
        let zs: Vec<TensorTrain> =
            pairs.iter().map(|&(i, j)| TensorTrain::rank_one(&[sine_mode(n, i), sine_mode(n, j)]).unwrap()).collect();
        // mix them so that the projection has work to do
        let mixed = vec![
            zs[0].add(&zs[1]).unwrap(),
            zs[1].add(&zs[2].scale(c(-2.0))).unwrap(),
            zs[2].add(&zs[3]).unwrap(),
            zs[3].scale(c(0.5)).add(&zs[0]).unwrap(),
        ];
        let out = rayleigh_ritz(&a, &mixed, &RoundingStrategy::exact(), Target::SmallestAlgebraic).unwrap();
        let mut expect: Vec<f64> = pairs.iter().map(|&(i, j)| ev[i - 1] + ev[j - 1]).collect();
        expect.sort_by(f64::total_cmp);
        for (v, e) in out.values.iter().zip(&expect) {
            assert!((v.re - e).abs() < 1e-11, "{v} vs {e}");
        }
    }

    #[test]
    fn duplicate_vectors_collapse_to_one() {
        let a = laplacian(2, 3).unwrap();
        let z = TensorTrain::random(&[3, 3], &[1, 2, 1], 8).unwrap();
        let out = rayleigh_ritz(&a, &[z.clone(), z], &RoundingStrategy::exact(), Target::SmallestAlgebraic).unwrap();
        assert_eq!(out.dropped, 1);
        assert_eq!(out.basis.len(), 1);
    }

    #[test]
    fn non_hermitian_values_are_complex() {
        // rotation generator: eigenvalues ±i
        let r = ndarray::array![[c(0.0), c(-1.0)], [c(1.0), c(0.0)]];
        let a = TTMatrix::from_factors(&[r]).unwrap();
        let zs = vec![TensorTrain::rank_one(&[ndarray::array![c(1.0), c(0.0)]]).unwrap(), TensorTrain::rank_one(&[ndarray::array![c(0.3), c(1.0)]]).unwrap()];
        let out = rayleigh_ritz(&a, &zs, &RoundingStrategy::exact(), Target::DominantMagnitude).unwrap();
        for v in &out.values {
            assert!((v.norm() - 1.0).abs() < 1e-12 && v.re.abs() < 1e-12);
        }
    }
}
