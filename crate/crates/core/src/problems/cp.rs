//! Operators given as sums of Kronecker products.

use ndarray::{s, Array2, Array4};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::TTMatrix;
use crate::tt::check_dense;

/// `Σ_j A_1^{(j)} ⊗ … ⊗ A_d^{(j)}`; `terms[j][k]` acts on mode `k`.
#[derive(Clone, Debug)]
pub struct CPOperator {
    terms: Vec<Vec<Array2<C64>>>,
}

impl CPOperator {
    pub fn new(terms: Vec<Vec<Array2<C64>>>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Structure("a CP operator needs at least one term".into()))?;
        let shapes: Vec<(usize, usize)> = first.iter().map(|f| f.dim()).collect();
        if shapes.is_empty() {
            return Err(Error::Structure("CP terms need at least one factor".into()));
        }
        for (j, term) in terms.iter().enumerate() {
            let s: Vec<(usize, usize)> = term.iter().map(|f| f.dim()).collect();
            if s != shapes {
                return Err(Error::Structure(format!("term {j} has factor shapes {s:?}, expected {shapes:?}")));
            }
        }
        Ok(Self { terms })
    }

    pub fn separation_rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Vec<Array2<C64>>] {
        &self.terms
    }

    pub fn d(&self) -> usize {
        self.terms[0].len()
    }

    /// Dense Kronecker expansion.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let mut dims: Vec<usize> = self.terms[0].iter().map(|f| f.nrows()).collect();
        dims.extend(self.terms[0].iter().map(|f| f.ncols()));
        check_dense(&dims)?;
        let mut total: Option<Array2<C64>> = None;
        for term in &self.terms {
            let mut k = term[0].clone();
            for f in &term[1..] {
                k = linalg::kron(&k.view(), &f.view());
            }
            total = Some(match total {
                None => k,
                Some(t) => t + k,
            });
        }
        Ok(total.expect("nonempty"))
    }
}

/// Block-diagonal MPO of rank `r_A`, then SVD-rounded at relative `tol`.
pub fn mpo_from_cp(op: &CPOperator, tol: f64) -> Result<TTMatrix> {
    let r = op.separation_rank();
    let d = op.d();
    let mut cores = Vec::with_capacity(d);
    for k in 0..d {
        let (n, m) = op.terms[0][k].dim();
        let (r0, r1) = match (k == 0, k == d - 1) {
            (true, true) => (1, 1),
            (true, false) => (1, r),
            (false, true) => (r, 1),
            (false, false) => (r, r),
        };
        let mut core = Array4::zeros((r0, n, m, r1));
        for (j, term) in op.terms.iter().enumerate() {
            let a = if r0 == 1 { 0 } else { j };
            let b = if r1 == 1 { 0 } else { j };
            let mut slot = core.slice_mut(s![a, .., .., b]);
            slot += &term[k];
        }
        cores.push(core);
    }
    let mpo = TTMatrix::new(cores)?;
    Ok(if r > 1 { mpo.round(tol, None) } else { mpo })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn identity_term_gives_rank_one_identity() {
        let i = linalg::identity(2);
        let op = CPOperator::new(vec![vec![i.clone(), i.clone(), i]]).unwrap();
        let mpo = mpo_from_cp(&op, 1e-12).unwrap();
        assert_eq!(mpo.ranks(), vec![1, 1, 1, 1]);
        assert_eq!(mpo.to_dense().unwrap(), linalg::identity(8));
    }

    #[test]
    fn kronecker_sum_has_rank_two() {
        let dmat = Array2::from_shape_fn((3, 3), |(i, j)| match i.abs_diff(j) {
            0 => c(-2.0),
            1 => c(1.0),
            _ => c(0.0),
        });
        let i = linalg::identity(3);
        let op = CPOperator::new(vec![vec![dmat.clone(), i.clone()], vec![i, dmat]]).unwrap();
        let mpo = mpo_from_cp(&op, 1e-13).unwrap();
        assert!(mpo.ranks().iter().all(|&r| r <= 2));
        let diff = mpo.to_dense().unwrap() - op.to_dense().unwrap();
        assert!(linalg::frobenius(&diff.view()) < 1e-13 * linalg::frobenius(&op.to_dense().unwrap().view()));
    }

    #[test]
    fn inconsistent_factors_rejected() {
        let op = CPOperator::new(vec![vec![linalg::identity(2)], vec![linalg::identity(3)]]);
        assert!(op.is_err());
    }
}
