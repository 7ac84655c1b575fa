//! Canonical (orthogonal) forms of tensor trains.

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::tt::{absorb_left, absorb_right, fold, left_unfold, right_unfold, TensorTrain};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreTag {
    LeftOrthogonal,
    RightOrthogonal,
    Center,
}

/// Gauge description returned by [`TensorTrain::orthogonalize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    /// 0-based site holding the non-orthogonal core.
    pub center: usize,
    pub tags: Vec<CoreTag>,
}

/// `‖U^H U − I‖_F` for the left unfolding.
pub fn left_defect(core: &Array3<C64>) -> f64 {
    let u = left_unfold(core);
    let g = linalg::adjoint(&u).dot(&u) - linalg::identity(u.ncols());
    linalg::frobenius(&g.view())
}

/// `‖V V^H − I‖_F` for the right unfolding.
pub fn right_defect(core: &Array3<C64>) -> f64 {
    let v = right_unfold(core);
    let g = v.dot(&linalg::adjoint(&v)) - linalg::identity(v.nrows());
    linalg::frobenius(&g.view())
}

/// Left-orthogonalize one core; returns the new core and the factor to pass right.
pub(crate) fn left_qr(core: &Array3<C64>) -> (Array3<C64>, ndarray::Array2<C64>) {
    let (r0, n, _) = core.dim();
    let (q, r) = linalg::qr(&left_unfold(core)).expect("QR of a finite matrix");
    let k = q.ncols();
    (fold(q, r0, n, k), r)
}

/// Right-orthogonalize one core; returns the new core and the factor to pass left.
pub(crate) fn right_qr(core: &Array3<C64>) -> (Array3<C64>, ndarray::Array2<C64>) {
    let (_, n, r1) = core.dim();
    let (q, r) = linalg::qr(&linalg::adjoint(&right_unfold(core)).view()).expect("QR of a finite matrix");
    let k = q.ncols();
    (fold(linalg::adjoint(&q.view()), k, n, r1), linalg::adjoint(&r.view()))
}

impl TensorTrain {
    /// Gauge transform so that cores left of `center` are left-orthogonal and
    /// cores right of it are right-orthogonal. Bond dimensions may shrink to
    /// the feasible ones; the represented vector is unchanged.
    pub fn orthogonalize(&self, center: usize) -> Result<(TensorTrain, CanonicalForm)> {
        let d = self.d();
        if center >= d {
            return Err(Error::Structure(format!("center {center} outside 0..{d}")));
        }
        let mut cores: Vec<Array3<C64>> = self.cores().to_vec();
        for k in 0..center {
            let (q, r) = left_qr(&cores[k]);
            cores[k] = q;
            cores[k + 1] = absorb_left(&r.view(), &cores[k + 1]);
        }
        for k in (center + 1..d).rev() {
            let (q, l) = right_qr(&cores[k]);
            cores[k] = q;
            cores[k - 1] = absorb_right(&cores[k - 1], &l.view());
        }
        let tags = (0..d)
            .map(|k| match k.cmp(&center) {
                std::cmp::Ordering::Less => CoreTag::LeftOrthogonal,
                std::cmp::Ordering::Equal => CoreTag::Center,
                std::cmp::Ordering::Greater => CoreTag::RightOrthogonal,
            })
            .collect();
        Ok((TensorTrain::from_cores_unchecked(cores), CanonicalForm { center, tags }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &TensorTrain, b: &TensorTrain) -> f64 {
        let x = a.to_vector().unwrap();
        let y = b.to_vector().unwrap();
        let diff = (&x - &y).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        diff / y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn every_center_preserves_value_and_isometries() {
        let t = TensorTrain::random(&[3, 2, 4, 2], &[1, 3, 3, 2, 1], 11).unwrap();
        for c in 0..4 {
            let (o, form) = t.orthogonalize(c).unwrap();
            assert!(rel(&o, &t) < 1e-13);
            for (k, tag) in form.tags.iter().enumerate() {
                match tag {
                    CoreTag::LeftOrthogonal => assert!(left_defect(&o.cores()[k]) < 1e-12),
                    CoreTag::RightOrthogonal => assert!(right_defect(&o.cores()[k]) < 1e-12),
                    CoreTag::Center => {
                        let nrm = linalg::frobenius(&left_unfold(&o.cores()[k]));
                        assert!((nrm - t.norm()).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn idempotent_on_canonical_input() {
        let t = TensorTrain::random(&[2, 3, 2], &[1, 2, 2, 1], 7).unwrap();
        let (once, _) = t.orthogonalize(2).unwrap();
        let (twice, _) = once.orthogonalize(2).unwrap();
        assert!(rel(&twice, &once) < 1e-13);
    }

    #[test]
    fn center_out_of_range() {
        let t = TensorTrain::random(&[2, 2], &[1, 1, 1], 0).unwrap();
        assert!(t.orthogonalize(2).is_err());
    }
}
