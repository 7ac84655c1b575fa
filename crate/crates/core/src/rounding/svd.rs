//! TT-SVD rounding.

use ndarray::s;

use crate::linalg::{self, C64};
use crate::tt::{absorb_left, fold, left_unfold, truncation_rank, TensorTrain};

/// Round with relative tolerance `tol` and an optional hard rank cap.
///
/// The train is right-orthogonalized and then swept left to right with a
/// per-bond threshold `tol · ‖v‖ / √(d−1)`. Because the discarded parts are
/// mutually orthogonal, the returned error `√(Σ discarded σ²)` is the exact
/// Frobenius distance between input and output.
pub fn round_svd_raw(v: &TensorTrain, tol: f64, max_rank: Option<usize>) -> (TensorTrain, f64) {
    let d = v.d();
    let (t, _) = v.orthogonalize(0).expect("site 0 exists");
    let nrm = linalg::frobenius(&left_unfold(&t.cores()[0]));
    if nrm == 0.0 {
        return (TensorTrain::zeros(&v.mode_sizes()), 0.0);
    }
    if d == 1 {
        return (t, 0.0);
    }
    let delta = tol * nrm / ((d - 1) as f64).sqrt();
    let mut cores = t.into_cores();
    let mut discarded = 0.0;
    for k in 0..d - 1 {
        let (r0, n, _) = cores[k].dim();
        let (u, sv, vh) = linalg::svd(&left_unfold(&cores[k])).expect("SVD of a finite matrix");
        let r = truncation_rank(&sv, delta, max_rank);
        discarded += sv.iter().skip(r).map(|x| x * x).sum::<f64>();
        cores[k] = fold(u.slice(s![.., ..r]).to_owned(), r0, n, r);
        let mut carry = vh.slice(s![..r, ..]).to_owned();
        for (mut row, &sigma) in carry.outer_iter_mut().zip(sv.iter()) {
            row.mapv_inplace(|z| z * C64::new(sigma, 0.0));
        }
        cores[k + 1] = absorb_left(&carry.view(), &cores[k + 1]);
    }
    (TensorTrain::from_cores_unchecked(cores), discarded.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn no_truncation_keeps_value() {
        let v = TensorTrain::random(&[3, 3, 3], &[1, 2, 2, 1], 3).unwrap();
        let (r, err) = round_svd_raw(&v, 0.0, None);
        assert_eq!(err, 0.0);
        let diff = r.to_vector().unwrap() - v.to_vector().unwrap();
        assert!(diff.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn inflated_rank_one_collapses() {
        let v = TensorTrain::random(&[2, 3, 2], &[1, 1, 1, 1], 4).unwrap();
        let fat = v.add(&v).unwrap().add(&v.scale(-ONE)).unwrap();
        assert_eq!(fat.ranks(), vec![1, 3, 3, 1]);
        let (r, err) = round_svd_raw(&fat, 1e-12, None);
        assert_eq!(r.ranks(), vec![1, 1, 1, 1]);
        assert!(err < 1e-12);
    }

    #[test]
    fn zero_input_gives_rank_one_zero() {
        let (r, err) = round_svd_raw(&TensorTrain::zeros(&[2, 2, 2]), 0.1, Some(3));
        assert_eq!(r.ranks(), vec![1, 1, 1, 1]);
        assert_eq!(err, 0.0);
        assert!(r.is_zero());
        let v = TensorTrain::random(&[2, 2, 2], &[1, 2, 2, 1], 1).unwrap();
        let cancelled = v.add(&v.scale(-ONE)).unwrap();
        let (r, _) = round_svd_raw(&cancelled, 0.1, Some(3));
        assert!(r.norm() < 1e-14);
    }
}
