//! Randomized rounding of sums of tensor trains.
//!
//! The sum is never assembled. A Gaussian train of rank `max_rank + oversample`
//! sketches every term from the right, then a left-to-right pass orthogonalizes
//! the sketched block-structured cores one site at a time. A final SVD sweep
//! trims the result to `max_rank`.

use ndarray::{Array2, Array3};

use super::svd::round_svd_raw;
use crate::linalg::{self, C64};
use crate::tt::{absorb_left, fold, left_unfold, right_unfold, TensorTrain};

/// Right sketches `W[k]` of shape `(r_k, ℓ_k)` for bonds `k = 0..=d`.
fn right_sketches(term: &TensorTrain, sketch: &TensorTrain) -> Vec<Array2<C64>> {
    let d = term.d();
    let mut w = vec![Array2::zeros((0, 0)); d + 1];
    w[d] = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
    for k in (1..d).rev() {
        let t = &term.cores()[k];
        let (r0, n, _) = t.dim();
        let l1 = w[k + 1].ncols();
        let t1 = left_unfold(t).dot(&w[k + 1]).into_shape((r0, n * l1)).unwrap();
        w[k] = t1.dot(&right_unfold(&sketch.cores()[k]).t());
    }
    w
}

/// Randomized rounding of `Σ coeffs[j] · terms[j]`; returns the rounded train
/// and the error of the final trim.
pub fn round_randomized_terms(
    terms: &[TensorTrain],
    coeffs: &[C64],
    max_rank: usize,
    tol: f64,
    oversample: usize,
    seed: u64,
) -> (TensorTrain, f64) {
    let dims = terms[0].mode_sizes();
    let d = dims.len();
    if d == 1 {
        let exact = TensorTrain::combination(terms, coeffs).expect("terms share modes");
        return round_svd_raw(&exact, tol, Some(max_rank));
    }
    let l = max_rank + oversample;
    let mut ranks = vec![l; d + 1];
    ranks[0] = 1;
    ranks[d] = 1;
    let sketch = TensorTrain::random(&dims, &ranks, seed).expect("sketch ranks are valid");
    let sketches: Vec<_> = terms.iter().map(|t| right_sketches(t, &sketch)).collect();

    let mut carries: Vec<Array2<C64>> = coeffs.iter().map(|&c| Array2::from_elem((1, 1), c)).collect();
    let mut cores = Vec::with_capacity(d);
    for k in 0..d - 1 {
        let n = dims[k];
        let q_in = carries[0].nrows();
        let z: Vec<Array3<C64>> = terms.iter().zip(&carries).map(|(t, m)| absorb_left(&m.view(), &t.cores()[k])).collect();
        let mut y = Array2::<C64>::zeros((q_in * n, sketch.ranks()[k + 1]));
        for (zj, wj) in z.iter().zip(&sketches) {
            y = y + left_unfold(zj).dot(&wj[k + 1]);
        }
        let (q, _) = linalg::qr(&y.view()).expect("QR of a finite matrix");
        let q_out = q.ncols();
        let qh = linalg::adjoint(&q.view());
        carries = z.iter().map(|zj| qh.dot(&left_unfold(zj))).collect();
        cores.push(fold(q, q_in, n, q_out));
    }
    let mut last = Array3::<C64>::zeros((carries[0].nrows(), dims[d - 1], 1));
    for (t, m) in terms.iter().zip(&carries) {
        last = last + absorb_left(&m.view(), &t.cores()[d - 1]);
    }
    cores.push(last);
    round_svd_raw(&TensorTrain::from_cores_unchecked(cores), tol, Some(max_rank))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn single_term_is_reproduced() {
        let v = TensorTrain::random(&[3, 3, 3, 3], &[1, 2, 3, 2, 1], 5).unwrap();
        let (r, _) = round_randomized_terms(&[v.clone()], &[ONE], 4, 0.0, 5, 9);
        let diff = r.to_vector().unwrap() - v.to_vector().unwrap();
        assert!(diff.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() < 1e-12);
    }

    #[test]
    fn cancellation() {
        let v = TensorTrain::random(&[2, 3, 2], &[1, 2, 2, 1], 6).unwrap();
        let (r, _) = round_randomized_terms(&[v.clone(), v.clone()], &[ONE, -ONE], 3, 0.0, 5, 1);
        assert!(r.norm() <= 1e-10);
    }

    #[test]
    fn deterministic() {
        let a = TensorTrain::random(&[3, 3, 3], &[1, 3, 3, 1], 1).unwrap();
        let b = TensorTrain::random(&[3, 3, 3], &[1, 3, 3, 1], 2).unwrap();
        let c = [ONE, C64::new(0.5, -1.0)];
        let x = round_randomized_terms(&[a.clone(), b.clone()], &c, 2, 0.0, 2, 42);
        let y = round_randomized_terms(&[a, b], &c, 2, 0.0, 2, 42);
        assert_eq!(x.0, y.0);
    }
}
