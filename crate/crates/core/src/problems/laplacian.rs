//! Finite-difference Laplacian `−Σ_k I ⊗ … ⊗ D ⊗ … ⊗ I`, `D = tridiag(1, −2, 1)`.

use ndarray::Array2;

use super::cp::{mpo_from_cp, CPOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::TTMatrix;

pub fn negative_second_difference(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| match i.abs_diff(j) {
        0 => C64::new(2.0, 0.0),
        1 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 0.0),
    })
}

pub fn laplacian_cp(d: usize, n: usize) -> Result<CPOperator> {
    if d == 0 || n < 2 {
        return Err(Error::Config(format!("laplacian needs d >= 1 and n >= 2, got d={d}, n={n}")));
    }
    let eye = linalg::identity(n);
    let terms = (0..d)
        .map(|k| {
            let mut t = vec![eye.clone(); d];
            t[k] = negative_second_difference(n);
            t
        })
        .collect();
    CPOperator::new(terms)
}

pub fn laplacian(d: usize, n: usize) -> Result<TTMatrix> {
    mpo_from_cp(&laplacian_cp(d, n)?, 1e-13)
}

/// `4 sin²(jπ / (2(n+1)))` for `j = 1..=n`, ascending.
pub fn laplacian_1d_eigenvalues(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| {
            let s = (j as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
            4.0 * s * s
        })
        .collect()
}

/// Normalized eigenvector `sin(i jπ/(n+1))`, `j` 1-based.
pub fn sine_mode(n: usize, j: usize) -> ndarray::Array1<C64> {
    let v: ndarray::Array1<f64> =
        (1..=n).map(|i| (i as f64 * j as f64 * std::f64::consts::PI / (n + 1) as f64).sin()).collect();
    let nrm = v.dot(&v).sqrt();
    v.mapv(|x| C64::new(x / nrm, 0.0))
}
