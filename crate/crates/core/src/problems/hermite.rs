//! Hermite spectral collocation.
//!
//! Nodes are the eigenvalues of the symmetric Jacobi matrix of the Hermite
//! polynomials (Golub–Welsch). The eigenvectors map the first `n`
//! Hermite functions onto the nodes, and the second derivative is formed in
//! that basis, where `d²/dq²` is a pentadiagonal matrix with closed-form
//! entries. The result is symmetric and spectrally accurate for
//! Gaussian-decaying functions.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg;

/// Gauss–Hermite nodes (ascending) and the collocation second-derivative matrix.
pub fn hermite_collocation(n: usize) -> Result<(Vec<f64>, Array2<f64>)> {
    if n < 2 {
        return Err(Error::Config(format!("hermite collocation needs n >= 2, got {n}")));
    }
    let mut jacobi = Array2::<f64>::zeros((n, n));
    for k in 0..n - 1 {
        let b = ((k + 1) as f64 / 2.0).sqrt();
        jacobi[[k, k + 1]] = b;
        jacobi[[k + 1, k]] = b;
    }
    let (nodes, mut u) = linalg::eigh_real(&jacobi.view())?;
    for mut col in u.columns_mut() {
        if col[0] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
    // p² = −d²/dq² in the Hermite-function basis
    let mut p2 = Array2::<f64>::zeros((n, n));
    for k in 0..n {
        p2[[k, k]] = (2 * k + 1) as f64 / 2.0;
        if k + 2 < n {
            let off = -(((k + 1) * (k + 2)) as f64).sqrt() / 2.0;
            p2[[k, k + 2]] = off;
            p2[[k + 2, k]] = off;
        }
    }
    let d2 = -u.t().dot(&p2).dot(&u);
    Ok((nodes.to_vec(), d2))
}
