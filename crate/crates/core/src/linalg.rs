//! Thin wrappers over LAPACK for the dense kernels the tensor code needs.
//!
//! Every routine takes and returns owned `Array2<C64>` in standard layout and
//! maps LAPACK failures to [`Error::Linalg`].

use ndarray::{s, Array1, Array2, ArrayView2, ShapeBuilder};
use ndarray_linalg::{Cholesky, Eig, Eigh, EigValsh, JobSvd, QR, SVDDC, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Column-major copy. Some complex Hermitian drivers read a row-major input
/// as its transpose, which conjugates the eigenvectors.
fn fortran(a: &ArrayView2<C64>) -> Array2<C64> {
    let mut f = Array2::zeros(a.raw_dim().f());
    f.assign(a);
    f
}

fn lapack<T>(what: &str, r: std::result::Result<T, ndarray_linalg::error::LinalgError>) -> Result<T> {
    r.map_err(|e| Error::Linalg(format!("{what}: {e}")))
}

/// Conjugate transpose.
pub fn adjoint(a: &ArrayView2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn frobenius(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &ArrayView2<C64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let s = singular_values(a)?;
    Ok(s.first().copied().unwrap_or(0.0))
}

pub fn singular_values(a: &ArrayView2<C64>) -> Result<Array1<f64>> {
    let (_, s, _) = lapack("svd", a.svddc(JobSvd::None))?;
    Ok(s)
}

/// Thin SVD `a = u · diag(s) · vh`, singular values descending.
pub fn svd(a: &ArrayView2<C64>) -> Result<(Array2<C64>, Array1<f64>, Array2<C64>)> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Ok((Array2::zeros((m, 0)), Array1::zeros(0), Array2::zeros((0, n))));
    }
    let (u, s, vh) = lapack("svd", a.svddc(JobSvd::Some))?;
    Ok((u.unwrap(), s, vh.unwrap()))
}

/// Thin QR; `q` is `m × min(m, n)`, `r` is `min(m, n) × n`.
pub fn qr(a: &ArrayView2<C64>) -> Result<(Array2<C64>, Array2<C64>)> {
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        let k = m.min(n);
        return Ok((Array2::zeros((m, k)), Array2::zeros((k, n))));
    }
    let (q, r) = lapack("qr", a.qr())?;
    Ok((q.as_standard_layout().to_owned(), r.as_standard_layout().to_owned()))
}

/// Hermitian eigendecomposition, eigenvalues ascending. Only the lower
/// triangle is read, so callers should symmetrize first if needed.
pub fn eigh(a: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (w, v) = lapack("eigh", fortran(a).eigh(UPLO::Lower))?;
    Ok((w, v.as_standard_layout().to_owned()))
}

pub fn eigvalsh(a: &ArrayView2<C64>) -> Result<Array1<f64>> {
    lapack("eigvalsh", fortran(a).eigvalsh(UPLO::Lower))
}

pub fn eigvalsh_real(a: &ArrayView2<f64>) -> Result<Array1<f64>> {
    lapack("eigvalsh", a.eigvalsh(UPLO::Lower))
}

pub fn eigh_real(a: &ArrayView2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (w, v) = lapack("eigh", a.eigh(UPLO::Lower))?;
    Ok((w, v.as_standard_layout().to_owned()))
}

/// General eigendecomposition with right eigenvectors (unsorted).
pub fn eig(a: &ArrayView2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    let (w, v) = lapack("eig", fortran(a).eig())?;
    Ok((w, v.as_standard_layout().to_owned()))
}

/// Upper Cholesky factor `r` with `a = r^H r`.
pub fn cholesky_upper(a: &ArrayView2<C64>) -> Result<Array2<C64>> {
    let r = lapack("cholesky", fortran(a).cholesky(UPLO::Upper))?;
    Ok(r.as_standard_layout().to_owned())
}

/// Solve `r x = b` for upper-triangular `r` by back substitution.
pub fn solve_upper(r: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let n = r.nrows();
    let mut x = b.to_owned();
    for col in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[[i, col]];
            for j in i + 1..n {
                acc -= r[[i, j]] * x[[j, col]];
            }
            x[[i, col]] = acc / r[[i, i]];
        }
    }
    x
}

/// Whitening transform of a Hermitian positive semidefinite matrix `g`:
/// `S = U Λ^{-1/2}` over the eigenpairs with `λ > cut · λ_max`, so that
/// `S^H g S = I`. Also returns how many directions were dropped.
pub fn whitening(g: &ArrayView2<C64>, cut: f64) -> Result<(Array2<C64>, usize)> {
    let (w, u) = eigh(&hermitian_part(g).view())?;
    let top = w.iter().cloned().fold(0.0f64, f64::max);
    let keep: Vec<usize> = (0..w.len()).filter(|&i| top > 0.0 && w[i] > cut * top).collect();
    let mut s = Array2::<C64>::zeros((g.nrows(), keep.len()));
    for (c, &i) in keep.iter().enumerate() {
        let f = 1.0 / w[i].sqrt();
        s.column_mut(c).assign(&u.column(i).mapv(|z| z * f));
    }
    Ok((s, w.len() - keep.len()))
}

/// `(a + a^H) / 2`.
pub fn hermitian_part(a: &ArrayView2<C64>) -> Array2<C64> {
    let ah = adjoint(a);
    (a + &ah).mapv(|z| z * 0.5)
}

/// Relative deviation from Hermitian symmetry.
pub fn hermitian_defect(a: &ArrayView2<C64>) -> f64 {
    let scale = frobenius(a).max(f64::MIN_POSITIVE);
    frobenius(&(a - &adjoint(a)).view()) / scale
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, ONE)
}

/// Kronecker product of two dense matrices.
pub fn kron(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|z| z * aij));
        }
    }
    out
}

pub fn to_complex(a: &ArrayView2<f64>) -> Array2<C64> {
    a.mapv(|x| C64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn svd_reconstructs_wide_and_tall() {
        for (m, n) in [(3, 5), (5, 3), (4, 4)] {
            let a = Array2::from_shape_fn((m, n), |(i, j)| C64::new((i * 7 + j) as f64 % 3.0, (i + 2 * j) as f64 * 0.1));
            let (u, s, vh) = svd(&a.view()).unwrap();
            let us = &u * &s.mapv(c);
            let back = us.dot(&vh);
            assert!(frobenius(&(&back - &a).view()) < 1e-12);
            assert!(s.windows(2).into_iter().all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn qr_is_thin() {
        let a = Array2::from_shape_fn((6, 2), |(i, j)| c((i + 1) as f64 * (j + 2) as f64 + (i * j) as f64));
        let (q, r) = qr(&a.view()).unwrap();
        assert_eq!(q.dim(), (6, 2));
        assert_eq!(r.dim(), (2, 2));
        assert!(frobenius(&(q.dot(&r) - &a).view()) < 1e-12);
        let wide = a.t().to_owned();
        let (q, r) = qr(&wide.view()).unwrap();
        assert_eq!(q.dim(), (2, 2));
        assert_eq!(r.dim(), (2, 6));
        assert!(frobenius(&(q.dot(&r) - &wide).view()) < 1e-12);
    }

    #[test]
    fn back_substitution() {
        let r = array![[c(2.0), c(1.0)], [c(0.0), c(4.0)]];
        let b = array![[c(4.0)], [c(8.0)]];
        let x = solve_upper(&r.view(), &b.view());
        assert!((x[[0, 0]] - c(1.0)).norm() < 1e-15);
        assert!((x[[1, 0]] - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn kron_of_identities() {
        let k = kron(&identity(2).view(), &identity(3).view());
        assert_eq!(k, identity(6));
    }

    #[test]
    fn whitening_drops_dependent_directions() {
        let g = array![[c(2.0), c(2.0), c(0.0)], [c(2.0), c(2.0), c(0.0)], [c(0.0), c(0.0), c(0.5)]];
        let (sm, dropped) = whitening(&g.view(), 1e-12).unwrap();
        assert_eq!(dropped, 1);
        let id = adjoint(&sm.view()).dot(&g).dot(&sm);
        assert!(frobenius(&(id - identity(2)).view()) < 1e-12);
    }

    fn hermitian_sample(n: usize) -> Array2<C64> {
        let b = Array2::from_shape_fn((n, n), |(i, j)| C64::new(((i * 5 + j * 3) % 7) as f64 - 3.0, ((i + 4 * j) % 5) as f64 - 2.0));
        let h = hermitian_part(&b.view());
        &h + &identity(n).mapv(|z| z * 20.0)
    }

    #[test]
    fn complex_eigh_reconstructs() {
        let a = hermitian_sample(5);
        let (w, v) = eigh(&a.view()).unwrap();
        let av = a.dot(&v);
        let vw = &v * &w.mapv(c);
        assert!(frobenius(&(av - vw).view()) < 1e-11);
    }

    #[test]
    fn complex_eig_reconstructs() {
        let a = Array2::from_shape_fn((4, 4), |(i, j)| C64::new((i * 3 + j) as f64 % 5.0, (2 * i + j) as f64 % 3.0 - 1.0));
        let (w, v) = eig(&a.view()).unwrap();
        let av = a.dot(&v);
        let vw = &v * &w;
        assert!(frobenius(&(av - vw).view()) < 1e-10);
    }

    #[test]
    fn complex_cholesky_reconstructs() {
        let a = hermitian_sample(4);
        let r = cholesky_upper(&a.view()).unwrap();
        assert!(frobenius(&(adjoint(&r.view()).dot(&r) - &a).view()) < 1e-11);
        assert!(r[[1, 0]].norm() == 0.0);
    }
}
