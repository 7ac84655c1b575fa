//! Hénon–Heiles potential on a Gauss–Hermite tensor grid:
//! `H = −½Δ + ½Σ q_k² + μ Σ_{k<d} (q_k² q_{k+1} − ⅓ q_{k+1}³)`.

use ndarray::Array2;

use super::cp::{mpo_from_cp, CPOperator};
use super::hermite::hermite_collocation;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::TTMatrix;

/// Compression tolerance used when none is specified.
pub const HENON_HEILES_TOL: f64 = 1e-10;

pub fn henon_heiles_cp(d: usize, n: usize, mu: f64) -> Result<CPOperator> {
    if d < 2 {
        return Err(Error::Config(format!("henon_heiles needs d >= 2, got {d}")));
    }
    let (q, d2) = hermite_collocation(n)?;
    let diag = |f: &dyn Fn(f64) -> f64| Array2::from_diag(&q.iter().map(|&x| C64::new(f(x), 0.0)).collect::<ndarray::Array1<_>>());
    let kinetic = linalg::to_complex(&d2.view()).mapv(|z| z * -0.5);
    let first = &kinetic + &diag(&|x| 0.5 * x * x);
    let rest = &kinetic + &diag(&|x| 0.5 * x * x - mu / 3.0 * x * x * x);
    let q2 = diag(&|x| mu * x * x);
    let q1 = diag(&|x| x);
    let eye = linalg::identity(n);
    let mut terms = Vec::with_capacity(2 * d - 1);
    for k in 0..d {
        let mut t = vec![eye.clone(); d];
        t[k] = if k == 0 { first.clone() } else { rest.clone() };
        terms.push(t);
    }
    for k in 0..d - 1 {
        let mut t = vec![eye.clone(); d];
        t[k] = q2.clone();
        t[k + 1] = q1.clone();
        terms.push(t);
    }
    CPOperator::new(terms)
}

pub fn henon_heiles(d: usize, n: usize, mu: f64, tol: f64) -> Result<TTMatrix> {
    mpo_from_cp(&henon_heiles_cp(d, n, mu)?, tol)
}
