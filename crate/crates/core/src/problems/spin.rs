//! Heisenberg chains `H = Σ_j −J (S^x_j S^x_{j+1} + S^y_j S^y_{j+1} + S^z_j S^z_{j+1}) − h S^z_j`.

use ndarray::{array, s, Array2, Array4};
use serde::{Deserialize, Serialize};

use super::cp::CPOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpo::TTMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    /// Pauli matrices.
    #[default]
    Half,
    /// Spin-1 operators.
    One,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// `[S^x, S^y, S^z]` for the chosen spin.
pub fn spin_matrices(spin: Spin) -> [Array2<C64>; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match spin {
        Spin::Half => [array![[z, o], [o, z]], array![[z, -i], [i, z]], array![[o, z], [z, -o]]],
        Spin::One => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            [
                array![[z, o, z], [o, z, o], [z, o, z]].mapv(|x| x * r),
                array![[z, -i, z], [i, z, -i], [z, i, z]].mapv(|x| x * r),
                array![[o, z, z], [z, z, z], [z, z, -o]],
            ]
        }
    }
}

fn check(length: usize) -> Result<()> {
    if length < 2 {
        return Err(Error::Config(format!("heisenberg length must be at least 2, got {length}")));
    }
    Ok(())
}

/// Direct MPO: bond dimension 5 for open chains, 8 for periodic ones (three
/// extra channels carry `S^a` from the first site to the last), then SVD
/// rounded at relative `tol`.
pub fn heisenberg(length: usize, spin: Spin, j: f64, h: f64, boundary: Boundary, tol: f64) -> Result<TTMatrix> {
    check(length)?;
    let s = spin_matrices(spin);
    let n = s[0].nrows();
    let eye = linalg::identity(n);
    let periodic = boundary == Boundary::Periodic;
    let w = if periodic { 8 } else { 5 };
    let done = 4;
    let mj = C64::new(-j, 0.0);
    let field = s[2].mapv(|x| x * -h);
    // Full bulk tensor; boundary sites take one row or column.
    let mut bulk = Array4::<C64>::zeros((w, n, n, w));
    let mut put = |a: usize, b: usize, m: &Array2<C64>| {
        let mut slot = bulk.slice_mut(s![a, .., .., b]);
        slot += m;
    };
    put(0, 0, &eye);
    put(done, done, &eye);
    put(0, done, &field);
    for a in 0..3 {
        put(0, 1 + a, &s[a]);
        put(1 + a, done, &s[a].mapv(|x| x * mj));
        if periodic {
            put(5 + a, 5 + a, &eye);
        }
    }
    let mut cores = Vec::with_capacity(length);
    for site in 0..length {
        let mut core = if site == 0 {
            bulk.slice(s![0..1, .., .., ..]).to_owned()
        } else if site == length - 1 {
            bulk.slice(s![.., .., .., done..done + 1]).to_owned()
        } else {
            bulk.clone()
        };
        if periodic && site == 0 {
            for a in 0..3 {
                core.slice_mut(s![0, .., .., 5 + a]).assign(&s[a]);
            }
        }
        if periodic && site == length - 1 {
            for a in 0..3 {
                core.slice_mut(s![5 + a, .., .., 0]).assign(&s[a].mapv(|x| x * mj));
            }
        }
        cores.push(core);
    }
    Ok(TTMatrix::new(cores)?.round(tol, None))
}

/// The same Hamiltonian as a sum of Kronecker products.
pub fn heisenberg_cp(length: usize, spin: Spin, j: f64, h: f64, boundary: Boundary) -> Result<CPOperator> {
    check(length)?;
    let s = spin_matrices(spin);
    let eye = linalg::identity(s[0].nrows());
    let mut terms = Vec::new();
    let bonds = if boundary == Boundary::Periodic { length } else { length - 1 };
    for site in 0..bonds {
        let next = (site + 1) % length;
        for a in 0..3 {
            let mut t = vec![eye.clone(); length];
            t[site] = s[a].mapv(|x| x * -j);
            t[next] = s[a].clone();
            terms.push(t);
        }
    }
    for site in 0..length {
        let mut t = vec![eye.clone(); length];
        t[site] = s[2].mapv(|x| x * -h);
        terms.push(t);
    }
    CPOperator::new(terms)
}
