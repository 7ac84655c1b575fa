//! Orthogonal projection onto the tangent space of the fixed-rank manifold.
//!
//! For a base point `x` with left-orthogonal cores `U_k` and right-orthogonal
//! cores `V_k`, the projection of `z` is `Σ_k U_{<k} δU_k V_{>k}` with
//! `Y_k = U_{<k}^H z V_{>k}^H`, `δU_k = (I − U_k U_k^H) Y_k` for all but the
//! last site and `δU_{d} = Y_{d}`. The target is accessed only through
//! environments, so sums and operator products are never assembled.

use ndarray::{concatenate, s, Array2, Array3, Array4, Axis};

use crate::error::Result;
use crate::linalg::{self, C64, ONE};
use crate::mpo::{apply_core, sandwich_left, TTMatrix};
use crate::tt::{fold, left_unfold, right_unfold, TensorTrain};

/// One summand of a projection target.
#[derive(Clone, Copy, Debug)]
pub enum TargetTerm<'a> {
    Vector { coeff: C64, tt: &'a TensorTrain },
    MatVec { coeff: C64, op: &'a TTMatrix, tt: &'a TensorTrain },
}

impl TargetTerm<'_> {
    pub fn coeff(&self) -> C64 {
        match self {
            TargetTerm::Vector { coeff, .. } | TargetTerm::MatVec { coeff, .. } => *coeff,
        }
    }

    pub fn tt(&self) -> &TensorTrain {
        match self {
            TargetTerm::Vector { tt, .. } | TargetTerm::MatVec { tt, .. } => tt,
        }
    }

    pub(crate) fn mode_sizes(&self) -> Vec<usize> {
        match self {
            TargetTerm::Vector { tt, .. } => tt.mode_sizes(),
            TargetTerm::MatVec { op, .. } => op.row_sizes(),
        }
    }

    /// Exact train for the term, including its coefficient.
    pub fn materialize(&self) -> Result<TensorTrain> {
        Ok(match self {
            TargetTerm::Vector { coeff, tt } => tt.scale(*coeff),
            TargetTerm::MatVec { coeff, op, tt } => op.apply(tt)?.scale(*coeff),
        })
    }

    /// Exact train for the term without its coefficient.
    pub(crate) fn materialize_unscaled(&self) -> Result<TensorTrain> {
        match self {
            TargetTerm::Vector { tt, .. } => Ok((*tt).clone()),
            TargetTerm::MatVec { op, tt, .. } => op.apply(tt),
        }
    }
}

fn reverse_core(c: &Array3<C64>) -> Array3<C64> {
    c.view().permuted_axes([2, 1, 0]).as_standard_layout().into_owned()
}

fn reverse_op_core(c: &Array4<C64>) -> Array4<C64> {
    c.view().permuted_axes([3, 1, 2, 0]).as_standard_layout().into_owned()
}

/// Two-layer step `env'[a', b'] = Σ conj(x[a,i,a']) env[a,b] y[b,i,b']`.
fn pair_left(env: &Array2<C64>, x: &Array3<C64>, y: &Array3<C64>) -> Array2<C64> {
    let (_, n, ry1) = y.dim();
    let t = env.dot(&right_unfold(y)).into_shape((x.dim().0 * n, ry1)).unwrap();
    linalg::adjoint(&left_unfold(x)).dot(&t)
}

/// Environments of one term flattened to matrices `(r_frame, r_term)`.
struct Environments {
    left: Vec<Array2<C64>>,
    right: Vec<Array2<C64>>,
}

fn environments(term: &TargetTerm, u: &[Array3<C64>], v: &[Array3<C64>]) -> Environments {
    let d = u.len();
    let mut left = Vec::with_capacity(d);
    let mut right = vec![Array2::zeros((0, 0)); d + 1];
    match term {
        TargetTerm::Vector { tt, .. } => {
            let z = tt.cores();
            let mut env = Array2::from_elem((1, 1), ONE);
            for k in 0..d {
                left.push(env.clone());
                if k + 1 < d {
                    env = pair_left(&env, &u[k], &z[k]);
                }
            }
            let mut env = Array2::from_elem((1, 1), ONE);
            right[d] = env.clone();
            for k in (1..d).rev() {
                env = pair_left(&env, &reverse_core(&v[k]), &reverse_core(&z[k]));
                right[k] = env.clone();
            }
        }
        TargetTerm::MatVec { op, tt, .. } => {
            let z = tt.cores();
            let a = op.cores();
            let flat = |e: &Array3<C64>| {
                let (r0, r1, r2) = e.dim();
                e.clone().into_shape((r0, r1 * r2)).unwrap()
            };
            let mut env = Array3::from_elem((1, 1, 1), ONE);
            for k in 0..d {
                left.push(flat(&env));
                if k + 1 < d {
                    env = sandwich_left(&env, &u[k], &a[k], &z[k]);
                }
            }
            let mut env = Array3::from_elem((1, 1, 1), ONE);
            right[d] = flat(&env);
            for k in (1..d).rev() {
                env = sandwich_left(&env, &reverse_core(&v[k]), &reverse_op_core(&a[k]), &reverse_core(&z[k]));
                right[k] = flat(&env);
            }
        }
    }
    Environments { left, right }
}

/// `Y_k[a, i, c] = Σ L[a, β] Z_k[β, i, β'] R[c, β']` for one term.
fn local_projection(term: &TargetTerm, env: &Environments, k: usize) -> Array3<C64> {
    let core = match term {
        TargetTerm::Vector { tt, .. } => tt.cores()[k].clone(),
        TargetTerm::MatVec { op, tt, .. } => apply_core(&op.cores()[k], &tt.cores()[k]),
    };
    let l = &env.left[k];
    let r = &env.right[k + 1];
    let (_, n, _) = core.dim();
    let t = l.dot(&right_unfold(&core)).into_shape((l.nrows() * n, core.dim().2)).unwrap();
    let y = t.dot(&r.t());
    fold(y, l.nrows(), n, r.nrows()).mapv(|x| x * term.coeff())
}

/// Project `Σ terms` onto the tangent space at `base`. The result has bond
/// dimensions at most twice those of `base` and is not trimmed.
pub fn tangent_project(base: &TensorTrain, terms: &[TargetTerm]) -> Result<TensorTrain> {
    let d = base.d();
    for t in terms {
        if t.mode_sizes() != base.mode_sizes() {
            return Err(crate::error::Error::ModeMismatch { left: base.mode_sizes(), right: t.mode_sizes() });
        }
    }
    let (ul, _) = base.orthogonalize(d - 1)?;
    let (vr, _) = base.orthogonalize(0)?;
    let u = ul.cores();
    let v = vr.cores();
    let envs: Vec<Environments> = terms.iter().map(|t| environments(t, u, v)).collect();

    let mut dus = Vec::with_capacity(d);
    for k in 0..d {
        let mut y: Option<Array3<C64>> = None;
        for (t, e) in terms.iter().zip(&envs) {
            let local = local_projection(t, e, k);
            y = Some(match y {
                None => local,
                Some(acc) => acc + local,
            });
        }
        let y = y.expect("at least one term");
        let du = if k + 1 < d {
            let (r0, n, r1) = y.dim();
            let uk = left_unfold(&u[k]);
            let ym = left_unfold(&y).to_owned();
            let proj = uk.dot(&linalg::adjoint(&uk).dot(&ym));
            fold(ym - proj, r0, n, r1)
        } else {
            y
        };
        dus.push(du);
    }

    if d == 1 {
        return TensorTrain::new(dus);
    }
    let mut cores = Vec::with_capacity(d);
    cores.push(concatenate(Axis(2), &[dus[0].view(), u[0].view()]).unwrap());
    for k in 1..d - 1 {
        let (rv0, n, rv1) = v[k].dim();
        let (ru0, _, ru1) = u[k].dim();
        let mut c = Array3::zeros((rv0 + ru0, n, rv1 + ru1));
        c.slice_mut(s![..rv0, .., ..rv1]).assign(&v[k]);
        c.slice_mut(s![rv0.., .., ..rv1]).assign(&dus[k]);
        c.slice_mut(s![rv0.., .., rv1..]).assign(&u[k]);
        cores.push(c);
    }
    cores.push(concatenate(Axis(0), &[v[d - 1].view(), dus[d - 1].view()]).unwrap());
    TensorTrain::new(cores.into_iter().map(|c| c.as_standard_layout().into_owned()).collect())
}
