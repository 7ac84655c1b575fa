use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::{angle_to, hat_projection};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mpo::TTMatrix;
use crate::rounding::{round_svd, RoundingStrategy};
use crate::solver::{cheb_apply, ChebFilter};
use crate::tt::TensorTrain;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveStep {
    pub iter: usize,
    /// Admissible truncation error for this step.
    pub bound: f64,
    /// Truncation error actually committed.
    pub trunc_err: f64,
    pub rank: usize,
    /// Angle to the target after the step.
    pub angle: f64,
}

/// Power iteration whose SVD truncation tolerance is set each step to
/// `safety × ` the geometric bound, so that the angle to `psi` provably
/// decreases while the rank adapts. With a filter the step is `p_k(A) v`.
pub fn adaptive_power(
    a: &TTMatrix,
    filter: Option<&ChebFilter>,
    v0: &TensorTrain,
    psi: &ArrayView1<C64>,
    iters: usize,
    safety: f64,
) -> Result<Vec<AdaptiveStep>> {
    if !(safety > 0.0 && safety < 1.0) {
        return Err(Error::Config(format!("safety factor must lie in (0, 1), got {safety}")));
    }
    let mut v = v0.scale(C64::new(1.0 / v0.norm(), 0.0));
    let mut steps = Vec::with_capacity(iters);
    for iter in 1..=iters {
        let z = match filter {
            Some(f) => cheb_apply(a, &v, f, &RoundingStrategy::exact())?.0,
            None => a.apply(&v)?,
        };
        let (vp, vq) = hat_projection(&v.to_vector()?.view(), psi);
        let (zp, zq) = hat_projection(&z.to_vector()?.view(), psi);
        let bound = (vp * zq - vq * zp).abs();
        let nz = z.norm();
        let (t, err) = round_svd(&z, &RoundingStrategy::svd(None, safety * bound / nz));
        let nt = t.norm();
        if !(nt > 0.0) {
            return Err(Error::Breakdown(format!("iterate vanished at step {iter}")));
        }
        v = t.scale(C64::new(1.0 / nt, 0.0));
        steps.push(AdaptiveStep { iter, bound, trunc_err: err, rank: v.max_rank(), angle: angle_to(&v.to_vector()?.view(), psi) });
    }
    Ok(steps)
}
