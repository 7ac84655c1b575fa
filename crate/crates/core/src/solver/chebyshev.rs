//! Chebyshev filters `p_k = c_k ∘ l` with `l(t) = (t − c)/e`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mpo::TTMatrix;
use crate::rounding::{truncate_terms, RoundingStrategy, TargetTerm};
use crate::tt::TensorTrain;

/// Filter of degree `degree` damping the interval `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebFilter {
    pub degree: usize,
    pub a: f64,
    pub b: f64,
}

impl ChebFilter {
    pub fn new(degree: usize, a: f64, b: f64) -> Result<Self> {
        let f = Self { degree, a, b };
        f.validate()?;
        Ok(f)
    }

    pub fn center(&self) -> f64 {
        (self.a + self.b) / 2.0
    }

    pub fn half_width(&self) -> f64 {
        (self.b - self.a) / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width() > 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::Config(format!("filter interval [{}, {}] must satisfy a < b", self.a, self.b)));
        }
        Ok(())
    }

    /// `p_k(t)` by the three-term recurrence.
    pub fn eval(&self, t: f64) -> f64 {
        chebyshev(self.degree, (t - self.center()) / self.half_width())
    }
}

/// `c_k(t)` by the three-term recurrence.
pub fn chebyshev(k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for _ in 1..k {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derive a child seed; used so that every truncation gets its own stream.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut x = base ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        x = x.wrapping_add(p.wrapping_mul(0xBF58_476D_1CE4_E5B9)).rotate_left(27);
        x ^= x >> 31;
        x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    }
    x ^ (x >> 29)
}

/// Rank-truncated three-term recurrence for `p_k(A) v`:
/// `q_1 = 𝔗((Av − cv)/e)`, `q_{j+1} = 𝔗(2 𝔗(Aq_j − cq_j)/e − q_{j−1})`.
///
/// Returns `q_k` and the accumulated truncation error relative to `‖q_k‖`.
pub fn cheb_apply(a: &TTMatrix, v: &TensorTrain, filter: &ChebFilter, strategy: &RoundingStrategy) -> Result<(TensorTrain, f64)> {
    filter.validate()?;
    if filter.degree == 0 {
        return Ok((v.clone(), 0.0));
    }
    let c = filter.center();
    let e = filter.half_width();
    let one = C64::new(1.0, 0.0);
    let step = |j: usize| strategy.with_seed(derive_seed(strategy.seed, &[j as u64]));
    let (mut q, err) = truncate_terms(
        &[TargetTerm::MatVec { coeff: C64::new(1.0 / e, 0.0), op: a, tt: v }, TargetTerm::Vector { coeff: C64::new(-c / e, 0.0), tt: v }],
        v,
        &step(0),
    )?;
    let mut total = err;
    let mut prev = v.clone();
    for j in 1..filter.degree {
        let (w, e1) = truncate_terms(
            &[TargetTerm::MatVec { coeff: one, op: a, tt: &q }, TargetTerm::Vector { coeff: C64::new(-c, 0.0), tt: &q }],
            &q,
            &step(2 * j - 1),
        )?;
        // the fresh term dominates, so it serves as the tangent base point
        let (next, e2) = truncate_terms(
            &[TargetTerm::Vector { coeff: C64::new(2.0 / e, 0.0), tt: &w }, TargetTerm::Vector { coeff: -one, tt: &prev }],
            &w,
            &step(2 * j),
        )?;
        total += 2.0 * e1 / e + e2;
        prev = q;
        q = next;
    }
    let nrm = q.norm();
    Ok((q, if nrm > 0.0 { total / nrm } else { total }))
}
