//! Truncation operators: SVD rounding, randomized rounding of sums, and
//! tangent-space projection, plus the fused truncated matvec and truncated
//! linear combination used by the solvers.

pub mod randomized;
pub mod svd;
pub mod tangent;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::mpo::{expectation, TTMatrix};
use crate::tt::TensorTrain;

pub use randomized::round_randomized_terms;
pub use svd::round_svd_raw;
pub use tangent::{tangent_project, TargetTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingKind {
    Svd,
    Randomized,
    Tangent,
}

/// How a truncation is realized. `tol` is relative to the norm of the
/// rounded vector; `max_rank` is a hard cap that wins over `tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundingStrategy {
    pub kind: RoundingKind,
    #[serde(default)]
    pub max_rank: Option<usize>,
    #[serde(default)]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    /// Reuse one sketch for every combination of an iteration instead of
    /// deriving a fresh seed per vector.
    #[serde(default)]
    pub shared_sketch: bool,
}

fn default_oversample() -> usize {
    5
}

impl RoundingStrategy {
    pub fn svd(max_rank: Option<usize>, tol: f64) -> Self {
        Self { kind: RoundingKind::Svd, max_rank, tol, seed: 0, oversample: default_oversample(), shared_sketch: false }
    }

    /// No truncation at all.
    pub fn exact() -> Self {
        Self::svd(None, 0.0)
    }

    pub fn randomized(max_rank: usize, seed: u64) -> Self {
        Self { kind: RoundingKind::Randomized, max_rank: Some(max_rank), seed, ..Self::exact() }
    }

    pub fn tangent(max_rank: Option<usize>, tol: f64) -> Self {
        Self { kind: RoundingKind::Tangent, max_rank, tol, ..Self::exact() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("rounding tol must be finite and non-negative, got {}", self.tol)));
        }
        if self.max_rank == Some(0) {
            return Err(Error::Config("rounding max_rank must be positive".into()));
        }
        if self.kind == RoundingKind::Randomized && self.max_rank.is_none() {
            return Err(Error::Config("randomized rounding needs max_rank".into()));
        }
        Ok(())
    }

    fn trim(&self, v: &TensorTrain) -> (TensorTrain, f64) {
        round_svd_raw(v, self.tol, self.max_rank)
    }
}

/// `Σ coefficients[j] · terms[j]`.
#[derive(Clone, Debug)]
pub struct LinearCombination {
    pub terms: Vec<TensorTrain>,
    pub coefficients: Vec<C64>,
}

impl LinearCombination {
    pub fn new(terms: Vec<TensorTrain>, coefficients: Vec<C64>) -> Result<Self> {
        if terms.is_empty() || terms.len() != coefficients.len() {
            return Err(Error::Structure("a combination needs matching nonempty terms and coefficients".into()));
        }
        for t in &terms[1..] {
            terms[0].check_modes(t)?;
        }
        Ok(Self { terms, coefficients })
    }

    pub fn exact(&self) -> Result<TensorTrain> {
        TensorTrain::combination(&self.terms, &self.coefficients)
    }
}

/// SVD rounding; returns the rounded train and the exact discarded norm.
pub fn round_svd(v: &TensorTrain, strategy: &RoundingStrategy) -> (TensorTrain, f64) {
    strategy.trim(v)
}

/// Randomized rounding of a combination at `strategy.max_rank`.
pub fn round_randomized(lc: &LinearCombination, strategy: &RoundingStrategy) -> Result<TensorTrain> {
    strategy.validate()?;
    let rank = strategy.max_rank.ok_or_else(|| Error::Config("randomized rounding needs max_rank".into()))?;
    Ok(round_randomized_terms(&lc.terms, &lc.coefficients, rank, strategy.tol, strategy.oversample, strategy.seed).0)
}

/// Distance between an exact sum of terms and its approximation, from
/// pairwise inner products of the terms. Accurate to roughly the square root
/// of machine precision relative to the norms involved.
fn distance_to_terms(approx: &TensorTrain, terms: &[TargetTerm]) -> Result<f64> {
    let mut ee = 0.0;
    let mut ae = 0.0;
    for (i, ti) in terms.iter().enumerate() {
        ae += (ti.coeff() * term_inner_vector(ti, approx)?.conj()).re;
        for (j, tj) in terms.iter().enumerate().skip(i) {
            let g = (ti.coeff().conj() * tj.coeff() * term_inner(ti, tj)?).re;
            ee += if i == j { g } else { 2.0 * g };
        }
    }
    let aa = approx.inner(approx)?.re;
    Ok((ee + aa - 2.0 * ae).max(0.0).sqrt())
}

/// `⟨t, x⟩` for an unscaled term `t`.
fn term_inner_vector(t: &TargetTerm, x: &TensorTrain) -> Result<C64> {
    match t {
        TargetTerm::Vector { tt, .. } => tt.inner(x),
        TargetTerm::MatVec { op, tt, .. } => Ok(expectation(x, op, tt)?.conj()),
    }
}

/// `⟨s, t⟩` for unscaled terms.
fn term_inner(s: &TargetTerm, t: &TargetTerm) -> Result<C64> {
    match (s, t) {
        (TargetTerm::Vector { tt, .. }, _) => Ok(term_inner_vector(t, tt)?.conj()),
        (_, TargetTerm::Vector { tt, .. }) => term_inner_vector(s, tt),
        _ => s.materialize_unscaled()?.inner(&t.materialize_unscaled()?),
    }
}

fn materialize(terms: &[TargetTerm]) -> Result<TensorTrain> {
    let mut acc = terms[0].materialize()?;
    for t in &terms[1..] {
        acc = acc.add(&t.materialize()?)?;
    }
    Ok(acc)
}

/// Truncate a sum of vectors and operator products.
///
/// * svd: assemble the exact sum and round once;
/// * tangent: project onto the tangent space at `base`, then trim;
/// * randomized: sketch the block-structured sum, then trim.
///
/// Returns the result and an estimate of the truncation error: exact for
/// svd, measured through inner products otherwise.
pub fn truncate_terms(terms: &[TargetTerm], base: &TensorTrain, strategy: &RoundingStrategy) -> Result<(TensorTrain, f64)> {
    strategy.validate()?;
    if terms.is_empty() {
        return Err(Error::Structure("nothing to truncate".into()));
    }
    match strategy.kind {
        RoundingKind::Svd => Ok(strategy.trim(&materialize(terms)?)),
        RoundingKind::Tangent => {
            let projected = tangent_project(base, terms)?;
            let (out, _) = strategy.trim(&projected);
            let err = distance_to_terms(&out, terms)?;
            Ok((out, err))
        }
        RoundingKind::Randomized => {
            let pieces: Vec<TensorTrain> = terms.iter().map(|t| t.materialize_unscaled()).collect::<Result<_>>()?;
            let coeffs: Vec<C64> = terms.iter().map(|t| t.coeff()).collect();
            let rank = strategy.max_rank.expect("validated");
            let (out, _) = round_randomized_terms(&pieces, &coeffs, rank, strategy.tol, strategy.oversample, strategy.seed);
            let err = distance_to_terms(&out, terms)?;
            Ok((out, err))
        }
    }
}

/// `𝔗(A v)`; the tangent variant projects at `v` itself.
pub fn truncated_matvec(a: &TTMatrix, v: &TensorTrain, strategy: &RoundingStrategy) -> Result<(TensorTrain, f64)> {
    truncate_terms(&[TargetTerm::MatVec { coeff: C64::new(1.0, 0.0), op: a, tt: v }], v, strategy)
}

/// `𝔗(Σ c_j v_j)`.
///
/// svd rounds after every pairwise addition, taking terms in descending
/// `|c_j|`; tangent projects once at the term of largest `|c_j|`; randomized
/// sketches the whole sum.
pub fn truncated_combine(lc: &LinearCombination, strategy: &RoundingStrategy) -> Result<(TensorTrain, f64)> {
    strategy.validate()?;
    let mut order: Vec<usize> = (0..lc.terms.len()).collect();
    order.sort_by(|&i, &j| lc.coefficients[j].norm().total_cmp(&lc.coefficients[i].norm()));
    match strategy.kind {
        RoundingKind::Svd => {
            let first = order[0];
            let (mut acc, mut err2) = {
                let (t, e) = strategy.trim(&lc.terms[first].scale(lc.coefficients[first]));
                (t, e * e)
            };
            for &j in &order[1..] {
                let sum = acc.add(&lc.terms[j].scale(lc.coefficients[j]))?;
                let (t, e) = strategy.trim(&sum);
                acc = t;
                err2 += e * e;
            }
            Ok((acc, err2.sqrt()))
        }
        RoundingKind::Tangent | RoundingKind::Randomized => {
            let terms: Vec<TargetTerm> = lc
                .terms
                .iter()
                .zip(&lc.coefficients)
                .map(|(tt, &coeff)| TargetTerm::Vector { coeff, tt })
                .collect();
            truncate_terms(&terms, &lc.terms[order[0]], strategy)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    fn dist(a: &TensorTrain, b: &TensorTrain) -> f64 {
        (a.to_vector().unwrap() - b.to_vector().unwrap()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn strategy_validation() {
        assert!(RoundingStrategy::svd(Some(0), 0.0).validate().is_err());
        assert!(RoundingStrategy::svd(None, -1.0).validate().is_err());
        let mut r = RoundingStrategy::randomized(3, 0);
        r.max_rank = None;
        assert!(r.validate().is_err());
    }

    #[test]
    fn single_term_combine_scales() {
        let v = TensorTrain::random(&[2, 3, 2], &[1, 2, 2, 1], 1).unwrap();
        let lc = LinearCombination::new(vec![v.clone()], vec![C64::new(2.0, 0.0)]).unwrap();
        for s in [RoundingStrategy::svd(Some(4), 0.0), RoundingStrategy::tangent(Some(4), 0.0), RoundingStrategy::randomized(4, 3)] {
            let (r, _) = truncated_combine(&lc, &s).unwrap();
            assert!(dist(&r, &v.scale(C64::new(2.0, 0.0))) < 1e-12, "{:?}", s.kind);
        }
    }

    #[test]
    fn identity_matvec_is_lossless() {
        let v = TensorTrain::random(&[2, 3, 2], &[1, 2, 2, 1], 2).unwrap();
        let id = TTMatrix::identity(&[2, 3, 2]);
        for s in [RoundingStrategy::svd(Some(2), 0.0), RoundingStrategy::tangent(Some(2), 0.0), RoundingStrategy::randomized(2, 3)] {
            let (r, _) = truncated_matvec(&id, &v, &s).unwrap();
            assert!(dist(&r, &v) < 1e-12, "{:?}", s.kind);
        }
    }
}
