//! Tensor trains with exact arithmetic.
//!
//! A train with `d` cores represents a vector of length `n_1 · … · n_d`. Core
//! `k` has shape `(r_{k-1}, n_k, r_k)` and `r_0 = r_d = 1`. Vectorization is
//! row-major: the first mode index varies slowest, so a rank-one train with
//! factors `a_1, …, a_d` equals `kron(a_1, …, a_d)`.
//!
//! Site indices are 0-based in code.

use ndarray::{concatenate, s, Array1, Array2, Array3, ArrayD, ArrayView2, ArrayView3, Axis, IxDyn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE, ZERO};

/// Largest number of entries any dense conversion will produce.
pub const DENSE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorTrain {
    cores: Vec<Array3<C64>>,
}

pub(crate) fn left_unfold(core: &Array3<C64>) -> ArrayView2<'_, C64> {
    let (r0, n, r1) = core.dim();
    core.view().into_shape((r0 * n, r1)).expect("cores are kept in standard layout")
}

pub(crate) fn right_unfold(core: &Array3<C64>) -> ArrayView2<'_, C64> {
    let (r0, n, r1) = core.dim();
    core.view().into_shape((r0, n * r1)).expect("cores are kept in standard layout")
}

pub(crate) fn fold(mat: Array2<C64>, r0: usize, n: usize, r1: usize) -> Array3<C64> {
    mat.as_standard_layout()
        .into_owned()
        .into_shape((r0, n, r1))
        .expect("fold shape matches")
}

/// Multiply a matrix into the left bond of a core: `out[a,i,b] = Σ_c m[a,c] core[c,i,b]`.
pub(crate) fn absorb_left(m: &ArrayView2<C64>, core: &Array3<C64>) -> Array3<C64> {
    let (_, n, r1) = core.dim();
    fold(m.dot(&right_unfold(core)), m.nrows(), n, r1)
}

/// Multiply a matrix into the right bond of a core: `out[a,i,b] = Σ_c core[a,i,c] m[c,b]`.
pub(crate) fn absorb_right(core: &Array3<C64>, m: &ArrayView2<C64>) -> Array3<C64> {
    let (r0, n, _) = core.dim();
    fold(left_unfold(core).dot(m), r0, n, m.ncols())
}

/// Smallest rank whose discarded tail has norm at most `delta`, capped by `max_rank`.
pub(crate) fn truncation_rank(s: &Array1<f64>, delta: f64, max_rank: Option<usize>) -> usize {
    let mut keep = s.len();
    let mut tail = 0.0;
    while keep > 1 {
        let next = tail + s[keep - 1] * s[keep - 1];
        if next.sqrt() > delta {
            break;
        }
        tail = next;
        keep -= 1;
    }
    match max_rank {
        Some(cap) => keep.min(cap.max(1)),
        None => keep,
    }
}

fn dense_entries(dims: &[usize]) -> u128 {
    dims.iter().fold(1u128, |acc, &n| acc.saturating_mul(n as u128))
}

pub(crate) fn check_dense(dims: &[usize]) -> Result<()> {
    let entries = dense_entries(dims);
    if entries > DENSE_LIMIT {
        return Err(Error::TooLarge { entries, limit: DENSE_LIMIT });
    }
    Ok(())
}

/// Largest bond dimensions compatible with the mode sizes.
pub fn feasible_ranks(dims: &[usize]) -> Vec<usize> {
    let d = dims.len();
    (0..=d)
        .map(|k| {
            let left = dense_entries(&dims[..k]);
            let right = dense_entries(&dims[k..]);
            left.min(right).min(usize::MAX as u128) as usize
        })
        .collect()
}

impl TensorTrain {
    pub fn new(cores: Vec<Array3<C64>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Structure("a tensor train needs at least one core".into()));
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().2 != 1 {
            return Err(Error::Structure("boundary ranks must be 1".into()));
        }
        for (k, c) in cores.iter().enumerate() {
            let (r0, n, r1) = c.dim();
            if r0 == 0 || n == 0 || r1 == 0 {
                return Err(Error::Structure(format!("core {k} has an empty dimension")));
            }
            if k + 1 < cores.len() && cores[k + 1].dim().0 != r1 {
                return Err(Error::Structure(format!("bond {} does not chain: {} vs {}", k + 1, r1, cores[k + 1].dim().0)));
            }
        }
        let cores = cores.into_iter().map(|c| c.as_standard_layout().into_owned()).collect();
        Ok(Self { cores })
    }

    pub(crate) fn from_cores_unchecked(cores: Vec<Array3<C64>>) -> Self {
        debug_assert!(Self::new(cores.clone()).is_ok());
        Self { cores }
    }

    /// Rank-one zero train.
    pub fn zeros(dims: &[usize]) -> Self {
        Self { cores: dims.iter().map(|&n| Array3::zeros((1, n, 1))).collect() }
    }

    /// Rank-one train `a_1 ⊗ … ⊗ a_d`.
    pub fn rank_one(factors: &[Array1<C64>]) -> Result<Self> {
        Self::new(factors.iter().map(|f| f.clone().into_shape((1, f.len(), 1)).unwrap()).collect())
    }

    /// Random train with i.i.d. complex Gaussian cores, normalized to unit norm.
    /// Requested ranks are clipped to the feasible bond dimensions.
    pub fn random(dims: &[usize], ranks: &[usize], seed: u64) -> Result<Self> {
        let d = dims.len();
        if d == 0 || ranks.len() != d + 1 {
            return Err(Error::Structure(format!("{} ranks given for {} modes", ranks.len(), d)));
        }
        if ranks[0] != 1 || ranks[d] != 1 || ranks.iter().any(|&r| r == 0) || dims.iter().any(|&n| n == 0) {
            return Err(Error::Structure("boundary ranks must be 1 and all sizes positive".into()));
        }
        let feasible = feasible_ranks(dims);
        let r: Vec<usize> = ranks.iter().zip(&feasible).map(|(&a, &b)| a.min(b)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cores = (0..d)
            .map(|k| {
                Array3::from_shape_simple_fn((r[k], dims[k], r[k + 1]), || {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
            })
            .collect();
        let tt = Self { cores };
        let nrm = tt.norm();
        Ok(tt.scale(C64::new(1.0 / nrm, 0.0)))
    }

    /// TT-SVD of a dense tensor. The result satisfies
    /// `‖result − x‖ ≤ tol · ‖x‖` unless `max_rank` binds.
    pub fn from_dense(x: &ArrayD<C64>, tol: f64, max_rank: Option<usize>) -> Result<Self> {
        let dims = x.shape().to_vec();
        let flat = x.as_standard_layout().iter().copied().collect::<Array1<C64>>();
        Self::from_vector(&flat, &dims, tol, max_rank)
    }

    /// TT-SVD of a vector interpreted with the given mode sizes.
    pub fn from_vector(x: &Array1<C64>, dims: &[usize], tol: f64, max_rank: Option<usize>) -> Result<Self> {
        let d = dims.len();
        if d == 0 || dims.iter().any(|&n| n == 0) {
            return Err(Error::Structure("mode sizes must be positive".into()));
        }
        if dense_entries(dims) != x.len() as u128 {
            return Err(Error::Structure(format!("vector of length {} does not match modes {:?}", x.len(), dims)));
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Ok(Self::zeros(dims));
        }
        let delta = if d > 1 { tol * nrm / ((d - 1) as f64).sqrt() } else { 0.0 };
        let mut rest = x.clone().into_shape((1, x.len())).unwrap();
        let mut cores = Vec::with_capacity(d);
        let mut r_prev = 1;
        for &n in &dims[..d - 1] {
            let cols = rest.len() / (r_prev * n);
            let mat = rest.into_shape((r_prev * n, cols)).unwrap();
            let (u, sv, vh) = linalg::svd(&mat.view())?;
            let r = truncation_rank(&sv, delta, max_rank);
            cores.push(fold(u.slice(s![.., ..r]).to_owned(), r_prev, n, r));
            let mut next = vh.slice(s![..r, ..]).to_owned();
            for (mut row, &sigma) in next.outer_iter_mut().zip(sv.iter()) {
                row.mapv_inplace(|z| z * sigma);
            }
            rest = next;
            r_prev = r;
        }
        cores.push(fold(rest, r_prev, dims[d - 1], 1));
        Self::new(cores)
    }

    pub fn d(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Array3<C64>] {
        &self.cores
    }

    pub fn core(&self, k: usize) -> ArrayView3<'_, C64> {
        self.cores[k].view()
    }

    pub fn into_cores(self) -> Vec<Array3<C64>> {
        self.cores
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    /// `(r_0, …, r_d)`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(1);
        r
    }

    pub fn max_rank(&self) -> usize {
        self.ranks().into_iter().max().unwrap_or(1)
    }

    /// Number of stored scalars.
    pub fn storage(&self) -> usize {
        self.cores.iter().map(|c| c.len()).sum()
    }

    pub(crate) fn check_modes(&self, other: &Self) -> Result<()> {
        if self.mode_sizes() != other.mode_sizes() {
            return Err(Error::ModeMismatch { left: self.mode_sizes(), right: other.mode_sizes() });
        }
        Ok(())
    }

    /// Dense vector, first mode slowest. Refuses beyond [`DENSE_LIMIT`] entries.
    pub fn to_vector(&self) -> Result<Array1<C64>> {
        check_dense(&self.mode_sizes())?;
        let mut acc = Array2::from_elem((1, 1), ONE);
        for core in &self.cores {
            let (_, n, r1) = core.dim();
            let rows = acc.nrows();
            acc = acc.dot(&right_unfold(core)).into_shape((rows * n, r1)).unwrap();
        }
        let len = acc.len();
        Ok(acc.into_shape(len).unwrap())
    }

    pub fn to_dense(&self) -> Result<ArrayD<C64>> {
        Ok(self.to_vector()?.into_shape(IxDyn(&self.mode_sizes())).unwrap())
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_modes(other)?;
        let mut env = Array2::from_elem((1, 1), ONE);
        for (v, w) in self.cores.iter().zip(&other.cores) {
            let (_, n, rw1) = w.dim();
            let t = env.dot(&right_unfold(w));
            let t = t.into_shape((v.dim().0 * n, rw1)).unwrap();
            env = linalg::adjoint(&left_unfold(v)).dot(&t);
        }
        Ok(env[[0, 0]])
    }

    /// Frobenius norm, taken from the center core of a canonical form.
    pub fn norm(&self) -> f64 {
        let (t, _) = self.orthogonalize(self.d() - 1).expect("center is in range");
        linalg::frobenius(&left_unfold(&t.cores[t.d() - 1]))
    }

    /// Multiply by `alpha`; only the first core changes.
    pub fn scale(&self, alpha: C64) -> Self {
        let mut cores = self.cores.clone();
        cores[0].mapv_inplace(|z| z * alpha);
        Self { cores }
    }

    /// Exact sum; interior ranks add.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modes(other)?;
        let d = self.d();
        if d == 1 {
            return Ok(Self { cores: vec![&self.cores[0] + &other.cores[0]] });
        }
        let mut cores = Vec::with_capacity(d);
        for k in 0..d {
            let (a, b) = (&self.cores[k], &other.cores[k]);
            let core = if k == 0 {
                concatenate(Axis(2), &[a.view(), b.view()]).unwrap()
            } else if k == d - 1 {
                concatenate(Axis(0), &[a.view(), b.view()]).unwrap()
            } else {
                let (ra0, n, ra1) = a.dim();
                let (rb0, _, rb1) = b.dim();
                let mut c = Array3::zeros((ra0 + rb0, n, ra1 + rb1));
                c.slice_mut(s![..ra0, .., ..ra1]).assign(a);
                c.slice_mut(s![ra0.., .., ra1..]).assign(b);
                c
            };
            cores.push(core.as_standard_layout().into_owned());
        }
        Ok(Self { cores })
    }

    /// Exact linear combination `Σ coeffs[j] · terms[j]`.
    pub fn combination(terms: &[Self], coeffs: &[C64]) -> Result<Self> {
        if terms.is_empty() || terms.len() != coeffs.len() {
            return Err(Error::Structure("a combination needs matching nonempty terms and coefficients".into()));
        }
        let mut acc = terms[0].scale(coeffs[0]);
        for (t, &c) in terms.iter().zip(coeffs).skip(1) {
            acc = acc.add(&t.scale(c))?;
        }
        Ok(acc)
    }

    /// Entry at a multi-index.
    pub fn entry(&self, index: &[usize]) -> C64 {
        let mut row = Array2::from_elem((1, 1), ONE);
        for (core, &i) in self.cores.iter().zip(index) {
            row = row.dot(&core.slice(s![.., i, ..]));
        }
        row[[0, 0]]
    }

    pub fn is_zero(&self) -> bool {
        self.cores.iter().any(|c| c.iter().all(|&z| z == ZERO))
    }
}
