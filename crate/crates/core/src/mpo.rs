//! Operators in tensor-train format (matrix product operators).
//!
//! Core `k` has shape `(r_{k-1}, rows_k, cols_k, r_k)`. The dense matrix uses
//! the same row-major convention as [`TensorTrain`], so a rank-one operator
//! with factors `A_1, …, A_d` equals `kron(A_1, …, A_d)`.

use ndarray::{Array2, Array3, Array4};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ONE};
use crate::rounding::svd::round_svd_raw;
use crate::tt::{check_dense, TensorTrain};

#[derive(Clone, Debug, PartialEq)]
pub struct TTMatrix {
    cores: Vec<Array4<C64>>,
}

impl TTMatrix {
    pub fn new(cores: Vec<Array4<C64>>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Structure("an operator needs at least one core".into()));
        }
        if cores[0].dim().0 != 1 || cores[cores.len() - 1].dim().3 != 1 {
            return Err(Error::Structure("boundary ranks must be 1".into()));
        }
        for (k, c) in cores.iter().enumerate() {
            let (r0, n, m, r1) = c.dim();
            if r0 == 0 || n == 0 || m == 0 || r1 == 0 {
                return Err(Error::Structure(format!("operator core {k} has an empty dimension")));
            }
            if k + 1 < cores.len() && cores[k + 1].dim().0 != r1 {
                return Err(Error::Structure(format!("operator bond {} does not chain", k + 1)));
            }
        }
        Ok(Self { cores: cores.into_iter().map(|c| c.as_standard_layout().into_owned()).collect() })
    }

    /// Rank-one operator `A_1 ⊗ … ⊗ A_d`.
    pub fn from_factors(factors: &[Array2<C64>]) -> Result<Self> {
        Self::new(
            factors
                .iter()
                .map(|f| {
                    let (n, m) = f.dim();
                    f.as_standard_layout().into_owned().into_shape((1, n, m, 1)).unwrap()
                })
                .collect(),
        )
    }

    pub fn identity(dims: &[usize]) -> Self {
        let factors: Vec<_> = dims.iter().map(|&n| linalg::identity(n)).collect();
        Self::from_factors(&factors).expect("identity factors are valid")
    }

    pub fn d(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Array4<C64>] {
        &self.cores
    }

    pub fn row_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().1).collect()
    }

    pub fn col_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.dim().2).collect()
    }

    pub fn ranks(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cores.iter().map(|c| c.dim().0).collect();
        r.push(1);
        r
    }

    /// Dense matrix. Refuses beyond the dense size limit.
    pub fn to_dense(&self) -> Result<Array2<C64>> {
        let rows = self.row_sizes();
        let cols = self.col_sizes();
        let mut all = rows.clone();
        all.extend(&cols);
        check_dense(&all)?;
        // acc[R, C, r]
        let mut acc = Array3::from_elem((1, 1, 1), ONE);
        for core in &self.cores {
            let (r0, n, m, r1) = core.dim();
            let (big_r, big_c, _) = acc.dim();
            let lhs = acc.into_shape((big_r * big_c, r0)).unwrap();
            let rhs = core.view().into_shape((r0, n * m * r1)).unwrap();
            let prod = lhs.dot(&rhs).into_shape((big_r, big_c, n, m, r1)).unwrap();
            let prod = prod.permuted_axes([0, 2, 1, 3, 4]);
            acc = prod.as_standard_layout().into_owned().into_shape((big_r * n, big_c * m, r1)).unwrap();
        }
        let (big_r, big_c, _) = acc.dim();
        Ok(acc.into_shape((big_r, big_c)).unwrap())
    }

    /// Exact product `A v`; interior ranks multiply.
    pub fn apply(&self, v: &TensorTrain) -> Result<TensorTrain> {
        if self.col_sizes() != v.mode_sizes() {
            return Err(Error::ModeMismatch { left: self.col_sizes(), right: v.mode_sizes() });
        }
        let cores = self.cores.iter().zip(v.cores()).map(|(a, x)| apply_core(a, x)).collect();
        Ok(TensorTrain::from_cores_unchecked(cores))
    }

    /// Exact sum of two operators.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.row_sizes() != other.row_sizes() || self.col_sizes() != other.col_sizes() {
            return Err(Error::ModeMismatch { left: self.row_sizes(), right: other.row_sizes() });
        }
        let a = self.as_train();
        let b = other.as_train();
        Ok(Self::from_train(&a.add(&b)?, &self.row_sizes(), &self.col_sizes()))
    }

    pub fn scale(&self, alpha: C64) -> Self {
        let mut cores = self.cores.clone();
        cores[0].mapv_inplace(|z| z * alpha);
        Self { cores }
    }

    /// SVD rounding of the operator viewed as a train over `(row, col)` pairs.
    pub fn round(&self, tol: f64, max_rank: Option<usize>) -> Self {
        let (t, _) = round_svd_raw(&self.as_train(), tol, max_rank);
        Self::from_train(&t, &self.row_sizes(), &self.col_sizes())
    }

    pub(crate) fn as_train(&self) -> TensorTrain {
        let cores = self
            .cores
            .iter()
            .map(|c| {
                let (r0, n, m, r1) = c.dim();
                c.clone().into_shape((r0, n * m, r1)).unwrap()
            })
            .collect();
        TensorTrain::from_cores_unchecked(cores)
    }

    pub(crate) fn from_train(t: &TensorTrain, rows: &[usize], cols: &[usize]) -> Self {
        let cores = t
            .cores()
            .iter()
            .zip(rows.iter().zip(cols))
            .map(|(c, (&n, &m))| {
                let (r0, _, r1) = c.dim();
                c.clone().into_shape((r0, n, m, r1)).unwrap()
            })
            .collect();
        Self { cores }
    }

    /// `‖A − A^H‖_F / ‖A‖_F`, computed densely.
    pub fn hermitian_defect(&self) -> Result<f64> {
        Ok(linalg::hermitian_defect(&self.to_dense()?.view()))
    }

    /// Conjugate transpose, core by core.
    pub fn adjoint(&self) -> Self {
        let cores = self
            .cores
            .iter()
            .map(|c| c.view().permuted_axes([0, 2, 1, 3]).mapv(|z| z.conj()).as_standard_layout().into_owned())
            .collect();
        Self { cores }
    }

    /// Whether `‖A − A^H‖_F ≤ tol ‖A‖_F`, evaluated in TT format.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.row_sizes() != self.col_sizes() {
            return false;
        }
        let a = self.as_train();
        let diff = a.add(&self.adjoint().as_train().scale(C64::new(-1.0, 0.0))).expect("same modes");
        diff.norm() <= tol * a.norm()
    }
}

/// `out[(α,b), i, (α',b')] = Σ_j a[α,i,j,α'] x[b,j,b']`.
pub(crate) fn apply_core(a: &Array4<C64>, x: &Array3<C64>) -> Array3<C64> {
    let (ra0, n, m, ra1) = a.dim();
    let (rx0, _, rx1) = x.dim();
    let lhs = a.view().permuted_axes([0, 1, 3, 2]);
    let lhs = lhs.as_standard_layout();
    let lhs = lhs.view().into_shape((ra0 * n * ra1, m)).unwrap();
    let rhs = x.view().permuted_axes([1, 0, 2]);
    let rhs = rhs.as_standard_layout();
    let rhs = rhs.view().into_shape((m, rx0 * rx1)).unwrap();
    let prod = lhs.dot(&rhs).into_shape((ra0, n, ra1, rx0, rx1)).unwrap();
    let prod = prod.permuted_axes([0, 3, 1, 2, 4]);
    prod.as_standard_layout().into_owned().into_shape((ra0 * rx0, n, ra1 * rx1)).unwrap()
}

/// One step of a three-layer left environment.
///
/// `env[a, α, b]` contracts sites left of the current one; the result is
/// `Σ conj(x[a,i,a']) op[α,i,j,α'] y[b,j,b'] env[a,α,b]` indexed `[a', α', b']`.
pub(crate) fn sandwich_left(env: &Array3<C64>, x: &Array3<C64>, op: &Array4<C64>, y: &Array3<C64>) -> Array3<C64> {
    let (rx, ra, ry) = env.dim();
    let (_, n, m, ra1) = op.dim();
    let (_, _, ry1) = y.dim();
    let rx1 = x.dim().2;
    // t1[a, α, j, b'] = Σ_b env[a,α,b] y[b,j,b']
    let t1 = env
        .view()
        .into_shape((rx * ra, ry))
        .unwrap()
        .dot(&y.view().into_shape((ry, m * ry1)).unwrap())
        .into_shape((rx, ra, m, ry1))
        .unwrap();
    // t2[a, b', i, α'] = Σ_{α,j} t1[a,α,j,b'] op[α,i,j,α']
    let t1 = t1.permuted_axes([0, 3, 1, 2]);
    let t1 = t1.as_standard_layout();
    let opm = op.view().permuted_axes([0, 2, 1, 3]);
    let opm = opm.as_standard_layout();
    let t2 = t1
        .view()
        .into_shape((rx * ry1, ra * m))
        .unwrap()
        .dot(&opm.view().into_shape((ra * m, n * ra1)).unwrap())
        .into_shape((rx, ry1, n, ra1))
        .unwrap();
    // out[a', α', b'] = Σ_{a,i} conj(x[a,i,a']) t2[a,b',i,α']
    let t2 = t2.permuted_axes([0, 2, 3, 1]);
    let t2 = t2.as_standard_layout();
    let xm = x.view().into_shape((rx * n, rx1)).unwrap();
    linalg::adjoint(&xm)
        .dot(&t2.view().into_shape((rx * n, ra1 * ry1)).unwrap())
        .into_shape((rx1, ra1, ry1))
        .unwrap()
}

/// `⟨x, A y⟩` without forming `A y`.
pub fn expectation(x: &TensorTrain, a: &TTMatrix, y: &TensorTrain) -> Result<C64> {
    if a.row_sizes() != x.mode_sizes() || a.col_sizes() != y.mode_sizes() {
        return Err(Error::ModeMismatch { left: a.row_sizes(), right: x.mode_sizes() });
    }
    let mut env = Array3::from_elem((1, 1, 1), ONE);
    for ((xc, ac), yc) in x.cores().iter().zip(a.cores()).zip(y.cores()) {
        env = sandwich_left(&env, xc, ac, yc);
    }
    Ok(env[[0, 0, 0]])
}

impl TTMatrix {
    /// Diagonal operator on a single mode.
    pub fn diagonal(values: &[C64]) -> Self {
        let m = Array2::from_diag(&ndarray::Array1::from(values.to_vec()));
        Self::from_factors(&[m]).expect("diagonal factor is valid")
    }

    /// Operator whose dense matrix is `dense`, split with the given mode sizes
    /// by TT-SVD at relative tolerance `tol`.
    pub fn from_dense(dense: &Array2<C64>, rows: &[usize], cols: &[usize], tol: f64) -> Result<Self> {
        let d = rows.len();
        if cols.len() != d || dense.nrows() != rows.iter().product::<usize>() || dense.ncols() != cols.iter().product::<usize>() {
            return Err(Error::Structure("dense operator does not match the mode sizes".into()));
        }
        let mut shape = rows.to_vec();
        shape.extend(cols);
        let t = dense.clone().into_shape(ndarray::IxDyn(&shape)).unwrap();
        // interleave to (row_1, col_1, row_2, col_2, …)
        let perm: Vec<usize> = (0..d).flat_map(|k| [k, d + k]).collect();
        let t = t.permuted_axes(perm);
        let paired: Vec<usize> = rows.iter().zip(cols).map(|(&n, &m)| n * m).collect();
        let t = t.as_standard_layout().into_owned().into_shape(ndarray::IxDyn(&paired)).unwrap();
        let tt = TensorTrain::from_dense(&t, tol, None)?;
        Ok(Self::from_train(&tt, rows, cols))
    }
}
