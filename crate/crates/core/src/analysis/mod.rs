//! Dense diagnostics for the truncation-error bounds.
//!
//! Everything here needs true eigenvectors, so it works on dense matrices at
//! desk scale; trains are lifted with [`TensorTrain::to_vector`]. Projectors
//! use conjugate transposes throughout.

pub mod adaptive;
pub mod bounds;
pub mod sampling;

pub use adaptive::{adaptive_power, AdaptiveStep};
pub use bounds::{power_bound_geometric, power_bound_spectral, principal_angle, subspace_bound, tan_principal_angle};
pub use sampling::{power_safety, random_hermitian, subspace_safety, BoundKind, SafetyReport};

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, C64};
use crate::mpo::TTMatrix;
use crate::tt::TensorTrain;

/// How eigenpairs are ordered in a reference.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// Ascending real part.
    #[default]
    Algebraic,
    /// Descending modulus.
    Magnitude,
}

/// Full eigendecomposition of a dense operator.
#[derive(Clone, Debug)]
pub struct SpectralReference {
    pub eigenvalues: Vec<C64>,
    /// Eigenvectors as columns, in the same order.
    pub eigenvectors: Array2<C64>,
    pub ordering: Ordering,
    pub hermitian: bool,
}

impl SpectralReference {
    pub fn from_dense(a: &ArrayView2<C64>, ordering: Ordering) -> Result<Self> {
        let hermitian = linalg::hermitian_defect(a) < 1e-12;
        let (values, vectors) = if hermitian {
            let (w, v) = if a.iter().all(|z| z.im == 0.0) {
                let (w, v) = linalg::eigh_real(&a.mapv(|z| z.re).view())?;
                (w, linalg::to_complex(&v.view()))
            } else {
                linalg::eigh(&linalg::hermitian_part(a).view())?
            };
            (w.mapv(|x| C64::new(x, 0.0)), v)
        } else {
            linalg::eig(a)?
        };
        let order = sort_order(values.as_slice().unwrap(), ordering);
        let mut eigenvectors = Array2::zeros(vectors.raw_dim());
        for (c, &k) in order.iter().enumerate() {
            let col = vectors.column(k);
            let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            eigenvectors.column_mut(c).assign(&col.mapv(|z| z / nrm));
        }
        Ok(Self { eigenvalues: order.iter().map(|&k| values[k]).collect(), eigenvectors, ordering, hermitian })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Real parts of the eigenvalues.
    pub fn real(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn psi(&self, j: usize) -> ArrayView1<'_, C64> {
        self.eigenvectors.column(j)
    }

    /// `Ψ_{≤m}`.
    pub fn leading(&self, m: usize) -> ArrayView2<'_, C64> {
        self.eigenvectors.slice(s![.., ..m])
    }

    /// `Ψ_{>m}`.
    pub fn trailing(&self, m: usize) -> ArrayView2<'_, C64> {
        self.eigenvectors.slice(s![.., m..])
    }
}

fn sort_order(values: &[C64], ordering: Ordering) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    match ordering {
        Ordering::Algebraic => order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re)),
        Ordering::Magnitude => order.sort_by(|&i, &j| values[j].norm().total_cmp(&values[i].norm())),
    }
    order
}

/// Dense eigendecomposition of an operator, refusing beyond the dense limit.
pub fn dense_reference(a: &TTMatrix, ordering: Ordering) -> Result<SpectralReference> {
    SpectralReference::from_dense(&a.to_dense()?.view(), ordering)
}

/// Eigenvalues only; much cheaper than [`dense_reference`] for large
/// Hermitian operators.
pub fn dense_eigenvalues(a: &TTMatrix, ordering: Ordering) -> Result<Vec<C64>> {
    let dense = a.to_dense()?;
    let values: Vec<C64> = if linalg::hermitian_defect(&dense.view()) < 1e-12 {
        let w = if dense.iter().all(|z| z.im == 0.0) {
            linalg::eigvalsh_real(&dense.mapv(|z| z.re).view())?
        } else {
            linalg::eigvalsh(&linalg::hermitian_part(&dense.view()).view())?
        };
        w.iter().map(|&x| C64::new(x, 0.0)).collect()
    } else {
        linalg::eig(&dense.view())?.0.to_vec()
    };
    Ok(sort_order(&values, ordering).into_iter().map(|k| values[k]).collect())
}

fn norm(x: &ArrayView1<C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(‖𝒫x‖, ‖𝒫_⊥x‖)` with `𝒫 = ψψ^H` for a unit vector `ψ`.
pub fn hat_projection(x: &ArrayView1<C64>, psi: &ArrayView1<C64>) -> (f64, f64) {
    let c: C64 = psi.iter().zip(x).map(|(p, q)| p.conj() * q).sum();
    let par = c.norm();
    let total = norm(x);
    // the orthogonal part is formed explicitly to keep small angles accurate
    let perp: f64 = x.iter().zip(psi).map(|(q, p)| (q - c * p).norm_sqr()).sum::<f64>().sqrt();
    debug_assert!((par * par + perp * perp - total * total).abs() <= 1e-10 * total * total.max(1.0));
    (par, perp)
}

/// `∠(x, ψ)` in radians.
pub fn angle_to(x: &ArrayView1<C64>, psi: &ArrayView1<C64>) -> f64 {
    let (par, perp) = hat_projection(x, psi);
    perp.atan2(par)
}

/// Dense vector of a train, for the diagnostics in this module.
pub fn lift(v: &TensorTrain) -> Result<Array1<C64>> {
    v.to_vector()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualConvention {
    /// `‖Av − λv‖`.
    #[default]
    Absolute,
    /// `‖Av / ⟨v, Av⟩ − v‖`.
    Normalized,
}

/// Residual of a unit vector with an exact (untruncated) matvec.
pub fn residual_norm(a: &TTMatrix, v: &TensorTrain, lambda: C64, convention: ResidualConvention) -> Result<f64> {
    let av = a.apply(v)?;
    match convention {
        ResidualConvention::Absolute => Ok(av.add(&v.scale(-lambda))?.norm()),
        ResidualConvention::Normalized => {
            let rq = v.inner(&av)?;
            Ok(av.scale(C64::new(1.0, 0.0) / rq).add(&v.scale(C64::new(-1.0, 0.0)))?.norm())
        }
    }
}
