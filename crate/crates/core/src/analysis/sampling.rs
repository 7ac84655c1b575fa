//! Monte Carlo checks of the admissible-error bounds.
//!
//! Perturbations are drawn at a fixed norm (`scale × bound`). Half of them
//! are isotropic Gaussian directions; the other half are concentrated where
//! the bounds are tight, so that an over-generous radius is actually found.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::bounds::{power_bound_geometric, power_bound_spectral, subspace_bound, tan_principal_angle};
use super::{angle_to, hat_projection, SpectralReference};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Geometric,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafetyReport {
    pub bound: f64,
    /// Perturbation norm as a multiple of `bound`.
    pub scale: f64,
    pub samples: usize,
    /// Samples whose angle did not decrease.
    pub violations: usize,
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Array1<C64> {
    Array1::from_shape_simple_fn(n, || gaussian(rng))
}

fn unit(x: Array1<C64>) -> Array1<C64> {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    x.mapv(|z| z / n)
}

/// Random dense Hermitian matrix `(G + G^H) / 2` with complex Gaussian `G`.
pub fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_simple_fn((n, n), || gaussian(&mut rng));
    linalg::hermitian_part(&g.view())
}

/// Perturbs `A v` with `samples` vectors of norm `scale × bound` and counts
/// how often the angle to `ψ₁` fails to decrease. `v` is normalized first
/// and `reference` must be in magnitude order.
pub fn power_safety(
    a: &ArrayView2<C64>,
    reference: &SpectralReference,
    v: &ArrayView1<C64>,
    kind: BoundKind,
    scale: f64,
    samples: usize,
    seed: u64,
) -> Result<SafetyReport> {
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(nv > 0.0) {
        return Err(Error::Config("start vector must be nonzero".into()));
    }
    let v = v.mapv(|z| z / nv);
    let av = a.dot(&v);
    let psi = reference.psi(0);
    let before = angle_to(&v.view(), &psi);
    let bound = match kind {
        BoundKind::Geometric => power_bound_geometric(&v.view(), &av.view(), reference)?,
        BoundKind::Spectral => power_bound_spectral(before, reference.eigenvalues[0].norm(), reference.eigenvalues[1].norm()),
    };
    let radius = scale * bound;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // the plane of the hat picture: ψ₁ aligned with the phase of ⟨ψ₁, Av⟩,
    // and the unit direction of the part of Av orthogonal to ψ₁
    let c: C64 = psi.iter().zip(&av).map(|(p, q)| p.conj() * q).sum();
    let phase = if c.norm() > 0.0 { c / c.norm() } else { C64::new(1.0, 0.0) };
    let along = psi.mapv(|z| z * phase);
    let (_, perp_norm) = hat_projection(&av.view(), &psi);
    let across = if perp_norm > 1e-300 {
        unit(&av - &psi.mapv(|z| z * c))
    } else {
        let r = random_vector(av.len(), &mut rng);
        let rc: C64 = psi.iter().zip(&r).map(|(p, q)| p.conj() * q).sum();
        unit(&r - &psi.mapv(|z| z * rc))
    };

    let mut violations = 0;
    for s in 0..samples {
        let e = if s % 2 == 0 {
            unit(random_vector(av.len(), &mut rng))
        } else {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            &along.mapv(|z| z * t.cos()) + &across.mapv(|z| z * t.sin())
        };
        let z = &av + &e.mapv(|x| x * radius);
        if angle_to(&z.view(), &psi) >= before {
            violations += 1;
        }
    }
    Ok(SafetyReport { bound, scale, samples, violations })
}

/// Perturbs `A V Φ` with `n × m` matrices of spectral norm `scale × bound`
/// and counts how often the largest principal angle to the leading `m`
/// eigenvectors fails to decrease. Nothing is sampled when the bound is not
/// positive.
pub fn subspace_safety(
    a: &ArrayView2<C64>,
    reference: &SpectralReference,
    v: &ArrayView2<C64>,
    phi: &ArrayView2<C64>,
    scale: f64,
    samples: usize,
    seed: u64,
) -> Result<SafetyReport> {
    let m = v.ncols();
    let bound = subspace_bound(v, phi, reference, m)?;
    if !(bound > 0.0) {
        return Ok(SafetyReport { bound, scale, samples: 0, violations: 0 });
    }
    let before = tan_principal_angle(v, reference, m)?;
    let avphi = a.dot(v).dot(phi);
    let radius = scale * bound;
    let n = v.nrows();
    let trailing = reference.trailing(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for s in 0..samples {
        let e = if s % 2 == 0 {
            Array2::from_shape_simple_fn((n, m), || gaussian(&mut rng))
        } else {
            // rank one, pointing out of the target subspace
            let left = unit(trailing.dot(&random_vector(trailing.ncols(), &mut rng)));
            let right = unit(random_vector(m, &mut rng));
            Array2::from_shape_fn((n, m), |(i, j)| left[i] * right[j].conj())
        };
        let e = &e * C64::new(radius / linalg::spectral_norm(&e.view())?, 0.0);
        let moved = &avphi + &e;
        match tan_principal_angle(&moved.view(), reference, m) {
            Ok(after) if after < before => {}
            _ => violations += 1,
        }
    }
    Ok(SafetyReport { bound, scale, samples, violations })
}
