//! Admissible truncation errors for power and subspace iteration.

use ndarray::{Array2, ArrayView1, ArrayView2};

use super::{hat_projection, SpectralReference};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};

/// Largest `‖e‖` for which `Av + e` is still strictly closer in angle to `ψ₁`
/// than the unit vector `v`: the distance from the hat vector of `Av` to the
/// line spanned by the hat vector of `v`.
///
/// `v` must have a component along `ψ₁`.
pub fn power_bound_geometric(v: &ArrayView1<C64>, av: &ArrayView1<C64>, reference: &SpectralReference) -> Result<f64> {
    let psi = reference.psi(0);
    let (vp, vq) = hat_projection(v, &psi);
    if vp == 0.0 {
        return Err(Error::Undefined("v is orthogonal to the dominant eigenvector".into()));
    }
    let nv = vp.hypot(vq);
    let (vp, vq) = (vp / nv, vq / nv);
    let (ap, aq) = hat_projection(av, &psi);
    // ‖(I − v̂v̂ᵀ) Âv‖ in the plane is the cross product with a unit v̂
    Ok((vp * aq - vq * ap).abs())
}

/// The closed-form bound `|λ₁|(1 − |λ₂/λ₁|) cos θ sin θ / (cos θ + sin θ)`
/// for a unit vector at angle `θ` to `ψ₁`. More conservative than the
/// geometric bound.
pub fn power_bound_spectral(theta: f64, lambda1: f64, lambda2: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let l1 = lambda1.abs();
    if l1 == 0.0 {
        return 0.0;
    }
    let v = l1 * (1.0 - lambda2.abs() / l1) * c * s / (c + s);
    v.max(0.0)
}

fn split(v: &ArrayView2<C64>, reference: &SpectralReference, m: usize) -> Result<(Array2<C64>, Array2<C64>)> {
    if m == 0 || m >= reference.len() {
        return Err(Error::Config(format!("split m = {m} must lie in 1..{}", reference.len())));
    }
    if v.nrows() != reference.len() {
        return Err(Error::Config(format!("vectors have length {}, operator has size {}", v.nrows(), reference.len())));
    }
    let lead = linalg::adjoint(&reference.leading(m)).dot(v);
    let trail = linalg::adjoint(&reference.trailing(m)).dot(v);
    Ok((lead, trail))
}

/// `‖T_V‖₂` with `T_V = Ψ_{>m}^H V (Ψ_{≤m}^H V)^{-1}`, the tangent of the
/// largest principal angle between `span(V)` and the leading `m`
/// eigenvectors. `V` holds `m` columns.
pub fn tan_principal_angle(v: &ArrayView2<C64>, reference: &SpectralReference, m: usize) -> Result<f64> {
    if v.ncols() != m {
        return Err(Error::Config(format!("expected {m} columns, got {}", v.ncols())));
    }
    let (lead, trail) = split(v, reference, m)?;
    let (u, s, vh) = linalg::svd(&lead.view())?;
    let smax = s[0];
    let smin = s[s.len() - 1];
    if !(smin > 1e-14 * smax) {
        return Err(Error::Undefined("Ψ_{≤m}^H V is singular, so the principal angle is undefined".into()));
    }
    // (Ψ_{≤m}^H V)^{-1} = Vh^H Σ^{-1} U^H
    let mut w = linalg::adjoint(&vh.view());
    for (j, mut col) in w.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|z| z / s[j]);
    }
    let inv = w.dot(&linalg::adjoint(&u.view()));
    linalg::spectral_norm(&trail.dot(&inv).view())
}

/// Largest principal angle in radians; see [`tan_principal_angle`].
pub fn principal_angle(v: &ArrayView2<C64>, reference: &SpectralReference, m: usize) -> Result<f64> {
    Ok(tan_principal_angle(v, reference, m)?.atan())
}

/// Largest `‖E‖₂` for which `V' = A V Φ + E` has a strictly smaller principal
/// angle than `V`, for a reference in magnitude order and invertible `Φ`:
///
/// `|λ_m| (1/κ₂(X) − |λ_{m+1}/λ_m|) ‖X‖₂ ‖Y‖₂ / ‖VΦ‖₂`
///
/// with `X = Ψ_{≤m}^H V Φ` and `Y = Ψ_{>m}^H V Φ`. Negative values mean no
/// perturbation is provably safe.
pub fn subspace_bound(v: &ArrayView2<C64>, phi: &ArrayView2<C64>, reference: &SpectralReference, m: usize) -> Result<f64> {
    if v.ncols() != m || phi.dim() != (m, m) {
        return Err(Error::Config(format!("expected {m} columns and an {m}×{m} mixing matrix")));
    }
    let vphi = v.dot(phi);
    let (x, y) = split(&vphi.view(), reference, m)?;
    let sx = linalg::singular_values(&x.view())?;
    let smin = sx[sx.len() - 1];
    if !(smin > 0.0) {
        return Err(Error::Undefined("Ψ_{≤m}^H V Φ is singular, so the principal angle is undefined".into()));
    }
    let kappa = sx[0] / smin;
    let lm = reference.eigenvalues[m - 1].norm();
    let ln = reference.eigenvalues[m].norm();
    if lm == 0.0 {
        return Ok(0.0);
    }
    let ny = linalg::spectral_norm(&y.view())?;
    let nvphi = linalg::spectral_norm(&vphi.view())?;
    Ok(lm * (1.0 / kappa - ln / lm) * sx[0] * ny / nvphi)
}
