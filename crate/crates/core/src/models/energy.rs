//! Stored energy functions for the elastic parts of the models.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laws::fd_step;
use crate::tensor3::{Mat3, Sym3};

/// A frame-indifferent nonlinearly elastic stored energy `W(F)`.
///
/// Implementations must satisfy `W(RF) = W(F)` for rotations `R`
/// (equivalently, depend on `F` only through `F^T F`); the randomized
/// checkers exercise this. The analytic gradient is optional.
pub trait StoredEnergy {
    fn value(&self, f: &Mat3) -> f64;

    fn gradient(&self, _f: &Mat3) -> Option<Mat3> {
        None
    }
}

/// Shared handle so that models embedding an energy stay cloneable.
pub type SharedEnergy = Arc<dyn StoredEnergy + Send + Sync>;

/// `dW/dF` by the analytic law or central differences per entry.
pub fn stored_energy_gradient(w: &dyn StoredEnergy, f: &Mat3) -> Mat3 {
    if let Some(g) = w.gradient(f) {
        return g;
    }
    let mut grad = Mat3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let h = fd_step(f.0[i][j]);
            let mut fp = *f;
            fp.0[i][j] += h;
            let mut fm = *f;
            fm.0[i][j] -= h;
            grad.0[i][j] = (w.value(&fp) - w.value(&fm)) / (2.0 * h);
        }
    }
    grad
}

/// Saint Venant-Kirchhoff stored energy:
/// `W(F) = (lambda/2) (tr E)^2 + mu tr(E^2)` with `E = (F^T F - I)/2`.
///
/// Natural at the identity: `W(I) = 0`, `dW/dF(I) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct SaintVenantKirchhoff {
    pub lambda: f64,
    pub mu: f64,
}

impl SaintVenantKirchhoff {
    fn green_strain(f: &Mat3) -> Sym3 {
        let c = f.transpose() * *f;
        Sym3::from_mat_symmetrized(&((c - Mat3::identity()) * 0.5))
    }
}

impl StoredEnergy for SaintVenantKirchhoff {
    fn value(&self, f: &Mat3) -> f64 {
        let e = Self::green_strain(f);
        let tr = e.trace();
        0.5 * self.lambda * tr * tr + self.mu * e.ddot(&e)
    }

    fn gradient(&self, f: &Mat3) -> Option<Mat3> {
        let e = Self::green_strain(f);
        let second_piola =
            Mat3::identity() * (self.lambda * e.trace()) + e.to_mat() * (2.0 * self.mu);
        Some(*f * second_piola)
    }
}

/// Builds a Saint Venant-Kirchhoff energy, checking `mu > 0` and
/// `3 lambda + 2 mu > 0` (positive bulk response).
pub fn stvenant_kirchhoff(lambda: f64, mu: f64) -> Result<SaintVenantKirchhoff> {
    if !(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0) {
        return Err(Error::InvalidParams(format!(
            "Saint Venant-Kirchhoff requires mu > 0 and 3 lambda + 2 mu > 0 (lambda = {lambda}, mu = {mu})"
        )));
    }
    Ok(SaintVenantKirchhoff { lambda, mu })
}
