//! Heat-flux constitutive laws: the classical Fourier law, the general
//! frame-indifferent isotropic representation, the fluid representation and
//! the diffusion-potential constructor.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor3::{
    heat_signature, principal_invariants, sym_eigen, DefGrad, Sym3, Vec3, DEFAULT_DISTINCTNESS_TOL,
};

/// Classical Fourier law in the Lagrangian description:
/// `Q(F, G) = -k (F^T F)^{-1} G`, the pullback of `q(g) = -k g`.
///
/// Satisfies `Q . G = -k ||F^{-T} G||^2 <= 0`.
pub fn fourier_flux(f: &DefGrad, g: &Vec3, k: f64) -> Vec3 {
    let c_inv = (f.transpose() * *f.as_mat()).inverse();
    -(c_inv.mul_vec(g)) * k
}

/// The invariant arguments an isotropic flux coefficient receives:
/// the principal invariants of `B`, the temperature and the joint
/// invariants of `(B, K)` in the fixed order
/// `(||K||^2, ||BK||^2, K . BK, s)`.
#[derive(Debug, Clone, Copy)]
pub struct IsotropicInvariants {
    /// `(tr B, tr cof B, det B)`.
    pub b: (f64, f64, f64),
    pub theta: f64,
    pub k_norm2: f64,
    pub bk_norm2: f64,
    pub k_dot_bk: f64,
    /// Orientation sign `s(B, K)` in `{-1, 0, 1}`.
    pub s: i8,
}

type CoefficientFn = Arc<dyn Fn(&IsotropicInvariants) -> f64 + Send + Sync>;

/// Scalar coefficients `alpha_0, alpha_1, alpha_2` of the general isotropic
/// heat flux `alpha_0 K + alpha_1 BK + alpha_2 (K x BK)`. The functions are
/// arbitrary; they are treated as black boxes and must be reentrant.
#[derive(Clone)]
pub struct IsotropicFluxCoefficients {
    pub alpha0: CoefficientFn,
    pub alpha1: CoefficientFn,
    pub alpha2: CoefficientFn,
}

impl IsotropicFluxCoefficients {
    pub fn new(
        alpha0: impl Fn(&IsotropicInvariants) -> f64 + Send + Sync + 'static,
        alpha1: impl Fn(&IsotropicInvariants) -> f64 + Send + Sync + 'static,
        alpha2: impl Fn(&IsotropicInvariants) -> f64 + Send + Sync + 'static,
    ) -> Self {
        IsotropicFluxCoefficients {
            alpha0: Arc::new(alpha0),
            alpha1: Arc::new(alpha1),
            alpha2: Arc::new(alpha2),
        }
    }

    pub fn constant(a0: f64, a1: f64, a2: f64) -> Self {
        Self::new(move |_| a0, move |_| a1, move |_| a2)
    }

    /// Eulerian Fourier law `-k K` as an isotropic flux.
    pub fn fourier(k: f64) -> Self {
        Self::constant(-k, 0.0, 0.0)
    }
}

fn isotropic_invariants(b: &Sym3, theta: f64, k: &Vec3) -> Result<IsotropicInvariants> {
    let (evals, _) = sym_eigen(b);
    if evals[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let bk = b.mul_vec(k);
    Ok(IsotropicInvariants {
        b: principal_invariants(b),
        theta,
        k_norm2: k.dot(k),
        bk_norm2: bk.dot(&bk),
        k_dot_bk: k.dot(&bk),
        s: heat_signature(b, k, DEFAULT_DISTINCTNESS_TOL)?,
    })
}

/// General frame-indifferent isotropic heat flux (Eulerian flux in
/// Lagrangian variables, `B = F F^T`, `K = F^{-T} G`):
/// `q = alpha_0 K + alpha_1 BK + alpha_2 (K x BK)`.
pub fn isotropic_flux(
    coeffs: &IsotropicFluxCoefficients,
    b: &Sym3,
    theta: f64,
    k: &Vec3,
) -> Result<Vec3> {
    let inv = isotropic_invariants(b, theta, k)?;
    let bk = b.mul_vec(k);
    let a0 = (coeffs.alpha0)(&inv);
    let a1 = (coeffs.alpha1)(&inv);
    let a2 = (coeffs.alpha2)(&inv);
    Ok(*k * a0 + bk * a1 + k.cross(&bk) * a2)
}

/// Thermal Clausius-Planck margin of an isotropic flux:
/// `alpha_0 ||K||^2 + alpha_1 (BK . K)`.
///
/// Its nonpositivity for all arguments is exactly the thermal part of the
/// second principle; the `alpha_2` term is orthogonal to `K` and never
/// contributes.
pub fn isotropic_flux_cp_margin(
    coeffs: &IsotropicFluxCoefficients,
    b: &Sym3,
    theta: f64,
    k: &Vec3,
) -> Result<f64> {
    let inv = isotropic_invariants(b, theta, k)?;
    Ok((coeffs.alpha0)(&inv) * inv.k_norm2 + (coeffs.alpha1)(&inv) * inv.k_dot_bk)
}

/// Scalar conductivity of a thermally fluid heat flux, as a function of
/// `(det F, Theta, ||F^{-T} G||)`. Nonnegativity is required exactly when
/// Clausius-Planck compliance is claimed.
#[derive(Clone)]
pub struct FluidConductivity(pub Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>);

impl FluidConductivity {
    pub fn new(k: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FluidConductivity(Arc::new(k))
    }

    pub fn constant(k: f64) -> Self {
        Self::new(move |_, _, _| k)
    }
}

/// Thermally fluid heat flux (every fluid, frame-indifferent law has this
/// nonlinear-Fourier form):
/// `q_L(F, Theta, G) = -k(det F, Theta, ||F^{-T} G||) F^{-T} G`.
pub fn fluid_flux(cond: &FluidConductivity, f: &DefGrad, theta: f64, g: &Vec3) -> Vec3 {
    let k_vec = f.inverse().transpose().mul_vec(g);
    -k_vec * (cond.0)(f.det(), theta, k_vec.norm())
}

/// Referential (Piola-transformed) version of [`fluid_flux`]:
/// `Q = (cof F)^T q_L`.
pub fn fluid_flux_referential(cond: &FluidConductivity, f: &DefGrad, theta: f64, g: &Vec3) -> Vec3 {
    crate::tensor3::cofactor(f.as_mat())
        .transpose()
        .mul_vec(&fluid_flux(cond, f, theta, g))
}

/// Heat flux generated by a diffusion potential: `Q = dP_diff/dG` (central
/// differences). For a potential that is concave in `G` and vanishes at
/// `G = 0`, the resulting flux satisfies `Q . G <= 0`.
pub fn flux_from_diffusion_potential(
    pdiff: &dyn Fn(&DefGrad, f64, &Vec3) -> f64,
    f: &DefGrad,
    theta: f64,
    g: &Vec3,
) -> Vec3 {
    let mut out = Vec3::ZERO;
    for i in 0..3 {
        let h = crate::laws::fd_step(g[i]);
        let mut gp = *g;
        gp[i] += h;
        let mut gm = *g;
        gm[i] -= h;
        out[i] = (pdiff(f, theta, &gp) - pdiff(f, theta, &gm)) / (2.0 * h);
    }
    out
}
