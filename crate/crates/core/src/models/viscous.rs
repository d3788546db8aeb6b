//! Kinematically viscous materials: Kelvin-Voigt solids, Newtonian and
//! Reiner-Rivlin fluids, plus the two pinned counterexample laws used to
//! anchor the checkers' sensitivity.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::heat;
use crate::laws::{newtonian_dissipative_stress, MaterialModel};
use crate::models::energy::{stored_energy_gradient, SharedEnergy};
use crate::state::ThermoState;
use crate::tensor3::{cofactor, sym_skew, DefGrad, Mat3, Sym3, Vec3};

/// Nonlinear 3d Kelvin-Voigt solid: elastic stored energy in parallel with
/// the rate stress `T_Rd = nu Sym(H F^{-1}) F^{-T}`.
#[derive(Clone)]
pub struct KelvinVoigt3d {
    pub w: SharedEnergy,
    pub nu: f64,
    pub conductivity: f64,
}

impl KelvinVoigt3d {
    pub fn new(w: SharedEnergy, nu: f64) -> Result<KelvinVoigt3d> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Kelvin-Voigt requires nu > 0 (got {nu})"
            )));
        }
        Ok(KelvinVoigt3d {
            w,
            nu,
            conductivity: 1.0,
        })
    }
}

impl MaterialModel for KelvinVoigt3d {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, f: &DefGrad, _theta: f64, _xi: &[f64]) -> f64 {
        self.w.value(f.as_mat())
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        let f_inv = state.f.inverse();
        let sym = sym_skew(&(state.h * f_inv)).0;
        sym.to_mat() * f_inv.transpose() * self.nu
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        Some(stored_energy_gradient(self.w.as_ref(), f.as_mat()))
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// Builds a Kelvin-Voigt solid from a stored energy and a viscosity.
pub fn kelvin_voigt3d(w: SharedEnergy, nu: f64) -> Result<KelvinVoigt3d> {
    KelvinVoigt3d::new(w, nu)
}

/// Compressible Newtonian fluid: `sigma = 2 nu d` in the Eulerian
/// description, i.e. `T_Rd = nu det F (H C^{-1} + F^{-T} H^T F^{-T})`,
/// with a purely thermal free energy.
#[derive(Debug, Clone, Copy)]
pub struct Newtonian {
    pub nu: f64,
    pub conductivity: f64,
}

impl Newtonian {
    pub fn new(nu: f64) -> Result<Newtonian> {
        if !(nu > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Newtonian fluid requires nu > 0 (got {nu})"
            )));
        }
        Ok(Newtonian {
            nu,
            conductivity: 1.0,
        })
    }
}

impl MaterialModel for Newtonian {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, _f: &DefGrad, theta: f64, _xi: &[f64]) -> f64 {
        -theta * theta.ln()
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        newtonian_dissipative_stress(&state.f, &state.h, self.nu)
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        Some(Mat3::ZERO)
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(-(theta.ln() + 1.0))
    }
}

pub fn newtonian(nu: f64) -> Result<Newtonian> {
    Newtonian::new(nu)
}

type BetaFn = Arc<dyn Fn(f64, (f64, f64, f64), f64) -> f64 + Send + Sync>;

/// Compressible Reiner-Rivlin fluid. The Eulerian Cauchy stress is
/// `sigma = beta_0 I + beta_1 d + beta_2 d^2` with scalar coefficients that
/// are arbitrary functions of `(rho, iota(d), theta)`.
#[derive(Clone)]
pub struct ReinerRivlin {
    pub beta0: BetaFn,
    pub beta1: BetaFn,
    pub beta2: BetaFn,
    /// Reference density used to map `det F` to the Eulerian density.
    pub density: f64,
    pub conductivity: f64,
}

impl ReinerRivlin {
    /// Eulerian constitutive law `sigma(rho, d, theta)`.
    pub fn cauchy(&self, rho: f64, d: &Sym3, theta: f64) -> Mat3 {
        let iota = crate::tensor3::principal_invariants(d);
        let dm = d.to_mat();
        Mat3::identity() * (self.beta0)(rho, iota, theta)
            + dm * (self.beta1)(rho, iota, theta)
            + dm * dm * (self.beta2)(rho, iota, theta)
    }
}

impl MaterialModel for ReinerRivlin {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, _f: &DefGrad, theta: f64, _xi: &[f64]) -> f64 {
        -theta * theta.ln()
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        let rho = self.density / state.f.det();
        let d = sym_skew(&(state.h * state.f.inverse())).0;
        self.cauchy(rho, &d, state.theta) * cofactor(state.f.as_mat())
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        Some(Mat3::ZERO)
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(-(theta.ln() + 1.0))
    }
}

/// Builds a Reiner-Rivlin fluid from its three coefficient functions of
/// `(rho, iota(d), theta)`.
pub fn reiner_rivlin(
    beta0: impl Fn(f64, (f64, f64, f64), f64) -> f64 + Send + Sync + 'static,
    beta1: impl Fn(f64, (f64, f64, f64), f64) -> f64 + Send + Sync + 'static,
    beta2: impl Fn(f64, (f64, f64, f64), f64) -> f64 + Send + Sync + 'static,
) -> ReinerRivlin {
    ReinerRivlin {
        beta0: Arc::new(beta0),
        beta1: Arc::new(beta1),
        beta2: Arc::new(beta2),
        density: 1.0,
        conductivity: 1.0,
    }
}

/// Pinned counterexample: `T_Rd(F, H) = H`.
///
/// Satisfies the rotation condition of frame-indifference and the mechanical
/// dissipation inequality (`H : H >= 0`) but fails the spin-reduction
/// condition, so it is not frame-indifferent.
#[derive(Debug, Clone, Copy)]
pub struct BrokenRateLaw;

impl MaterialModel for BrokenRateLaw {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> f64 {
        0.0
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        state.h
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn free_energy_d_f(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        Some(Mat3::ZERO)
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// Pinned counterexample: `T_Rd(F, H) = F W_0` with `W_0` nonzero and
/// skew-symmetric.
///
/// Frame-indifferent, but its Cauchy stress is nonzero and skew-symmetric;
/// it violates both the stress-symmetry condition and the mechanical
/// dissipation inequality.
#[derive(Debug, Clone, Copy)]
pub struct SkewStressLaw {
    pub w0: Mat3,
}

impl SkewStressLaw {
    pub fn standard() -> SkewStressLaw {
        let mut w0 = Mat3::ZERO;
        w0.0[0][1] = 1.0;
        w0.0[1][0] = -1.0;
        SkewStressLaw { w0 }
    }
}

impl MaterialModel for SkewStressLaw {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> f64 {
        0.0
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        *state.f.as_mat() * self.w0
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn free_energy_d_f(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        Some(Mat3::ZERO)
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}
