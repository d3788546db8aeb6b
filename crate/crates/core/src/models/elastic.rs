//! Thermo-elastic materials: no internal variables, no dissipative stress.

use crate::error::{Error, Result};
use crate::heat;
use crate::laws::MaterialModel;
use crate::state::ThermoState;
use crate::tensor3::{DefGrad, Mat3, Vec3};

/// A perfect gas: free energy `-r Theta ln(det F) - c Theta ln Theta`,
/// paired with the Fourier heat flux. The Cauchy stress is a pure pressure
/// and the internal dissipation is identically zero.
#[derive(Debug, Clone, Copy)]
pub struct PerfectGas {
    pub r: f64,
    /// Heat-capacity coefficient of the thermal part `-c Theta ln Theta`.
    pub c: f64,
    pub conductivity: f64,
}

impl PerfectGas {
    pub fn new(r: f64) -> Result<PerfectGas> {
        if !(r > 0.0) {
            return Err(Error::InvalidParams(format!(
                "perfect gas requires r > 0 (got {r})"
            )));
        }
        Ok(PerfectGas {
            r,
            c: 1.0,
            conductivity: 1.0,
        })
    }
}

impl MaterialModel for PerfectGas {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, f: &DefGrad, theta: f64, _xi: &[f64]) -> f64 {
        -self.r * theta * f.det().ln() - self.c * theta * theta.ln()
    }

    fn dissipative_stress(&self, _state: &ThermoState) -> Mat3 {
        Mat3::ZERO
    }

    fn flow_rule(&self, _state: &ThermoState) -> Vec<f64> {
        Vec::new()
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, f: &DefGrad, theta: f64, _xi: &[f64]) -> Option<Mat3> {
        // d(ln det F)/dF = F^{-T}.
        Some(f.inverse().transpose() * (-self.r * theta))
    }

    fn free_energy_d_theta(&self, f: &DefGrad, theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(-self.r * f.det().ln() - self.c * (theta.ln() + 1.0))
    }

    fn free_energy_d_xi(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Vec<f64>> {
        Some(Vec::new())
    }
}

/// Constructs a perfect gas with unit heat capacity and conductivity.
pub fn perfect_gas(r: f64) -> Result<PerfectGas> {
    PerfectGas::new(r)
}
