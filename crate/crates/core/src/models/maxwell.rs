//! The nonlinear 3d Maxwell family: multiplicative internal strain with a
//! relaxation flow rule, in solid and fluid variants, plus the generalized
//! (multi-branch) version.

use crate::error::{Error, Result};
use crate::heat;
use crate::laws::{MaterialModel, XiKind};
use crate::models::energy::{stored_energy_gradient, SharedEnergy};
use crate::state::ThermoState;
use crate::tensor3::{DefGrad, Mat3, Vec3};

/// Flow-rule choice for [`Maxwell3d`].
///
/// `Solid` uses the quadratic internal potential, giving
/// `K = kappa F_i^{-T} F^T W'(F F_i^{-1}) F_i^{-T}`; its symmetry group is
/// the rotations. `Fluid` multiplies by `F^T F` on the right (the potential
/// depends on the reference configuration only through `Lambda F^T`), making
/// every unimodular matrix a material symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxwellVariant {
    Solid,
    Fluid,
}

/// Visco-elastic material with free energy `W(F F_i^{-1})`, no dissipative
/// stress and the internal strain `F_i` as flow-rule internal variable
/// (stored flattened row-major, 9 entries).
#[derive(Clone)]
pub struct Maxwell3d {
    pub w: SharedEnergy,
    pub kappa: f64,
    pub variant: MaxwellVariant,
    pub conductivity: f64,
}

impl Maxwell3d {
    pub fn new(w: SharedEnergy, kappa: f64, variant: MaxwellVariant) -> Result<Maxwell3d> {
        if !(kappa >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "Maxwell 3d requires kappa >= 0 (got {kappa})"
            )));
        }
        Ok(Maxwell3d {
            w,
            kappa,
            variant,
            conductivity: 1.0,
        })
    }

    pub fn internal_strain(xi: &[f64]) -> Mat3 {
        Mat3::from_flat(xi)
    }

    /// `-dA/dF_i = F_i^{-T} F^T W'(F F_i^{-1}) F_i^{-T}`: the thermodynamic
    /// force driving the internal strain.
    fn driving_force(&self, f: &Mat3, f_i: &Mat3) -> Mat3 {
        let f_i_inv = f_i.inverse();
        let f_i_inv_t = f_i_inv.transpose();
        let f_e = *f * f_i_inv;
        let w_prime = stored_energy_gradient(self.w.as_ref(), &f_e);
        f_i_inv_t * f.transpose() * w_prime * f_i_inv_t
    }

    /// Flow rule as a matrix, before flattening.
    pub fn flow_matrix(&self, f: &Mat3, f_i: &Mat3) -> Mat3 {
        let solid = self.driving_force(f, f_i) * self.kappa;
        match self.variant {
            MaxwellVariant::Solid => solid,
            MaxwellVariant::Fluid => solid * (f.transpose() * *f),
        }
    }
}

impl MaterialModel for Maxwell3d {
    fn dims(&self) -> (usize, usize) {
        (9, 0)
    }

    fn free_energy(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> f64 {
        let f_i = Self::internal_strain(xi);
        self.w.value(&(*f.as_mat() * f_i.inverse()))
    }

    fn dissipative_stress(&self, _state: &ThermoState) -> Mat3 {
        Mat3::ZERO
    }

    fn flow_rule(&self, state: &ThermoState) -> Vec<f64> {
        let f_i = Self::internal_strain(&state.xi);
        self.flow_matrix(state.f.as_mat(), &f_i).to_flat().to_vec()
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> Option<Mat3> {
        let f_i_inv = Self::internal_strain(xi).inverse();
        let w_prime = stored_energy_gradient(self.w.as_ref(), &(*f.as_mat() * f_i_inv));
        Some(w_prime * f_i_inv.transpose())
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(0.0)
    }

    fn free_energy_d_xi(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> Option<Vec<f64>> {
        let f_i = Self::internal_strain(xi);
        Some((-self.driving_force(f.as_mat(), &f_i)).to_flat().to_vec())
    }

    fn xi_kind(&self) -> XiKind {
        XiKind::DefGradBlocks(1)
    }
}

/// Builds a 3d Maxwell model from a stored energy, a mobility and a variant.
pub fn maxwell3d(w: SharedEnergy, kappa: f64, variant: MaxwellVariant) -> Result<Maxwell3d> {
    Maxwell3d::new(w, kappa, variant)
}

/// Generalized Maxwell material: an equilibrium branch `W_0(F)` in parallel
/// with `n` relaxing branches `W_k(F F_{i,k}^{-1})`, each with its own
/// internal strain and a decoupled solid-type flow rule.
#[derive(Clone)]
pub struct GeneralizedMaxwell3d {
    pub w0: SharedEnergy,
    pub branches: Vec<SharedEnergy>,
    pub kappa: f64,
    pub conductivity: f64,
}

impl GeneralizedMaxwell3d {
    pub fn new(
        w0: SharedEnergy,
        branches: Vec<SharedEnergy>,
        kappa: f64,
    ) -> Result<GeneralizedMaxwell3d> {
        if branches.is_empty() {
            return Err(Error::InvalidParams(
                "generalized Maxwell needs at least one relaxing branch".into(),
            ));
        }
        if !(kappa > 0.0) {
            return Err(Error::InvalidParams(format!(
                "generalized Maxwell requires kappa > 0 (got {kappa})"
            )));
        }
        Ok(GeneralizedMaxwell3d {
            w0,
            branches,
            kappa,
            conductivity: 1.0,
        })
    }

    fn branch_strain(xi: &[f64], k: usize) -> Mat3 {
        Mat3::from_flat(&xi[9 * k..9 * (k + 1)])
    }

    fn branch_force(&self, k: usize, f: &Mat3, f_ik: &Mat3) -> Mat3 {
        let inv = f_ik.inverse();
        let inv_t = inv.transpose();
        let w_prime = stored_energy_gradient(self.branches[k].as_ref(), &(*f * inv));
        inv_t * f.transpose() * w_prime * inv_t
    }
}

impl MaterialModel for GeneralizedMaxwell3d {
    fn dims(&self) -> (usize, usize) {
        (9 * self.branches.len(), 0)
    }

    fn free_energy(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> f64 {
        let mut a = self.w0.value(f.as_mat());
        for k in 0..self.branches.len() {
            let f_ik = Self::branch_strain(xi, k);
            a += self.branches[k].value(&(*f.as_mat() * f_ik.inverse()));
        }
        a
    }

    fn dissipative_stress(&self, _state: &ThermoState) -> Mat3 {
        Mat3::ZERO
    }

    fn flow_rule(&self, state: &ThermoState) -> Vec<f64> {
        let mut out = Vec::with_capacity(9 * self.branches.len());
        for k in 0..self.branches.len() {
            let f_ik = Self::branch_strain(&state.xi, k);
            let flow = self.branch_force(k, state.f.as_mat(), &f_ik) * self.kappa;
            out.extend_from_slice(&flow.to_flat());
        }
        out
    }

    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, self.conductivity)
    }

    fn free_energy_d_f(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> Option<Mat3> {
        let mut g = stored_energy_gradient(self.w0.as_ref(), f.as_mat());
        for k in 0..self.branches.len() {
            let inv = Self::branch_strain(xi, k).inverse();
            let w_prime = stored_energy_gradient(self.branches[k].as_ref(), &(*f.as_mat() * inv));
            g += w_prime * inv.transpose();
        }
        Some(g)
    }

    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        Some(0.0)
    }

    fn free_energy_d_xi(&self, f: &DefGrad, _theta: f64, xi: &[f64]) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(9 * self.branches.len());
        for k in 0..self.branches.len() {
            let f_ik = Self::branch_strain(xi, k);
            let grad = -self.branch_force(k, f.as_mat(), &f_ik);
            out.extend_from_slice(&grad.to_flat());
        }
        Some(out)
    }

    fn xi_kind(&self) -> XiKind {
        XiKind::DefGradBlocks(self.branches.len())
    }
}

/// Builds a generalized Maxwell material with a common mobility.
pub fn generalized_maxwell3d(
    w0: SharedEnergy,
    branches: Vec<SharedEnergy>,
    kappa: f64,
) -> Result<GeneralizedMaxwell3d> {
    GeneralizedMaxwell3d::new(w0, branches, kappa)
}
