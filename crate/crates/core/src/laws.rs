//! The constitutive framework: free energy, stress decomposition, internal
//! dissipation, flow rules and dissipation-potential constructors.
//!
//! A material is specified by three master constitutive laws (free energy,
//! dissipative stress, heat flux) plus a flow rule for its internal variables.
//! Entropy and thermoelastic stress are derived from the free energy; the
//! dissipative pair may instead be generated from a convex dissipation
//! potential, in which case the mechanical dissipation inequality holds by
//! construction.

use crate::heat;
use crate::state::ThermoState;
use crate::tensor3::{cofactor, DefGrad, Mat3, Vec3};

/// Central-difference step for an entry of magnitude `x`:
/// `eps^(1/3) * (1 + |x|)`.
pub fn fd_step(x: f64) -> f64 {
    const CBRT_EPS: f64 = 6.055454452393343e-6; // (f64::EPSILON)^(1/3)
    CBRT_EPS * (1.0 + x.abs())
}

/// How a model's flow-rule internal variables should be sampled in
/// randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiKind {
    /// Free real entries, sampled in a box.
    Box,
    /// `n` blocks of 9 entries, each a flattened matrix with positive
    /// determinant (internal strains).
    DefGradBlocks(usize),
}

/// Behavioral contract for a thermo-visco-elastic material with internal
/// variables, in the Lagrangian description.
///
/// The free energy may depend on `(F, Theta, Xi)` only; that restriction is
/// enforced by the signature. Analytic derivatives are optional; central
/// finite differences are used where they are absent.
pub trait MaterialModel {
    /// `(k, m)`: lengths of the flow-rule (`xi`) and opaque (`pi`)
    /// internal-variable vectors.
    fn dims(&self) -> (usize, usize);

    /// Specific Helmholtz free energy (energy/mass).
    fn free_energy(&self, f: &DefGrad, theta: f64, xi: &[f64]) -> f64;

    /// Dissipative first Piola-Kirchhoff stress.
    fn dissipative_stress(&self, state: &ThermoState) -> Mat3;

    /// Right-hand side of the internal-variable ODE (length k).
    fn flow_rule(&self, state: &ThermoState) -> Vec<f64>;

    /// Referential heat flux. Defaults to the classical Fourier law with
    /// unit conductivity.
    fn heat_flux(&self, state: &ThermoState) -> Vec3 {
        heat::fourier_flux(&state.f, &state.g, 1.0)
    }

    /// Analytic `d(free energy)/dF`, when available.
    fn free_energy_d_f(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Mat3> {
        None
    }

    /// Analytic `d(free energy)/dTheta`, when available.
    fn free_energy_d_theta(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<f64> {
        None
    }

    /// Analytic `d(free energy)/dXi`, when available.
    fn free_energy_d_xi(&self, _f: &DefGrad, _theta: f64, _xi: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Reference mass density P.
    fn density(&self) -> f64 {
        1.0
    }

    /// Sampling convention for `xi` in randomized checks.
    fn xi_kind(&self) -> XiKind {
        XiKind::Box
    }
}

// ---------------------------------------------------------------------------
// Derivative plumbing
// ---------------------------------------------------------------------------

/// `dA/dF` by the model's analytic law or central differences per entry.
pub fn free_energy_grad_f(model: &dyn MaterialModel, f: &DefGrad, theta: f64, xi: &[f64]) -> Mat3 {
    if let Some(g) = model.free_energy_d_f(f, theta, xi) {
        return g;
    }
    let mut grad = Mat3::ZERO;
    let base = *f.as_mat();
    for i in 0..3 {
        for j in 0..3 {
            let h = fd_step(base.0[i][j]);
            let mut fp = base;
            fp.0[i][j] += h;
            let mut fm = base;
            fm.0[i][j] -= h;
            let ap = model.free_energy(&DefGrad::new_unchecked(fp), theta, xi);
            let am = model.free_energy(&DefGrad::new_unchecked(fm), theta, xi);
            grad.0[i][j] = (ap - am) / (2.0 * h);
        }
    }
    grad
}

/// `dA/dTheta` by the model's analytic law or central differences.
pub fn free_energy_d_theta(model: &dyn MaterialModel, f: &DefGrad, theta: f64, xi: &[f64]) -> f64 {
    if let Some(d) = model.free_energy_d_theta(f, theta, xi) {
        return d;
    }
    let h = fd_step(theta);
    (model.free_energy(f, theta + h, xi) - model.free_energy(f, theta - h, xi)) / (2.0 * h)
}

/// `dA/dXi` by the model's analytic law or central differences per entry.
pub fn free_energy_grad_xi(
    model: &dyn MaterialModel,
    f: &DefGrad,
    theta: f64,
    xi: &[f64],
) -> Vec<f64> {
    if let Some(g) = model.free_energy_d_xi(f, theta, xi) {
        return g;
    }
    let mut grad = vec![0.0; xi.len()];
    let mut probe = xi.to_vec();
    for (i, g) in grad.iter_mut().enumerate() {
        let h = fd_step(xi[i]);
        probe[i] = xi[i] + h;
        let ap = model.free_energy(f, theta, &probe);
        probe[i] = xi[i] - h;
        let am = model.free_energy(f, theta, &probe);
        probe[i] = xi[i];
        *g = (ap - am) / (2.0 * h);
    }
    grad
}

// ---------------------------------------------------------------------------
// Derived laws
// ---------------------------------------------------------------------------

/// Specific entropy: `S = -dA/dTheta`.
pub fn entropy(model: &dyn MaterialModel, f: &DefGrad, theta: f64, xi: &[f64]) -> f64 {
    -free_energy_d_theta(model, f, theta, xi)
}

/// Specific internal energy: `E = A + Theta S`.
pub fn internal_energy(model: &dyn MaterialModel, f: &DefGrad, theta: f64, xi: &[f64]) -> f64 {
    model.free_energy(f, theta, xi) + theta * entropy(model, f, theta, xi)
}

/// Thermoelastic first Piola-Kirchhoff stress: `T_Re = P dA/dF`.
pub fn thermoelastic_stress(
    model: &dyn MaterialModel,
    f: &DefGrad,
    theta: f64,
    xi: &[f64],
) -> Mat3 {
    free_energy_grad_f(model, f, theta, xi) * model.density()
}

/// Total first Piola-Kirchhoff stress: thermoelastic plus dissipative part.
pub fn total_first_piola(model: &dyn MaterialModel, state: &ThermoState) -> Mat3 {
    thermoelastic_stress(model, &state.f, state.theta, &state.xi) + model.dissipative_stress(state)
}

/// Converts a first Piola-Kirchhoff stress to the Cauchy stress:
/// `sigma = (1/det F) T_R F^T` (inverse of `T_R = sigma cof F`).
pub fn cauchy_from_piola(t_r: &Mat3, f: &DefGrad) -> Mat3 {
    (*t_r * f.transpose()) * (1.0 / f.det())
}

/// Total Cauchy stress of a model at a state.
pub fn cauchy_stress(model: &dyn MaterialModel, state: &ThermoState) -> Mat3 {
    cauchy_from_piola(&total_first_piola(model, state), &state.f)
}

/// Internal dissipation:
/// `D_int = T_Rd : H - P (dA/dXi) . K`.
pub fn internal_dissipation(model: &dyn MaterialModel, state: &ThermoState) -> f64 {
    let viscous = model.dissipative_stress(state).ddot(&state.h);
    if state.xi.is_empty() {
        return viscous;
    }
    let grad_xi = free_energy_grad_xi(model, &state.f, state.theta, &state.xi);
    let flow = model.flow_rule(state);
    let internal: f64 = grad_xi.iter().zip(flow.iter()).map(|(a, b)| a * b).sum();
    viscous - model.density() * internal
}

/// Left-hand side of the dissipation inequality:
/// `D_int - (Q . G) / Theta` (must be >= 0 under the second principle).
pub fn clausius_duhem_lhs(model: &dyn MaterialModel, state: &ThermoState) -> f64 {
    internal_dissipation(model, state) - model.heat_flux(state).dot(&state.g) / state.theta
}

// ---------------------------------------------------------------------------
// Dissipation potentials
// ---------------------------------------------------------------------------

/// A dissipation potential `P_diss(F, H, Theta, Pi, Lambda)`: nonnegative,
/// convex in `(H, Lambda)` and vanishing at `(H, Lambda) = 0`. Its gradients
/// generate a dissipative stress and a flow rule that satisfy the mechanical
/// dissipation inequality by construction.
pub trait DissipationPotential {
    fn value(&self, f: &DefGrad, h: &Mat3, theta: f64, pi: &[f64], lambda: &[f64]) -> f64;

    /// Length of the `Lambda` argument this potential expects.
    fn lambda_dim(&self) -> usize;

    /// Analytic `dP/dH`, when available.
    fn d_h(
        &self,
        _f: &DefGrad,
        _h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        _lambda: &[f64],
    ) -> Option<Mat3> {
        None
    }

    /// Analytic `dP/dLambda`, when available.
    fn d_lambda(
        &self,
        _f: &DefGrad,
        _h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        _lambda: &[f64],
    ) -> Option<Vec<f64>> {
        None
    }
}

/// `dP/dH` by analytic law or central differences.
pub fn potential_grad_h(
    pot: &dyn DissipationPotential,
    f: &DefGrad,
    h: &Mat3,
    theta: f64,
    pi: &[f64],
    lambda: &[f64],
) -> Mat3 {
    if let Some(g) = pot.d_h(f, h, theta, pi, lambda) {
        return g;
    }
    let mut grad = Mat3::ZERO;
    for i in 0..3 {
        for j in 0..3 {
            let step = fd_step(h.0[i][j]);
            let mut hp = *h;
            hp.0[i][j] += step;
            let mut hm = *h;
            hm.0[i][j] -= step;
            grad.0[i][j] = (pot.value(f, &hp, theta, pi, lambda)
                - pot.value(f, &hm, theta, pi, lambda))
                / (2.0 * step);
        }
    }
    grad
}

/// `dP/dLambda` by analytic law or central differences.
pub fn potential_grad_lambda(
    pot: &dyn DissipationPotential,
    f: &DefGrad,
    h: &Mat3,
    theta: f64,
    pi: &[f64],
    lambda: &[f64],
) -> Vec<f64> {
    if let Some(g) = pot.d_lambda(f, h, theta, pi, lambda) {
        return g;
    }
    let mut grad = vec![0.0; lambda.len()];
    let mut probe = lambda.to_vec();
    for (i, g) in grad.iter_mut().enumerate() {
        let step = fd_step(lambda[i]);
        probe[i] = lambda[i] + step;
        let vp = pot.value(f, h, theta, pi, &probe);
        probe[i] = lambda[i] - step;
        let vm = pot.value(f, h, theta, pi, &probe);
        probe[i] = lambda[i];
        *g = (vp - vm) / (2.0 * step);
    }
    grad
}

/// Dissipative stress generated by a potential:
/// `T_Rd = dP/dH` evaluated at `Lambda = dA/dXi`.
pub fn stress_from_potential(
    pot: &dyn DissipationPotential,
    model: &dyn MaterialModel,
    state: &ThermoState,
) -> Mat3 {
    let lambda = free_energy_grad_xi(model, &state.f, state.theta, &state.xi);
    potential_grad_h(pot, &state.f, &state.h, state.theta, &state.pi, &lambda)
}

/// Flow rule generated by a potential:
/// `K = -(1/P) dP/dLambda` evaluated at `Lambda = dA/dXi`.
pub fn flow_from_potential(
    pot: &dyn DissipationPotential,
    model: &dyn MaterialModel,
    state: &ThermoState,
) -> Vec<f64> {
    let lambda = free_energy_grad_xi(model, &state.f, state.theta, &state.xi);
    let g = potential_grad_lambda(pot, &state.f, &state.h, state.theta, &state.pi, &lambda);
    let inv_p = 1.0 / model.density();
    g.into_iter().map(|x| -inv_p * x).collect()
}

// ---------------------------------------------------------------------------
// Shipped potentials
// ---------------------------------------------------------------------------

/// `(kappa/2) ||Lambda||^2`: the simplest internal-variable potential. Its
/// flow rule is `K = -kappa Lambda / P`; paired with a multiplicative-strain
/// free energy it yields the solid flow rule of the 3d Maxwell family.
#[derive(Debug, Clone, Copy)]
pub struct QuadraticFlowPotential {
    pub kappa: f64,
    pub dim: usize,
}

impl DissipationPotential for QuadraticFlowPotential {
    fn value(&self, _f: &DefGrad, _h: &Mat3, _theta: f64, _pi: &[f64], lambda: &[f64]) -> f64 {
        0.5 * self.kappa * lambda.iter().map(|x| x * x).sum::<f64>()
    }

    fn lambda_dim(&self) -> usize {
        self.dim
    }

    fn d_lambda(
        &self,
        _f: &DefGrad,
        _h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        lambda: &[f64],
    ) -> Option<Vec<f64>> {
        Some(lambda.iter().map(|x| self.kappa * x).collect())
    }
}

/// `(kappa/2) ||Lambda F^T||^2` with matrix-valued `Lambda`: depends on the
/// reference configuration only through `Lambda F^T` and `det F`, making the
/// generated material fluid. `dP/dLambda = kappa Lambda F^T F`.
#[derive(Debug, Clone, Copy)]
pub struct FluidFlowPotential {
    pub kappa: f64,
}

impl DissipationPotential for FluidFlowPotential {
    fn value(&self, f: &DefGrad, _h: &Mat3, _theta: f64, _pi: &[f64], lambda: &[f64]) -> f64 {
        let l = Mat3::from_flat(lambda);
        let lft = l * f.transpose();
        0.5 * self.kappa * lft.ddot(&lft)
    }

    fn lambda_dim(&self) -> usize {
        9
    }

    fn d_lambda(
        &self,
        f: &DefGrad,
        _h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        lambda: &[f64],
    ) -> Option<Vec<f64>> {
        let l = Mat3::from_flat(lambda);
        let g = l * (f.transpose() * *f.as_mat()) * self.kappa;
        Some(g.to_flat().to_vec())
    }
}

/// `(nu/2) ||Sym(H F^{-1})||^2`: the Kelvin-Voigt rate potential. Its stress
/// is `nu Sym(H F^{-1}) F^{-T}`, which corresponds to a symmetric Cauchy
/// stress.
#[derive(Debug, Clone, Copy)]
pub struct SymRatePotential {
    pub nu: f64,
}

impl DissipationPotential for SymRatePotential {
    fn value(&self, f: &DefGrad, h: &Mat3, _theta: f64, _pi: &[f64], _lambda: &[f64]) -> f64 {
        let l = *h * f.inverse();
        let sym = crate::tensor3::sym_skew(&l).0;
        0.5 * self.nu * sym.ddot(&sym)
    }

    fn lambda_dim(&self) -> usize {
        0
    }

    fn d_h(
        &self,
        f: &DefGrad,
        h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        _lambda: &[f64],
    ) -> Option<Mat3> {
        let f_inv = f.inverse();
        let sym = crate::tensor3::sym_skew(&(*h * f_inv)).0;
        Some(sym.to_mat() * f_inv.transpose() * self.nu)
    }
}

/// `nu det F ||Sym(H F^{-1})||^2`: generates the Newtonian dissipative stress
/// `nu det F (H C^{-1} + F^{-T} H^T F^{-T}) = 2 nu det F Sym(H F^{-1}) F^{-T}`,
/// whose Cauchy form is `2 nu d`.
#[derive(Debug, Clone, Copy)]
pub struct NewtonianPotential {
    pub nu: f64,
}

impl DissipationPotential for NewtonianPotential {
    fn value(&self, f: &DefGrad, h: &Mat3, _theta: f64, _pi: &[f64], _lambda: &[f64]) -> f64 {
        let sym = crate::tensor3::sym_skew(&(*h * f.inverse())).0;
        self.nu * f.det() * sym.ddot(&sym)
    }

    fn lambda_dim(&self) -> usize {
        0
    }

    fn d_h(
        &self,
        f: &DefGrad,
        h: &Mat3,
        _theta: f64,
        _pi: &[f64],
        _lambda: &[f64],
    ) -> Option<Mat3> {
        let f_inv = f.inverse();
        let sym = crate::tensor3::sym_skew(&(*h * f_inv)).0;
        Some(sym.to_mat() * f_inv.transpose() * (2.0 * self.nu * f.det()))
    }
}

/// Newtonian dissipative first Piola-Kirchhoff stress in closed form:
/// `nu det F (H C^{-1} + F^{-T} H^T F^{-T})`.
pub fn newtonian_dissipative_stress(f: &DefGrad, h: &Mat3, nu: f64) -> Mat3 {
    let f_inv = f.inverse();
    let f_inv_t = f_inv.transpose();
    let c_inv = f_inv * f_inv_t;
    (*h * c_inv + f_inv_t * h.transpose() * f_inv_t) * (nu * f.det())
}

/// Residual of the Piola-stress symmetry condition `F T^T - T F^T`
/// (vanishes iff the corresponding Cauchy stress is symmetric).
pub fn cauchy_symmetry_residual(t_r: &Mat3, f: &DefGrad) -> Mat3 {
    *f.as_mat() * t_r.transpose() - *t_r * f.transpose()
}

/// `T_R = sigma cof F`: the forward map inverted by [`cauchy_from_piola`].
pub fn piola_from_cauchy(sigma: &Mat3, f: &DefGrad) -> Mat3 {
    *sigma * cofactor(f.as_mat())
}
