//! Generic isotropic visco-elastic Cauchy law, built from the joint
//! invariants and generating functions of `(B, M)` with `B = F F^T` and
//! `M = Sym(H F^{-1})`.
//!
//! Any choice of scalar coefficient functions yields a law that is
//! frame-indifferent, has a symmetric Cauchy stress and admits every
//! rotation as a material symmetry; the randomized checkers confirm all
//! three for whatever coefficients are supplied.

use std::sync::Arc;

use crate::heat;
use crate::laws::MaterialModel;
use crate::state::ThermoState;
use crate::tensor3::{cofactor, sym_skew, DefGrad, Mat3, Sym3, Vec3};

/// The ten joint invariants of `(B, M)` plus temperature, in the fixed
/// order `tr B, tr B^2, tr B^3, tr M, tr M^2, tr M^3, tr BM, tr B^2 M,
/// tr B M^2, tr B^2 M^2`.
#[derive(Debug, Clone, Copy)]
pub struct JointInvariants {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub bm: f64,
    pub b2m: f64,
    pub bm2: f64,
    pub b2m2: f64,
    pub theta: f64,
}

impl JointInvariants {
    pub fn new(b: &Sym3, m: &Sym3, theta: f64) -> JointInvariants {
        let bm_ = b.to_mat();
        let mm = m.to_mat();
        let b2 = bm_ * bm_;
        let m2 = mm * mm;
        JointInvariants {
            b1: bm_.trace(),
            b2: b2.trace(),
            b3: (b2 * bm_).trace(),
            m1: mm.trace(),
            m2: m2.trace(),
            m3: (m2 * mm).trace(),
            bm: (bm_ * mm).trace(),
            b2m: (b2 * mm).trace(),
            bm2: (bm_ * m2).trace(),
            b2m2: (b2 * m2).trace(),
            theta,
        }
    }
}

type BetaTable = Arc<dyn Fn(&JointInvariants) -> [f64; 8] + Send + Sync>;

/// Isotropic visco-elastic material whose Cauchy stress is the span of the
/// eight generators `I, B, B^2, M, M^2, BM+MB, B^2M+MB^2, BM^2+M^2B` with
/// arbitrary scalar coefficients of the joint invariants.
#[derive(Clone)]
pub struct IsotropicViscousLaw {
    pub betas: BetaTable,
    pub conductivity: f64,
}

impl IsotropicViscousLaw {
    /// Pointwise Eulerian law `sigma(B, M, theta)`.
    pub fn cauchy(&self, b: &Sym3, m: &Sym3, theta: f64) -> Mat3 {
        let inv = JointInvariants::new(b, m, theta);
        let beta = (self.betas)(&inv);
        let bm_ = b.to_mat();
        let mm = m.to_mat();
        let b2 = bm_ * bm_;
        let m2 = mm * mm;
        let generators = [
            Mat3::identity(),
            bm_,
            b2,
            mm,
            m2,
            bm_ * mm + mm * bm_,
            b2 * mm + mm * b2,
            bm_ * m2 + m2 * bm_,
        ];
        let mut sigma = Mat3::ZERO;
        for (coeff, gen) in beta.iter().zip(generators.iter()) {
            sigma += *gen * *coeff;
        }
        sigma
    }
}

impl MaterialModel for IsotropicViscousLaw {
    fn dims(&self) -> (usize, usize) {
        (0, 0)
    }

    fn free_energy(&self, _f: &DefGrad, theta: f64, _xi: &[f64]) -> f64 {
        -theta * theta.ln()
    }

    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        let b = state.f.left_cauchy_green();
        let m = sym_skew(&(state.h * state.f.inverse())).0;
        self.cauchy(&b, &m, state.theta) * cofactor(state.f.as_mat())
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

/// Builds the generic isotropic law from one callback returning all eight
/// coefficients.
pub fn isotropic_cauchy_law(
    betas: impl Fn(&JointInvariants) -> [f64; 8] + Send + Sync + 'static,
) -> IsotropicViscousLaw {
    IsotropicViscousLaw {
        betas: Arc::new(betas),
        conductivity: 1.0,
    }
}
