//! Complex fluids recast as viscous fluids with an internal variable: the
//! polymer stress obeys an objective-derivative ODE, the total deviatoric
//! Cauchy stress is `2 eta_s d + xi`.
//!
//! The indeterminate incompressibility pressure is excluded throughout; it
//! does not contribute to `sigma : d` for traceless `d`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tensor3::{sym_skew, Mat3, Sym3};

/// User-supplied objective-derivative correction `Ob(sigma, h)`.
pub type CorrectionFn = Arc<dyn Fn(&Sym3, &Mat3) -> Sym3 + Send + Sync>;

/// Correction term of an objective derivative written as
/// `diamond(sigma) = sigma_dot + Ob(sigma, h)`.
#[derive(Clone)]
pub enum ObjectiveKind {
    /// `Ob(sigma, h) = -h sigma - sigma h^T` (lower-index convected form).
    OldroydB,
    /// `Ob(sigma, h) = sigma w - w sigma` with the spin `w = Skew(h)`
    /// (corotational form).
    ZarembaJaumann,
    /// User-supplied correction; objectivity is checked statistically, not
    /// assumed.
    Custom(CorrectionFn),
}

impl std::fmt::Debug for ObjectiveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveKind::OldroydB => write!(f, "OldroydB"),
            ObjectiveKind::ZarembaJaumann => write!(f, "ZarembaJaumann"),
            ObjectiveKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Free-energy choice attached to the polymer stress.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeEnergyKind {
    /// No free energy: the dissipation is the raw `sigma : d`.
    None,
    /// `a(xi) = (lambda1 / 4 eta_p) ||xi||^2`, the quadratic energy that
    /// makes the corotational model comply with the second principle.
    ZjQuadratic,
}

/// Two-component incompressible fluid with polymer stress `xi` as internal
/// variable:
/// `sigma_s = 2 eta_s d`, `xi + lambda1 diamond(xi) = 2 eta_p d`.
#[derive(Debug, Clone)]
pub struct ComplexFluid {
    pub kind: ObjectiveKind,
    pub eta_s: f64,
    pub eta_p: f64,
    pub lambda1: f64,
    pub free_energy: FreeEnergyKind,
}

impl ComplexFluid {
    pub fn new(kind: ObjectiveKind, eta_s: f64, eta_p: f64, lambda1: f64) -> Result<ComplexFluid> {
        for (name, v) in [("eta_s", eta_s), ("eta_p", eta_p), ("lambda1", lambda1)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "complex fluid requires {name} > 0 (got {v})"
                )));
            }
        }
        Ok(ComplexFluid {
            kind,
            eta_s,
            eta_p,
            lambda1,
            free_energy: FreeEnergyKind::None,
        })
    }

    pub fn with_free_energy(mut self, kind: FreeEnergyKind) -> ComplexFluid {
        self.free_energy = kind;
        self
    }

    /// `Ob(xi, h)` on general (not necessarily symmetric) matrices. The
    /// custom variant symmetrizes its argument, as its callback is only
    /// defined on symmetric tensors.
    pub fn objective_correction_mat(&self, xi: &Mat3, h: &Mat3) -> Mat3 {
        match &self.kind {
            ObjectiveKind::OldroydB => -(*h * *xi) - *xi * h.transpose(),
            ObjectiveKind::ZarembaJaumann => {
                let w = sym_skew(h).1;
                *xi * w - w * *xi
            }
            ObjectiveKind::Custom(ob) => ob(&Sym3::from_mat_symmetrized(xi), h).to_mat(),
        }
    }

    /// Flow rule on general matrices:
    /// `k(h, xi) = -Ob(xi, h) + (1/lambda1)(-xi + 2 eta_p d)`.
    ///
    /// Both built-in corrections map symmetric input to symmetric output, so
    /// integrating this from a symmetric start preserves symmetry; the
    /// randomized checks monitor exactly that.
    pub fn flow_mat(&self, h: &Mat3, xi: &Mat3) -> Mat3 {
        let d = sym_skew(h).0.to_mat();
        let relax = (d * (2.0 * self.eta_p) - *xi) * (1.0 / self.lambda1);
        -self.objective_correction_mat(xi, h) + relax
    }

    /// Flow rule on the symmetric representation.
    pub fn flow(&self, h: &Mat3, xi: &Sym3) -> Sym3 {
        Sym3::from_mat_symmetrized(&self.flow_mat(h, &xi.to_mat()))
    }

    /// Total deviatoric Cauchy stress `2 eta_s d + xi`.
    pub fn total_stress(&self, h: &Mat3, xi: &Sym3) -> Sym3 {
        let d = sym_skew(h).0;
        d * (2.0 * self.eta_s) + *xi
    }

    /// Raw mechanical power `sigma : d`.
    pub fn raw_dissipation(&self, h: &Mat3, xi: &Sym3) -> f64 {
        let d = sym_skew(h).0;
        self.total_stress(h, xi).ddot(&d)
    }

    /// Specific free energy of the internal variable.
    pub fn free_energy_value(&self, xi: &Sym3) -> f64 {
        match self.free_energy {
            FreeEnergyKind::None => 0.0,
            FreeEnergyKind::ZjQuadratic => zj_free_energy(xi, self.lambda1, self.eta_p),
        }
    }

    /// `da/dxi` as a symmetric matrix.
    pub fn free_energy_grad(&self, xi: &Sym3) -> Sym3 {
        match self.free_energy {
            FreeEnergyKind::None => Sym3::ZERO,
            FreeEnergyKind::ZjQuadratic => *xi * (self.lambda1 / (2.0 * self.eta_p)),
        }
    }

    /// Internal dissipation `sigma : d - (da/dxi) : k(h, xi)` (unit density).
    /// Coincides with [`Self::raw_dissipation`] when no free energy is
    /// attached.
    pub fn dissipation(&self, h: &Mat3, xi: &Sym3) -> f64 {
        let raw = self.raw_dissipation(h, xi);
        match self.free_energy {
            FreeEnergyKind::None => raw,
            _ => raw - self.free_energy_grad(xi).ddot(&self.flow(h, xi)),
        }
    }
}

/// Quadratic polymer-stress free energy
/// `a(xi) = (lambda1 / 4 eta_p) ||xi||^2`.
pub fn zj_free_energy(xi: &Sym3, lambda1: f64, eta_p: f64) -> f64 {
    lambda1 / (4.0 * eta_p) * xi.ddot(xi)
}

/// Gradient of [`zj_free_energy`] with the sign convention
/// `z(xi) = -da/dxi = -(lambda1 / 2 eta_p) xi`.
pub fn zj_free_energy_z(xi: &Sym3, lambda1: f64, eta_p: f64) -> Sym3 {
    *xi * (-lambda1 / (2.0 * eta_p))
}

/// Builds a complex fluid from the solvent/polymer viscosities and the
/// relaxation time.
pub fn complex_fluid(
    kind: ObjectiveKind,
    eta_s: f64,
    eta_p: f64,
    lambda1: f64,
) -> Result<ComplexFluid> {
    ComplexFluid::new(kind, eta_s, eta_p, lambda1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> (f64, f64, f64) {
        // eta = 1, lambda1 = 10, lambda2 = 1.
        (0.1, 0.9, 10.0)
    }

    fn random_traceless(rng: &mut ChaCha8Rng) -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = rng.gen_range(-1.0..1.0);
            }
        }
        m.deviatoric()
    }

    fn random_sym(rng: &mut ChaCha8Rng) -> Sym3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = rng.gen_range(-1.0..1.0);
            }
        }
        Sym3::from_mat_symmetrized(&m)
    }

    #[test]
    fn rest_flow_is_pure_relaxation() {
        let (es, ep, l1) = params();
        for kind in [ObjectiveKind::OldroydB, ObjectiveKind::ZarembaJaumann] {
            let fluid = complex_fluid(kind, es, ep, l1).unwrap();
            let xi = Sym3::from_diag(1.0, -0.5, 0.2);
            let k = fluid.flow(&Mat3::ZERO, &xi);
            let expected = xi * (-1.0 / l1);
            assert!((k - expected).norm() <= 1e-15);
        }
    }

    #[test]
    fn zero_polymer_stress_flow() {
        let (es, ep, l1) = params();
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let h = random_traceless(&mut rng);
        let d = sym_skew(&h).0;
        for kind in [ObjectiveKind::OldroydB, ObjectiveKind::ZarembaJaumann] {
            let fluid = complex_fluid(kind, es, ep, l1).unwrap();
            let k = fluid.flow(&h, &Sym3::ZERO);
            let expected = d * (2.0 * ep / l1);
            assert!((k - expected).norm() <= 1e-14);
        }
    }

    #[test]
    fn zj_augmented_dissipation_closed_form() {
        // sigma : d - (lambda1 / 2 eta_p) xi : k == 2 eta_s ||d||^2
        //                                          + ||xi||^2 / (2 eta_p):
        // the spin terms cancel exactly.
        let (es, ep, l1) = params();
        let fluid = complex_fluid(ObjectiveKind::ZarembaJaumann, es, ep, l1)
            .unwrap()
            .with_free_energy(FreeEnergyKind::ZjQuadratic);
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        for _ in 0..500 {
            let h = random_traceless(&mut rng);
            let xi = random_sym(&mut rng);
            let d = sym_skew(&h).0;
            let augmented = fluid.dissipation(&h, &xi);
            let closed = 2.0 * es * d.ddot(&d) + xi.ddot(&xi) / (2.0 * ep);
            assert!(
                (augmented - closed).abs() <= 1e-10 * (1.0 + closed),
                "augmented {augmented} vs closed {closed}"
            );
            assert!(augmented >= -1e-12 * (1.0 + closed));
        }
    }

    #[test]
    fn raw_dissipation_matches_stress_power() {
        let (es, ep, l1) = params();
        let fluid = complex_fluid(ObjectiveKind::OldroydB, es, ep, l1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..100 {
            let h = random_traceless(&mut rng);
            let xi = random_sym(&mut rng);
            let d = sym_skew(&h).0;
            let raw = fluid.raw_dissipation(&h, &xi);
            let expected = 2.0 * es * d.ddot(&d) + xi.ddot(&d);
            assert!((raw - expected).abs() <= 1e-13 * (1.0 + expected.abs()));
            // Without a free energy the augmented value coincides.
            assert_eq!(fluid.dissipation(&h, &xi), raw);
        }
    }

    #[test]
    fn zj_free_energy_values_and_gradient() {
        assert_eq!(zj_free_energy(&Sym3::ZERO, 10.0, 0.9), 0.0);
        let a = zj_free_energy(&Sym3::identity(), 10.0, 0.9);
        assert!((a - 10.0 / 3.6 * 3.0).abs() <= 1e-12);

        // Directional finite-difference check of the gradient.
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        for _ in 0..100 {
            let xi = random_sym(&mut rng);
            let dir = random_sym(&mut rng);
            let z = zj_free_energy_z(&xi, 10.0, 0.9);
            let h = 1e-6;
            let fd = (zj_free_energy(&(xi + dir * h), 10.0, 0.9)
                - zj_free_energy(&(xi + dir * -h), 10.0, 0.9))
                / (2.0 * h);
            // z = -grad, so grad : dir = -z : dir.
            let analytic = -z.ddot(&dir);
            assert!(
                (fd - analytic).abs() <= 1e-8 * (1.0 + analytic.abs()),
                "fd {fd} vs analytic {analytic}"
            );
        }
    }

    #[test]
    fn flow_preserves_symmetry_on_full_matrices() {
        let (es, ep, l1) = params();
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        for kind in [ObjectiveKind::OldroydB, ObjectiveKind::ZarembaJaumann] {
            let fluid = complex_fluid(kind, es, ep, l1).unwrap();
            for _ in 0..100 {
                let h = random_traceless(&mut rng);
                let xi = random_sym(&mut rng).to_mat();
                let k = fluid.flow_mat(&h, &xi);
                let asym = (k - k.transpose()).norm();
                assert!(asym <= 1e-14 * (1.0 + k.norm()));
            }
        }
    }

    #[test]
    fn custom_kind_matches_builtin() {
        let (es, ep, l1) = params();
        let custom = ObjectiveKind::Custom(Arc::new(|sigma: &Sym3, h: &Mat3| {
            let s = sigma.to_mat();
            Sym3::from_mat_symmetrized(&(-(*h * s) - s * h.transpose()))
        }));
        let a = complex_fluid(custom, es, ep, l1).unwrap();
        let b = complex_fluid(ObjectiveKind::OldroydB, es, ep, l1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(86);
        for _ in 0..50 {
            let h = random_traceless(&mut rng);
            let xi = random_sym(&mut rng);
            let ka = a.flow(&h, &xi);
            let kb = b.flow(&h, &xi);
            assert!((ka - kb).norm() <= 1e-13 * (1.0 + kb.norm()));
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(complex_fluid(ObjectiveKind::OldroydB, 0.0, 0.9, 10.0).is_err());
        assert!(complex_fluid(ObjectiveKind::OldroydB, 0.1, -0.9, 10.0).is_err());
        assert!(complex_fluid(ObjectiveKind::OldroydB, 0.1, 0.9, 0.0).is_err());
    }
}
