//! Cross-module properties of the constitutive framework that no single
//! unit suite owns: potential-generated pairs dissipate by construction,
//! frame-indifferent energies give symmetric elastic Cauchy stress, and the
//! objective flow rules stay equivariant along whole trajectories.

use std::sync::Arc;

use rheokit::dynamics::rk4_integrate;
use rheokit::laws::{
    self, DissipationPotential, MaterialModel, QuadraticFlowPotential, SymRatePotential,
};
use rheokit::models::{
    complex_fluid, kelvin_voigt3d, maxwell3d, stvenant_kirchhoff, MaxwellVariant, ObjectiveKind,
    SharedEnergy,
};
use rheokit::state::ThermoState;
use rheokit::tensor3::{sym_skew, DefGrad, Mat3, Sym3};
use rheokit::verify::{random_rotation, random_state_for, random_sym, sample_rng};

fn svk_energy() -> SharedEnergy {
    Arc::new(stvenant_kirchhoff(1.0, 1.0).unwrap())
}

/// Wraps a base model, replacing its dissipative pair with the gradients of
/// a potential, so the construction itself can be swept.
struct PotentialDriven<M> {
    base: M,
    pot: Box<dyn DissipationPotential + Send + Sync>,
}

impl<M: MaterialModel> MaterialModel for PotentialDriven<M> {
    fn dims(&self) -> (usize, usize) {
        self.base.dims()
    }
    fn free_energy(&self, f: &DefGrad, theta: f64, xi: &[f64]) -> f64 {
        self.base.free_energy(f, theta, xi)
    }
    fn dissipative_stress(&self, state: &ThermoState) -> Mat3 {
        laws::stress_from_potential(self.pot.as_ref(), &self.base, state)
    }
    fn flow_rule(&self, state: &ThermoState) -> Vec<f64> {
        laws::flow_from_potential(self.pot.as_ref(), &self.base, state)
    }
    fn free_energy_d_f(&self, f: &DefGrad, theta: f64, xi: &[f64]) -> Option<Mat3> {
        self.base.free_energy_d_f(f, theta, xi)
    }
    fn free_energy_d_theta(&self, f: &DefGrad, theta: f64, xi: &[f64]) -> Option<f64> {
        self.base.free_energy_d_theta(f, theta, xi)
    }
    fn free_energy_d_xi(&self, f: &DefGrad, theta: f64, xi: &[f64]) -> Option<Vec<f64>> {
        self.base.free_energy_d_xi(f, theta, xi)
    }
    fn xi_kind(&self) -> laws::XiKind {
        self.base.xi_kind()
    }
}

#[test]
fn potential_generated_pairs_dissipate_at_ten_thousand_states() {
    // Any convex potential vanishing at the origin yields D_int >= 0 for
    // whatever free energy it is paired with.
    let viscous = PotentialDriven {
        base: kelvin_voigt3d(svk_energy(), 1.0).unwrap(),
        pot: Box::new(SymRatePotential { nu: 0.8 }),
    };
    let internal = PotentialDriven {
        base: maxwell3d(svk_energy(), 1.0, MaxwellVariant::Solid).unwrap(),
        pot: Box::new(QuadraticFlowPotential { kappa: 0.7, dim: 9 }),
    };
    for i in 0..10_000u64 {
        let mut rng = sample_rng(101, i);
        let s = random_state_for(&viscous, &mut rng);
        let d = laws::internal_dissipation(&viscous, &s);
        assert!(d >= -1e-10 * (1.0 + d.abs()), "viscous sample {i}: {d}");

        let mut rng = sample_rng(102, i);
        let s = random_state_for(&internal, &mut rng);
        let d = laws::internal_dissipation(&internal, &s);
        assert!(d >= -1e-10 * (1.0 + d.abs()), "internal sample {i}: {d}");
    }
}

#[test]
fn frame_indifferent_energy_gives_symmetric_elastic_stress() {
    // A free energy of the form A(F^T F) makes F T_Re^T symmetric.
    let kv = kelvin_voigt3d(svk_energy(), 1.0).unwrap();
    let maxwell = maxwell3d(svk_energy(), 1.0, MaxwellVariant::Solid).unwrap();
    for i in 0..2000u64 {
        let mut rng = sample_rng(103, i);
        let s = random_state_for(&kv, &mut rng);
        let t_re = laws::thermoelastic_stress(&kv, &s.f, s.theta, &s.xi);
        let res = laws::cauchy_symmetry_residual(&t_re, &s.f).norm();
        assert!(res <= 1e-10 * (1.0 + t_re.norm()), "kv sample {i}: {res}");

        let mut rng = sample_rng(104, i);
        let s = random_state_for(&maxwell, &mut rng);
        let t_re = laws::thermoelastic_stress(&maxwell, &s.f, s.theta, &s.xi);
        let res = laws::cauchy_symmetry_residual(&t_re, &s.f).norm();
        assert!(
            res <= 1e-10 * (1.0 + t_re.norm()),
            "maxwell sample {i}: {res}"
        );
    }
}

/// Rodrigues rotation about a fixed axis-with-angle `t |w|`.
fn exp_skew(w: &Mat3, t: f64) -> Mat3 {
    let axis = rheokit::tensor3::Vec3::new(w.0[2][1], w.0[0][2], w.0[1][0]);
    let angle = axis.norm() * t;
    if angle == 0.0 {
        return Mat3::identity();
    }
    let unit = axis.normalized();
    let k = Mat3::from_rows(
        [0.0, -unit[2], unit[1]],
        [unit[2], 0.0, -unit[0]],
        [-unit[1], unit[0], 0.0],
    );
    Mat3::identity() + k * angle.sin() + k * k * (1.0 - angle.cos())
}

#[test]
fn objective_flow_rules_are_equivariant_along_trajectories() {
    // Integrating under h(t) and under the superimposed-rotation history
    // h*(t) = R h R^T + W0 (R(t) = exp(t W0), so R' R^T = W0) must land on
    // xi*(T) = R(T) xi(T) R(T)^T, up to integration error.
    let (eta_s, eta_p) = (0.1, 0.9);
    let w0 = Mat3::from_rows([0.0, 0.4, -0.2], [-0.4, 0.0, 0.3], [0.2, -0.3, 0.0]);
    for kind in [ObjectiveKind::OldroydB, ObjectiveKind::ZarembaJaumann] {
        let fluid = complex_fluid(kind, eta_s, eta_p, 10.0).unwrap();
        for seed in 0..5u64 {
            let mut rng = sample_rng(105, seed);
            let m = rheokit::verify::random_mat(&mut rng).deviatoric();
            let xi0 = random_sym(&mut rng);
            let t_end = 2.0;
            let dt = 1e-3;

            let h_of = |t: f64| m * (0.75 * t).cos();
            let rhs_plain = |t: f64, y: &[f64]| -> Vec<f64> {
                fluid
                    .flow(&h_of(t), &Sym3::from_array(y))
                    .to_array()
                    .to_vec()
            };
            let (_, plain) = rk4_integrate(&rhs_plain, &xi0.to_array(), (0.0, t_end), dt).unwrap();

            let rhs_rotated = |t: f64, y: &[f64]| -> Vec<f64> {
                let r = exp_skew(&w0, t);
                let h_star = r * h_of(t) * r.transpose() + w0;
                fluid
                    .flow(&h_star, &Sym3::from_array(y))
                    .to_array()
                    .to_vec()
            };
            let (_, rotated) =
                rk4_integrate(&rhs_rotated, &xi0.to_array(), (0.0, t_end), dt).unwrap();

            let r_end = exp_skew(&w0, t_end);
            let xi_end = Sym3::from_array(plain.last().unwrap()).to_mat();
            let expected = r_end * xi_end * r_end.transpose();
            let got = Sym3::from_array(rotated.last().unwrap()).to_mat();
            let residual = (got - expected).norm() / (1.0 + expected.norm());
            assert!(
                residual <= 1e-6,
                "seed {seed}: trajectory equivariance residual {residual:e}"
            );
        }
    }
}

#[test]
fn spin_histories_leave_raw_dissipation_invariant_only_via_d() {
    // sigma : d depends on h only through its symmetric part.
    let fluid = complex_fluid(ObjectiveKind::OldroydB, 0.1, 0.9, 10.0).unwrap();
    for i in 0..500u64 {
        let mut rng = sample_rng(106, i);
        let h = rheokit::verify::random_mat(&mut rng).deviatoric();
        let xi = random_sym(&mut rng);
        let d_only = sym_skew(&h).0.to_mat();
        let a = fluid.raw_dissipation(&h, &xi);
        let b = fluid.raw_dissipation(&d_only, &xi);
        assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
    }
}

#[test]
fn rotation_sampler_feeds_equivariance_checks() {
    // R B R^T keeps eigenvalues; combined with the eigen solver this is the
    // backbone of every isotropy check above.
    for i in 0..500u64 {
        let mut rng = sample_rng(107, i);
        let b = random_sym(&mut rng);
        let r = random_rotation(&mut rng);
        let rot = Sym3::from_mat_symmetrized(&(r * b.to_mat() * r.transpose()));
        let (ev_a, _) = rheokit::tensor3::sym_eigen(&b);
        let (ev_b, _) = rheokit::tensor3::sym_eigen(&rot);
        for (a, b) in ev_a.iter().zip(&ev_b) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}
