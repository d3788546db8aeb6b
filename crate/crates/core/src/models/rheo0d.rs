//! Zero-dimensional rheological prototypes with closed-form solutions,
//! used as cheap ground truth for the generic integrator.

use crate::error::{Error, Result};

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v > 0.0) {
            return Err(Error::InvalidParams(format!(
                "{name} must be strictly positive (got {v})"
            )));
        }
    }
    Ok(())
}

/// Spring and dashpot in series. Under a held total stretch the force
/// relaxes exponentially.
#[derive(Debug, Clone, Copy)]
pub struct Maxwell0d {
    pub mu: f64,
    pub nu: f64,
}

impl Maxwell0d {
    pub fn new(mu: f64, nu: f64) -> Result<Maxwell0d> {
        check_positive(&[("mu", mu), ("nu", nu)])?;
        Ok(Maxwell0d { mu, nu })
    }

    /// Dashpot rate under prescribed total stretch:
    /// `gamma_dot = (mu/nu)(eps - gamma)`.
    pub fn rate(&self, eps: f64, gamma: f64) -> f64 {
        self.mu / self.nu * (eps - gamma)
    }

    /// Transmitted force `f = mu (eps - gamma)`.
    pub fn force(&self, eps: f64, gamma: f64) -> f64 {
        self.mu * (eps - gamma)
    }

    /// `gamma(t) = eps + (gamma0 - eps) exp(-mu t / nu)` for constant `eps`.
    pub fn gamma_closed_form(&self, eps: f64, gamma0: f64, t: f64) -> f64 {
        eps + (gamma0 - eps) * (-self.mu * t / self.nu).exp()
    }

    /// `f(t) = f(0) exp(-mu t / nu)` for constant `eps`.
    pub fn force_closed_form(&self, eps: f64, gamma0: f64, t: f64) -> f64 {
        self.force(eps, gamma0) * (-self.mu * t / self.nu).exp()
    }

    /// Spring free energy `(mu/2)(eps - gamma)^2`.
    pub fn free_energy(&self, eps: f64, gamma: f64) -> f64 {
        0.5 * self.mu * (eps - gamma) * (eps - gamma)
    }

    /// Internal dissipation `f^2 / nu >= 0`.
    pub fn dissipation(&self, eps: f64, gamma: f64) -> f64 {
        let f = self.force(eps, gamma);
        f * f / self.nu
    }
}

/// Spring and dashpot in parallel. Under a held force the stretch creeps to
/// its elastic limit.
#[derive(Debug, Clone, Copy)]
pub struct KelvinVoigt0d {
    pub mu: f64,
    pub nu: f64,
}

impl KelvinVoigt0d {
    pub fn new(mu: f64, nu: f64) -> Result<KelvinVoigt0d> {
        check_positive(&[("mu", mu), ("nu", nu)])?;
        Ok(KelvinVoigt0d { mu, nu })
    }

    /// Stretch rate under prescribed force: `eps_dot = (f - mu eps)/nu`.
    pub fn rate(&self, force: f64, eps: f64) -> f64 {
        (force - self.mu * eps) / self.nu
    }

    /// `eps(t) = f/mu + (eps0 - f/mu) exp(-mu t/nu)` for constant force.
    pub fn creep_closed_form(&self, force: f64, eps0: f64, t: f64) -> f64 {
        let limit = force / self.mu;
        limit + (eps0 - limit) * (-self.mu * t / self.nu).exp()
    }
}

/// `n + 1` parallel branches: an equilibrium spring `mu0` plus `n`
/// spring-dashpot (Maxwell) branches.
#[derive(Debug, Clone)]
pub struct GeneralizedMaxwell0d {
    pub mu0: f64,
    pub branches: Vec<Maxwell0d>,
}

impl GeneralizedMaxwell0d {
    pub fn new(mu0: f64, branches: Vec<(f64, f64)>) -> Result<GeneralizedMaxwell0d> {
        check_positive(&[("mu0", mu0)])?;
        if branches.is_empty() {
            return Err(Error::InvalidParams(
                "generalized Maxwell needs at least one branch".into(),
            ));
        }
        let branches = branches
            .into_iter()
            .map(|(mu, nu)| Maxwell0d::new(mu, nu))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneralizedMaxwell0d { mu0, branches })
    }

    /// Total force under stretch `eps` with branch dashpot stretches `gamma`.
    pub fn force(&self, eps: f64, gamma: &[f64]) -> f64 {
        self.mu0 * eps
            + self
                .branches
                .iter()
                .zip(gamma)
                .map(|(b, &g)| b.force(eps, g))
                .sum::<f64>()
    }

    /// `f(t)` under constant stretch: equilibrium force plus decaying branch
    /// forces.
    pub fn force_closed_form(&self, eps: f64, gamma0: &[f64], t: f64) -> f64 {
        self.mu0 * eps
            + self
                .branches
                .iter()
                .zip(gamma0)
                .map(|(b, &g0)| b.force_closed_form(eps, g0, t))
                .sum::<f64>()
    }
}

/// Catalog wrapper for the zero-dimensional prototypes.
#[derive(Debug, Clone)]
pub enum ZeroDModel {
    Maxwell(Maxwell0d),
    KelvinVoigt(KelvinVoigt0d),
    GeneralizedMaxwell(GeneralizedMaxwell0d),
}

/// Builds a 0d Maxwell element.
pub fn maxwell0d(mu: f64, nu: f64) -> Result<Maxwell0d> {
    Maxwell0d::new(mu, nu)
}

/// Builds a 0d Kelvin-Voigt element.
pub fn kelvin_voigt0d(mu: f64, nu: f64) -> Result<KelvinVoigt0d> {
    KelvinVoigt0d::new(mu, nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relaxed_start_stays_at_zero_force() {
        let m = maxwell0d(2.0, 3.0).unwrap();
        for t in [0.0, 0.5, 2.0] {
            assert_eq!(m.force_closed_form(1.0, 1.0, t), 0.0);
        }
    }

    #[test]
    fn unit_relaxation_value() {
        let m = maxwell0d(1.0, 1.0).unwrap();
        let f = m.force_closed_form(1.0, 0.0, 1.0);
        assert!((f - (-1.0f64).exp()).abs() <= 1e-15);
        assert!((f - 0.36787944117144233).abs() <= 1e-15);
    }

    #[test]
    fn creep_closed_form_values() {
        let kv = kelvin_voigt0d(1.0, 1.0).unwrap();
        // Already at the elastic limit: constant.
        assert_eq!(kv.creep_closed_form(1.0, 1.0, 5.0), 1.0);
        let e = kv.creep_closed_form(1.0, 0.0, 1.0);
        assert!((e - (1.0 - (-1.0f64).exp())).abs() <= 1e-15);
        // Long-time limit is f/mu.
        let late = kv.creep_closed_form(3.0, 0.0, 100.0);
        assert!((late - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn maxwell_dissipation_nonnegative() {
        let m = maxwell0d(1.5, 0.5).unwrap();
        for (eps, gamma) in [(1.0, 0.0), (0.0, 1.0), (2.0, 2.0), (-1.0, 3.0)] {
            assert!(m.dissipation(eps, gamma) >= 0.0);
        }
    }

    #[test]
    fn generalized_force_decays_to_equilibrium() {
        let gm = GeneralizedMaxwell0d::new(0.5, vec![(1.0, 1.0), (2.0, 0.5)]).unwrap();
        let f_late = gm.force_closed_form(1.0, &[0.0, 0.0], 50.0);
        assert!((f_late - 0.5).abs() <= 1e-10, "only the spring remains");
        let f0 = gm.force_closed_form(1.0, &[0.0, 0.0], 0.0);
        assert!((f0 - (0.5 + 1.0 + 2.0)).abs() <= 1e-12);
    }
}
