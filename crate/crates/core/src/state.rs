//! Thermodynamic state containers and material parameters.

use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor3::{DefGrad, Mat3, Sym3, Vec3};

/// One material-point thermodynamic state in the Lagrangian description.
///
/// `xi` holds the internal variables that obey a flow-rule ODE; `pi` holds
/// internal variables with independently assignable rates. The framework
/// carries `pi` opaquely and never evolves it.
#[derive(Debug, Clone)]
pub struct ThermoState {
    /// Deformation gradient F (dimensionless).
    pub f: DefGrad,
    /// Deformation rate H = grad of the material velocity (1/time).
    pub h: Mat3,
    /// Absolute temperature (> 0).
    pub theta: f64,
    /// Referential temperature gradient G.
    pub g: Vec3,
    /// Internal variables evolved by the model's flow rule (length k).
    pub xi: Vec<f64>,
    /// Opaque internal variables (length m).
    pub pi: Vec<f64>,
}

impl ThermoState {
    /// Full validating constructor; checks orientation, temperature and the
    /// internal-variable dimensions `(k, m)` declared by the owning model.
    pub fn new(
        f: Mat3,
        h: Mat3,
        theta: f64,
        g: Vec3,
        xi: Vec<f64>,
        pi: Vec<f64>,
        dims: (usize, usize),
    ) -> Result<ThermoState> {
        let f = DefGrad::new(f)?;
        let state = ThermoState {
            f,
            h,
            theta,
            g,
            xi,
            pi,
        };
        state.validate(dims)?;
        Ok(state)
    }

    /// The natural rest state: F = I, H = 0, unit temperature, no gradients.
    pub fn natural() -> ThermoState {
        ThermoState {
            f: DefGrad::identity(),
            h: Mat3::ZERO,
            theta: 1.0,
            g: Vec3::ZERO,
            xi: Vec::new(),
            pi: Vec::new(),
        }
    }

    /// Re-checks the state invariants against a model's declared dimensions.
    /// Total: never panics.
    pub fn validate(&self, dims: (usize, usize)) -> Result<()> {
        let d = self.f.det();
        if !(d > 0.0) {
            return Err(Error::NonPositiveDeterminant(d));
        }
        if !(self.theta > 0.0) {
            return Err(Error::NonPositiveTemperature(self.theta));
        }
        if self.xi.len() != dims.0 {
            return Err(Error::DimensionMismatch {
                expected: dims.0,
                got: self.xi.len(),
            });
        }
        if self.pi.len() != dims.1 {
            return Err(Error::DimensionMismatch {
                expected: dims.1,
                got: self.pi.len(),
            });
        }
        Ok(())
    }

    pub fn with_xi(&self, xi: Vec<f64>) -> ThermoState {
        ThermoState { xi, ..self.clone() }
    }
}

/// Validates a state against model dimensions (free-function form).
pub fn validate(state: &ThermoState, dims: (usize, usize)) -> Result<()> {
    state.validate(dims)
}

/// One material-point state in the Eulerian description used by the complex
/// fluid models: velocity gradient plus the polymer stress as internal
/// variable.
#[derive(Debug, Clone, Copy)]
pub struct EulerianState {
    /// Eulerian velocity gradient h; trace-free when `incompressible`.
    pub h: Mat3,
    /// Polymer stress (stress units).
    pub xi: Sym3,
    pub incompressible: bool,
}

impl EulerianState {
    pub fn new(h: Mat3, xi: Sym3, incompressible: bool) -> Result<EulerianState> {
        if incompressible && h.trace().abs() > 1e-12 * h.norm().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "incompressible state requires tr h = 0 (tr h = {})",
                h.trace()
            )));
        }
        Ok(EulerianState {
            h,
            xi,
            incompressible,
        })
    }

    /// Projects the spherical part off `h` and builds an incompressible state.
    pub fn incompressible_projected(h: Mat3, xi: Sym3) -> EulerianState {
        EulerianState {
            h: h.deviatoric(),
            xi,
            incompressible: true,
        }
    }
}

/// Named real material parameters shared by the model constructors.
///
/// Defaults follow the nondimensional conventions used throughout: unit
/// reference density, unit moduli and viscosities, relaxation times
/// `lambda1 = 10 > lambda2 = 1`, shaking frequency `omega = 0.75`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialParams {
    /// Reference mass density P (mass/volume).
    pub density: f64,
    /// Shear modulus mu.
    pub mu: f64,
    /// First Lame parameter lambda.
    pub lambda: f64,
    /// Kinematic viscosity coefficient nu.
    pub nu: f64,
    /// Total viscosity eta of a two-component complex fluid.
    pub eta: f64,
    /// Solvent viscosity; derived from (eta, lambda1, lambda2) when `None`.
    pub eta_s: Option<f64>,
    /// Polymer viscosity; derived from (eta, lambda1, lambda2) when `None`.
    pub eta_p: Option<f64>,
    /// Relaxation time lambda1.
    pub lambda1: f64,
    /// Retardation time lambda2 (< lambda1).
    pub lambda2: f64,
    /// Flow-rule mobility kappa.
    pub kappa: f64,
    /// Fourier conductivity k.
    pub conductivity: f64,
    /// Shaking angular frequency omega.
    pub omega: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            density: 1.0,
            mu: 1.0,
            lambda: 1.0,
            nu: 1.0,
            eta: 1.0,
            eta_s: None,
            eta_p: None,
            lambda1: 10.0,
            lambda2: 1.0,
            kappa: 1.0,
            conductivity: 1.0,
            omega: 0.75,
        }
    }
}

impl MaterialParams {
    /// Checks positivity of all declared-positive parameters and the
    /// `lambda1 > lambda2` ordering required by the complex fluid models.
    pub fn validate(&self) -> Result<()> {
        let positive: [(&str, f64); 8] = [
            ("density", self.density),
            ("mu", self.mu),
            ("nu", self.nu),
            ("eta", self.eta),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("kappa", self.kappa),
            ("conductivity", self.conductivity),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be strictly positive (got {v})"
                )));
            }
        }
        if self.lambda1 <= self.lambda2 {
            return Err(Error::InvalidParams(format!(
                "lambda1 must exceed lambda2 (got lambda1 = {}, lambda2 = {})",
                self.lambda1, self.lambda2
            )));
        }
        Ok(())
    }

    /// Solvent/polymer viscosities: explicit values when set, otherwise the
    /// split derived from `(eta, lambda1, lambda2)`.
    pub fn viscosity_split(&self) -> Result<(f64, f64)> {
        match (self.eta_s, self.eta_p) {
            (Some(s), Some(p)) => Ok((s, p)),
            (None, None) => solvent_polymer_split(self.eta, self.lambda1, self.lambda2),
            _ => Err(Error::InvalidParams(
                "eta_s and eta_p must be set together".into(),
            )),
        }
    }

    /// Parses the flat `name = value` configuration format. Lines may be
    /// blank or `#` comments; values parse as decimal floating point
    /// (bit-exact via the standard correctly-rounded parser).
    pub fn from_config_str(text: &str) -> Result<MaterialParams> {
        let mut params = MaterialParams::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: lineno + 1,
                msg: format!("expected `name = value`, got `{raw}`"),
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|e| Error::Config {
                line: lineno + 1,
                msg: format!("bad value for `{key}`: {e}"),
            })?;
            match key {
                "density" => params.density = value,
                "mu" => params.mu = value,
                "lambda" => params.lambda = value,
                "nu" => params.nu = value,
                "eta" => params.eta = value,
                "eta_s" => params.eta_s = Some(value),
                "eta_p" => params.eta_p = Some(value),
                "lambda1" => params.lambda1 = value,
                "lambda2" => params.lambda2 = value,
                "kappa" => params.kappa = value,
                "conductivity" => params.conductivity = value,
                "omega" => params.omega = value,
                _ => {
                    return Err(Error::Config {
                        line: lineno + 1,
                        msg: format!("unknown parameter `{key}`"),
                    })
                }
            }
        }
        Ok(params)
    }

    pub fn from_config_file(path: &Path) -> Result<MaterialParams> {
        let text = std::fs::read_to_string(path)?;
        MaterialParams::from_config_str(&text)
    }
}

/// Splits a total viscosity into solvent and polymer parts:
/// `eta_s = (lambda2/lambda1) eta`, `eta_p = eta - eta_s`.
///
/// The pair always reconstructs the total exactly.
pub fn solvent_polymer_split(eta: f64, lambda1: f64, lambda2: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0) || !(lambda2 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "viscosity split requires eta > 0 and lambda2 > 0 (eta = {eta}, lambda2 = {lambda2})"
        )));
    }
    if lambda1 <= lambda2 {
        return Err(Error::InvalidParams(format!(
            "viscosity split requires lambda1 > lambda2 (lambda1 = {lambda1}, lambda2 = {lambda2})"
        )));
    }
    // The pair must reconstruct the total exactly. Rounding can make that
    // impossible for the ideal eta_s (the candidate sums land on rounding
    // midpoints and round-to-even skips eta), so nudge eta_s by ulps until a
    // complement closes the sum; for eta_s >= eta/2 the complement is exact
    // outright.
    let ideal = (lambda2 / lambda1) * eta;
    let complement = |eta_s: f64| -> Option<f64> {
        let mut eta_p = eta - eta_s;
        for _ in 0..4 {
            let sum = eta_s + eta_p;
            if sum == eta {
                return Some(eta_p);
            }
            eta_p += eta - sum;
        }
        None
    };
    let candidates = [
        ideal,
        ideal.next_up(),
        ideal.next_down(),
        ideal.next_up().next_up(),
        ideal.next_down().next_down(),
    ];
    for eta_s in candidates {
        if let Some(eta_p) = complement(eta_s) {
            return Ok((eta_s, eta_p));
        }
    }
    Ok((ideal, eta - ideal))
}
