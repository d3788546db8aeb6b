//! Concrete material models: thermo-elastic gases, kinematically viscous
//! solids and fluids, the nonlinear 3d Maxwell family, complex fluids with
//! objective-derivative flow rules, and 0d rheological prototypes.

pub mod complex;
pub mod elastic;
pub mod energy;
pub mod isotropic;
pub mod maxwell;
pub mod rheo0d;
pub mod viscous;

pub use complex::{
    complex_fluid, zj_free_energy, zj_free_energy_z, ComplexFluid, FreeEnergyKind, ObjectiveKind,
};
pub use elastic::{perfect_gas, PerfectGas};
pub use energy::{
    stored_energy_gradient, stvenant_kirchhoff, SaintVenantKirchhoff, SharedEnergy, StoredEnergy,
};
pub use isotropic::{isotropic_cauchy_law, IsotropicViscousLaw, JointInvariants};
pub use maxwell::{
    generalized_maxwell3d, maxwell3d, GeneralizedMaxwell3d, Maxwell3d, MaxwellVariant,
};
pub use rheo0d::{
    kelvin_voigt0d, maxwell0d, GeneralizedMaxwell0d, KelvinVoigt0d, Maxwell0d, ZeroDModel,
};
pub use viscous::{
    kelvin_voigt3d, newtonian, reiner_rivlin, BrokenRateLaw, KelvinVoigt3d, Newtonian,
    ReinerRivlin, SkewStressLaw,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::laws::MaterialModel;
use crate::state::MaterialParams;

/// A model built from the catalog, in whichever of the three descriptions it
/// naturally lives.
pub enum CatalogModel {
    Lagrangian(Box<dyn MaterialModel + Send + Sync>),
    Eulerian(ComplexFluid),
    ZeroD(ZeroDModel),
}

/// Names accepted by [`build_model`].
pub const MODEL_NAMES: &[&str] = &[
    "perfect-gas",
    "kelvin-voigt3d",
    "newtonian",
    "reiner-rivlin",
    "maxwell3d-svk",
    "maxwell3d-svk-fluid",
    "generalized-maxwell3d",
    "oldroyd-b",
    "zaremba-jaumann",
    "zaremba-jaumann-zj",
    "maxwell0d",
    "kelvin-voigt0d",
    "generalized-maxwell0d",
    "counterexample-h",
    "counterexample-skew",
];

/// Builds a named model from material parameters.
///
/// The complex fluids derive their solvent/polymer split from
/// `(eta, lambda1, lambda2)` unless `eta_s`/`eta_p` are set explicitly.
/// The `counterexample-*` entries are deliberately non-compliant laws kept
/// to pin the failure paths of the checkers.
pub fn build_model(name: &str, params: &MaterialParams) -> Result<CatalogModel> {
    let svk =
        || -> Result<SharedEnergy> { Ok(Arc::new(stvenant_kirchhoff(params.lambda, params.mu)?)) };
    let fluid = |kind: ObjectiveKind| -> Result<ComplexFluid> {
        let (eta_s, eta_p) = params.viscosity_split()?;
        complex_fluid(kind, eta_s, eta_p, params.lambda1)
    };
    let k = params.conductivity;

    Ok(match name {
        "perfect-gas" => {
            let mut gas = perfect_gas(1.0)?;
            gas.conductivity = k;
            CatalogModel::Lagrangian(Box::new(gas))
        }
        "kelvin-voigt3d" => {
            let mut kv = kelvin_voigt3d(svk()?, params.nu)?;
            kv.conductivity = k;
            CatalogModel::Lagrangian(Box::new(kv))
        }
        "newtonian" => {
            let mut n = newtonian(params.nu)?;
            n.conductivity = k;
            CatalogModel::Lagrangian(Box::new(n))
        }
        "reiner-rivlin" => {
            let nu = params.nu;
            // A generic shear-thickening law: beta1 grows with tr(d^2)
            // = i1^2 - 2 i2, plus a quadratic generator term.
            let mut rr = reiner_rivlin(
                |_, _, _| 0.0,
                move |_, iota, _| 2.0 * nu * (1.0 + 0.1 * (iota.0 * iota.0 - 2.0 * iota.1)),
                move |_, _, _| 0.3 * nu,
            );
            rr.density = params.density;
            rr.conductivity = k;
            CatalogModel::Lagrangian(Box::new(rr))
        }
        "maxwell3d-svk" => {
            let mut m = maxwell3d(svk()?, params.kappa, MaxwellVariant::Solid)?;
            m.conductivity = k;
            CatalogModel::Lagrangian(Box::new(m))
        }
        "maxwell3d-svk-fluid" => {
            let mut m = maxwell3d(svk()?, params.kappa, MaxwellVariant::Fluid)?;
            m.conductivity = k;
            CatalogModel::Lagrangian(Box::new(m))
        }
        "generalized-maxwell3d" => {
            let soft: SharedEnergy =
                Arc::new(stvenant_kirchhoff(0.5 * params.lambda, 0.5 * params.mu)?);
            let mut m = generalized_maxwell3d(svk()?, vec![svk()?, soft], params.kappa)?;
            m.conductivity = k;
            CatalogModel::Lagrangian(Box::new(m))
        }
        "oldroyd-b" => CatalogModel::Eulerian(fluid(ObjectiveKind::OldroydB)?),
        "zaremba-jaumann" => CatalogModel::Eulerian(fluid(ObjectiveKind::ZarembaJaumann)?),
        "zaremba-jaumann-zj" => CatalogModel::Eulerian(
            fluid(ObjectiveKind::ZarembaJaumann)?.with_free_energy(FreeEnergyKind::ZjQuadratic),
        ),
        "maxwell0d" => CatalogModel::ZeroD(ZeroDModel::Maxwell(maxwell0d(params.mu, params.nu)?)),
        "kelvin-voigt0d" => CatalogModel::ZeroD(ZeroDModel::KelvinVoigt(kelvin_voigt0d(
            params.mu, params.nu,
        )?)),
        "generalized-maxwell0d" => {
            CatalogModel::ZeroD(ZeroDModel::GeneralizedMaxwell(GeneralizedMaxwell0d::new(
                params.mu,
                vec![(params.mu, params.nu), (0.5 * params.mu, 0.5 * params.nu)],
            )?))
        }
        "counterexample-h" => CatalogModel::Lagrangian(Box::new(BrokenRateLaw)),
        "counterexample-skew" => CatalogModel::Lagrangian(Box::new(SkewStressLaw::standard())),
        other => return Err(Error::UnknownModel(other.to_string())),
    })
}
