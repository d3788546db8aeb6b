//! Finite-strain thermo-visco-elastic constitutive modeling with internal
//! variables, plus a randomized verification engine for thermodynamic
//! consistency, frame-indifference and material symmetry.
//!
//! The crate works at the material-point level with prescribed motions:
//!
//! - [`tensor3`]: exact 3x3 linear algebra (cofactors, invariants, symmetric
//!   eigendecomposition, the heat-flux orientation sign).
//! - [`state`]: thermodynamic state containers and material parameters.
//! - [`laws`]: the constitutive framework (free energy to entropy and
//!   thermoelastic stress, internal dissipation, dissipation potentials).
//! - [`heat`]: Fourier, general isotropic and fluid heat fluxes, diffusion
//!   potentials.
//! - [`models`]: concrete materials, from perfect gases to the nonlinear 3d
//!   Maxwell family and complex fluids with objective-derivative flow rules.
//! - [`dynamics`]: fixed-step integration along prescribed motions with
//!   dissipation diagnostics (shaking and relaxation experiments).
//! - [`verify`]: seeded randomized checkers with line-oriented reports.

// Positivity guards are written `!(x > 0.0)` so that NaN inputs fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod heat;
pub mod laws;
pub mod models;
pub mod state;
pub mod tensor3;
pub mod verify;

pub use error::{Error, Result};
