//! Numerical laboratory for two-dimensional viscous vortex dynamics.
//!
//! The crate provides:
//! - periodic-box spectral fields with Biot-Savart inversion ([`grid`], [`fields`]);
//! - closed-form Lamb-Oseen machinery ([`oseen`]);
//! - Helmholtz-Kirchhoff point-vortex dynamics and a viscous
//!   regularization ([`pointvortex`]);
//! - a pseudo-spectral solver for the vorticity equation ([`solver`]);
//! - self-similar variables, the rescaled-diffusion semigroup, and entropy
//!   diagnostics ([`selfsim`]);
//! - radial grids and the angular-mode potentials ([`radial`]);
//! - the conjugated mode operators, their spectra, and spectral /
//!   pseudospectral bounds ([`modeop`]);
//! - strain profiles and the first-order core-deformation solve ([`strain`]);
//! - snapshot and trajectory persistence ([`io`]).

pub mod error;
pub mod fields;
pub mod grid;
pub mod oseen;
pub mod pointvortex;
pub mod modeop;
pub mod radial;

pub use error::{Result, VlabError};
pub use fields::{biot_savart, moments, project_subspace, pseudo_energy, weighted_norm};
pub use fields::{Moments, NormKind, NormValue, Subspace};
pub use grid::{GridSpec, ScalarField2D, VectorField2D};
pub use pointvortex::{Rhs, Trajectory, TrajectoryStatus, VortexConfiguration};
