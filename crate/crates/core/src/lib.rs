//! Anti-plane shear analysis of isotropic hyperelastic energies.
//!
//! The crate evaluates energies given in invariants `W(I1, I2, I3)` with
//! exact second derivatives, checks APS-convexity and Knowles' conditions
//! along the shear path, and solves the restricted 2D and full 3D
//! equilibrium problems.

pub mod aps2d;
pub mod conditions;
pub mod diff;
pub mod energies;
pub mod error;
pub mod expr;
pub mod fem3d;
pub mod io;
pub mod kinematics;
pub mod linalg;
pub mod spectral;

pub use conditions::{CheckConfig, ConditionReport, Grid, Verdict, Witness};
pub use diff::{Jet2, Scalar};
pub use energies::{catalog, pucci_energy, CatalogEntry, EnergyModel};
pub use error::{Error, Result};
pub use expr::{parse, Expr, ParamTable};
pub use kinematics::{ApsGradient, InvariantTriple, Matrix3};
