//! Symmetry analysis toolkit for the nonlinear generalized radial heat equation
//!
//! ```text
//! C(u) u_t = z^{-nu} ( K(u) z^{nu} u_z )_z ,   z > 0, nu > 0,
//! ```
//!
//! with temperature-dependent coefficients `C(u)`, `K(u)`. The crate provides
//!
//! * a small symbolic expression core ([`expr`]) with exact rational
//!   constants, differentiation, simplification and evaluation,
//! * constitutive coefficient models ([`model`]) with the Kirchhoff
//!   transform `J(u) = ∫K(u)du` and the ratio classification `C/K`,
//! * the classified infinitesimal generators, determining-equation checks
//!   and commutator tables ([`symmetry`]),
//! * one-parameter transformation groups, both closed-form and by numeric
//!   integration of the Lie ODE system ([`flows`]),
//! * the catalog of invariant and similarity solutions ([`solutions`]),
//! * independent verification: PDE residuals and an implicit
//!   finite-difference cross-check solver ([`verify`]).
//!
//! Everything reachable from the `heatsym` command line lives here; the
//! binary is a thin front end over these modules.

pub mod error;
pub mod expr;
pub mod flows;
pub mod model;
pub mod numerics;
pub mod sampling;
pub mod solutions;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
