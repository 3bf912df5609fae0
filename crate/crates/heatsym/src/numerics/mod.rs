//! Numerical kernels shared by the higher-level modules: adaptive
//! quadrature, bracketed root finding, an adaptive Runge-Kutta integrator,
//! piecewise-cubic profiles, the logarithmic integral, and small helpers.

pub mod interp;
pub mod ode;
pub mod par;
pub mod quad;
pub mod rational;
pub mod roots;
pub mod special;

pub use interp::HermiteProfile;
pub use ode::{rk45, OdeOptions};
pub use quad::{integrate, integrate_to_inf};
pub use rational::rationalize;
pub use roots::{brent, expand_bracket};
pub use special::{li, li_inv};
