//! Special functions and quadrature primitives.

pub mod quadrature;
pub mod special;

pub use quadrature::{
    integrate, integrate_oscillatory, integrate_with_breaks, wynn_epsilon, Estimate, Interval, OscillatoryTail,
    QuadratureConfig,
};
pub use special::{digamma, gamma, log_gamma};
