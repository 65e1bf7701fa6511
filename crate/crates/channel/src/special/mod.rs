//! Numerical primitives: Gamma, Bessel K and adaptive quadrature.

pub mod bessel;
pub mod gamma;
pub mod quadrature;

pub use bessel::{bessel_k, bessel_k_saturating, bessel_k_scaled, bessel_k_series, ln_bessel_k};
pub use gamma::{gamma_fn, ln_gamma, ln_gamma_signed};
pub use quadrature::{integrate, integrate_plain, integrate_to_infinity, QuadratureSpec};
