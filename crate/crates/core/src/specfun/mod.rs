//! Special functions and numeric kernels.

mod bessel;
mod contour;
mod gamma;
mod quadrature;
mod roots;

pub use bessel::{bessel_j, bessel_j_prime, bessel_zeros, bessel_zeros_below, MAX_ARG, MAX_ORDER};
pub(crate) use bessel::jn_pair;
pub use contour::{contour_integral, ContourResult, ContourSpec};
pub use gamma::{gamma_fn, unit_sphere_area};
pub use quadrature::{
    integrate, integrate_to_infinity, QuadResult, QuadratureScheme, QuadratureSpec,
};
pub use roots::{find_root, newton_polish};
