//! Exact conformal predictions: Cardy's formula, cross-ratio machinery,
//! Schwarz-Christoffel maps for parallelograms, shear-matrix geometry, and
//! the annulus/cylinder equivalence.
//!
//! Everything here is a pure function of its arguments and generic over the
//! floating-point scalar; `f64` is the default used by the experiments.

mod annulus;
mod cardy;
mod sc;
mod shear;

pub use annulus::{annulus_exponent_prediction, annulus_to_cylinder, radius_ratio_from_cylinder};
pub use cardy::{cardy, cardy_rect, hyp2f1_cardy};
pub use sc::{
    cardy_quad, cardy_rect_d, crossratio_to_rect, parallelogram_crossratio_tol,
    parallelogram_to_rect, parallelogram_to_rect_tol, rect_to_crossratio, sc_map, sc_vertices,
    side_ratio, ScQuad,
};
pub use shear::{shear_equivalent_rect, shear_equivalent_rect_tol, side_ratio_scale, ShearMatrix};
