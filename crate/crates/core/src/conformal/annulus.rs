//! Annulus <-> cylinder conformal equivalence and the annulus crossing
//! exponent.
//!
//! `z -> A*log(z)` maps the annulus `r1 < |z| < r2` to a cylinder of width
//! `A*ln(r2/r1)` and circumference `2*pi*A` (the vertical direction is
//! periodic).

use crate::{Error, Result, Scalar};

/// Cylinder dimensions `(width, circumference)` equivalent to the annulus
/// with radii `r1 < r2`, at map scale `a`.
pub fn annulus_to_cylinder<T: Scalar>(r1: T, r2: T, a: T) -> Result<(T, T)> {
    if !(T::zero() < r1 && r1 <= r2) {
        return Err(Error::Domain(format!(
            "annulus radii must satisfy 0 < r1 <= r2: ({r1}, {r2})"
        )));
    }
    if a <= T::zero() {
        return Err(Error::Domain(format!("map scale must be positive: {a}")));
    }
    let two_pi = T::of(std::f64::consts::TAU);
    Ok((a * (r2 / r1).ln(), two_pi * a))
}

/// Radius ratio `r2/r1` of the annulus equivalent to a cylinder:
/// `exp(2*pi*width/circumference)`.
pub fn radius_ratio_from_cylinder<T: Scalar>(width: T, circumference: T) -> Result<T> {
    if width < T::zero() || circumference <= T::zero() {
        return Err(Error::Domain(format!(
            "cylinder dimensions must be positive: ({width}, {circumference})"
        )));
    }
    Ok((T::of(std::f64::consts::TAU) * width / circumference).exp())
}

/// Predicted decay exponent of the side-to-side annulus crossing
/// probability in the radius ratio: `(r2/r1)^(-5/48)`.
pub fn annulus_exponent_prediction<T: Scalar>() -> T {
    T::of(5.0 / 48.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_dimensions() {
        let (w, c) = annulus_to_cylinder(1.0f64, 10.0, 53.0).unwrap();
        assert!((w - 122.0).abs() < 1.0, "width {w}");
        assert!((c - 333.0).abs() < 1.0, "circumference {c}");
    }

    #[test]
    fn degenerate_annulus_has_zero_width() {
        let (w, _) = annulus_to_cylinder(3.0f64, 3.0, 7.0).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn invalid_radii_rejected() {
        assert!(annulus_to_cylinder(0.0f64, 1.0, 1.0).is_err());
        assert!(annulus_to_cylinder(2.0f64, 1.0, 1.0).is_err());
        assert!(annulus_to_cylinder(1.0f64, 2.0, 0.0).is_err());
    }

    #[test]
    fn ratio_roundtrip() {
        let (w, c) = annulus_to_cylinder(2.0f64, 17.0, 11.0).unwrap();
        let ratio = radius_ratio_from_cylinder(w, c).unwrap();
        assert!((ratio - 8.5).abs() < 1e-12);
    }

    #[test]
    fn known_lattice_cylinders() {
        // 202 x 240 and 122 x 332 (width x circumference).
        let r = radius_ratio_from_cylinder(202.0f64, 240.0).unwrap();
        assert!((r - 198.0).abs() < 0.2, "ratio {r}");
        let r = radius_ratio_from_cylinder(122.0f64, 332.0).unwrap();
        assert!((r - 10.06).abs() < 0.02, "ratio {r}");
    }

    #[test]
    fn exponent_value_and_factor() {
        let e: f64 = annulus_exponent_prediction();
        assert!((e - 0.10416666666666667).abs() < 1e-15);
        let factor = 16.0f64.powf(-e);
        assert!((factor - 0.749).abs() < 5e-4, "factor {factor}");
    }
}
