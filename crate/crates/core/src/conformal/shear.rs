//! Shear matrices acting on rectangles: the geometry behind universality
//! fits for anisotropic models.
//!
//! A model related to the isotropic one by a linear map `g` has rectangle
//! crossing probabilities equal to the isotropic probabilities on the sheared
//! rectangle `g^-1 R_r`, a parallelogram, which in turn equals Cardy's value
//! at the conformally equivalent rectangle's aspect ratio.

use crate::{Error, Result, Scalar};

/// The inverse shear `g^-1 = [[a*sin(theta), 0], [-a*cos(theta), 1]]`,
/// parameterized by `a > 0` and `theta` in `(0, pi)`.
///
/// Applied to a rectangle with horizontal side `r` and vertical side 1, it
/// yields a parallelogram whose sides meet at angle `theta`: the horizontal
/// side maps to a segment of length `r*a` at angle `pi - theta` below the
/// image of the vertical side (which stays vertical, length 1).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShearMatrix<T> {
    pub a: T,
    pub theta: T,
}

impl<T: Scalar> ShearMatrix<T> {
    pub fn new(a: T, theta: T) -> Result<Self> {
        if !(a > T::zero() && a.is_finite()) {
            return Err(Error::Domain(format!("shear: a must be positive: {a}")));
        }
        if !(T::zero() < theta && theta < T::of(std::f64::consts::PI)) {
            return Err(Error::Domain(format!("shear: theta out of (0,pi): {theta}")));
        }
        Ok(Self { a, theta })
    }

    /// Matrix entries `[[m11, m12], [m21, m22]]` of `g^-1`.
    pub fn entries(&self) -> [[T; 2]; 2] {
        [
            [self.a * self.theta.sin(), T::zero()],
            [-self.a * self.theta.cos(), T::one()],
        ]
    }
}

/// Aspect ratio of the rectangle conformally equivalent to `g^-1 R_r`.
///
/// The image parallelogram has interior angle `theta` (fraction `theta/pi`)
/// and side quotient `r*a` (sheared horizontal over unchanged vertical);
/// reflection makes `theta` and `pi - theta` give the same crossing value.
pub fn shear_equivalent_rect<T: Scalar>(g: ShearMatrix<T>, r: T) -> Result<T> {
    shear_equivalent_rect_tol(g, r, T::max(T::of(1e-10), T::epsilon() * T::of(100.0)))
}

/// As [`shear_equivalent_rect`] with a caller-chosen root-finder tolerance.
pub fn shear_equivalent_rect_tol<T: Scalar>(g: ShearMatrix<T>, r: T, tol: T) -> Result<T> {
    if !(r > T::zero() && r.is_finite()) {
        return Err(Error::Domain(format!("aspect ratio must be positive: {r}")));
    }
    let pi = T::of(std::f64::consts::PI);
    let mut alpha = g.theta / pi;
    // theta and pi - theta differ by a reflection of the parallelogram,
    // which does not change the equivalent rectangle.
    if alpha > T::of(0.5) {
        alpha = T::one() - alpha;
    }
    super::sc::parallelogram_to_rect_tol(alpha, r * g.a, tol)
}

/// Large-aspect scale factor `B = sqrt(1 + a^2 cos^2 theta) / (a sin theta)`:
/// for `r -> infinity` the equivalent rectangle satisfies `r ~ B * r0`.
pub fn side_ratio_scale<T: Scalar>(g: ShearMatrix<T>) -> T {
    let (s, c) = (g.theta.sin(), g.theta.cos());
    (T::one() + g.a * g.a * c * c).sqrt() / (g.a * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn identity_shear_fixes_ratio() {
        let g = ShearMatrix::new(1.0, FRAC_PI_2).unwrap();
        for &r in &[0.5, 1.0, 2.0, 4.0] {
            let r0 = shear_equivalent_rect(g, r).unwrap();
            assert!((r0 - r).abs() < 1e-8 * r, "r={r}: {r0}");
        }
        assert!((side_ratio_scale(g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(ShearMatrix::new(0.0, FRAC_PI_2).is_err());
        assert!(ShearMatrix::new(-1.0, FRAC_PI_2).is_err());
        assert!(ShearMatrix::new(1.0, 0.0).is_err());
        assert!(ShearMatrix::new(1.0, PI).is_err());
    }

    #[test]
    fn theta_reflection_equivalence() {
        for &(a, th, r) in &[(0.8, 0.3 * PI, 1.5), (1.3, 0.4 * PI, 0.7)] {
            let g1 = ShearMatrix::new(a, th).unwrap();
            let g2 = ShearMatrix::new(a, PI - th).unwrap();
            let r1 = shear_equivalent_rect(g1, r).unwrap();
            let r2 = shear_equivalent_rect(g2, r).unwrap();
            assert!((r1 - r2).abs() < 1e-8 * r1);
        }
    }

    #[test]
    fn scale_factor_closed_form() {
        let g = ShearMatrix::new(0.7538, 0.2643 * PI).unwrap();
        let b = side_ratio_scale(g);
        assert!((b - 2.016).abs() < 5e-4, "B = {b}");
    }

    #[test]
    fn scale_monotone_decreasing_in_a_at_right_angle() {
        let mut prev = f64::INFINITY;
        for i in 1..=20 {
            let a = 0.2 * i as f64;
            let b = side_ratio_scale(ShearMatrix::new(a, FRAC_PI_2).unwrap());
            assert!(b < prev, "a={a}");
            prev = b;
        }
    }

    #[test]
    fn scale_is_side_ratio_of_forward_image() {
        // g R_{r0} (forward shear of the rectangle) is a parallelogram with
        // side quotient exactly B * r0.
        for &(a, th) in &[(0.7538, 0.2643 * PI), (1.4, 0.4 * PI), (0.6, 0.7 * PI)] {
            let g = ShearMatrix::new(a, th).unwrap();
            let m = g.entries();
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            // inverse of g^-1, i.e. g itself
            let gm = [
                [m[1][1] / det, -m[0][1] / det],
                [-m[1][0] / det, m[0][0] / det],
            ];
            for &r0 in &[0.5, 1.0, 3.0] {
                let h = (gm[0][0] * r0, gm[1][0] * r0); // image of (r0, 0)
                let v = (gm[0][1], gm[1][1]); // image of (0, 1)
                let ratio = (h.0 * h.0 + h.1 * h.1).sqrt() / (v.0 * v.0 + v.1 * v.1).sqrt();
                let want = side_ratio_scale(g) * r0;
                assert!((ratio - want).abs() < 1e-12 * want, "a={a} th={th} r0={r0}");
            }
        }
    }
}
