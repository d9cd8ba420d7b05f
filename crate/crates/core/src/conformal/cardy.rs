//! Cardy's crossing formula on the cross-ratio coordinate.

use crate::{Error, Result, Scalar};

/// Gamma(1/3) to 25 significant digits.
const GAMMA_ONE_THIRD: f64 = 2.678938534707747633654692;
/// Gamma(2/3) to 25 significant digits.
const GAMMA_TWO_THIRDS: f64 = 1.354117939426400416945288;

fn prefactor<T: Scalar>() -> T {
    // 3*Gamma(2/3)/Gamma(1/3)^2
    T::of(3.0 * GAMMA_TWO_THIRDS / (GAMMA_ONE_THIRD * GAMMA_ONE_THIRD))
}

/// Gauss hypergeometric series 2F1(1/3, 2/3; 4/3; z).
///
/// The parameters are fixed, so a direct power series suffices; callers keep
/// `z <= 1/2` (the reflection identity covers the rest), where the ratio test
/// guarantees fast convergence. Terminates when a term drops below the
/// machine epsilon times the partial sum.
pub fn hyp2f1_cardy<T: Scalar>(z: T) -> T {
    let (a, b, c) = (T::of(1.0 / 3.0), T::of(2.0 / 3.0), T::of(4.0 / 3.0));
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    for _ in 0..500 {
        term = term * (a + k) * (b + k) / ((c + k) * (k + T::one())) * z;
        sum = sum + term;
        k = k + T::one();
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// Cardy's formula: the horizontal crossing probability as a function of the
/// cross-ratio `z = sin^2(theta_0)` of the four marked boundary points.
///
/// For `z > 1/2` the reflection identity `pi(z) = 1 - pi(1-z)` is used, which
/// keeps the series argument small and enforces the symmetry exactly.
pub fn cardy<T: Scalar>(z: T) -> Result<T> {
    if !(T::zero()..=T::one()).contains(&z) {
        return Err(Error::Domain(format!("cardy: cross-ratio out of [0,1]: {z}")));
    }
    let half = T::of(0.5);
    if z > half {
        return Ok(T::one() - cardy(T::one() - z)?);
    }
    Ok(prefactor::<T>() * z.powf(T::of(1.0 / 3.0)) * hyp2f1_cardy(z))
}

/// Cardy's prediction for the horizontal crossing probability of a rectangle
/// of aspect ratio `r` (horizontal/vertical side quotient).
pub fn cardy_rect<T: Scalar>(r: T) -> Result<T> {
    cardy(super::rect_to_crossratio(r)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values() {
        assert_eq!(cardy(0.0f64).unwrap(), 0.0);
        assert_eq!(cardy(1.0f64).unwrap(), 1.0);
        assert!((cardy(0.5f64).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(cardy(-0.01f64).is_err());
        assert!(cardy(1.01f64).is_err());
    }

    #[test]
    fn reflection_identity_on_grid() {
        for i in 0..=1000 {
            let z = i as f64 / 1000.0;
            let s = cardy(z).unwrap() + cardy(1.0 - z).unwrap();
            assert!((s - 1.0).abs() <= 1e-12, "z={z}: {s}");
        }
    }

    #[test]
    fn strictly_increasing() {
        let mut prev = -1.0f64;
        for i in 0..=2000 {
            let z = i as f64 / 2000.0;
            let v = cardy(z).unwrap();
            assert!(v > prev, "not increasing at z={z}");
            prev = v;
        }
    }

    #[test]
    fn ode_residual_small() {
        // z(1-z) g'' + (2/3)(1-2z) g' = 0 for g = cardy, checked by central
        // finite differences. Points too close to 0 or 1 are excluded: the
        // z^(1/3) branch point makes the truncation error blow up there.
        let h = 3e-5;
        for i in 5..=95 {
            let z = i as f64 / 100.0;
            let gm = cardy(z - h).unwrap();
            let g0 = cardy(z).unwrap();
            let gp = cardy(z + h).unwrap();
            let d1 = (gp - gm) / (2.0 * h);
            let d2 = (gp - 2.0 * g0 + gm) / (h * h);
            let res = z * (1.0 - z) * d2 + (2.0 / 3.0) * (1.0 - 2.0 * z) * d1;
            assert!(res.abs() < 1e-6, "z={z}: residual {res}");
        }
    }

    #[test]
    fn f32_agrees_with_f64() {
        for i in 1..20 {
            let z = i as f64 / 20.0;
            let a = cardy(z).unwrap();
            let b = cardy(z as f32).unwrap();
            assert!((a - b as f64).abs() < 1e-5);
        }
    }
}
