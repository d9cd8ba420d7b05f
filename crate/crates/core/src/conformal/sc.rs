//! Schwarz-Christoffel map from the unit disk to parallelograms, and the
//! cross-ratio <-> aspect-ratio conversions built on it.
//!
//! With `w0 = exp(i*theta0)` on the unit circle, the map
//!
//! ```text
//! phi(w) = integral from 0 to w of (u^2 - w0^2)^(alpha-1) (u^2 - conj(w0)^2)^(-alpha) du
//! ```
//!
//! sends the circle to a parallelogram with vertices, in clockwise order,
//! `phi(w0), phi(conj(w0)), phi(-w0), phi(-conj(w0))` and interior angle
//! `alpha*pi` at `phi(w0)`. The integrand is even, so
//! `phi(-w) = -phi(w)` and only two vertex integrals are ever needed.
//!
//! Branch bookkeeping: the integrand is analytic in the open disk; its branch
//! is anchored by the principal logarithm at `u = 0`. Along a radial path the
//! auxiliary variable `v = (w*s)^2` traces a straight segment, so the argument
//! of each factor never swings by `pi` or more and can be continued from the
//! anchor without unwinding loops.
//!
//! Vertex integrals have an endpoint singularity `(1-s)^mu` with
//! `mu = alpha-1` or `-alpha`; the substitution `1-s = t^(1/(mu+1))` removes
//! it exactly, and an adaptive bisection quadrature resolves the remaining
//! boundary layer when the two prevertices nearly coincide (extreme aspect
//! ratios).

use num_complex::Complex;

use crate::{Error, Result, Scalar};

/// 16-point Gauss-Legendre nodes on [-1, 1] (positive half).
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_082,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

fn gl16<T: Scalar, F: Fn(T) -> Complex<T>>(f: &F, a: T, b: T) -> Complex<T> {
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..8 {
        let dx = half * T::of(GL_X[i]);
        let w = T::of(GL_W[i]);
        let s = f(mid + dx) + f(mid - dx);
        acc = acc + s * w;
    }
    acc * half
}

/// Adaptive bisection quadrature on [a, b]; refines wherever the two-half
/// estimate disagrees with the whole-panel estimate.
fn adaptive<T: Scalar, F: Fn(T) -> Complex<T>>(
    f: &F,
    a: T,
    b: T,
    whole: Complex<T>,
    tol: T,
    depth: u32,
) -> Result<Complex<T>> {
    let mid = (a + b) * T::of(0.5);
    let left = gl16(f, a, mid);
    let right = gl16(f, mid, b);
    let sum = left + right;
    // Roundoff floor: once the two-half estimate agrees with the whole-panel
    // one to a few ulps of the panel magnitudes, refining further only
    // chases noise.
    let floor = T::epsilon() * T::of(8.0) * (left.norm() + right.norm() + whole.norm());
    if (sum - whole).norm() <= T::max(tol, floor) {
        return Ok(sum);
    }
    if depth == 0 {
        return Err(Error::Numeric(
            "Schwarz-Christoffel quadrature did not converge".into(),
        ));
    }
    let half_tol = tol * T::of(0.5);
    Ok(adaptive(f, a, mid, left, half_tol, depth - 1)?
        + adaptive(f, mid, b, right, half_tol, depth - 1)?)
}

fn integrate<T: Scalar, F: Fn(T) -> Complex<T>>(f: &F, tol: T) -> Result<Complex<T>> {
    let whole = gl16(f, T::zero(), T::one());
    adaptive(f, T::zero(), T::one(), whole, tol, 60)
}

fn quad_tol<T: Scalar>() -> T {
    T::max(T::of(1e-12), T::epsilon() * T::of(100.0))
}

/// `q^e` with the argument of `q` continued from the anchor value `m0`
/// (the factor's value at the start of the path). Valid while the path of
/// `q/m0` stays within a half-turn of the anchor, which radial paths do.
#[inline]
fn pow_anchored<T: Scalar>(q: Complex<T>, e: T, arg_m0: T) -> Complex<T> {
    let arg = arg_m0 + (q * Complex::from_polar(T::one(), -arg_m0)).arg();
    Complex::from_polar(q.norm().powf(e), e * arg)
}

/// Vertex integral `phi(c)` where `c` is the prevertex with exponent `ec`
/// and `d` the other prevertex (exponent `ed`), both on the unit circle.
fn vertex_integral<T: Scalar>(
    c: Complex<T>,
    ec: T,
    d: Complex<T>,
    ed: T,
) -> Result<Complex<T>> {
    let c2 = c * c;
    let d2 = d * d;
    let arg_c = (-c2).arg();
    let arg_d = (-d2).arg();
    // c^2 - d^2 as (c-d)(c+d): c and d are conjugate-related unit numbers,
    // so the componentwise differences carry no cancellation.
    let diff = (c - d) * (c + d);
    // Exact removal of the endpoint singularity: 1 - s = t^(1/(ec+1)).
    let p = T::one() / (ec + T::one());
    let f = move |t: T| -> Complex<T> {
        let one_minus_s = t.powf(p);
        let s = T::one() - one_minus_s;
        // (c^2 (s^2 - 1))^ec with (1-s)^ec extracted by the substitution:
        // modulus contribution (1+s)^ec, phase ec*Arg(-c^2).
        let smooth = (T::one() + s).powf(ec);
        let phase = Complex::from_polar(smooth, ec * arg_c);
        // q = c^2 s^2 - d^2, written to stay accurate when the prevertices
        // nearly coincide and s is near 1 (both terms would then cancel).
        let q = diff - c2 * (one_minus_s * (T::one() + s));
        c * phase * pow_anchored(q, ed, arg_d) * p
    };
    integrate(&f, quad_tol::<T>())
}

/// The Schwarz-Christoffel map `phi(w)` for interior angle fraction `alpha`
/// and prevertex `w0` on the unit circle, evaluated along the radial path.
///
/// `w` may lie on the closed disk; if it coincides with a prevertex the
/// singular endpoint is handled by a regularizing substitution.
pub fn sc_map<T: Scalar>(alpha: T, w0: Complex<T>, w: Complex<T>) -> Result<Complex<T>> {
    if !(T::zero() < alpha && alpha < T::one()) {
        return Err(Error::Domain(format!("sc_map: alpha out of (0,1): {alpha}")));
    }
    if ((w0.norm() - T::one()).abs()) > T::of(1e-9) {
        return Err(Error::Domain("sc_map: w0 must lie on the unit circle".into()));
    }
    if w.norm() > T::one() + T::of(1e-9) {
        return Err(Error::Domain("sc_map: w outside the closed disk".into()));
    }
    if w.norm() == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let wb0 = w0.conj();
    let near = T::of(1e-12);
    for (pv, sign) in [(w0, T::one()), (-w0, -T::one())] {
        if (w - pv).norm() < near {
            return Ok(vertex_integral(w0, alpha - T::one(), wb0, -alpha)?
                * Complex::new(sign, T::zero()));
        }
    }
    for (pv, sign) in [(wb0, T::one()), (-wb0, -T::one())] {
        if (w - pv).norm() < near {
            return Ok(vertex_integral(wb0, -alpha, w0, alpha - T::one())?
                * Complex::new(sign, T::zero()));
        }
    }
    let w02 = w0 * w0;
    let wb02 = wb0 * wb0;
    let arg_a = (-w02).arg();
    let arg_b = (-wb02).arg();
    let w2 = w * w;
    // w^2 s^2 - w0^2 = (w - w0)(w + w0) - w^2 (1-s)(1+s): the difference
    // factors carry no cancellation, which matters when w approaches a
    // prevertex and both raw terms are unit-sized while their difference
    // is tiny near s = 1.
    let diff_a = (w - w0) * (w + w0);
    let diff_b = (w - wb0) * (w + wb0);
    let f = move |s: T| -> Complex<T> {
        let shrink = w2 * ((T::one() - s) * (T::one() + s));
        w * pow_anchored(diff_a - shrink, alpha - T::one(), arg_a)
            * pow_anchored(diff_b - shrink, -alpha, arg_b)
    };
    integrate(&f, quad_tol::<T>())
}

/// The four parallelogram vertices `[phi(w0), phi(conj w0), -phi(w0),
/// -phi(conj w0)]` in clockwise order, for `w0 = exp(i*theta0)`.
pub fn sc_vertices<T: Scalar>(alpha: T, theta0: T) -> Result<[Complex<T>; 4]> {
    let w0 = Complex::from_polar(T::one(), theta0);
    let wb0 = w0.conj();
    let v1 = vertex_integral(w0, alpha - T::one(), wb0, -alpha)?;
    let v2 = vertex_integral(wb0, -alpha, w0, alpha - T::one())?;
    Ok([v1, v2, -v1, -v2])
}

/// Side-length quotient of the image parallelogram: |bottom| / |left| where
/// the left side joins `phi(w0)` to `phi(conj w0)` and the bottom joins
/// `phi(-conj w0)` to `phi(w0)`. Strictly decreasing in `theta0`, from
/// infinity at 0 to 0 at pi/2.
pub fn side_ratio<T: Scalar>(alpha: T, theta0: T) -> Result<T> {
    let v = sc_vertices(alpha, theta0)?;
    Ok((v[0] + v[1]).norm() / ((v[1] - v[0]).norm()))
}

fn solve_theta0<T: Scalar>(alpha: T, r: T, tol: T) -> Result<T> {
    if r <= T::zero() || !r.is_finite() {
        return Err(Error::Domain(format!("aspect ratio must be positive: {r}")));
    }
    let eps = T::of(1e-8);
    let half_pi = T::of(std::f64::consts::FRAC_PI_2);
    let (mut lo, mut hi) = (eps, half_pi - eps);
    // Objective on a log scale; decreasing in theta0.
    let obj = |t: T| -> Result<T> { Ok((side_ratio(alpha, t)? / r).ln()) };
    let mut flo = obj(lo)?;
    let mut fhi = obj(hi)?;
    if flo < T::zero() || fhi > T::zero() {
        return Err(Error::Numeric(format!(
            "aspect ratio {r} outside representable bracket"
        )));
    }
    // Illinois variant of regula falsi; bisection fallback keeps the bracket.
    for iter in 0..200 {
        let denom = fhi - flo;
        let mid = if denom.abs() > T::epsilon() {
            let m = lo - flo * (hi - lo) / denom;
            if m <= lo || m >= hi {
                (lo + hi) * T::of(0.5)
            } else {
                m
            }
        } else {
            (lo + hi) * T::of(0.5)
        };
        let fm = obj(mid)?;
        if fm.abs() <= tol || (hi - lo) <= T::epsilon() * T::of(4.0) {
            return Ok(mid);
        }
        if fm > T::zero() {
            if iter % 2 == 1 {
                fhi = fhi * T::of(0.5);
            }
            lo = mid;
            flo = fm;
        } else {
            if iter % 2 == 1 {
                flo = flo * T::of(0.5);
            }
            hi = mid;
            fhi = fm;
        }
    }
    Err(Error::Numeric("theta0 root finding did not converge".into()))
}

fn residual_tol<T: Scalar>() -> T {
    T::max(T::of(1e-10), T::epsilon() * T::of(100.0))
}

/// Cross-ratio `z = sin^2(theta0)` of the four marked points for a rectangle
/// of aspect ratio `r`. Strictly decreasing with `z(1/r) = 1 - z(r)`.
pub fn rect_to_crossratio<T: Scalar>(r: T) -> Result<T> {
    let half = T::of(0.5);
    let t = solve_theta0(half, r, residual_tol::<T>())?;
    Ok(t.sin() * t.sin())
}

/// Inverse of [`rect_to_crossratio`].
pub fn crossratio_to_rect<T: Scalar>(z: T) -> Result<T> {
    if !(T::zero() < z && z < T::one()) {
        return Err(Error::Domain(format!("cross-ratio out of (0,1): {z}")));
    }
    side_ratio(T::of(0.5), z.sqrt().asin())
}

/// Aspect ratio of the unique rectangle conformally equivalent (vertices to
/// vertices) to the parallelogram with interior angle `alpha*pi` and side
/// quotient `r` (crossing-span side over crossed side). Rotation of the
/// parallelogram does not enter.
pub fn parallelogram_to_rect<T: Scalar>(alpha: T, r: T) -> Result<T> {
    parallelogram_to_rect_tol(alpha, r, residual_tol::<T>())
}

/// As [`parallelogram_to_rect`] with a caller-chosen residual tolerance
/// (coarse tolerances speed up the shear-fit grid search).
pub fn parallelogram_to_rect_tol<T: Scalar>(alpha: T, r: T, tol: T) -> Result<T> {
    if !(T::zero() < alpha && alpha < T::one()) {
        return Err(Error::Domain(format!("alpha out of (0,1): {alpha}")));
    }
    let t = solve_theta0(alpha, r, tol)?;
    side_ratio(T::of(0.5), t)
}

/// Cross-ratio of the four marked boundary points of the parallelogram with
/// interior angle `alpha*pi` and side quotient `r`. Crossing probabilities
/// depend only on this value, so callers that feed Cardy's formula directly
/// can skip the inverse map back to a rectangle.
pub fn parallelogram_crossratio_tol<T: Scalar>(alpha: T, r: T, tol: T) -> Result<T> {
    if !(T::zero() < alpha && alpha < T::one()) {
        return Err(Error::Domain(format!("alpha out of (0,1): {alpha}")));
    }
    let t = solve_theta0(alpha, r, tol)?;
    Ok(t.sin() * t.sin())
}

/// A Schwarz-Christoffel quadrilateral: the parallelogram image together
/// with its prevertex angle, for boundary-point computations.
#[derive(Debug, Clone)]
pub struct ScQuad<T: Scalar> {
    pub alpha: T,
    pub theta0: T,
    /// Clockwise: lower-left, upper-left, upper-right, lower-right.
    pub vertices: [Complex<T>; 4],
}

impl<T: Scalar> ScQuad<T> {
    pub fn new(alpha: T, theta0: T) -> Result<Self> {
        Ok(Self {
            alpha,
            theta0,
            vertices: sc_vertices(alpha, theta0)?,
        })
    }

    /// Quadrilateral with interior angle `alpha*pi` and side quotient `r`.
    pub fn for_ratio(alpha: T, r: T) -> Result<Self> {
        let theta0 = solve_theta0(alpha, r, residual_tol::<T>())?;
        Self::new(alpha, theta0)
    }

    pub fn side_ratio(&self) -> T {
        (self.vertices[0] + self.vertices[1]).norm()
            / (self.vertices[1] - self.vertices[0]).norm()
    }

    /// Image of the boundary point `exp(i*phi)`.
    pub fn map_angle(&self, phi: T) -> Result<Complex<T>> {
        let w0 = Complex::from_polar(T::one(), self.theta0);
        sc_map(self.alpha, w0, Complex::from_polar(T::one(), phi))
    }

    /// Fraction along a boundary side: finds the angle `phi` strictly inside
    /// the prevertex arc `(phi_a, phi_b)` whose image divides the side from
    /// `va` to `vb` in the ratio `frac : 1-frac` (by arc length from `va`).
    fn side_point_angle(
        &self,
        phi_a: T,
        phi_b: T,
        va: Complex<T>,
        vb: Complex<T>,
        frac: T,
    ) -> Result<T> {
        let target = (vb - va).norm() * frac;
        let pad = T::of(1e-6);
        let (mut lo, mut hi) = (phi_a + (phi_b - phi_a) * pad, phi_b - (phi_b - phi_a) * pad);
        // |image - va| grows monotonically from lo (near va) to hi (near vb)
        // when phi_a maps to va; otherwise swap.
        let d_lo = (self.map_angle(lo)? - va).norm();
        let d_hi = (self.map_angle(hi)? - va).norm();
        if d_lo > d_hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        for _ in 0..80 {
            let mid = (lo + hi) * T::of(0.5);
            let d = (self.map_angle(mid)? - va).norm();
            if (d - target).abs() <= T::of(1e-9) * (vb - va).norm() {
                return Ok(mid);
            }
            if d < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * T::of(0.5))
    }

    /// Angle on the left arc (through +1) of the point mapping to the
    /// midpoint of the left side (lower-left to upper-left).
    pub fn left_mid_angle(&self) -> Result<T> {
        // arc from theta0 (-> V1) to -theta0 (-> V2), passing through 0.
        self.side_point_angle(
            self.theta0,
            -self.theta0,
            self.vertices[0],
            self.vertices[1],
            T::of(0.5),
        )
    }

    /// Angle on the bottom arc (through +i) of the point mapping to the
    /// midpoint of the bottom side (lower-right to lower-left).
    pub fn bottom_mid_angle(&self) -> Result<T> {
        // arc from pi-theta0 (-> V4) to theta0 (-> V1).
        let pi = T::of(std::f64::consts::PI);
        self.side_point_angle(
            pi - self.theta0,
            self.theta0,
            self.vertices[3],
            self.vertices[0],
            T::of(0.5),
        )
    }
}

/// Cardy's prediction for a crossing between the boundary intervals
/// `[p1, p2]` and `[p3, p4]`, the points being the interval endpoints mapped
/// to the unit circle in clockwise order.
pub fn cardy_quad<T: Scalar>(pts: [Complex<T>; 4]) -> Result<T> {
    let [w1, w2, w3, w4] = pts;
    let lambda = ((w4 - w3) * (w2 - w1)) / ((w3 - w1) * (w4 - w2));
    if lambda.im.abs() > T::of(1e-6) {
        return Err(Error::Domain(
            "cardy_quad: points are not concyclic in order".into(),
        ));
    }
    super::cardy(lambda.re.max(T::zero()).min(T::one()))
}

/// Crossing prediction between the upper half of the left side and the right
/// half of the bottom side of a rectangle of aspect ratio `r`.
pub fn cardy_rect_d<T: Scalar>(r: T) -> Result<T> {
    let q = ScQuad::for_ratio(T::of(0.5), r)?;
    let phi_l = q.left_mid_angle()?;
    let phi_b = q.bottom_mid_angle()?;
    let pi = T::of(std::f64::consts::PI);
    let cis = |a: T| Complex::from_polar(T::one(), a);
    // clockwise: left-side midpoint, upper-left prevertex, lower-right
    // prevertex, bottom-side midpoint
    cardy_quad([
        cis(phi_l),
        cis(-q.theta0),
        cis(pi - q.theta0),
        cis(phi_b),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn diagonal_prediction_square() {
        // half-side to half-side crossing of the square; the complementary
        // pair must be dual.
        let d = cardy_rect_d(1.0f64).unwrap();
        assert!((d - 0.3244).abs() < 6e-5, "d = {d}");
    }

    #[test]
    fn diagonal_prediction_monotone_for_wide_rectangles() {
        // past the square, widening moves the two intervals apart
        let mut prev = 1.0f64;
        for &r in &[1.0, 1.5, 2.2, 3.3] {
            let d = cardy_rect_d(r).unwrap();
            assert!(d < prev, "r={r}: {d} !< {prev}");
            assert!(d > 0.0 && d < 1.0);
            prev = d;
        }
        // tall rectangles separate the intervals vertically instead
        assert!(cardy_rect_d(0.5f64).unwrap() < cardy_rect_d(1.0f64).unwrap());
    }

    /// Complete elliptic integral of the first kind via AGM, used as an
    /// independent oracle for the alpha = 1/2 Schwarz-Christoffel integral:
    /// the rectangle aspect ratio is K(sqrt(1-z)) / K(sqrt(z)), z = sin^2 t0.
    fn elliptic_k(k: f64) -> f64 {
        let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
        while (a - b).abs() > 1e-15 {
            let (an, bn) = ((a + b) / 2.0, (a * b).sqrt());
            a = an;
            b = bn;
        }
        FRAC_PI_2 / a
    }

    fn ratio_oracle(z: f64) -> f64 {
        elliptic_k((1.0 - z).sqrt()) / elliptic_k(z.sqrt())
    }

    #[test]
    fn square_symmetry_at_theta0_quarter_pi() {
        let v = sc_vertices(0.5, FRAC_PI_4).unwrap();
        let sides: Vec<f64> = (0..4)
            .map(|i| (v[(i + 1) % 4] - v[i]).norm())
            .collect();
        for s in &sides {
            assert!((s - sides[0]).abs() < 1e-8 * sides[0], "{sides:?}");
        }
        assert!((side_ratio(0.5, FRAC_PI_4).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn phi_origin_is_zero() {
        let w0 = num_complex::Complex::from_polar(1.0, 0.3 * PI);
        let z = sc_map(0.5, w0, num_complex::Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn interior_angle_is_alpha_pi() {
        for &alpha in &[0.5, 0.375, 0.25, 0.125] {
            for &t0 in &[0.3, FRAC_PI_4, 1.1] {
                let v = sc_vertices(alpha, t0).unwrap();
                // angle at V1 between sides V1->V2 and V1->V4
                let u = v[1] - v[0];
                let w = v[3] - v[0];
                let ang = (u / w).arg().abs();
                assert!(
                    (ang - alpha * PI).abs() < 1e-7,
                    "alpha={alpha} t0={t0}: angle {ang}"
                );
            }
        }
    }

    #[test]
    fn vertices_form_parallelogram() {
        for &alpha in &[0.5, 0.375, 0.125] {
            let v = sc_vertices(alpha, 0.7).unwrap();
            let diag = v[0] + v[2]; // opposite vertices are negatives
            assert!(diag.norm() < 1e-12);
            let s1 = v[1] - v[0];
            let s2 = v[2] - v[3];
            assert!((s1 - s2).norm() < 1e-8);
        }
    }

    #[test]
    fn half_alpha_ratio_matches_elliptic_oracle() {
        for &t0 in &[0.1f64, 0.3, FRAC_PI_4, 0.9, 1.4] {
            let z = t0.sin().powi(2);
            let want = ratio_oracle(z);
            let got = side_ratio(0.5, t0).unwrap();
            assert!(
                (got - want).abs() < 1e-9 * want.max(1.0),
                "t0={t0}: got {got}, oracle {want}"
            );
        }
    }

    #[test]
    fn crossratio_roundtrip() {
        // For r >= 1 the cross-ratio is small and carries full relative
        // precision. For r < 1 it approaches 1 and an f64 keeps only
        // absolute precision in 1-z, which caps the achievable round-trip
        // accuracy; the complement-symmetry test covers that range exactly.
        for i in 0..=40 {
            let r = 10.0f64.powf(i as f64 / 40.0); // log grid [1, 10]
            let z = rect_to_crossratio(r).unwrap();
            let back = crossratio_to_rect(z).unwrap();
            assert!((back - r).abs() < 1e-9 * r, "r={r}: back {back}");
        }
        for i in 0..=20 {
            let r = 0.1 * 10.0f64.powf(i as f64 / 20.0); // log grid [0.1, 1]
            let back = crossratio_to_rect(rect_to_crossratio(r).unwrap()).unwrap();
            assert!((back - r).abs() < 1e-4 * r, "r={r}: back {back}");
        }
    }

    #[test]
    fn crossratio_complement_symmetry() {
        for &r in &[0.3f64, 0.7, 1.0, 1.9, 4.2] {
            let z = rect_to_crossratio(r).unwrap();
            let zc = rect_to_crossratio(1.0 / r).unwrap();
            assert!((z + zc - 1.0).abs() < 1e-9, "r={r}");
        }
        assert!((rect_to_crossratio(1.0f64).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn parallelogram_to_rect_identity_for_rectangles() {
        for &r in &[0.5f64, 1.0, 2.0, 5.0] {
            let r0 = parallelogram_to_rect(0.5, r).unwrap();
            assert!((r0 - r).abs() < 1e-8 * r, "r={r}: r0={r0}");
        }
    }

    #[test]
    fn rhombus_is_equivalent_to_square() {
        for &alpha in &[0.375f64, 0.25, 0.125] {
            let r0 = parallelogram_to_rect(alpha, 1.0).unwrap();
            assert!((r0 - 1.0).abs() < 1e-7, "alpha={alpha}: r0={r0}");
        }
    }

    #[test]
    fn reflection_symmetry_alpha_vs_one_minus_alpha() {
        for &(alpha, r) in &[(0.375f64, 1.5), (0.25, 0.8), (0.3, 2.5)] {
            let a = parallelogram_to_rect(alpha, r).unwrap();
            let b = parallelogram_to_rect(1.0 - alpha, r).unwrap();
            assert!((a - b).abs() < 1e-7 * a, "alpha={alpha} r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn boundary_midpoints_on_square() {
        let q = ScQuad::new(0.5, FRAC_PI_4).unwrap();
        let phi = q.left_mid_angle().unwrap();
        let m = q.map_angle(phi).unwrap();
        let want = (q.vertices[0] + q.vertices[1]) * num_complex::Complex::new(0.5, 0.0);
        assert!((m - want).norm() < 1e-6);
        let phi_b = q.bottom_mid_angle().unwrap();
        let mb = q.map_angle(phi_b).unwrap();
        let want_b = (q.vertices[3] + q.vertices[0]) * num_complex::Complex::new(0.5, 0.0);
        assert!((mb - want_b).norm() < 1e-6);
    }

    #[test]
    fn cardy_quad_matches_cardy_rect_on_vertices() {
        // Using the four prevertices themselves reproduces pi_h(r).
        for &r in &[1.0f64, 1.5, 2.5] {
            let z = rect_to_crossratio(r).unwrap();
            let t0 = z.sqrt().asin();
            let w0 = num_complex::Complex::from_polar(1.0, t0);
            let pts = [w0, w0.conj(), -w0, -w0.conj()];
            let a = cardy_quad(pts).unwrap();
            let b = super::super::cardy(z).unwrap();
            assert!((a - b).abs() < 1e-12, "r={r}");
        }
    }
}
