//! Least-squares recovery of the universality shear matrix from striated
//! crossing data, and log-log fitting of the annulus crossing exponent.
//!
//! The shear objective needs the crossing prediction for thousands of
//! (angle, side-quotient) pairs; root-solving the Schwarz-Christoffel map for
//! each would dominate the fit. Instead a process-wide monotone interpolation
//! table of the prevertex angle is built once from the exact quadrature and
//! queried during optimization; `predict_parallelogram` stays exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::conformal::{cardy, parallelogram_crossratio_tol, side_ratio, ShearMatrix};
use crate::{Error, Result};

/// Measured horizontal/vertical crossing estimates for a family of
/// axis-parallel rectangles on the anisotropic model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StriatedRow {
    pub r: f64,
    pub pi_h: f64,
    pub pi_v: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StriatedDataset {
    pub rows: Vec<StriatedRow>,
}

impl StriatedDataset {
    pub fn new(rows: Vec<StriatedRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Domain("shear fit needs at least 2 rows".into()));
        }
        for row in &rows {
            if !(row.r > 0.0 && row.r.is_finite()) {
                return Err(Error::Domain(format!(
                    "aspect ratio must be positive: {}",
                    row.r
                )));
            }
            for p in [row.pi_h, row.pi_v] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Domain(format!("estimate out of [0,1]: {p}")));
                }
            }
        }
        Ok(Self { rows })
    }
}

/// A fitted shear `(a, theta)` with the objective value at the minimum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub theta: f64,
    pub residual: f64,
}

impl FitResult {
    pub fn matrix(&self) -> Result<ShearMatrix<f64>> {
        ShearMatrix::new(self.a, self.theta)
    }
}

/// Both least-squares minima: the fit determines theta only up to the
/// reflection theta -> pi - theta, which leaves every predicted crossing
/// value unchanged, so a second experiment is needed to pick between them.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShearFit {
    pub primary: FitResult,
    pub mirror: FitResult,
}

const THETA0_TOL: f64 = 1e-9;

/// Exact predicted horizontal crossing probability of the axis-parallel
/// rectangle of aspect ratio `r` under the model sheared by `(a, theta)`:
/// Cardy's value at the cross-ratio of the image parallelogram.
fn predicted_pi_h_exact(a: f64, theta: f64, r: f64) -> Result<f64> {
    let mut alpha = theta / PI;
    if alpha > 0.5 {
        alpha = 1.0 - alpha;
    }
    let z = parallelogram_crossratio_tol(alpha, a * r, THETA0_TOL)?;
    cardy(z)
}

// --- interpolation table -------------------------------------------------
//
// Variables: alpha in (0, 1/2] (interior angle fraction, folded) and
// v = ln(tan(theta0)) (prevertex angle on a symmetric log scale). The stored
// surface is ln(side_ratio), strictly decreasing in v for each alpha; the fit
// inverts it per row to recover theta0 from a target side quotient.

const TAB_ALPHA_LO: f64 = 0.02;
const TAB_N_ALPHA: usize = 65;
// matches the exact solver's theta0 bracket [1e-8, pi/2 - 1e-8]
const TAB_V_MAX: f64 = 18.42;
const TAB_N_V: usize = 121;

fn theta0_of_v(v: f64) -> f64 {
    v.exp().atan()
}

/// Cross-ratio sin^2(theta0) written through v without cancellation at
/// either end: sin^2(atan(e^v)) = 1/(1 + e^(-2v)).
fn crossratio_of_v(v: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * v).exp())
}

/// Fritsch-Carlson monotone cubic slopes for (xs, ys); flat where the data
/// loses strict monotonicity so interpolants never overshoot.
fn pchip_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = (0..n - 1).map(|i| xs[i + 1] - xs[i]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + m0 * h * (t3 - 2.0 * t2 + t)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + m1 * h * (t3 - t2)
}

struct RatioTable {
    alphas: Vec<f64>,
    vs: Vec<f64>,
    /// lnr[i][j] = ln(side_ratio(alphas[i], theta0(vs[j]))).
    lnr: Vec<Vec<f64>>,
    /// pchip slopes across alpha, per (i, j).
    dalpha: Vec<Vec<f64>>,
}

fn ratio_table() -> &'static RatioTable {
    static TABLE: OnceLock<RatioTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let alphas: Vec<f64> = (0..TAB_N_ALPHA)
            .map(|i| TAB_ALPHA_LO + (0.5 - TAB_ALPHA_LO) * i as f64 / (TAB_N_ALPHA - 1) as f64)
            .collect();
        // quadratic spacing: dense near v = 0 where the surface bends
        let vs: Vec<f64> = (0..TAB_N_V)
            .map(|j| {
                let t = -1.0 + 2.0 * j as f64 / (TAB_N_V - 1) as f64;
                TAB_V_MAX * t * t.abs()
            })
            .collect();
        let lnr: Vec<Vec<f64>> = alphas
            .iter()
            .map(|&alpha| {
                vs.iter()
                    .map(|&v| match side_ratio(alpha, theta0_of_v(v)) {
                        Ok(r) if r > 0.0 => r.ln(),
                        _ => f64::NAN,
                    })
                    .collect()
            })
            .collect();
        let mut dalpha = vec![vec![0.0; TAB_N_V]; TAB_N_ALPHA];
        for j in 0..TAB_N_V {
            let col: Vec<f64> = lnr.iter().map(|row| row[j]).collect();
            if col.iter().all(|y| y.is_finite()) {
                let m = pchip_slopes(&alphas, &col);
                for i in 0..TAB_N_ALPHA {
                    dalpha[i][j] = m[i];
                }
            } else {
                for i in 0..TAB_N_ALPHA {
                    dalpha[i][j] = f64::NAN;
                }
            }
        }
        RatioTable {
            alphas,
            vs,
            lnr,
            dalpha,
        }
    })
}

/// One alpha slice of the table: a strictly decreasing ln(ratio) curve in v
/// ready for inversion.
struct RatioRow {
    vs: Vec<f64>,
    lnr: Vec<f64>,
    slopes: Vec<f64>,
}

impl RatioTable {
    fn row_at(&self, alpha: f64) -> Option<RatioRow> {
        if !(self.alphas[0]..=0.5).contains(&alpha) {
            return None;
        }
        let i = self
            .alphas
            .partition_point(|&x| x < alpha)
            .clamp(1, self.alphas.len() - 1)
            - 1;
        let (a0, a1) = (self.alphas[i], self.alphas[i + 1]);
        let lnr: Vec<f64> = (0..self.vs.len())
            .map(|j| {
                hermite(
                    a0,
                    a1,
                    self.lnr[i][j],
                    self.lnr[i + 1][j],
                    self.dalpha[i][j],
                    self.dalpha[i + 1][j],
                    alpha,
                )
            })
            .collect();
        if !lnr.iter().all(|y| y.is_finite()) {
            return None;
        }
        // strict decrease is what makes the inversion well-posed
        if lnr.windows(2).any(|w| w[1] >= w[0]) {
            return None;
        }
        let neg: Vec<f64> = lnr.iter().map(|y| -y).collect();
        let slopes: Vec<f64> = pchip_slopes(&self.vs, &neg).iter().map(|m| -m).collect();
        Some(RatioRow {
            vs: self.vs.clone(),
            lnr,
            slopes,
        })
    }
}

impl RatioRow {
    /// v with interpolated ln(ratio) equal to `target`; None outside range.
    fn invert(&self, target: f64) -> Option<f64> {
        let n = self.vs.len();
        if target > self.lnr[0] || target < self.lnr[n - 1] {
            return None;
        }
        // lnr is decreasing: find the segment bracketing the target
        let j = self
            .lnr
            .partition_point(|&y| y > target)
            .clamp(1, n - 1)
            - 1;
        let (mut lo, mut hi) = (self.vs[j], self.vs[j + 1]);
        let f = |v: f64| {
            hermite(
                self.vs[j],
                self.vs[j + 1],
                self.lnr[j],
                self.lnr[j + 1],
                self.slopes[j],
                self.slopes[j + 1],
                v,
            ) - target
        };
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Table-backed prediction used inside the optimizer. None when the query
/// leaves the tabulated region (treated as out of bounds by the search).
fn predicted_pi_h_table(row: &RatioRow, q: f64) -> Option<f64> {
    let v = row.invert(q.ln())?;
    cardy(crossratio_of_v(v)).ok()
}

struct Objective<'a> {
    data: &'a StriatedDataset,
    rows: RefCell<HashMap<u64, Option<std::rc::Rc<RatioRow>>>>,
}

impl<'a> Objective<'a> {
    fn new(data: &'a StriatedDataset) -> Self {
        Self {
            data,
            rows: RefCell::new(HashMap::new()),
        }
    }

    fn row_for(&self, alpha: f64) -> Option<std::rc::Rc<RatioRow>> {
        self.rows
            .borrow_mut()
            .entry(alpha.to_bits())
            .or_insert_with(|| ratio_table().row_at(alpha).map(std::rc::Rc::new))
            .clone()
    }

    fn eval(&self, a: f64, theta: f64) -> f64 {
        if !(0.05..=8.0).contains(&a) || !(1e-3..=PI - 1e-3).contains(&theta) {
            return f64::INFINITY;
        }
        let mut alpha = theta / PI;
        if alpha > 0.5 {
            alpha = 1.0 - alpha;
        }
        let Some(row) = self.row_for(alpha) else {
            return f64::INFINITY;
        };
        let mut sum = 0.0;
        for d in &self.data.rows {
            match predicted_pi_h_table(&row, a * d.r) {
                Some(p) => sum += (d.pi_h - p).powi(2) + (d.pi_v - (1.0 - p)).powi(2),
                None => return f64::INFINITY,
            }
        }
        sum
    }
}

/// Nelder-Mead on a 2-D objective from a starting point and step sizes.
/// Returns the best vertex; errors if the simplex fails to collapse.
fn nelder_mead<F: Fn(f64, f64) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<([f64; 2], f64)> {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(|[x, y]| f(x, y));
    for _ in 0..max_iter {
        // order best..worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        let spread = (simplex[b][0] - simplex[w][0])
            .abs()
            .max((simplex[b][1] - simplex[w][1]).abs());
        if spread < tol {
            return Ok((simplex[b], values[b]));
        }
        let cen = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let refl = [
            cen[0] + (cen[0] - simplex[w][0]),
            cen[1] + (cen[1] - simplex[w][1]),
        ];
        let fr = f(refl[0], refl[1]);
        if fr < values[b] {
            let exp = [
                cen[0] + 2.0 * (cen[0] - simplex[w][0]),
                cen[1] + 2.0 * (cen[1] - simplex[w][1]),
            ];
            let fe = f(exp[0], exp[1]);
            if fe < fr {
                simplex[w] = exp;
                values[w] = fe;
            } else {
                simplex[w] = refl;
                values[w] = fr;
            }
        } else if fr < values[m] {
            simplex[w] = refl;
            values[w] = fr;
        } else {
            let con = [
                cen[0] + 0.5 * (simplex[w][0] - cen[0]),
                cen[1] + 0.5 * (simplex[w][1] - cen[1]),
            ];
            let fc = f(con[0], con[1]);
            if fc < values[w] {
                simplex[w] = con;
                values[w] = fc;
            } else {
                for i in 0..3 {
                    if i != b {
                        simplex[i] = [
                            0.5 * (simplex[i][0] + simplex[b][0]),
                            0.5 * (simplex[i][1] + simplex[b][1]),
                        ];
                        values[i] = f(simplex[i][0], simplex[i][1]);
                    }
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    Err(Error::Numeric(format!(
        "shear fit did not converge; best iterate a={}, theta={}, residual={}",
        simplex[best][0], simplex[best][1], values[best]
    )))
}

/// Least-squares fit of the shear parameters to rectangle crossing data.
///
/// Coarse 50x50 grid over a in [0.2, 3] x theta in (0, pi), then Nelder-Mead
/// refinement to 1e-6. The primary result has theta in (0, pi/2].
pub fn fit_shear(data: &StriatedDataset) -> Result<ShearFit> {
    StriatedDataset::new(data.rows.clone())?;
    let obj = Objective::new(data);
    let mut best = ([1.0, PI / 2.0], f64::INFINITY);
    for i in 0..50 {
        let a = 0.2 + 2.8 * i as f64 / 49.0;
        for j in 0..50 {
            // theta and pi - theta share a table row, so the upper half of
            // the grid is almost free
            let theta = PI * (j as f64 + 0.5) / 50.0;
            let v = obj.eval(a, theta);
            if v < best.1 {
                best = ([a, theta], v);
            }
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Numeric(
            "shear fit: no admissible grid point".into(),
        ));
    }
    let ([a, theta], table_residual) = nelder_mead(
        |a, t| obj.eval(a, t),
        best.0,
        [2.8 / 49.0 / 2.0, PI / 50.0 / 2.0],
        1e-7,
        500,
    )?;
    let theta_primary = if theta > PI / 2.0 { PI - theta } else { theta };
    // report the residual through the exact quadrature rather than the
    // interpolation table the search ran on
    let residual = data
        .rows
        .iter()
        .try_fold(0.0, |acc, d| -> Result<f64> {
            let p = predicted_pi_h_exact(a, theta_primary, d.r)?;
            Ok(acc + (d.pi_h - p).powi(2) + (d.pi_v - (1.0 - p)).powi(2))
        })
        .unwrap_or(table_residual);
    let primary = FitResult {
        a,
        theta: theta_primary,
        residual,
    };
    let mirror = FitResult {
        a,
        theta: PI - theta_primary,
        residual,
    };
    Ok(ShearFit { primary, mirror })
}

/// Predicted (pi_h, pi_v) for a parallelogram on the sheared model. `crossed`
/// is the side vector of the pair the horizontal crossing joins; `spanned`
/// is the other side. Both are mapped through the inverse shear and the
/// image's cross-ratio is fed to Cardy's formula (exact quadrature, no
/// interpolation).
pub fn predict_parallelogram(
    g: &ShearMatrix<f64>,
    crossed: [f64; 2],
    spanned: [f64; 2],
) -> Result<(f64, f64)> {
    let m = g.entries();
    let apply = |v: [f64; 2]| {
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    };
    let c = apply(crossed);
    let s = apply(spanned);
    let (nc, ns) = (c[0].hypot(c[1]), s[0].hypot(s[1]));
    if nc == 0.0 || ns == 0.0 {
        return Err(Error::Domain("degenerate parallelogram side".into()));
    }
    let cross = (c[0] * s[1] - c[1] * s[0]).abs();
    let dot = c[0] * s[0] + c[1] * s[1];
    let mut alpha = cross.atan2(dot) / PI;
    if alpha > 0.5 {
        alpha = 1.0 - alpha;
    }
    let z = parallelogram_crossratio_tol(alpha, ns / nc, THETA0_TOL)?;
    let p = cardy(z)?;
    Ok((p, 1.0 - p))
}

/// Ordinary least-squares slope of ln(pi_hat) against ln(ratio), negated.
/// Points with a zero estimate carry no information and are dropped.
pub fn fit_annulus_exponent(points: &[(f64, f64)]) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(ratio, p) in points {
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::Domain(format!(
                "annulus ratio must exceed 1: {ratio}"
            )));
        }
        if p <= 0.0 {
            eprintln!("fit_annulus_exponent: dropping zero estimate at ratio {ratio}");
            continue;
        }
        xs.push(ratio.ln());
        ys.push(p.ln());
    }
    if xs.len() < 2 {
        return Err(Error::Domain(
            "annulus exponent fit needs at least 2 nonzero points".into(),
        ));
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "annulus exponent fit needs distinct ratios".into(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    Ok(-(sxy / sxx))
}
