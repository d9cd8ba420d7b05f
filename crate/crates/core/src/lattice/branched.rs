//! Two-sheeted cover of a parallelogram, branched over its center.
//!
//! The sites are the preimages, under `z -> z^2`, of the regular lattice in
//! the image region: a parallelogram `P` centered at the origin (horizontal
//! side `width`, slant side `r * width` at interior angle `alpha*pi`) maps
//! 2:1 onto its image, so every lattice site `w` of the image whose square
//! roots land inside `P` appears on two sheets, joined through the branch
//! point at the origin. Crossings of `P` are then read off the cover graph.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::conformal::ScQuad;
use crate::lattice::{
    point_in_convex_clockwise, segments_intersect, Adjacency, DiscreteDomain, LatticeKind,
    Topology,
};
use crate::{Error, Result};

/// Square root with the branch cut along the positive imaginary axis: the
/// continued argument lies in (-3*pi/2, pi/2], so the half-plane of angles
/// (-3*pi/4, pi/4] is the principal sheet.
fn sqrt_cut(x: i64, y: i64) -> Complex64 {
    if x == 0 && y == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let (xf, yf) = (x as f64, y as f64);
    let mut a = yf.atan2(xf);
    if a > std::f64::consts::FRAC_PI_2 {
        a -= std::f64::consts::TAU;
    }
    Complex64::from_polar((xf * xf + yf * yf).sqrt().sqrt(), 0.5 * a)
}

/// Whether a lattice bond between `w` and `wn` crosses the branch cut, so
/// that its lift connects opposite sheets. Bonds have |dx| <= 1, so only
/// pairs straddling x in (-1, 0) above the branch point qualify.
fn bond_swaps(w: (i64, i64), wn: (i64, i64)) -> bool {
    if w.0 == 0 && wn.0 == -1 {
        w.1 >= 1
    } else if w.0 == -1 && wn.0 == 0 {
        wn.1 >= 1
    } else {
        false
    }
}

/// Fractions along the left (slant) and bottom (horizontal) sides of the
/// parallelogram cut off by the conformal images of the corresponding
/// side midpoints of the equivalent rectangle. Measured from the lower-left
/// vertex on the left side and from the lower-right vertex on the bottom.
pub(crate) fn d_split_fractions(alpha: f64, r: f64) -> Result<(f64, f64)> {
    // The parallelogram and its equivalent rectangle share prevertices; the
    // side quotient in the prevertex convention is bottom/left = 1/r.
    let qp = ScQuad::<f64>::for_ratio(alpha, 1.0 / r)?;
    let qr = ScQuad::new(0.5, qp.theta0)?;
    let pl = qp.map_angle(qr.left_mid_angle()?)?;
    let pb = qp.map_angle(qr.bottom_mid_angle()?)?;
    let f_l = (pl - qp.vertices[0]).norm() / (qp.vertices[1] - qp.vertices[0]).norm();
    let f_b = (pb - qp.vertices[3]).norm() / (qp.vertices[0] - qp.vertices[3]).norm();
    Ok((f_l, f_b))
}

/// Build the branched double cover. `width` is the horizontal side of the
/// parallelogram in lattice units; `r` its slant-over-horizontal quotient;
/// the interior angle at the lower-left vertex is `alpha*pi`.
///
/// Boundary intervals: `top`/`bottom` (horizontal sides) and `left`/`right`
/// (slant sides) for the h and v events, plus `d_alpha` (upper part of the
/// left side), `d_beta` (right part of the bottom side) and their
/// complements `dbar_alpha`/`dbar_beta`, split at the conformal images of
/// the equivalent rectangle's side midpoints.
pub fn build_branched_double_cover(
    alpha: f64,
    r: f64,
    width: f64,
    lat: LatticeKind,
) -> Result<DiscreteDomain> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha out of (0,1): {alpha}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("side quotient must be positive: {r}")));
    }
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::Domain(format!("width must be positive: {width}")));
    }

    let b = width;
    let l = r * b;
    let (sa, ca) = (alpha * std::f64::consts::PI).sin_cos();
    let h = [b, 0.0];
    let s = [l * ca, l * sa];
    let v_ll = [-(h[0] + s[0]) / 2.0, -(h[1] + s[1]) / 2.0];
    let v_ul = [(s[0] - h[0]) / 2.0, (s[1] - h[1]) / 2.0];
    let v_ur = [(h[0] + s[0]) / 2.0, (h[1] + s[1]) / 2.0];
    let v_lr = [(h[0] - s[0]) / 2.0, (h[1] - s[1]) / 2.0];
    let vs = [v_ll, v_ul, v_ur, v_lr];

    // Image sites w must satisfy |w| = |sqrt w|^2 < max |vertex|^2.
    let rmax2 = vs
        .iter()
        .map(|v| v[0] * v[0] + v[1] * v[1])
        .fold(0.0f64, f64::max);
    let m = rmax2.ceil() as i64 + 1;
    let prune = (rmax2 + 1.0) * (rmax2 + 1.0);

    let mut worder: Vec<(i64, i64)> = Vec::new();
    let mut widx: HashMap<(i64, i64), u32> = HashMap::new();
    for y in -m..=m {
        for x in -m..=m {
            if (x * x + y * y) as f64 > prune {
                continue;
            }
            let zc = sqrt_cut(x, y);
            if point_in_convex_clockwise([zc.re, zc.im], &vs) {
                widx.insert((x, y), worder.len() as u32);
                worder.push((x, y));
            }
        }
    }
    let origin = *widx.get(&(0, 0)).ok_or_else(|| {
        Error::EmptyDomain("branched cover: branch point not inside the region".into())
    })?;
    let n_w = worder.len();
    let n = 2 * n_w - 1;

    // Cover indices: all sheet-0 sites first in scan order, then sheet-1
    // copies of everything but the branch point, which the sheets share.
    let id = |ord: u32, sheet: u8| -> u32 {
        if ord == origin || sheet == 0 {
            ord
        } else {
            n_w as u32 + ord - u32::from(ord > origin)
        }
    };

    let mut icoords = vec![[0i64; 2]; n];
    let mut coords = vec![[0f64; 2]; n];
    let mut sheet = vec![0u8; n];
    for (ord, &(x, y)) in worder.iter().enumerate() {
        let zc = sqrt_cut(x, y);
        let i0 = id(ord as u32, 0) as usize;
        icoords[i0] = [x, y];
        coords[i0] = [zc.re, zc.im];
        let i1 = id(ord as u32, 1) as usize;
        if i1 != i0 {
            icoords[i1] = [x, y];
            coords[i1] = [-zc.re, -zc.im];
            sheet[i1] = 1;
        }
    }

    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (ord, &(x, y)) in worder.iter().enumerate() {
        for &(dx, dy) in lat.offsets() {
            if (dx, dy) < (0, 0) || (dx, dy) == (-1, 0) || (dx, dy) == (0, -1) {
                continue; // each image bond once
            }
            let wn = (x + dx, y + dy);
            if let Some(&t) = widx.get(&wn) {
                let swap = u8::from(bond_swaps((x, y), wn));
                edges.push((id(ord as u32, 0), id(t, swap)));
                edges.push((id(ord as u32, 1), id(t, 1 - swap)));
            }
        }
    }
    let adjacency = Adjacency::from_edges(n, &edges);

    let (f_l, f_b) = d_split_fractions(alpha, r)?;
    let lerp = |a: [f64; 2], c: [f64; 2], t: f64| [a[0] + t * (c[0] - a[0]), a[1] + t * (c[1] - a[1])];
    let p_l = lerp(v_ll, v_ul, f_l);
    let p_b = lerp(v_lr, v_ll, f_b);

    let named: [(&str, Vec<([f64; 2], [f64; 2])>); 8] = [
        ("top", vec![(v_ul, v_ur)]),
        ("bottom", vec![(v_ll, v_lr)]),
        ("left", vec![(v_ll, v_ul)]),
        ("right", vec![(v_lr, v_ur)]),
        ("d_alpha", vec![(p_l, v_ul)]),
        ("d_beta", vec![(p_b, v_lr)]),
        ("dbar_alpha", vec![(v_ll, p_l), (v_ll, p_b)]),
        ("dbar_beta", vec![(v_ul, v_ur), (v_lr, v_ur)]),
    ];
    let mut intervals: BTreeMap<String, Vec<u32>> =
        named.iter().map(|(k, _)| (k.to_string(), Vec::new())).collect();

    // A cover site's bonds, lifted to the parallelogram: the far endpoint is
    // the square root of the image neighbor on whichever sheet the bond
    // connects to. The branch point carries both lifts of each bond.
    for i in 0..n {
        let [x, y] = icoords[i];
        let p = coords[i];
        let mut segs: Vec<([f64; 2], [f64; 2])> = Vec::new();
        for &(dx, dy) in lat.offsets() {
            let wn = (x + dx, y + dy);
            let zc = sqrt_cut(wn.0, wn.1);
            if (x, y) == (0, 0) {
                segs.push((p, [zc.re, zc.im]));
                segs.push((p, [-zc.re, -zc.im]));
            } else {
                let k = sheet[i] ^ u8::from(bond_swaps((x, y), wn));
                let sign = if k == 0 { 1.0 } else { -1.0 };
                segs.push((p, [sign * zc.re, sign * zc.im]));
            }
        }
        for (name, targets) in &named {
            let hit = targets
                .iter()
                .any(|&(a, c)| segs.iter().any(|&(u, w)| segments_intersect(u, w, a, c)));
            if hit {
                intervals.get_mut(*name).unwrap().push(i as u32);
            }
        }
    }

    Ok(DiscreteDomain {
        lattice: lat,
        topology: Topology::DoubleCover,
        icoords,
        coords,
        sheet,
        adjacency,
        intervals,
    })
}
