//! Domain construction: finite site graphs carved out of geometric regions,
//! with named boundary intervals, plus probability fields and configuration
//! sampling.
//!
//! Sites live on a unit-spaced integer grid (the mesh parameter rescales the
//! region instead). A site belongs to the domain iff its plane coordinate is
//! strictly inside the region; it belongs to a named boundary interval iff
//! one of its lattice bonds (a unit segment in a neighbor direction, whether
//! or not the neighbor site exists) intersects the geometric arc defining
//! that interval.

use std::collections::BTreeMap;

use crate::rng::RandomSource;
use crate::{Error, Result};

/// Which site lattice the domain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LatticeKind {
    /// 4 neighbors per interior site.
    SquareSite,
    /// 6 neighbors: the square grid plus the (1,1) and (-1,-1) diagonals.
    TriangularSite,
}

impl LatticeKind {
    pub fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            LatticeKind::SquareSite => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            LatticeKind::TriangularSite => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (-1, -1),
            ],
        }
    }
}

/// Geometric region the sites are carved from; lengths in lattice-mesh units.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub enum RegionSpec {
    Rectangle { width: f64, height: f64 },
    /// Four vertices in clockwise order (lower-left, upper-left, upper-right,
    /// lower-right); `rotation` is applied about the origin.
    Parallelogram { vertices: [[f64; 2]; 4], rotation: f64 },
    Annulus { r1: f64, r2: f64 },
    Disk { radius: f64 },
    TorusCell { lx: u32, ly: u32 },
    /// Planar in x, periodic in y.
    CylinderRect { width: u32, circumference: u32 },
    /// Two-sheeted cover (branched at the center) of a parallelogram with
    /// interior angle `alpha*pi`, side quotient `r` (slant over horizontal)
    /// and horizontal side `width` in mesh units.
    BranchedParallelogram { alpha: f64, r: f64, width: f64 },
    GluedExterior { r1: f64, r2: f64 },
}

/// Global topology of the constructed graph.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Topology {
    Planar,
    PeriodicY { period: u32 },
    Torus { lx: u32, ly: u32 },
    DoubleCover,
    Glued,
}

/// Compressed sparse-row adjacency over `u32` site indices.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// Build from an edge list; symmetrizes and deduplicates.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut deg = vec![0u32; n + 1];
        for &(a, b) in edges {
            deg[a as usize + 1] += 1;
            deg[b as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let mut targets = vec![0u32; deg[n] as usize];
        let mut cursor = deg.clone();
        for &(a, b) in edges {
            targets[cursor[a as usize] as usize] = b;
            cursor[a as usize] += 1;
            targets[cursor[b as usize] as usize] = a;
            cursor[b as usize] += 1;
        }
        // sort + dedup each row
        let mut offsets = vec![0u32; n + 1];
        let mut write = 0usize;
        for i in 0..n {
            let (lo, hi) = (deg[i] as usize, deg[i + 1] as usize);
            targets[lo..hi].sort_unstable();
            let start = write;
            for k in lo..hi {
                if k == lo || targets[k] != targets[k - 1] {
                    targets[write] = targets[k];
                    write += 1;
                }
            }
            offsets[i] = start as u32;
            offsets[i + 1] = write as u32;
        }
        targets.truncate(write);
        Self { offsets, targets }
    }

    #[inline]
    pub fn neighbors(&self, i: u32) -> &[u32] {
        &self.targets[self.offsets[i as usize] as usize..self.offsets[i as usize + 1] as usize]
    }

    pub fn degree(&self, i: u32) -> usize {
        self.neighbors(i).len()
    }
}

/// A finite site graph with named boundary intervals.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    pub lattice: LatticeKind,
    pub topology: Topology,
    /// Integer lattice coordinates (used by periodic probability fields).
    pub icoords: Vec<[i64; 2]>,
    /// Plane coordinates, in mesh units.
    pub coords: Vec<[f64; 2]>,
    /// Sheet tag per site; empty unless the domain is a double cover.
    pub sheet: Vec<u8>,
    pub adjacency: Adjacency,
    pub intervals: BTreeMap<String, Vec<u32>>,
}

impl DiscreteDomain {
    pub fn site_count(&self) -> usize {
        self.coords.len()
    }

    pub fn interval(&self, name: &str) -> Result<&[u32]> {
        self.intervals
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Contract(format!("missing boundary interval: {name}")))
    }
}

/// Site-opening probabilities, possibly position-dependent.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub enum ProbabilityField {
    Constant(f64),
    /// Periodic low-probability bands: band sites open with `p2/5`, the rest
    /// with `p2`. The band tile and its tiling cell are configurable; the
    /// defaults reproduce the striated model (bands of slope 2/3 with
    /// period 12).
    Striated {
        p2: f64,
        band: Vec<(i64, i64)>,
        cell: (i64, i64),
        shear_per_cell: i64,
    },
}

/// The default striated band tile: within a 6-wide, 4-tall cell that shifts
/// up by 4 every 6 columns, these reduced offsets are band sites.
pub const STRIATED_BAND: [(i64, i64); 8] = [
    (0, 0),
    (1, 0),
    (1, 1),
    (2, 1),
    (3, 2),
    (4, 2),
    (4, 3),
    (5, 3),
];

impl ProbabilityField {
    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability out of [0,1]: {p}")));
        }
        Ok(Self::Constant(p))
    }

    /// The striated field with off-band probability `p2` (band sites get
    /// `p2/5`).
    pub fn striated(p2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p2) {
            return Err(Error::Domain(format!("probability out of [0,1]: {p2}")));
        }
        Ok(Self::Striated {
            p2,
            band: STRIATED_BAND.to_vec(),
            cell: (6, 4),
            shear_per_cell: 4,
        })
    }

    /// Opening probability of the site with integer coordinates `(x, y)`.
    pub fn probability(&self, x: i64, y: i64) -> f64 {
        match self {
            ProbabilityField::Constant(p) => *p,
            ProbabilityField::Striated {
                p2,
                band,
                cell,
                shear_per_cell,
            } => {
                let m = x.div_euclid(cell.0);
                let x0 = x.rem_euclid(cell.0);
                let y0 = (y - shear_per_cell * m).rem_euclid(cell.1);
                if band.contains(&(x0, y0)) {
                    p2 / 5.0
                } else {
                    *p2
                }
            }
        }
    }
}

/// Open/closed state per site index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub open: Vec<bool>,
}

/// Draws each site independently, one RNG draw per site in index order.
pub fn sample_configuration(
    dom: &DiscreteDomain,
    field: &ProbabilityField,
    src: &mut RandomSource,
) -> Configuration {
    let open = match field {
        ProbabilityField::Constant(p) => (0..dom.site_count())
            .map(|_| src.bernoulli_unchecked(*p))
            .collect(),
        _ => dom
            .icoords
            .iter()
            .map(|&[x, y]| src.bernoulli_unchecked(field.probability(x, y)))
            .collect(),
    };
    Configuration { open }
}

// ---------------------------------------------------------------------------
// geometry helpers

/// Proper or touching intersection of segments [p,q] and [a,b].
pub(crate) fn segments_intersect(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let d1 = [q[0] - p[0], q[1] - p[1]];
    let d2 = [b[0] - a[0], b[1] - a[1]];
    let denom = d1[0] * d2[1] - d1[1] * d2[0];
    let rhs = [a[0] - p[0], a[1] - p[1]];
    if denom.abs() < 1e-12 {
        return false; // parallel bonds never define interval membership
    }
    let t = (rhs[0] * d2[1] - rhs[1] * d2[0]) / denom;
    let u = (rhs[0] * d1[1] - rhs[1] * d1[0]) / denom;
    let eps = 1e-9;
    (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u)
}

/// Intersection angles (atan2 in [0, 2pi)) of segment [p,q] with the circle
/// of radius `r` about the origin; at most two.
fn circle_crossing_angles(p: [f64; 2], q: [f64; 2], r: f64) -> Vec<f64> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let a = d[0] * d[0] + d[1] * d[1];
    let b = 2.0 * (p[0] * d[0] + p[1] * d[1]);
    let c = p[0] * p[0] + p[1] * p[1] - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || a == 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut out = Vec::new();
    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
        if (0.0..=1.0).contains(&t) {
            let x = p[0] + t * d[0];
            let y = p[1] + t * d[1];
            let mut ang = y.atan2(x);
            if ang < 0.0 {
                ang += std::f64::consts::TAU;
            }
            out.push(ang);
        }
    }
    out
}

/// True if angle `a` (in [0,2pi)) lies in the window centered at `c` with
/// half-width `hw`.
fn in_angular_window(a: f64, c: f64, hw: f64) -> bool {
    let mut d = (a - c).abs() % std::f64::consts::TAU;
    if d > std::f64::consts::PI {
        d = std::f64::consts::TAU - d;
    }
    d <= hw + 1e-12
}

pub(crate) fn point_in_convex_clockwise(p: [f64; 2], vs: &[[f64; 2]; 4]) -> bool {
    for i in 0..4 {
        let a = vs[i];
        let b = vs[(i + 1) % 4];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cross >= 0.0 {
            return false; // on or left of a clockwise edge: outside or boundary
        }
    }
    true
}

fn rotate(p: [f64; 2], theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

// ---------------------------------------------------------------------------
// builders

struct GridBuilder {
    lattice: LatticeKind,
    /// index into `sites` by (i - i_min, j - j_min) row-major
    index: Vec<u32>,
    i_range: (i64, i64),
    j_range: (i64, i64),
    icoords: Vec<[i64; 2]>,
    coords: Vec<[f64; 2]>,
}

const NO_SITE: u32 = u32::MAX;

impl GridBuilder {
    /// Collect all integer grid sites (plus `offset` in both plane
    /// coordinates) strictly inside the region predicate, scanning the
    /// inclusive integer ranges.
    fn collect<F: Fn(f64, f64) -> bool>(
        lattice: LatticeKind,
        offset: f64,
        i_range: (i64, i64),
        j_range: (i64, i64),
        inside: F,
    ) -> Self {
        let ni = (i_range.1 - i_range.0 + 1) as usize;
        let nj = (j_range.1 - j_range.0 + 1) as usize;
        let mut index = vec![NO_SITE; ni * nj];
        let mut icoords = Vec::new();
        let mut coords = Vec::new();
        for j in j_range.0..=j_range.1 {
            for i in i_range.0..=i_range.1 {
                let (x, y) = (i as f64 + offset, j as f64 + offset);
                if inside(x, y) {
                    let k = ((j - j_range.0) as usize) * ni + (i - i_range.0) as usize;
                    index[k] = icoords.len() as u32;
                    icoords.push([i, j]);
                    coords.push([x, y]);
                }
            }
        }
        Self {
            lattice,
            index,
            i_range,
            j_range,
            icoords,
            coords,
        }
    }

    fn site_at(&self, i: i64, j: i64) -> Option<u32> {
        if i < self.i_range.0 || i > self.i_range.1 || j < self.j_range.0 || j > self.j_range.1 {
            return None;
        }
        let ni = (self.i_range.1 - self.i_range.0 + 1) as usize;
        let k = ((j - self.j_range.0) as usize) * ni + (i - self.i_range.0) as usize;
        match self.index[k] {
            NO_SITE => None,
            s => Some(s),
        }
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for (s, &[i, j]) in self.icoords.iter().enumerate() {
            for &(di, dj) in self.lattice.offsets() {
                if let Some(t) = self.site_at(i + di, j + dj) {
                    if (s as u32) < t {
                        edges.push((s as u32, t));
                    }
                }
            }
        }
        edges
    }

    /// All sites one of whose bonds (unit segments in every neighbor
    /// direction) satisfies the bond predicate.
    fn interval_by_bond<F: Fn([f64; 2], [f64; 2]) -> bool>(&self, hit: F) -> Vec<u32> {
        let mut out = Vec::new();
        for (s, &[x, y]) in self.coords.iter().enumerate() {
            let p = [x, y];
            for &(di, dj) in self.lattice.offsets() {
                let q = [x + di as f64, y + dj as f64];
                if hit(p, q) {
                    out.push(s as u32);
                    break;
                }
            }
        }
        out
    }

    fn finish(
        self,
        topology: Topology,
        intervals: BTreeMap<String, Vec<u32>>,
        what: &str,
    ) -> Result<DiscreteDomain> {
        if self.icoords.is_empty() {
            return Err(Error::EmptyDomain(format!(
                "region contains no lattice site: {what}"
            )));
        }
        let n = self.icoords.len();
        let adjacency = Adjacency::from_edges(n, &self.edges());
        Ok(DiscreteDomain {
            lattice: self.lattice,
            topology,
            icoords: self.icoords,
            coords: self.coords,
            sheet: Vec::new(),
            adjacency,
            intervals,
        })
    }
}

/// Adds the full side and its two halves as intervals for a straight side
/// from `a` to `b`, split at the point dividing it at `frac` from `a`.
fn side_intervals(
    g: &GridBuilder,
    out: &mut BTreeMap<String, Vec<u32>>,
    name: &str,
    a: [f64; 2],
    b: [f64; 2],
    frac: f64,
) {
    let m = [a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1])];
    out.insert(
        name.to_string(),
        g.interval_by_bond(|p, q| segments_intersect(p, q, a, b)),
    );
    out.insert(
        format!("{name}_a"),
        g.interval_by_bond(|p, q| segments_intersect(p, q, a, m)),
    );
    out.insert(
        format!("{name}_b"),
        g.interval_by_bond(|p, q| segments_intersect(p, q, m, b)),
    );
}

fn build_parallelogram(
    vertices: [[f64; 2]; 4],
    rotation: f64,
    lat: LatticeKind,
) -> Result<DiscreteDomain> {
    let vs: [[f64; 2]; 4] = std::array::from_fn(|k| rotate(vertices[k], rotation));
    // clockwise check via the signed area
    let mut area2 = 0.0;
    for i in 0..4 {
        let a = vs[i];
        let b = vs[(i + 1) % 4];
        area2 += a[0] * b[1] - b[0] * a[1];
    }
    if area2 >= 0.0 {
        return Err(Error::Domain(
            "parallelogram vertices must be clockwise with positive area".into(),
        ));
    }
    let xs: Vec<f64> = vs.iter().map(|v| v[0]).collect();
    let ys: Vec<f64> = vs.iter().map(|v| v[1]).collect();
    let (x0, x1) = (xs.iter().cloned().fold(f64::MAX, f64::min), xs.iter().cloned().fold(f64::MIN, f64::max));
    let (y0, y1) = (ys.iter().cloned().fold(f64::MAX, f64::min), ys.iter().cloned().fold(f64::MIN, f64::max));
    let g = GridBuilder::collect(
        lat,
        0.5,
        ((x0.floor() as i64) - 2, (x1.ceil() as i64) + 2),
        ((y0.floor() as i64) - 2, (y1.ceil() as i64) + 2),
        |x, y| point_in_convex_clockwise([x, y], &vs),
    );
    let mut intervals = BTreeMap::new();
    // vertex order LL, UL, UR, LR: left joins LL-UL, right LR-UR (both
    // oriented bottom to top), top UL-UR, bottom LL-LR (left to right).
    side_intervals(&g, &mut intervals, "left", vs[0], vs[1], 0.5);
    side_intervals(&g, &mut intervals, "right", vs[3], vs[2], 0.5);
    side_intervals(&g, &mut intervals, "top", vs[1], vs[2], 0.5);
    side_intervals(&g, &mut intervals, "bottom", vs[0], vs[3], 0.5);
    g.finish(Topology::Planar, intervals, "parallelogram")
}

fn build_annulus(r1: f64, r2: f64, lat: LatticeKind) -> Result<DiscreteDomain> {
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::Domain(format!("annulus radii invalid: ({r1}, {r2})")));
    }
    let b = r2.ceil() as i64 + 2;
    let g = GridBuilder::collect(lat, 0.0, (-b, b), (-b, b), |x, y| {
        let rho2 = x * x + y * y;
        rho2 > r1 * r1 && rho2 < r2 * r2
    });
    let mut intervals = BTreeMap::new();
    let quarter = std::f64::consts::FRAC_PI_4;
    for (name, center) in [
        ("right", 0.0),
        ("top", std::f64::consts::FRAC_PI_2),
        ("left", std::f64::consts::PI),
        ("bottom", 1.5 * std::f64::consts::PI),
    ] {
        for (ring, r) in [("inner", r1), ("outer", r2)] {
            let sites = g.interval_by_bond(|p, q| {
                circle_crossing_angles(p, q, r)
                    .iter()
                    .any(|&a| in_angular_window(a, center, quarter))
            });
            intervals.insert(format!("{ring}_{name}"), sites);
        }
    }
    g.finish(Topology::Planar, intervals, "annulus")
}

fn build_cylinder(width: u32, circumference: u32, lat: LatticeKind) -> Result<DiscreteDomain> {
    if width < 1 || circumference < 2 {
        return Err(Error::Domain(format!(
            "cylinder needs width >= 1, circumference >= 2: ({width}, {circumference})"
        )));
    }
    let (w, c) = (width as i64, circumference as i64);
    let n = (w * c) as usize;
    let mut icoords = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for j in 0..c {
        for i in 0..w {
            icoords.push([i, j]);
            coords.push([i as f64 + 0.5, j as f64 + 0.5]);
        }
    }
    let at = |i: i64, j: i64| -> Option<u32> {
        if i < 0 || i >= w {
            return None;
        }
        Some((j.rem_euclid(c) * w + i) as u32)
    };
    let mut edges = Vec::new();
    for (s, &[i, j]) in icoords.iter().enumerate() {
        for &(di, dj) in lat.offsets() {
            if let Some(t) = at(i + di, j + dj) {
                if (s as u32) < t {
                    edges.push((s as u32, t));
                }
            }
        }
    }
    let mut intervals = BTreeMap::new();
    let left: Vec<u32> = (0..n as u32).filter(|&s| icoords[s as usize][0] == 0).collect();
    let right: Vec<u32> = (0..n as u32)
        .filter(|&s| icoords[s as usize][0] == w - 1)
        .collect();
    intervals.insert("left".into(), left);
    intervals.insert("right".into(), right);
    let adjacency = Adjacency::from_edges(n, &edges);
    Ok(DiscreteDomain {
        lattice: lat,
        topology: Topology::PeriodicY {
            period: circumference,
        },
        icoords,
        coords,
        sheet: Vec::new(),
        adjacency,
        intervals,
    })
}

/// Square-lattice torus; no boundary intervals.
pub fn build_torus(lx: u32, ly: u32) -> Result<DiscreteDomain> {
    if lx < 2 || ly < 2 {
        return Err(Error::Domain(format!("torus needs lx, ly >= 2: ({lx}, {ly})")));
    }
    let (w, h) = (lx as i64, ly as i64);
    let n = (w * h) as usize;
    let mut icoords = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    for j in 0..h {
        for i in 0..w {
            icoords.push([i, j]);
            coords.push([i as f64, j as f64]);
        }
    }
    let mut edges = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let s = (j * w + i) as u32;
            let t1 = (j * w + (i + 1).rem_euclid(w)) as u32;
            let t2 = (((j + 1).rem_euclid(h)) * w + i) as u32;
            edges.push((s, t1));
            edges.push((s, t2));
        }
    }
    let adjacency = Adjacency::from_edges(n, &edges);
    Ok(DiscreteDomain {
        lattice: LatticeKind::SquareSite,
        topology: Topology::Torus { lx, ly },
        icoords,
        coords,
        sheet: Vec::new(),
        adjacency,
        intervals: BTreeMap::new(),
    })
}

/// Annulus `r1 < |z| < r2` plus an independent disk of radius `r2` whose
/// outermost site ring is identified (shared state) with the annulus's outer
/// ring; crossing events between inner-circle arcs may travel through the
/// disk, which models the exterior of the inner circle after inversion.
pub fn build_glued_exterior(r1: f64, r2: f64) -> Result<DiscreteDomain> {
    if !(0.0 < r1 && r1 < r2) {
        return Err(Error::Domain(format!("glued radii invalid: ({r1}, {r2})")));
    }
    let lat = LatticeKind::SquareSite;
    let ann = build_annulus(r1, r2, lat)?;
    let n_ann = ann.site_count();
    // the shared ring: annulus sites having a bond leaving |z| >= r2
    let mut ring_of = std::collections::HashMap::new();
    for (s, &[x, y]) in ann.coords.iter().enumerate() {
        let outside = lat.offsets().iter().any(|&(di, dj)| {
            let (qx, qy) = (x + di as f64, y + dj as f64);
            qx * qx + qy * qy >= r2 * r2
        });
        if outside {
            ring_of.insert((ann.icoords[s][0], ann.icoords[s][1]), s as u32);
        }
    }
    // disk sites: strictly inside r2; ring coordinates map to annulus sites,
    // the rest get fresh indices
    let b = r2.ceil() as i64 + 2;
    let mut icoords = ann.icoords.clone();
    let mut coords = ann.coords.clone();
    let mut disk_index = std::collections::HashMap::new();
    for j in -b..=b {
        for i in -b..=b {
            let (x, y) = (i as f64, j as f64);
            if x * x + y * y < r2 * r2 {
                if let Some(&shared) = ring_of.get(&(i, j)) {
                    disk_index.insert((i, j), shared);
                } else {
                    let s = icoords.len() as u32;
                    icoords.push([i, j]);
                    coords.push([x, y]);
                    disk_index.insert((i, j), s);
                }
            }
        }
    }
    // edges: annulus edges as-is, plus disk edges (between disk indices,
    // which for ring coordinates are the annulus sites)
    let mut edges = Vec::new();
    for s in 0..n_ann as u32 {
        for &t in ann.adjacency.neighbors(s) {
            if s < t {
                edges.push((s, t));
            }
        }
    }
    for (&(i, j), &s) in &disk_index {
        for &(di, dj) in lat.offsets() {
            if let Some(&t) = disk_index.get(&(i + di, j + dj)) {
                if s < t {
                    edges.push((s, t));
                }
            }
        }
    }
    let n = icoords.len();
    let adjacency = Adjacency::from_edges(n, &edges);
    // inner-circle quarter arcs from the annulus construction
    let mut intervals = BTreeMap::new();
    for name in ["inner_left", "inner_right", "inner_top", "inner_bottom"] {
        intervals.insert(name.to_string(), ann.intervals[name].clone());
    }
    Ok(DiscreteDomain {
        lattice: lat,
        topology: Topology::Glued,
        icoords,
        coords,
        sheet: Vec::new(),
        adjacency,
        intervals,
    })
}

/// Main entry point: construct the domain for a region.
pub fn build_domain(region: &RegionSpec, lat: LatticeKind, mesh: f64) -> Result<DiscreteDomain> {
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(Error::Domain(format!("mesh must be positive: {mesh}")));
    }
    let s = 1.0 / mesh;
    match *region {
        RegionSpec::Rectangle { width, height } => {
            let (w, h) = (width * s, height * s);
            if !(w > 0.0 && h > 0.0) {
                return Err(Error::Domain("rectangle sides must be positive".into()));
            }
            build_parallelogram(
                [[0.0, 0.0], [0.0, h], [w, h], [w, 0.0]],
                0.0,
                lat,
            )
        }
        RegionSpec::Parallelogram { vertices, rotation } => {
            let vs: [[f64; 2]; 4] =
                std::array::from_fn(|k| [vertices[k][0] * s, vertices[k][1] * s]);
            build_parallelogram(vs, rotation, lat)
        }
        RegionSpec::Annulus { r1, r2 } => build_annulus(r1 * s, r2 * s, lat),
        RegionSpec::Disk { radius } => {
            let r = radius * s;
            if r <= 0.0 {
                return Err(Error::Domain("disk radius must be positive".into()));
            }
            let b = r.ceil() as i64 + 2;
            let g = GridBuilder::collect(lat, 0.0, (-b, b), (-b, b), |x, y| {
                x * x + y * y < r * r
            });
            let mut intervals = BTreeMap::new();
            let quarter = std::f64::consts::FRAC_PI_4;
            for (name, center) in [
                ("right", 0.0),
                ("top", std::f64::consts::FRAC_PI_2),
                ("left", std::f64::consts::PI),
                ("bottom", 1.5 * std::f64::consts::PI),
            ] {
                let sites = g.interval_by_bond(|p, q| {
                    circle_crossing_angles(p, q, r)
                        .iter()
                        .any(|&a| in_angular_window(a, center, quarter))
                });
                intervals.insert(name.to_string(), sites);
            }
            g.finish(Topology::Planar, intervals, "disk")
        }
        RegionSpec::TorusCell { lx, ly } => build_torus(lx, ly),
        RegionSpec::CylinderRect {
            width,
            circumference,
        } => build_cylinder(width, circumference, lat),
        RegionSpec::BranchedParallelogram { alpha, r, width } => {
            branched::build_branched_double_cover(alpha, r, width * s, lat)
        }
        RegionSpec::GluedExterior { r1, r2 } => build_glued_exterior(r1 * s, r2 * s),
    }
}

pub mod branched;
