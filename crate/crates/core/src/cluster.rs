//! Cluster labeling, crossing events, and homology classification on tori.

use std::collections::HashSet;

use crate::lattice::{Configuration, DiscreteDomain, Topology};
use crate::{Error, Result};

/// Union-find over site indices; closed sites stay singletons.
#[derive(Debug, Clone)]
pub struct ClusterLabeling {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl ClusterLabeling {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, i: u32) -> u32 {
        let mut i = i;
        // path halving
        while self.parent[i as usize] != i {
            let p = self.parent[i as usize];
            self.parent[i as usize] = self.parent[p as usize];
            i = self.parent[i as usize];
        }
        i
    }

    /// Union by rank; true if the two sites were in different clusters.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (hi, lo) = if self.rank[ra as usize] >= self.rank[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[lo as usize] = hi;
        if self.rank[hi as usize] == self.rank[lo as usize] {
            self.rank[hi as usize] += 1;
        }
        true
    }

    pub fn same(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Unite every open-open bond, in site-index order (deterministic).
pub fn label_clusters(dom: &DiscreteDomain, cfg: &Configuration) -> ClusterLabeling {
    let n = dom.site_count();
    debug_assert_eq!(cfg.open.len(), n);
    let mut uf = ClusterLabeling::new(n);
    for i in 0..n as u32 {
        if !cfg.open[i as usize] {
            continue;
        }
        for &j in dom.adjacency.neighbors(i) {
            if j > i && cfg.open[j as usize] {
                uf.union(i, j);
            }
        }
    }
    uf
}

/// Which named intervals define each event; `None` skips the event.
/// Each side may be a union of intervals (used by the complementary-arc
/// diagonal event).
#[derive(Debug, Clone, Default)]
pub struct EventDefs {
    pub h: Option<(Vec<String>, Vec<String>)>,
    pub v: Option<(Vec<String>, Vec<String>)>,
    pub d: Option<(Vec<String>, Vec<String>)>,
    pub dbar: Option<(Vec<String>, Vec<String>)>,
}

fn one(a: &str, b: &str) -> Option<(Vec<String>, Vec<String>)> {
    Some((vec![a.to_string()], vec![b.to_string()]))
}

impl EventDefs {
    /// h and v only, from the four standard side names.
    pub fn rectangle_hv() -> Self {
        Self {
            h: one("left", "right"),
            v: one("top", "bottom"),
            d: None,
            dbar: None,
        }
    }

    /// Sides plus the diagonal pair taken directly as half-sides of the
    /// region: upper half of the left side to right half of the bottom side.
    pub fn rectangle_full() -> Self {
        Self {
            h: one("left", "right"),
            v: one("top", "bottom"),
            d: one("left_b", "bottom_b"),
            dbar: Some((
                vec!["left_a".into(), "bottom_a".into()],
                vec!["top".into(), "right".into()],
            )),
        }
    }

    /// Branched-cover conventions: the crossing spanning the slant direction
    /// joins the horizontal sides, and the diagonal intervals are the
    /// conformal images of the equivalent rectangle's half-sides.
    pub fn branched() -> Self {
        Self {
            h: one("top", "bottom"),
            v: one("left", "right"),
            d: one("d_alpha", "d_beta"),
            dbar: one("dbar_alpha", "dbar_beta"),
        }
    }

    /// Arc-to-arc events on one circle of an annulus domain.
    pub fn annulus(prefix: &str) -> Self {
        Self {
            h: one(&format!("{prefix}_left"), &format!("{prefix}_right")),
            v: one(&format!("{prefix}_top"), &format!("{prefix}_bottom")),
            d: None,
            dbar: None,
        }
    }
}

/// Event outcomes for one configuration. Skipped events read false.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CrossingBattery {
    pub h: bool,
    pub v: bool,
    /// h and v both occur (not necessarily through one cluster).
    pub hv: bool,
    pub d: bool,
    pub dbar: bool,
}

fn sides_connected(
    dom: &DiscreteDomain,
    cfg: &Configuration,
    uf: &mut ClusterLabeling,
    a: &[String],
    b: &[String],
) -> Result<bool> {
    let mut roots = HashSet::new();
    for name in a {
        for &i in dom.interval(name)? {
            if cfg.open[i as usize] {
                roots.insert(uf.find(i));
            }
        }
    }
    if roots.is_empty() {
        return Ok(false);
    }
    for name in b {
        for &i in dom.interval(name)? {
            if cfg.open[i as usize] && roots.contains(&uf.find(i)) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn crossing_battery(
    dom: &DiscreteDomain,
    cfg: &Configuration,
    defs: &EventDefs,
) -> Result<CrossingBattery> {
    let mut uf = label_clusters(dom, cfg);
    battery_with_labels(dom, cfg, &mut uf, defs)
}

/// As [`crossing_battery`] when the labeling is already available.
pub fn battery_with_labels(
    dom: &DiscreteDomain,
    cfg: &Configuration,
    uf: &mut ClusterLabeling,
    defs: &EventDefs,
) -> Result<CrossingBattery> {
    let mut out = CrossingBattery::default();
    if let Some((a, b)) = &defs.h {
        out.h = sides_connected(dom, cfg, uf, a, b)?;
    }
    if let Some((a, b)) = &defs.v {
        out.v = sides_connected(dom, cfg, uf, a, b)?;
    }
    out.hv = out.h && out.v;
    if let Some((a, b)) = &defs.d {
        out.d = sides_connected(dom, cfg, uf, a, b)?;
    }
    if let Some((a, b)) = &defs.dbar {
        out.dbar = sides_connected(dom, cfg, uf, a, b)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// torus homology

/// Union-find carrying, per site, the integer displacement of its lift
/// relative to its parent's lift in the universal cover.
struct WindingUf {
    parent: Vec<u32>,
    rank: Vec<u8>,
    disp: Vec<[i64; 2]>,
}

impl WindingUf {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            disp: vec![[0, 0]; n],
        }
    }

    /// Root and displacement of `i`'s lift relative to the root's lift.
    fn find(&mut self, i: u32) -> (u32, [i64; 2]) {
        let p = self.parent[i as usize];
        if p == i {
            return (i, [0, 0]);
        }
        let (r, dp) = self.find(p);
        let d = [
            self.disp[i as usize][0] + dp[0],
            self.disp[i as usize][1] + dp[1],
        ];
        self.parent[i as usize] = r;
        self.disp[i as usize] = d;
        (r, d)
    }

    /// Process a bond whose lift satisfies lift(b) = lift(a) + delta.
    /// Returns the winding mismatch when a and b were already connected and
    /// the displacements disagree.
    fn bond(&mut self, a: u32, b: u32, delta: [i64; 2]) -> Option<[i64; 2]> {
        let (ra, da) = self.find(a);
        let (rb, db) = self.find(b);
        let need = [da[0] + delta[0] - db[0], da[1] + delta[1] - db[1]];
        if ra == rb {
            return if need != [0, 0] { Some(need) } else { None };
        }
        if self.rank[ra as usize] >= self.rank[rb as usize] {
            self.parent[rb as usize] = ra;
            self.disp[rb as usize] = need;
            if self.rank[ra as usize] == self.rank[rb as usize] {
                self.rank[ra as usize] += 1;
            }
        } else {
            self.parent[ra as usize] = rb;
            self.disp[ra as usize] = [-need[0], -need[1]];
        }
        None
    }
}

/// Wrapping generators per cluster: for each open cluster carrying at least
/// one nonzero winding, its root site and the recorded homology vectors
/// (in units of full torus periods).
pub fn wrapping_vectors(
    dom: &DiscreteDomain,
    cfg: &Configuration,
) -> Result<Vec<(u32, Vec<[i64; 2]>)>> {
    let (lx, ly) = match dom.topology {
        Topology::Torus { lx, ly } => (lx as i64, ly as i64),
        _ => return Err(Error::Contract("wrapping_vectors needs a torus domain".into())),
    };
    let n = dom.site_count();
    let mut uf = WindingUf::new(n);
    let mut raw: Vec<(u32, [i64; 2])> = Vec::new();
    // bonds enumerated arithmetically (index = y*lx + x) so each wrap bond is
    // seen with its true lift displacement, which CSR deduplication loses
    for y in 0..ly {
        for x in 0..lx {
            let s = (y * lx + x) as u32;
            if !cfg.open[s as usize] {
                continue;
            }
            for (t, delta) in [
                ((y * lx + (x + 1).rem_euclid(lx)) as u32, [1, 0]),
                (((y + 1).rem_euclid(ly) * lx + x) as u32, [0, 1]),
            ] {
                if !cfg.open[t as usize] {
                    continue;
                }
                if let Some(w) = uf.bond(s, t, delta) {
                    debug_assert!(w[0] % lx == 0 && w[1] % ly == 0);
                    let (r, _) = uf.find(s);
                    raw.push((r, [w[0] / lx, w[1] / ly]));
                }
            }
        }
    }
    // group by final root (roots can merge after a vector is recorded)
    let mut grouped: Vec<(u32, Vec<[i64; 2]>)> = Vec::new();
    for (r, v) in raw {
        let (root, _) = uf.find(r);
        match grouped.iter_mut().find(|(g, _)| *g == root) {
            Some((_, vs)) => vs.push(v),
            None => grouped.push((root, vec![v])),
        }
    }
    grouped.sort_by_key(|(r, _)| *r);
    Ok(grouped)
}

/// The subgroup of the torus first homology generated by a set of integer
/// vectors: trivial, infinite cyclic along a primitive direction, or full.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum HomologySubgroup {
    Trivial,
    /// Primitive direction, normalized to m > 0, or (0, 1).
    Cyclic(i64, i64),
    Full,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive representative of the line through `v` (nonzero), sign-fixed.
pub fn primitive_direction(v: [i64; 2]) -> (i64, i64) {
    let g = gcd(v[0], v[1]);
    let (mut m, mut n) = (v[0] / g, v[1] / g);
    if m < 0 || (m == 0 && n < 0) {
        m = -m;
        n = -n;
    }
    (m, n)
}

/// Span classification of all clusters' wrapping vectors.
pub fn image_subgroup<I: IntoIterator<Item = [i64; 2]>>(vectors: I) -> HomologySubgroup {
    let mut base: Option<[i64; 2]> = None;
    for v in vectors {
        if v == [0, 0] {
            continue;
        }
        match base {
            None => base = Some(v),
            Some(b) => {
                if b[0] * v[1] - b[1] * v[0] != 0 {
                    return HomologySubgroup::Full;
                }
            }
        }
    }
    match base {
        None => HomologySubgroup::Trivial,
        Some(b) => {
            let (m, n) = primitive_direction(b);
            HomologySubgroup::Cyclic(m, n)
        }
    }
}
