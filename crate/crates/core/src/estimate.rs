//! Monte Carlo experiment engine: repeated configuration sampling, event
//! tallying with binomial confidence intervals, and the named experiments.
//!
//! Replicas draw from per-replica substreams keyed by the replica index, so
//! tallies are independent of the worker count and of scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cluster::{
    battery_with_labels, image_subgroup, label_clusters, wrapping_vectors, EventDefs,
    HomologySubgroup,
};
use crate::lattice::{
    build_domain, build_torus, sample_configuration, Configuration, DiscreteDomain, LatticeKind,
    ProbabilityField, RegionSpec,
};
use crate::rng::{RandomSource, RngKind};
use crate::{Error, Result};

/// Critical probability used by default: the high-precision value for large
/// lattices, the shorter published one for lattices up to ~2e5 sites.
pub const P_C_LARGE: f64 = 0.5927439;
pub const P_C_SMALL: f64 = 0.59273;

pub fn default_pc(site_count: usize) -> f64 {
    if site_count <= 200_000 {
        P_C_SMALL
    } else {
        P_C_LARGE
    }
}

/// A binomial point estimate with its 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EstimateResult {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci95: f64,
}

impl EstimateResult {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            successes,
            trials,
            p_hat: p,
            ci95: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// Shared run knobs for every experiment.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunParams {
    pub n: u64,
    pub seed: u64,
    pub rng: RngKind,
    pub workers: usize,
    /// Site-opening probability; `None` picks the default critical value by
    /// lattice size.
    pub p: Option<f64>,
}

impl RunParams {
    pub fn new(n: u64, seed: u64) -> Self {
        Self {
            n,
            seed,
            rng: RngKind::Default,
            workers: 1,
            p: None,
        }
    }

    fn field_for(&self, dom: &DiscreteDomain) -> Result<ProbabilityField> {
        ProbabilityField::constant(self.p.unwrap_or_else(|| default_pc(dom.site_count())))
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// A full experiment description: domain, probability field, events, run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ExperimentSpec {
    pub region: RegionSpec,
    pub lattice: LatticeKind,
    /// Lattice spacing relative to the region dimensions.
    pub mesh: f64,
    pub field: Option<ProbabilityField>,
    pub run: RunParams,
}

/// Runs `n` replicas, each evaluated to a bitmask of `k` event outcomes, and
/// returns per-event success counts. Deterministic in (seed, kind) only.
fn tally_bits<F>(
    dom: &DiscreteDomain,
    field: &ProbabilityField,
    run: &RunParams,
    k: usize,
    eval: F,
) -> Result<Vec<u64>>
where
    F: Fn(&DiscreteDomain, &Configuration) -> Result<u32> + Sync,
{
    run.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.workers)
        .build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..run.n)
            .into_par_iter()
            .try_fold(
                || vec![0u64; k],
                |mut acc, rep| {
                    let mut src = RandomSource::new(run.rng, run.seed, rep);
                    let cfg = sample_configuration(dom, field, &mut src);
                    let mask = eval(dom, &cfg)?;
                    for (i, slot) in acc.iter_mut().enumerate() {
                        *slot += u64::from(mask >> i & 1);
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![0u64; k],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )
    })
}

fn battery_mask(
    dom: &DiscreteDomain,
    cfg: &Configuration,
    defs: &EventDefs,
) -> Result<u32> {
    let b = crate::cluster::crossing_battery(dom, cfg, defs)?;
    Ok(u32::from(b.h)
        | u32::from(b.v) << 1
        | u32::from(b.hv) << 2
        | u32::from(b.d) << 3
        | u32::from(b.dbar) << 4)
}

const BATTERY_NAMES: [&str; 5] = ["h", "v", "hv", "d", "dbar"];

/// Estimate the crossing battery on an already-built domain.
pub fn run_battery(
    dom: &DiscreteDomain,
    field: &ProbabilityField,
    defs: &EventDefs,
    run: &RunParams,
) -> Result<BTreeMap<String, EstimateResult>> {
    let counts = tally_bits(dom, field, run, 5, |d, c| battery_mask(d, c, defs))?;
    let mut out = BTreeMap::new();
    let picked = [
        defs.h.is_some(),
        defs.v.is_some(),
        defs.h.is_some() && defs.v.is_some(),
        defs.d.is_some(),
        defs.dbar.is_some(),
    ];
    for i in 0..5 {
        if picked[i] {
            out.insert(
                BATTERY_NAMES[i].to_string(),
                EstimateResult::from_counts(counts[i], run.n),
            );
        }
    }
    Ok(out)
}

/// Generic entry point: build the domain from the spec and run the standard
/// battery appropriate to its region.
pub fn estimate_events(spec: &ExperimentSpec) -> Result<BTreeMap<String, EstimateResult>> {
    let dom = build_domain(&spec.region, spec.lattice, spec.mesh)?;
    let field = match &spec.field {
        Some(f) => f.clone(),
        None => spec.run.field_for(&dom)?,
    };
    let defs = match spec.region {
        RegionSpec::BranchedParallelogram { .. } => EventDefs::branched(),
        _ => {
            if dom.intervals.contains_key("left_a") {
                EventDefs::rectangle_full()
            } else {
                EventDefs::rectangle_hv()
            }
        }
    };
    run_battery(&dom, &field, &defs, &spec.run)
}

/// Interior and exterior arc crossings of an annulus: keys `h_int`, `v_int`,
/// `hv_int`, `h_ext`, `v_ext`, `hv_ext`.
pub fn annulus_experiment(
    r1: f64,
    r2: f64,
    run: &RunParams,
) -> Result<BTreeMap<String, EstimateResult>> {
    let dom = build_domain(&RegionSpec::Annulus { r1, r2 }, LatticeKind::SquareSite, 1.0)?;
    let field = run.field_for(&dom)?;
    let inner = EventDefs::annulus("inner");
    let outer = EventDefs::annulus("outer");
    let counts = tally_bits(&dom, &field, run, 6, |d, c| {
        let mut uf = label_clusters(d, c);
        let bi = battery_with_labels(d, c, &mut uf, &inner)?;
        let bo = battery_with_labels(d, c, &mut uf, &outer)?;
        Ok(u32::from(bi.h)
            | u32::from(bi.v) << 1
            | u32::from(bi.hv) << 2
            | u32::from(bo.h) << 3
            | u32::from(bo.v) << 4
            | u32::from(bo.hv) << 5)
    })?;
    let names = ["h_int", "v_int", "hv_int", "h_ext", "v_ext", "hv_ext"];
    Ok(names
        .iter()
        .zip(counts)
        .map(|(n, c)| (n.to_string(), EstimateResult::from_counts(c, run.n)))
        .collect())
}

/// Vertically periodic rectangle with the left column split into four arcs
/// (1-based inclusive row ranges); h joins arcs 1 and 3, v joins 2 and 4.
pub fn cylinder_experiment(
    width: u32,
    circumference: u32,
    arcs: &[(u32, u32); 4],
    run: &RunParams,
) -> Result<BTreeMap<String, EstimateResult>> {
    let mut dom = build_domain(
        &RegionSpec::CylinderRect {
            width,
            circumference,
        },
        LatticeKind::SquareSite,
        1.0,
    )?;
    for (k, &(lo, hi)) in arcs.iter().enumerate() {
        if lo < 1 || hi > circumference || lo > hi {
            return Err(Error::Domain(format!("bad cylinder arc ({lo},{hi})")));
        }
        let sites: Vec<u32> = (0..dom.site_count() as u32)
            .filter(|&s| {
                let [x, y] = dom.icoords[s as usize];
                x == 0 && (y as u32 + 1) >= lo && (y as u32 + 1) <= hi
            })
            .collect();
        dom.intervals.insert(format!("arc{}", k + 1), sites);
    }
    let defs = EventDefs {
        h: Some((vec!["arc1".into()], vec!["arc3".into()])),
        v: Some((vec!["arc2".into()], vec!["arc4".into()])),
        d: None,
        dbar: None,
    };
    let field = run.field_for(&dom)?;
    run_battery(&dom, &field, &defs, run)
}

/// Homology subgroup counts over `n` torus configurations. `trivial` is the
/// remainder after every measured class, matching the published accounting;
/// `nonprimitive_raw` counts configurations where some recorded wrapping
/// vector was a non-primitive multiple.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct HomologyTally {
    pub trials: u64,
    pub full: u64,
    pub cyclic: BTreeMap<(i64, i64), u64>,
    pub trivial: u64,
    pub nonprimitive_raw: u64,
}

impl HomologyTally {
    fn absorb(&mut self, other: HomologyTally) {
        self.trials += other.trials;
        self.full += other.full;
        self.trivial += other.trivial;
        self.nonprimitive_raw += other.nonprimitive_raw;
        for (k, v) in other.cyclic {
            *self.cyclic.entry(k).or_insert(0) += v;
        }
    }

    pub fn probability(&self, class: &HomologySubgroup) -> f64 {
        let c = match class {
            HomologySubgroup::Full => self.full,
            HomologySubgroup::Trivial => self.trivial,
            HomologySubgroup::Cyclic(m, n) => self.cyclic.get(&(*m, *n)).copied().unwrap_or(0),
        };
        c as f64 / self.trials as f64
    }
}

pub fn torus_homology_experiment(l: u32, run: &RunParams) -> Result<HomologyTally> {
    run.validate()?;
    let dom = build_torus(l, l)?;
    let field = run.field_for(&dom)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.workers)
        .build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
    let mut tally = pool.install(|| {
        (0..run.n)
            .into_par_iter()
            .try_fold(HomologyTally::default, |mut acc, rep| {
                let mut src = RandomSource::new(run.rng, run.seed, rep);
                let cfg = sample_configuration(&dom, &field, &mut src);
                let per_cluster = wrapping_vectors(&dom, &cfg)?;
                let raw: Vec<[i64; 2]> =
                    per_cluster.into_iter().flat_map(|(_, v)| v).collect();
                if raw
                    .iter()
                    .any(|v| *v != [0, 0] && {
                        let g = crate::cluster::primitive_direction(*v);
                        [g.0, g.1] != *v && [-g.0, -g.1] != *v
                    })
                {
                    acc.nonprimitive_raw += 1;
                }
                match image_subgroup(raw) {
                    HomologySubgroup::Full => acc.full += 1,
                    HomologySubgroup::Trivial => acc.trivial += 1,
                    HomologySubgroup::Cyclic(m, n) => {
                        *acc.cyclic.entry((m, n)).or_insert(0) += 1
                    }
                }
                acc.trials += 1;
                Ok::<_, Error>(acc)
            })
            .try_reduce(HomologyTally::default, |mut a, b| {
                a.absorb(b);
                Ok(a)
            })
    })?;
    // published tables list the trivial class as the remainder
    tally.trivial = run.n - tally.full - tally.cyclic.values().sum::<u64>();
    Ok(tally)
}

/// Crossing between the two horizontal quarter arcs of the inner circle,
/// with the exterior of the circle modeled by the glued auxiliary disk.
pub fn exterior_glued_experiment(r1: f64, r2: f64, run: &RunParams) -> Result<EstimateResult> {
    let dom = build_domain(
        &RegionSpec::GluedExterior { r1, r2 },
        LatticeKind::SquareSite,
        1.0,
    )?;
    let field = run.field_for(&dom)?;
    let defs = EventDefs {
        h: Some((vec!["inner_left".into()], vec!["inner_right".into()])),
        v: None,
        d: None,
        dbar: None,
    };
    let out = run_battery(&dom, &field, &defs, run)?;
    Ok(out["h"])
}

/// Battery on the branched double cover of a parallelogram (the diagonal
/// events use the conformal-image interval definition).
pub fn branched_experiment(
    alpha: f64,
    r: f64,
    width: f64,
    run: &RunParams,
) -> Result<BTreeMap<String, EstimateResult>> {
    let dom = build_domain(
        &RegionSpec::BranchedParallelogram { alpha, r, width },
        LatticeKind::SquareSite,
        1.0,
    )?;
    let field = run.field_for(&dom)?;
    run_battery(&dom, &field, &EventDefs::branched(), run)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_spec(w: f64, h: f64, run: RunParams) -> ExperimentSpec {
        ExperimentSpec {
            region: RegionSpec::Rectangle { width: w, height: h },
            lattice: LatticeKind::SquareSite,
            mesh: 1.0,
            field: None,
            run,
        }
    }

    #[test]
    fn closed_field_estimates_zero() {
        let mut run = RunParams::new(50, 1);
        run.p = Some(0.0);
        let out = estimate_events(&rect_spec(8.0, 8.0, run)).unwrap();
        for (name, e) in out {
            assert_eq!(e.successes, 0, "{name}");
            assert_eq!(e.p_hat, 0.0);
            assert_eq!(e.ci95, 0.0);
        }
    }

    #[test]
    fn open_field_estimates_one() {
        let mut run = RunParams::new(20, 1);
        run.p = Some(1.0);
        let out = estimate_events(&rect_spec(6.0, 9.0, run)).unwrap();
        for (name, e) in out {
            assert_eq!(e.p_hat, 1.0, "{name}");
        }
    }

    #[test]
    fn single_replica_is_zero_or_one() {
        let out = estimate_events(&rect_spec(10.0, 10.0, RunParams::new(1, 9))).unwrap();
        for (_, e) in out {
            assert!(e.p_hat == 0.0 || e.p_hat == 1.0);
            assert_eq!(e.trials, 1);
        }
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let base = estimate_events(&rect_spec(12.0, 12.0, RunParams::new(300, 42))).unwrap();
        let again = estimate_events(&rect_spec(12.0, 12.0, RunParams::new(300, 42))).unwrap();
        assert_eq!(format!("{base:?}"), format!("{again:?}"));
        let mut run8 = RunParams::new(300, 42);
        run8.workers = 8;
        let wide = estimate_events(&rect_spec(12.0, 12.0, run8)).unwrap();
        assert_eq!(format!("{base:?}"), format!("{wide:?}"));
    }

    #[test]
    fn seed_changes_results() {
        let a = estimate_events(&rect_spec(12.0, 12.0, RunParams::new(300, 1))).unwrap();
        let b = estimate_events(&rect_spec(12.0, 12.0, RunParams::new(300, 2))).unwrap();
        assert_ne!(a["h"].successes, b["h"].successes);
    }

    #[test]
    fn ci_covers_synthetic_truth() {
        // a 1x1 region has a single site lying in every interval, so the h
        // event is a pure Bernoulli(p) draw
        let mut covered = 0;
        for rep in 0..200 {
            let mut run = RunParams::new(1000, 1000 + rep);
            run.p = Some(0.3);
            let out = estimate_events(&rect_spec(1.0, 1.0, run)).unwrap();
            let e = out["h"];
            if (e.p_hat - 0.3).abs() <= e.ci95 {
                covered += 1;
            }
        }
        assert!(covered >= 180, "coverage {covered}/200");
    }

    #[test]
    fn duality_on_a_square() {
        let out = estimate_events(&rect_spec(48.0, 48.0, RunParams::new(2000, 5))).unwrap();
        let (h, v) = (out["h"], out["v"]);
        let slack = 3.0 * (h.ci95 + v.ci95) + 0.02;
        assert!((h.p_hat + v.p_hat - 1.0).abs() <= slack, "{} {}", h.p_hat, v.p_hat);
        assert!(out["hv"].p_hat <= h.p_hat.min(v.p_hat));
    }

    #[test]
    fn annulus_all_open_sets_every_event() {
        let mut run = RunParams::new(5, 3);
        run.p = Some(1.0);
        let out = annulus_experiment(6.0, 14.0, &run).unwrap();
        assert_eq!(out.len(), 6);
        for (name, e) in out {
            assert_eq!(e.p_hat, 1.0, "{name}");
        }
    }

    #[test]
    fn cylinder_small_all_open_crosses() {
        let mut run = RunParams::new(3, 3);
        run.p = Some(1.0);
        let out = cylinder_experiment(3, 8, &[(1, 2), (3, 4), (5, 6), (7, 8)], &run).unwrap();
        assert_eq!(out["h"].p_hat, 1.0);
        assert_eq!(out["v"].p_hat, 1.0);
    }

    #[test]
    fn cylinder_rejects_bad_arcs() {
        let run = RunParams::new(1, 0);
        assert!(cylinder_experiment(3, 8, &[(0, 2), (3, 4), (5, 6), (7, 8)], &run).is_err());
        assert!(cylinder_experiment(3, 8, &[(1, 2), (3, 4), (5, 6), (7, 9)], &run).is_err());
    }

    #[test]
    fn torus_full_when_everything_is_open() {
        let mut run = RunParams::new(4, 3);
        run.p = Some(1.0);
        let t = torus_homology_experiment(4, &run).unwrap();
        assert_eq!(t.full, 4);
        assert_eq!(t.trivial, 0);
        assert_eq!(t.trials, 4);
    }

    #[test]
    fn torus_tally_sums_to_trials() {
        let run = RunParams::new(200, 7);
        let t = torus_homology_experiment(6, &run).unwrap();
        let total = t.full + t.trivial + t.cyclic.values().sum::<u64>();
        assert_eq!(total, 200);
        assert!(t.probability(&HomologySubgroup::Trivial) <= 1.0);
    }

    #[test]
    fn glued_all_open_crosses() {
        let mut run = RunParams::new(2, 1);
        run.p = Some(1.0);
        let e = exterior_glued_experiment(5.0, 12.0, &run).unwrap();
        assert_eq!(e.p_hat, 1.0);
    }

    #[test]
    fn branched_battery_shape() {
        let run = RunParams::new(30, 11);
        let out = branched_experiment(0.5, 1.0, 8.0, &run).unwrap();
        for name in ["h", "v", "hv", "d", "dbar"] {
            assert!(out.contains_key(name), "{name}");
        }
        // complementary-interval pairs are dual-ish even at this tiny scale
        assert!(out["hv"].p_hat <= out["h"].p_hat);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate_events(&rect_spec(4.0, 4.0, RunParams::new(0, 1))).is_err());
    }
}
