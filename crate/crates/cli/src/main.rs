//! Command-line front end: configures an experiment, runs it, and emits the
//! results as CSV, JSON, or an aligned text table. Every output embeds the
//! resolved configuration and seed so long runs stay reproducible.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use percolab::conformal::{cardy, cardy_rect, parallelogram_to_rect};
use percolab::estimate::{
    annulus_experiment, branched_experiment, cylinder_experiment, estimate_events,
    exterior_glued_experiment, torus_homology_experiment, EstimateResult, ExperimentSpec,
    RunParams,
};
use percolab::fit::{fit_shear, StriatedDataset, StriatedRow};
use percolab::lattice::{LatticeKind, ProbabilityField, RegionSpec};
use percolab::reference::RECT_ROWS;
use percolab::report::{battery_table, fmt_estimate, fmt_exact, homology_table, CsvTable};
use percolab::rng::RngKind;

/// Default opening probability of the off-band sites of the striated model.
const STRIATED_P2: f64 = 0.84928;

#[derive(Parser)]
#[command(name = "percolab", version, about = "Crossing probabilities in 2-D critical site percolation")]
struct Cli {
    /// TOML config file; command-line flags win on conflict.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replicas per estimate.
    #[arg(short, long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random source: lcg48 | default.
    #[arg(long, global = true)]
    rng: Option<String>,
    /// Worker threads; tallies are identical for any worker count.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Site-opening probability; default is the critical value for the
    /// lattice size (env PERCOLAB_PC overrides the default).
    #[arg(long, global = true)]
    pc: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum, Debug, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum LatticeArg {
    Square,
    Triangular,
}

impl From<LatticeArg> for LatticeKind {
    fn from(l: LatticeArg) -> Self {
        match l {
            LatticeArg::Square => LatticeKind::SquareSite,
            LatticeArg::Triangular => LatticeKind::TriangularSite,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact crossing probability from the aspect ratio or the cross-ratio.
    Cardy {
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        z: Option<f64>,
    },
    /// The 41-row rectangle sweep at a configurable scale.
    RectTable {
        /// Multiplies the reference widths and heights.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, value_enum, default_value = "square")]
        lattice: LatticeArg,
        /// Comma-separated aspect ratios to keep (as printed, e.g. 1.488).
        #[arg(long)]
        rows: Option<String>,
    },
    /// Crossing battery on a parallelogram with interior angle alpha*pi.
    Parallelogram {
        /// Interior angle as a fraction of pi, in (0, 1).
        #[arg(long)]
        alpha: f64,
        /// Slant side over horizontal side.
        #[arg(long)]
        ratio: f64,
        /// Horizontal side length in lattice units.
        #[arg(long, default_value_t = 100.0)]
        base: f64,
        /// Rotation of the whole region, radians.
        #[arg(long, default_value_t = 0.0)]
        rotation: f64,
        #[arg(long, value_enum, default_value = "square")]
        lattice: LatticeArg,
    },
    /// Fit the shear matrix of the striated model, from a dataset CSV
    /// (columns r,pi_h,pi_v) or from a fresh simulation.
    Striated {
        #[arg(long, conflicts_with = "ratios")]
        data: Option<PathBuf>,
        /// Simulate these aspect ratios instead of reading a dataset.
        #[arg(long)]
        ratios: Option<String>,
        /// Rectangle height in lattice units when simulating.
        #[arg(long, default_value_t = 100)]
        base: u32,
        /// Also write the (simulated) dataset CSV here.
        #[arg(long)]
        dump_data: Option<PathBuf>,
    },
    /// Arc-to-arc crossings on both circles of an annulus.
    Annulus {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
    },
    /// Crossings between arcs of one boundary circle of a periodic cylinder.
    Cylinder {
        #[arg(long)]
        width: u32,
        #[arg(long)]
        circumference: u32,
        /// Four 1-based inclusive row ranges "a-b,c-d,e-f,g-h"; default is
        /// four equal arcs (circumference divisible by 4).
        #[arg(long)]
        arcs: Option<String>,
    },
    /// Crossing between opposite inner-circle arcs with the plane exterior
    /// modeled by a glued auxiliary disk.
    Exterior {
        #[arg(long)]
        r1: f64,
        #[arg(long)]
        r2: f64,
    },
    /// Crossing battery on the branched double cover of a parallelogram.
    Branched {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        ratio: f64,
        /// Horizontal side length in lattice units.
        #[arg(long)]
        width: f64,
    },
    /// Homology classes of the open clusters on an L x L torus.
    Torus {
        #[arg(long)]
        size: u32,
    },
}

// --- error plumbing -------------------------------------------------------

struct CliErr {
    kind: &'static str,
    message: String,
}

impl CliErr {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<percolab::Error> for CliErr {
    fn from(e: percolab::Error) -> Self {
        let kind = match &e {
            percolab::Error::Domain(_) => "domain",
            percolab::Error::EmptyDomain(_) => "empty-domain",
            percolab::Error::Numeric(_) => "numeric",
            percolab::Error::Contract(_) => "contract",
        };
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliErr {
    fn from(e: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliErr>;

// --- configuration --------------------------------------------------------

#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<u64>,
    seed: Option<u64>,
    rng: Option<String>,
    workers: Option<usize>,
    pc: Option<f64>,
    format: Option<String>,
    out: Option<PathBuf>,
}

/// Fully resolved run parameters, embedded in every output.
#[derive(Clone, serde::Serialize)]
struct Resolved {
    command: String,
    n: u64,
    seed: u64,
    rng: RngKind,
    workers: usize,
    /// None means "critical value for the lattice size".
    pc: Option<f64>,
    params: serde_json::Value,
}

impl Resolved {
    fn run_params(&self) -> RunParams {
        RunParams {
            n: self.n,
            seed: self.seed,
            rng: self.rng,
            workers: self.workers,
            p: self.pc,
        }
    }
}

fn resolve(cli: &Cli) -> CliResult<(Resolved, Format, Option<PathBuf>)> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| CliErr {
                kind: "config",
                message: format!("{}: {e}", path.display()),
            })?
        }
        None => FileConfig::default(),
    };
    let rng_str = cli.rng.clone().or(file.rng).unwrap_or_else(|| "default".into());
    let rng = RngKind::from_str(&rng_str)?;
    let pc = match cli.pc.or(file.pc) {
        Some(p) => Some(p),
        None => match std::env::var("PERCOLAB_PC") {
            Ok(s) => Some(s.parse::<f64>().map_err(|_| CliErr {
                kind: "config",
                message: format!("PERCOLAB_PC is not a number: {s}"),
            })?),
            Err(_) => None,
        },
    };
    if let Some(p) = pc {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliErr::usage(format!("pc out of [0,1]: {p}")));
        }
    }
    let format = match cli.format {
        Some(f) => f,
        None => match file.format.as_deref() {
            Some("csv") | None => Format::Csv,
            Some("json") => Format::Json,
            Some("pretty") => Format::Pretty,
            Some(other) => {
                return Err(CliErr::usage(format!("unknown format: {other}")));
            }
        },
    };
    let resolved = Resolved {
        command: String::new(),
        n: cli.n.or(file.n).unwrap_or(1000),
        seed: cli.seed.or(file.seed).unwrap_or(1),
        rng,
        workers: cli.workers.or(file.workers).unwrap_or(1),
        pc,
        params: serde_json::Value::Null,
    };
    Ok((resolved, format, cli.out.clone().or(file.out)))
}

// --- output ---------------------------------------------------------------

fn write_out(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(
    cfg: &Resolved,
    table: &CsvTable,
    results: serde_json::Value,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let text = match format {
        Format::Csv => {
            let header = vec![format!(
                "config: {}",
                serde_json::to_string(cfg).expect("config serializes")
            )];
            table.to_csv(&header)
        }
        Format::Json => {
            let doc = json!({ "config": cfg, "results": results });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))
        }
        Format::Pretty => {
            let mut widths: Vec<usize> = table.columns.iter().map(|c| c.len()).collect();
            for row in &table.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let mut s = format!(
                "{} (n={}, seed={}, rng={:?}, workers={})\n",
                cfg.command, cfg.n, cfg.seed, cfg.rng, cfg.workers
            );
            let fmt_row = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            s.push_str(&fmt_row(&table.columns));
            s.push('\n');
            for row in &table.rows {
                s.push_str(&fmt_row(row));
                s.push('\n');
            }
            s
        }
    };
    write_out(out, &text)
}

fn estimates_json(results: &BTreeMap<String, EstimateResult>) -> serde_json::Value {
    serde_json::to_value(results).expect("estimates serialize")
}

// --- subcommands ----------------------------------------------------------

fn parse_ratio_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliErr::usage(format!("not a number: {t}")))
        })
        .collect()
}

fn cmd_cardy(
    r: Option<f64>,
    z: Option<f64>,
    cfg: &Resolved,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let value = match (r, z) {
        (Some(r), None) => cardy_rect(r)?,
        (None, Some(z)) => cardy(z)?,
        _ => return Err(CliErr::usage("give exactly one of --r or --z")),
    };
    match format {
        Format::Json => {
            let doc = json!({ "config": cfg, "value": value });
            write_out(out, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))
        }
        _ => write_out(out, &format!("{}\n", fmt_exact(value))),
    }
}

fn rect_spec(width: f64, height: f64, lattice: LatticeKind, run: RunParams) -> ExperimentSpec {
    ExperimentSpec {
        region: RegionSpec::Rectangle { width, height },
        lattice,
        mesh: 1.0,
        field: None,
        run,
    }
}

fn cmd_rect_table(
    scale: f64,
    lattice: LatticeArg,
    rows: Option<String>,
    cfg: &Resolved,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliErr::usage(format!("scale must be positive: {scale}")));
    }
    let keep: Option<Vec<String>> =
        rows.map(|s| s.split(',').map(|t| t.trim().to_string()).collect());
    let mut table = CsvTable::new(vec![
        "width", "height", "r", "pi_h_cft", "pi_h", "pi_v", "pi_hv", "ci95",
    ]);
    let mut results = Vec::new();
    for &(w0, h0, r, _) in RECT_ROWS.iter() {
        let r_str = format!("{r:.3}");
        if let Some(keep) = &keep {
            if !keep.contains(&r_str) {
                continue;
            }
        }
        let (w, h) = ((w0 as f64 * scale).round(), (h0 as f64 * scale).round());
        let spec = rect_spec(w, h, lattice.into(), cfg.run_params());
        let est = estimate_events(&spec)?;
        // the displayed r is rounded; the exact value uses the true quotient
        let cft = cardy_rect(w0 as f64 / h0 as f64)?;
        table.push(vec![
            format!("{w}"),
            format!("{h}"),
            r_str.clone(),
            fmt_exact(cft),
            fmt_estimate(est["h"].p_hat),
            fmt_estimate(est["v"].p_hat),
            fmt_estimate(est["hv"].p_hat),
            fmt_estimate(est["h"].ci95),
        ])?;
        results.push(json!({
            "r": r, "width": w, "height": h, "pi_h_cft": cft,
            "estimates": estimates_json(&est),
        }));
    }
    if table.rows.is_empty() {
        return Err(CliErr::usage("row filter matched nothing"));
    }
    emit(cfg, &table, serde_json::Value::Array(results), format, out)
}

fn parallelogram_vertices(alpha: f64, ratio: f64, base: f64) -> [[f64; 2]; 4] {
    let (s, c) = (alpha * std::f64::consts::PI).sin_cos();
    let slant = [ratio * base * c, ratio * base * s];
    [
        [0.0, 0.0],
        slant,
        [slant[0] + base, slant[1]],
        [base, 0.0],
    ]
}

fn cmd_parallelogram(
    alpha: f64,
    ratio: f64,
    base: f64,
    rotation: f64,
    lattice: LatticeArg,
    cfg: &Resolved,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let spec = ExperimentSpec {
        region: RegionSpec::Parallelogram {
            vertices: parallelogram_vertices(alpha, ratio, base),
            rotation,
        },
        lattice: lattice.into(),
        mesh: 1.0,
        field: None,
        run: cfg.run_params(),
    };
    let est = estimate_events(&spec)?;
    // h joins the two slant sides, so the spanning side is the horizontal one
    let r0 = parallelogram_to_rect(alpha, 1.0 / ratio)?;
    let cft = cardy_rect(r0)?;
    let mut table = battery_table(&est);
    table.push(vec![
        "pi_h_cft".into(),
        String::new(),
        String::new(),
        fmt_exact(cft),
        String::new(),
    ])?;
    let results = json!({
        "r0": r0, "pi_h_cft": cft, "estimates": estimates_json(&est),
    });
    emit(cfg, &table, results, format, out)
}

fn read_striated_csv(path: &PathBuf) -> CliResult<StriatedDataset> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() < 3 {
            return Err(CliErr::usage(format!("need r,pi_h,pi_v columns: {line}")));
        }
        let parsed: Vec<Result<f64, _>> = cells[..3].iter().map(|c| c.parse()).collect();
        if parsed.iter().any(|p| p.is_err()) {
            // header line
            continue;
        }
        let v: Vec<f64> = parsed.into_iter().map(|p| p.unwrap()).collect();
        rows.push(StriatedRow {
            r: v[0],
            pi_h: v[1],
            pi_v: v[2],
        });
    }
    Ok(StriatedDataset::new(rows)?)
}

fn cmd_striated(
    data: Option<PathBuf>,
    ratios: Option<String>,
    base: u32,
    dump_data: Option<PathBuf>,
    cfg: &Resolved,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let dataset = match (&data, &ratios) {
        (Some(path), None) => read_striated_csv(path)?,
        (None, Some(list)) => {
            let p2 = cfg.pc.unwrap_or(STRIATED_P2);
            let field = ProbabilityField::striated(p2)?;
            let mut rows = Vec::new();
            for r in parse_ratio_list(list)? {
                let width = (r * base as f64).round();
                let spec = ExperimentSpec {
                    region: RegionSpec::Rectangle {
                        width,
                        height: base as f64,
                    },
                    lattice: LatticeKind::SquareSite,
                    mesh: 1.0,
                    field: Some(field.clone()),
                    run: cfg.run_params(),
                };
                let est = estimate_events(&spec)?;
                rows.push(StriatedRow {
                    r,
                    pi_h: est["h"].p_hat,
                    pi_v: est["v"].p_hat,
                });
            }
            StriatedDataset::new(rows)?
        }
        _ => return Err(CliErr::usage("give exactly one of --data or --ratios")),
    };
    if let Some(path) = dump_data {
        let mut t = CsvTable::new(vec!["r", "pi_h", "pi_v"]);
        for row in &dataset.rows {
            t.push(vec![
                format!("{}", row.r),
                fmt_estimate(row.pi_h),
                fmt_estimate(row.pi_v),
            ])?;
        }
        std::fs::write(path, t.to_csv(&[]))?;
    }
    let fit = fit_shear(&dataset)?;
    let mut table = CsvTable::new(vec!["branch", "a", "theta", "theta_over_pi", "residual"]);
    for (name, f) in [("primary", fit.primary), ("mirror", fit.mirror)] {
        table.push(vec![
            name.to_string(),
            fmt_exact(f.a),
            fmt_exact(f.theta),
            fmt_exact(f.theta / std::f64::consts::PI),
            format!("{:.6e}", f.residual),
        ])?;
    }
    let results = serde_json::to_value(&fit).expect("fit serializes");
    emit(cfg, &table, results, format, out)
}

fn cmd_cylinder(
    width: u32,
    circumference: u32,
    arcs: Option<String>,
    cfg: &Resolved,
    format: Format,
    out: &Option<PathBuf>,
) -> CliResult<()> {
    let arcs: [(u32, u32); 4] = match arcs {
        Some(s) => {
            let parts: Vec<(u32, u32)> = s
                .split(',')
                .map(|t| {
                    let (a, b) = t
                        .trim()
                        .split_once('-')
                        .ok_or_else(|| CliErr::usage(format!("arc not of form a-b: {t}")))?;
                    let lo = a.parse().map_err(|_| CliErr::usage(format!("bad arc: {t}")))?;
                    let hi = b.parse().map_err(|_| CliErr::usage(format!("bad arc: {t}")))?;
                    Ok((lo, hi))
                })
                .collect::<CliResult<_>>()?;
            parts
                .try_into()
                .map_err(|_| CliErr::usage("need exactly four arcs"))?
        }
        None => {
            if circumference % 4 != 0 {
                return Err(CliErr::usage(
                    "circumference not divisible by 4; give --arcs explicitly",
                ));
            }
            let q = circumference / 4;
            [(1, q), (q + 1, 2 * q), (2 * q + 1, 3 * q), (3 * q + 1, 4 * q)]
        }
    };
    let est = cylinder_experiment(width, circumference, &arcs, &cfg.run_params())?;
    emit(cfg, &battery_table(&est), estimates_json(&est), format, out)
}

fn run(cli: Cli) -> CliResult<()> {
    let (mut cfg, format, out) = resolve(&cli)?;
    match cli.cmd {
        Cmd::Cardy { r, z } => {
            cfg.command = "cardy".into();
            cfg.params = json!({ "r": r, "z": z });
            cmd_cardy(r, z, &cfg, format, &out)
        }
        Cmd::RectTable {
            scale,
            lattice,
            rows,
        } => {
            cfg.command = "rect-table".into();
            cfg.params = json!({ "scale": scale, "lattice": lattice, "rows": rows });
            cmd_rect_table(scale, lattice, rows, &cfg, format, &out)
        }
        Cmd::Parallelogram {
            alpha,
            ratio,
            base,
            rotation,
            lattice,
        } => {
            cfg.command = "parallelogram".into();
            cfg.params = json!({
                "alpha": alpha, "ratio": ratio, "base": base,
                "rotation": rotation, "lattice": lattice,
            });
            cmd_parallelogram(alpha, ratio, base, rotation, lattice, &cfg, format, &out)
        }
        Cmd::Striated {
            data,
            ratios,
            base,
            dump_data,
        } => {
            cfg.command = "striated".into();
            cfg.params = json!({ "data": data, "ratios": ratios, "base": base });
            cmd_striated(data, ratios, base, dump_data, &cfg, format, &out)
        }
        Cmd::Annulus { r1, r2 } => {
            cfg.command = "annulus".into();
            cfg.params = json!({ "r1": r1, "r2": r2 });
            let est = annulus_experiment(r1, r2, &cfg.run_params())?;
            emit(&cfg, &battery_table(&est), estimates_json(&est), format, &out)
        }
        Cmd::Cylinder {
            width,
            circumference,
            arcs,
        } => {
            cfg.command = "cylinder".into();
            cfg.params = json!({
                "width": width, "circumference": circumference, "arcs": arcs,
            });
            cmd_cylinder(width, circumference, arcs, &cfg, format, &out)
        }
        Cmd::Exterior { r1, r2 } => {
            cfg.command = "exterior".into();
            cfg.params = json!({ "r1": r1, "r2": r2 });
            let e = exterior_glued_experiment(r1, r2, &cfg.run_params())?;
            let mut est = BTreeMap::new();
            est.insert("h".to_string(), e);
            emit(&cfg, &battery_table(&est), estimates_json(&est), format, &out)
        }
        Cmd::Branched {
            alpha,
            ratio,
            width,
        } => {
            cfg.command = "branched".into();
            cfg.params = json!({ "alpha": alpha, "ratio": ratio, "width": width });
            let est = branched_experiment(alpha, ratio, width, &cfg.run_params())?;
            let r0 = parallelogram_to_rect(alpha, ratio)?;
            let cft = cardy_rect(r0)?;
            let mut table = battery_table(&est);
            table.push(vec![
                "pi_h_cft".into(),
                String::new(),
                String::new(),
                fmt_exact(cft),
                String::new(),
            ])?;
            let results = json!({
                "r0": r0, "pi_h_cft": cft, "estimates": estimates_json(&est),
            });
            emit(&cfg, &table, results, format, &out)
        }
        Cmd::Torus { size } => {
            cfg.command = "torus".into();
            cfg.params = json!({ "size": size });
            let tally = torus_homology_experiment(size, &cfg.run_params())?;
            let table = homology_table(&tally);
            let mut classes = serde_json::Map::new();
            for row in &table.rows {
                classes.insert(
                    row[0].clone(),
                    json!({
                        "count": row[1].parse::<u64>().expect("count"),
                    }),
                );
            }
            let results = json!({ "trials": tally.trials, "classes": classes });
            emit(&cfg, &table, results, format, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": { "kind": e.kind, "message": e.message } })
            );
            ExitCode::FAILURE
        }
    }
}
