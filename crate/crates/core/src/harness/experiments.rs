use rayon::prelude::*;
use serde::Serialize;

use super::figures::{FigureData, FigureKind};
use super::io::packing_to_csv;
use super::params::Params;
use super::{Experiment, ExperimentConfig, Format, HarnessError, Status, Writer};
use crate::graphs::{
    complete_to_plane, gen_canopy_tree, gen_dyadic_halfplane, gen_dyadic_with_bits, gen_egw_halfplane, mtp_check,
    mtp_check_with, DyadicParams, EgwParams, GraphError, PlaneTriangulation, Transport, TransportGraph, ROW_AXIS,
};
use crate::packing::{
    bisector, detect_reflection, layout_with_tol, line_pack, match_isometry, nerve, randomize_pose, solve_radii,
    uniform_boundary, validate_packing, Circle, CirclePacking, IsometryKind, IsometrySpec, LineMode, PackingError,
    SolverOptions, ValidationReport,
};
use crate::rng::RandomSource;
use crate::stats::{
    estimate_clt_params, fixture_cocycles, ks_statistic, log_quantile_ratio, normal_cdf, quantile_ratio_experiment,
    sample_foil_windows, CocycleKind, QuantileSource, StatsError,
};

fn packing_err(context: &str) -> impl Fn(PackingError) -> HarnessError + '_ {
    move |source| HarnessError::Packing { context: context.to_string(), source }
}

fn graph_err(context: &str) -> impl Fn(GraphError) -> HarnessError + '_ {
    move |source| HarnessError::Graph { context: context.to_string(), source }
}

fn stats_err(context: &str) -> impl Fn(StatsError) -> HarnessError + '_ {
    move |source| HarnessError::Stats { context: context.to_string(), source }
}

fn bad(key: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Config { key: key.into(), message: message.into() }
}

pub(super) fn run(config: &ExperimentConfig, p: &Params, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let rng = RandomSource::new(config.seed);
    match config.experiment {
        Experiment::PackDyadic => pack_dyadic(p, &rng, w),
        Experiment::PackEgw => pack_egw(p, &rng, w),
        Experiment::Canopy => canopy(p, &rng, w),
        Experiment::Symmetry => symmetry(p, &rng, w),
        Experiment::QuantileTightness => quantile_tightness(p, &rng, w),
        Experiment::Clt => clt(p, &rng, w),
        Experiment::FoilAverage => foil_average(p, &rng, w),
        Experiment::Mtp => mtp(p, &rng, w),
        Experiment::FixturesZ => fixtures_z(p, &rng, w),
    }
}

fn parse_bits(s: &str) -> Result<Vec<u8>, HarnessError> {
    s.split(',')
        .filter(|b| !b.trim().is_empty())
        .map(|b| match b.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(bad("bits", format!("bit {other:?} is not 0 or 1"))),
        })
        .collect()
}

fn dyadic_window(p: &Params, rng: &RandomSource, plane: bool) -> Result<PlaneTriangulation, HarnessError> {
    let params = DyadicParams { levels: p.get("levels")?, window: p.get("window")? };
    let bits = parse_bits(p.str("bits"))?;
    let upper = if bits.is_empty() {
        gen_dyadic_halfplane(&rng.labeled("dyadic"), params)
    } else {
        gen_dyadic_with_bits(&bits, params)
    }
    .map_err(graph_err("dyadic window"))?;
    if plane {
        complete_to_plane(&upper).map_err(graph_err("reflect to plane"))
    } else {
        Ok(upper)
    }
}

#[derive(Serialize)]
struct SolvedReport {
    vertices: usize,
    sweeps: usize,
    residual: f64,
    validation: ValidationReport,
}

fn solve_and_layout(
    g: &PlaneTriangulation,
    opts: SolverOptions,
    geometry_tol: f64,
) -> Result<(CirclePacking, SolvedReport), HarnessError> {
    let solved = solve_radii(g, &uniform_boundary(g, 1.0), opts).map_err(packing_err("radius solver"))?;
    let packing = layout_with_tol(g, &solved.radii, geometry_tol).map_err(packing_err("layout"))?;
    let validation = validate_packing(&packing, &g.to_simple_graph(), geometry_tol);
    Ok((packing, SolvedReport { vertices: g.num_vertices(), sweeps: solved.sweeps, residual: solved.residual, validation }))
}

fn write_packing(w: &mut Writer<'_>, packing: &CirclePacking) -> Result<(), HarnessError> {
    w.csv("packing.csv", "v,x,y,r", &packing_to_csv(packing))?;
    w.json("packing.json", packing)
}

fn pack_dyadic(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let g = dyadic_window(p, rng, p.get("plane")?)?;
    let opts = SolverOptions { tol: p.get("tol")?, max_sweeps: p.get("max-sweeps")? };
    let (packing, report) = solve_and_layout(&g, opts, p.get("geometry-tol")?)?;
    w.json("graph.json", &g)?;
    write_packing(w, &packing)?;
    w.json("report.json", &report)?;
    let edges = g.edges().collect();
    w.svg("figure.svg", &FigureData::Packing { packing, edges, symmetry: None }, FigureKind::PackingSvg)?;
    Ok(if report.validation.pass {
        Status::Ok
    } else {
        Status::ValidationFailed { reason: format!("packing validation failed at vertices {:?}", report.validation.offending) }
    })
}

#[derive(Serialize)]
struct EgwReport {
    vertices: usize,
    triangles: usize,
    mode: LineMode,
    additivity_residual: f64,
    tangency_residual: Option<f64>,
    exact_additivity: Option<bool>,
    exact_tangency: Option<bool>,
}

const LINE_TOL: f64 = 1e-9;

fn pack_egw(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let params = EgwParams {
        ancestor_depth: p.get("ancestors")?,
        max_desc_generations: p.get("max-gen")?,
        max_triangles: p.get("max-triangles")?,
    };
    let mode: LineMode = p.get("mode")?;
    let (_, gen) = gen_egw_halfplane(&rng.labeled("egw"), params).map_err(graph_err("EGW truncation"))?;
    let lt = line_pack(&gen, (0.0, 0.0), mode).map_err(packing_err("line packing"))?;
    let report = EgwReport {
        vertices: gen.num_vertices(),
        triangles: gen.num_triangles(),
        mode,
        additivity_residual: lt.additivity_residual(&gen),
        tangency_residual: lt.tangency_residual(&gen),
        exact_additivity: lt.exact_additivity(&gen),
        exact_tangency: lt.exact_tangency(&gen),
    };
    w.json("graph.json", &gen)?;
    w.json("report.json", &report)?;
    if let Some(x) = &lt.x {
        let circles = (0..gen.num_vertices() as u32)
            .map(|v| {
                let r = lt.radius(v);
                Circle { cx: x[v as usize], cy: r, r }
            })
            .collect();
        let mut packing = CirclePacking::new(circles, LINE_TOL);
        packing.line = Some(0.0);
        write_packing(w, &packing)?;
        w.svg("figure.svg", &FigureData::Packing { packing, edges: vec![], symmetry: None }, FigureKind::PackingSvg)?;
    } else if w.config.wants(Format::Csv) {
        let rows: Vec<String> = lt.log_s.iter().enumerate().map(|(v, s)| format!("{v},{s}")).collect();
        w.csv("log_s.csv", "v,log_s", &rows)?;
    }
    let ok = report.additivity_residual <= LINE_TOL
        && report.tangency_residual.map_or(true, |r| r <= LINE_TOL)
        && report.exact_additivity != Some(false)
        && report.exact_tangency != Some(false);
    Ok(if ok {
        Status::Ok
    } else {
        Status::ValidationFailed { reason: "line packing identities violated".into() }
    })
}

#[derive(Serialize)]
struct CanopyReport {
    vertices: usize,
    max_level: u32,
    heights: Vec<f64>,
    y1_minus_y0: f64,
    tangency_residual: f64,
    nerve_matches_tree: bool,
    shift: (f64, f64),
    shift_level: Option<u32>,
}

fn canopy(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let max_level: u32 = p.get("max-level")?;
    if !(1..=40).contains(&max_level) {
        return Err(bad("max-level", "must lie in 1..=40"));
    }
    let window: i64 = match p.get::<i64>("window")? {
        0 => 1i64 << max_level,
        w => w,
    };
    let tree = gen_canopy_tree(&rng.labeled("canopy"), max_level, window).map_err(graph_err("canopy tree"))?;
    let stationary = rng.labeled("stationarize");
    let cp = crate::packing::canopy_pack(&tree, p.get::<bool>("stationarize")?.then_some(&stationary));
    let residual = cp.tangency_residual(&tree);
    let observed = nerve(&cp.packing, LINE_TOL).map_err(packing_err("nerve"))?;
    let report = CanopyReport {
        vertices: tree.len(),
        max_level,
        y1_minus_y0: cp.heights[1] - cp.heights[0],
        heights: cp.heights.clone(),
        tangency_residual: residual,
        nerve_matches_tree: observed.edges == tree.tree.edges,
        shift: cp.shift,
        shift_level: cp.shift_level,
    };
    w.json("graph.json", &tree)?;
    write_packing(w, &cp.packing)?;
    w.json("report.json", &report)?;
    let edges = tree.tree.edges.iter().copied().collect();
    w.svg("figure.svg", &FigureData::Packing { packing: cp.packing.clone(), edges, symmetry: None }, FigureKind::PackingSvg)?;
    Ok(if report.nerve_matches_tree && residual <= LINE_TOL {
        Status::Ok
    } else {
        Status::ValidationFailed { reason: format!("tangency residual {residual:.3e}, nerve matches: {}", report.nerve_matches_tree) }
    })
}

#[derive(Serialize)]
struct SymmetryReport {
    vertices: usize,
    validation: ValidationReport,
    detected: IsometrySpec,
    /// Reflection in the perpendicular bisector of the root and its mirror.
    axis_line: IsometryKind,
    axis_match_error: f64,
    /// Every `(a, 0)` is matched to `(a, -1)` and back.
    axis_swaps_mirrors: bool,
    tol: f64,
}

fn symmetry(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let g = dyadic_window(p, rng, true)?;
    let tol: f64 = p.get("tol")?;
    let (packing, solved) = solve_and_layout(&g, SolverOptions::default(), 1e-6)?;
    let packing = if p.get("randomize")? {
        randomize_pose(&packing, &rng.labeled("pose")).map_err(packing_err("random pose"))?.0
    } else {
        packing
    };
    let half = g.vertices().iter().filter(|v| v.row == ROW_AXIS || v.row == crate::graphs::ROW_UPPER_CENTER).count() as u32;
    let root = g.root();
    let axis_line = bisector(&packing, root, root + half);
    let (axis_err, perm) = match_isometry(&packing, axis_line);
    let swaps = g
        .vertices()
        .iter()
        .filter(|v| v.row == ROW_AXIS)
        .all(|v| perm.get(v.id as usize) == Some(&(v.id + half)) && perm.get((v.id + half) as usize) == Some(&v.id));
    let detected = detect_reflection(&packing, tol);
    let report = SymmetryReport {
        vertices: g.num_vertices(),
        validation: solved.validation,
        detected: detected.clone(),
        axis_line,
        axis_match_error: axis_err,
        axis_swaps_mirrors: swaps,
        tol,
    };
    w.json("graph.json", &g)?;
    write_packing(w, &packing)?;
    w.json("report.json", &report)?;
    w.svg("figure.svg", &FigureData::Packing { packing, edges: vec![], symmetry: Some(axis_line) }, FigureKind::PackingSvg)?;
    Ok(if axis_err <= tol && swaps {
        Status::Ok
    } else {
        Status::ValidationFailed { reason: format!("mirror reflection error {axis_err:.3e}, swaps axis rows: {swaps}") }
    })
}

fn default_m_grid() -> Vec<f64> {
    (0..=16).map(|k| 2f64.powi(4 * k)).collect()
}

fn quantile_tightness(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let source: QuantileSource = p.get("source")?;
    let ns = p.list_u32("n")?;
    let eps: f64 = p.get("epsilon")?;
    let m_grid = match p.list_f64("m-grid")? {
        g if g.is_empty() => default_m_grid(),
        g => g,
    };
    let samples: usize = p.get("samples")?;
    let rep = quantile_ratio_experiment(source, &ns, eps, &m_grid, samples, rng).map_err(stats_err("quantile tightness"))?;
    let rows: Vec<String> = rep.rows.iter().map(|r| format!("{},{},{},{}", r.n, r.m, r.epsilon, r.tail_prob)).collect();
    w.csv("tail.csv", "n,M,epsilon,tail_prob", &rows)?;
    w.json("report.json", &rep)?;
    w.svg("figure.svg", &FigureData::Tail { rows: rep.rows.clone() }, FigureKind::TailCurves)?;
    Ok(Status::Ok)
}

fn clt(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let ns = p.list_u32("n")?;
    let reports = estimate_clt_params(&ns, p.get("samples")?, rng).map_err(stats_err("matrix-product CLT"))?;
    let rows: Vec<String> = reports
        .iter()
        .map(|r| format!("{},{},{},{},{},{}", r.n, r.gamma_hat, r.sigma_hat, r.ks_statistic, r.gamma_ci, r.quantile_slope))
        .collect();
    w.csv("clt.csv", "n,gamma_hat,sigma_hat,ks,gamma_ci,quantile_slope", &rows)?;
    w.json("report.json", &reports)?;
    let series = vec![
        ("gamma_hat".to_string(), reports.iter().map(|r| (r.n as f64, r.gamma_hat)).collect()),
        ("sigma_hat".to_string(), reports.iter().map(|r| (r.n as f64, r.sigma_hat)).collect()),
        ("quantile slope".to_string(), reports.iter().map(|r| (r.n as f64, r.quantile_slope)).collect()),
    ];
    w.svg("figure.svg", &FigureData::Slope { x_label: "n".into(), y_label: "estimate".into(), series }, FigureKind::SlopePlot)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct FoilRow {
    seed: u64,
    ancestors: usize,
    ave_l0: f64,
    ave_l1: f64,
}

#[derive(Serialize)]
struct FoilSummary {
    m: usize,
    seeds: u64,
    decreasing: usize,
    fraction_decreasing: f64,
    rows: Vec<FoilRow>,
}

fn foil_average(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let seeds: u64 = p.get("seeds")?;
    let m: usize = p.get("m")?;
    let cap: usize = p.get("max-ancestors")?;
    let base = rng.labeled("foil");
    let samples = (0..seeds)
        .into_par_iter()
        .map(|i| sample_foil_windows(&base.substream(i), m, cap))
        .collect::<Result<Vec<_>, _>>()
        .map_err(stats_err("foil windows"))?;
    let rows: Vec<FoilRow> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| FoilRow { seed: i as u64, ancestors: s.ancestors, ave_l0: s.l0.ave_value, ave_l1: s.l1.ave_value })
        .collect();
    let decreasing = rows.iter().filter(|r| r.ave_l1 < r.ave_l0).count();
    let mut csv = Vec::new();
    for r in &rows {
        csv.push(format!("{},0,{m},{}", r.seed, r.ave_l0));
        csv.push(format!("{},1,{m},{}", r.seed, r.ave_l1));
    }
    w.csv("foil.csv", "seed,level,M,ave", &csv)?;
    let series = vec![
        ("L0".to_string(), rows.iter().map(|r| (r.seed as f64, r.ave_l0)).collect()),
        ("L1".to_string(), rows.iter().map(|r| (r.seed as f64, r.ave_l1)).collect()),
    ];
    let summary = FoilSummary {
        m,
        seeds,
        decreasing,
        fraction_decreasing: if seeds == 0 { 0.0 } else { decreasing as f64 / seeds as f64 },
        rows,
    };
    w.json("report.json", &summary)?;
    w.svg("figure.svg", &FigureData::Slope { x_label: "sample".into(), y_label: "window average".into(), series }, FigureKind::SlopePlot)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct MtpRow {
    k: u32,
    mean_incoming: f64,
    stderr: f64,
}

#[derive(Serialize)]
struct MtpSummary {
    samples: usize,
    rows: Vec<MtpRow>,
    /// Least-squares slope of mean incoming mass against `K`.
    slope: f64,
    constant_identity_holds: bool,
}

/// Least-squares slope of `ys` on `xs`.
pub(crate) fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Foil-ancestor-0 mass received by the root, and whether the constant
/// transport balances exactly, for one genealogy.
fn mtp_sample(src: &RandomSource, k: u32, check_constant: bool) -> Result<(f64, bool), GraphError> {
    let params = EgwParams { ancestor_depth: 0, max_desc_generations: k, max_triangles: 10_000_000 };
    let (_, gen) = gen_egw_halfplane(src, params)?;
    let tg = TransportGraph::from_genealogy(&gen);
    let fa = mtp_check(&tg, Transport::FoilAncestor(0))?;
    let mut ok = fa.lhs == fa.rhs;
    if check_constant {
        let n = tg.graph.n;
        let c = mtp_check_with(n, |_, _| 1.0);
        ok &= c.lhs == c.rhs && c.lhs == (n * n) as f64;
    }
    Ok((fa.incoming[gen.root_vertex() as usize], ok))
}

fn mtp(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let ks = p.list_u32("k")?;
    let samples: usize = p.get("samples")?;
    if samples < 2 {
        return Err(bad("samples", "need at least 2"));
    }
    let base = rng.labeled("mtp");
    let mut rows = Vec::new();
    let mut identity = true;
    for &k in &ks {
        if k < 1 {
            return Err(bad("k", "caps must be at least 1"));
        }
        // Sample i reuses substream i for every K.
        let xs = (0..samples as u64)
            .into_par_iter()
            .map(|i| mtp_sample(&base.substream(i), k, i < 100))
            .collect::<Result<Vec<_>, _>>()
            .map_err(graph_err("mass transport"))?;
        identity &= xs.iter().all(|x| x.1);
        let m = samples as f64;
        let mean = xs.iter().map(|x| x.0).sum::<f64>() / m;
        let var = xs.iter().map(|x| (x.0 - mean).powi(2)).sum::<f64>() / (m - 1.0);
        rows.push(MtpRow { k, mean_incoming: mean, stderr: (var / m).sqrt() });
    }
    let kx: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let my: Vec<f64> = rows.iter().map(|r| r.mean_incoming).collect();
    let slope = if rows.len() >= 2 { ls_slope(&kx, &my) } else { f64::NAN };
    let csv: Vec<String> = rows.iter().map(|r| format!("{},{},{}", r.k, r.mean_incoming, r.stderr)).collect();
    w.csv("mtp.csv", "K,mean_incoming,stderr", &csv)?;
    let series = vec![
        ("mean incoming".to_string(), kx.iter().copied().zip(my.iter().copied()).collect()),
        ("1 + K".to_string(), kx.iter().map(|&k| (k, 1.0 + k)).collect()),
    ];
    let summary = MtpSummary { samples, rows, slope, constant_identity_holds: identity };
    w.json("report.json", &summary)?;
    w.svg("figure.svg", &FigureData::Slope { x_label: "K".into(), y_label: "incoming mass at root".into(), series }, FigureKind::SlopePlot)?;
    Ok(if identity {
        Status::Ok
    } else {
        Status::ValidationFailed { reason: "transport sums do not balance".into() }
    })
}

#[derive(Serialize)]
struct FixturesReport {
    kind: String,
    n: i64,
    samples: usize,
    /// `(1/√n) log c(0, z)` for ziid, `log2` quantile ratio for z1.
    mean: f64,
    sd: f64,
    /// KS distance to `Normal(0, (log 2)²)` (ziid only).
    ks_statistic: Option<f64>,
}

fn fixtures_z(p: &Params, rng: &RandomSource, w: &mut Writer<'_>) -> Result<Status, HarnessError> {
    let n: i64 = p.get("n")?;
    let samples: usize = p.get("samples")?;
    if samples < 2 {
        return Err(bad("samples", "need at least 2"));
    }
    let kind = match p.str("kind") {
        "z1" => CocycleKind::Z1 { n },
        "ziid" => CocycleKind::Ziid { n },
        other => return Err(bad("kind", format!("unknown kind {other:?}"))),
    };
    let base = rng.labeled("fixtures-z");
    let xs = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let (_, c) = fixture_cocycles(kind, &base.substream(i))?;
            match kind {
                CocycleKind::Ziid { .. } => {
                    let far = c.labels.iter().position(|&l| l != 0).expect("two-point window") as u32;
                    let origin = c.index_of(0).expect("origin in window");
                    Ok(c.log_ratio(origin, far) / (n as f64).sqrt())
                }
                _ => Ok(log_quantile_ratio(&c.log_r, 0.25)? / std::f64::consts::LN_2),
            }
        })
        .collect::<Result<Vec<f64>, StatsError>>()
        .map_err(stats_err("path fixture"))?;
    let m = samples as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let ks = match kind {
        CocycleKind::Ziid { .. } => {
            let sigma = std::f64::consts::LN_2;
            Some(ks_statistic(&xs, |x| normal_cdf(x / sigma)).map_err(stats_err("KS"))?)
        }
        _ => None,
    };
    let rows: Vec<String> = xs.iter().enumerate().map(|(i, x)| format!("{i},{x}")).collect();
    w.csv("samples.csv", "sample,value", &rows)?;
    let report = FixturesReport { kind: p.str("kind").into(), n, samples, mean, sd, ks_statistic: ks };
    w.json("report.json", &report)?;
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    let ecdf: Vec<(f64, f64)> = sorted.iter().enumerate().map(|(i, &x)| (x, (i + 1) as f64 / m)).collect();
    w.svg(
        "figure.svg",
        &FigureData::Slope { x_label: "value".into(), y_label: "empirical CDF".into(), series: vec![("ecdf".into(), ecdf)] },
        FigureKind::SlopePlot,
    )?;
    Ok(Status::Ok)
}
