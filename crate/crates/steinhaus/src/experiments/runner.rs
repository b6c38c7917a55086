//! Experiment dispatch: builds inputs from a config, runs the relevant
//! operations, cross-checks with the grid oracle, and assembles the report
//! plus artifact files (CSV tables, SVG figures).
//!
//! Reports are deterministic byte-for-byte for identical configs; wall-clock
//! timings go to a sidecar `timings.csv` that is not part of the report.

use std::path::Path as FsPath;
use std::sync::Arc;
use std::time::Instant;

use serde_json::json;

use crate::bodies::{build_gauge_body_with, is_flattening_point, BoundaryPatch, ConvexBody, FlatnessVerdict};
use crate::describe::{PatchDesc, PathDesc};
use crate::error::{Error, Result};
use crate::geometry::{direction_fan, NormSpec, Vector};
use crate::grid::{
    block_fully_occupied_at, has_interior, iterate_sumset, minkowski_sum, occupied_measure,
    patch_chain, rasterize, render, GridSet, InteriorVerdict, SetDescriptor,
};
use crate::interval1d::{
    cantor_stage, interval_sum, iterate_interval_sum, predicted_k, rational, ssp_classify,
    IntervalUnion, RationalValue,
};
use crate::paths::{
    sphere_patch_decide, volkmann_walter_check, witness_verify, Certified, Decision, VwOutcome,
};

use super::config::{default_ambient, ExperimentConfig, ExperimentKind, ResolveCtx};
use super::report::{
    CertificateRecord, ExactValue, OracleRecord, RenormRecord, RunReport, Verdict,
};

pub struct RunOutput {
    pub report: RunReport,
    /// Relative file name → content; includes `report.json`.
    pub files: Vec<(String, Vec<u8>)>,
    /// Wall-clock phases, written to `timings.csv` only.
    pub timings: Vec<(String, f64)>,
}

/// Runs one experiment. Configuration problems are errors; computational
/// failures inside the experiment are embedded in the report with `ok = false`.
pub fn run(config: &ExperimentConfig, base_dir: &FsPath) -> Result<RunOutput> {
    config.validate()?;
    let mut report = RunReport::new(config)?;
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let started = Instant::now();
    let outcome = dispatch(config, base_dir, &mut report, &mut files);
    if let Err(e) = outcome {
        report.fail("run", e.to_string());
    }
    let elapsed = started.elapsed().as_secs_f64();
    report.artifacts = files.iter().map(|(n, _)| n.clone()).collect();
    report.artifacts.sort();
    let bytes = report.to_json_bytes()?;
    files.push(("report.json".into(), bytes));
    Ok(RunOutput {
        report,
        files,
        timings: vec![("total".into(), elapsed)],
    })
}

fn dispatch(
    config: &ExperimentConfig,
    base_dir: &FsPath,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    match config.kind {
        ExperimentKind::Flatness => run_flatness(config, base_dir, report),
        ExperimentKind::Certify => run_certify(config, base_dir, report, files),
        ExperimentKind::VolkmannWalter => run_vw(config, base_dir, report, files),
        ExperimentKind::Cantor => run_cantor(config, report, files),
        ExperimentKind::Polyline => run_polyline(config, report, files),
        ExperimentKind::CurveSp => run_curve_sp(config, report),
        ExperimentKind::GaugeRenorm => run_gauge_renorm(config, base_dir, report),
    }
}

fn build_patch(config: &ExperimentConfig, base_dir: &FsPath) -> Result<BoundaryPatch> {
    let ctx = ResolveCtx {
        table: &config.bodies,
        base_dir,
    };
    let body = ctx.body(config.body.as_ref().expect("validated"), &mut Vec::new())?;
    let ambient = match &config.ambient {
        Some(n) => ctx.norm(n, &mut Vec::new())?,
        None => default_ambient(&body),
    };
    BoundaryPatch::new(
        body,
        Vector::new(config.x0.clone().expect("validated"))?,
        config.eps.expect("validated"),
        ambient,
    )
}

fn functional_json(f: &crate::geometry::LinearFunctional, level: f64) -> serde_json::Value {
    json!({ "coeffs": f.coeffs(), "level": level })
}

fn run_flatness(
    config: &ExperimentConfig,
    base_dir: &FsPath,
    report: &mut RunReport,
) -> Result<()> {
    let patch = build_patch(config, base_dir)?;
    let t = &config.tolerances;
    match is_flattening_point(&patch, t.patch_samples, t.flat_tol)? {
        FlatnessVerdict::Flat { functional, level } => {
            report.verdict("flatness", "flat", Some(functional_json(&functional, level)));
        }
        FlatnessVerdict::NotFlat {
            witness,
            margin,
            functional,
            level,
        } => {
            report.verdict(
                "flatness",
                "not-flat",
                Some(json!({
                    "witness": witness.coords(),
                    "margin": margin,
                    "functional": functional_json(&functional, level),
                })),
            );
        }
    }
    Ok(())
}

fn record_certified(name: &str, certified: &Certified, report: &mut RunReport) {
    report.certificates.push(CertificateRecord {
        name: name.into(),
        patch: PatchDesc::from_patch(&certified.patch_used),
        path: PathDesc::from_path(&certified.path),
        certificate: certified.certificate.clone(),
        verify: certified.verify.clone(),
        ball_center: certified.ball.center.coords().to_vec(),
        ball_radius: certified.ball.radius,
        renorm: certified.renorm.as_ref().map(|r| RenormRecord {
            translation: r.translation.coords().to_vec(),
            delta: r.delta,
            eps_inner: r.eps_inner,
        }),
    });
    if !certified.verify.pass {
        report.ok = false;
    }
}

/// Raster resolutions for the oracle on a certified patch: `{η/4, η/8}`
/// scaled to the ambient geometry unless overridden.
fn oracle_resolutions(config: &ExperimentConfig, certified: &Certified) -> Vec<f64> {
    if let Some(res) = &config.resolutions {
        return res.clone();
    }
    let eta = certified.ball.radius;
    // For gauge-renormed certificates η is measured in gauge-norm units;
    // convert through the gauge body's inner ball radius.
    let scale = certified
        .renorm
        .as_ref()
        .map_or(1.0, |r| (r.delta / 4.0).min(1.0));
    vec![eta * scale / 4.0, eta * scale / 8.0]
}

/// Interior cross-check of `U + U` against the witness ball: at each
/// resolution the block around the ball center must be fully occupied.
fn oracle_interior_check(
    name: &str,
    patch: &BoundaryPatch,
    certified: &Certified,
    config: &ExperimentConfig,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    let resolutions = oracle_resolutions(config, certified);
    let r_cells = config.tolerances.r_cells;
    let ambient = patch.ambient().clone();
    let center = &certified.ball.center;
    let mut measures = Vec::new();
    let mut contained_everywhere = true;
    let mut last_grid: Option<GridSet> = None;
    for &h in &resolutions {
        let fatten = config.fatten.unwrap_or(h / 2.0);
        let chain = patch_chain(patch, h / 2.0)?;
        let u = rasterize(
            &SetDescriptor::Polylines {
                chains: vec![chain],
                norm: ambient.clone(),
            },
            h,
            fatten,
        )?;
        let sum = minkowski_sum(&u, &u)?;
        measures.push(occupied_measure(&sum));
        if !block_fully_occupied_at(&sum, center, r_cells, &ambient)? {
            contained_everywhere = false;
        }
        last_grid = Some(sum);
    }
    let verdict = {
        let mut builder = |h: f64| -> Result<GridSet> {
            let fatten = config.fatten.unwrap_or(h / 2.0);
            let chain = patch_chain(patch, h / 2.0)?;
            let u = rasterize(
                &SetDescriptor::Polylines {
                    chains: vec![chain],
                    norm: ambient.clone(),
                },
                h,
                fatten,
            )?;
            minkowski_sum(&u, &u)
        };
        has_interior(&mut builder, r_cells, &resolutions, &ambient)?
    };
    let verdict_str = match &verdict {
        InteriorVerdict::Interior { .. } if contained_everywhere => "interior-with-witness",
        InteriorVerdict::Interior { .. } => "interior",
        InteriorVerdict::Empty => "empty",
        InteriorVerdict::Inconclusive => "inconclusive",
    };
    if verdict_str != "interior-with-witness" {
        report.ok = false;
    }
    report.oracle.push(OracleRecord {
        name: name.into(),
        verdict: verdict_str.into(),
        witness_center: contained_everywhere.then(|| center.coords().to_vec()),
        witness_h: contained_everywhere.then(|| resolutions[resolutions.len() - 1]),
        resolutions: resolutions.clone(),
        fatten: config.fatten.unwrap_or(resolutions[0] / 2.0),
        measures,
    });
    // 2D figure: the sum raster, the witness ball, the path.
    if patch.body().dim() == 2 {
        if let Some(sum) = last_grid {
            let mut scene = render::SvgScene::new();
            scene.add_grid(&sum, "#9ecae1", 0.8)?;
            let pts: Vec<Vector> = certified
                .path
                .samples()
                .iter()
                .map(|(_, p)| p.clone())
                .collect();
            scene.add_polyline(&pts, "#636363", 0.004);
            scene.add_ball_outline(
                center,
                certified.ball.radius,
                &certified.ball.norm,
                "#de2d26",
                0.004,
            )?;
            scene.add_point(center, "#de2d26", 0.006);
            files.push((format!("{name}.svg"), scene.finish().into_bytes()));
        }
    }
    Ok(())
}

/// Empty cross-check of `U + U` for flat patches (zero-thickness raster).
fn oracle_empty_check(
    name: &str,
    chains: Vec<Vec<Vector>>,
    ambient: &NormSpec,
    resolutions: &[f64],
    r_cells: usize,
    report: &mut RunReport,
) -> Result<()> {
    let mut measures = Vec::new();
    for &h in resolutions {
        let u = rasterize(
            &SetDescriptor::Polylines {
                chains: chains.clone(),
                norm: ambient.clone(),
            },
            h,
            0.0,
        )?;
        let sum = minkowski_sum(&u, &u)?;
        measures.push(occupied_measure(&sum));
    }
    let verdict = has_interior(
        |h| {
            let u = rasterize(
                &SetDescriptor::Polylines {
                    chains: chains.clone(),
                    norm: ambient.clone(),
                },
                h,
                0.0,
            )?;
            minkowski_sum(&u, &u)
        },
        r_cells,
        resolutions,
        ambient,
    )?;
    let verdict_str = match verdict {
        InteriorVerdict::Interior { .. } => "interior",
        InteriorVerdict::Empty => "empty",
        InteriorVerdict::Inconclusive => "inconclusive",
    };
    if verdict_str != "empty" {
        report.ok = false;
    }
    report.oracle.push(OracleRecord {
        name: name.into(),
        verdict: verdict_str.into(),
        witness_center: None,
        witness_h: None,
        resolutions: resolutions.to_vec(),
        fatten: 0.0,
        measures,
    });
    Ok(())
}

fn run_certify(
    config: &ExperimentConfig,
    base_dir: &FsPath,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    let patch = build_patch(config, base_dir)?;
    let params = config.tolerances.decide_params();
    match sphere_patch_decide(&patch, &params)? {
        Decision::FlatCase {
            functional,
            level,
            sum_level,
        } => {
            report.verdict(
                "decision",
                "flat-case",
                Some(json!({
                    "functional": functional_json(&functional, level),
                    "sum_level": sum_level,
                })),
            );
            let chain = patch_chain(&patch, patch.eps() / 256.0)?;
            let res = config
                .resolutions
                .clone()
                .unwrap_or_else(|| vec![patch.eps() / 16.0, patch.eps() / 32.0]);
            oracle_empty_check(
                "sum-empty",
                vec![chain],
                patch.ambient(),
                &res,
                config.tolerances.r_cells,
                report,
            )?;
        }
        Decision::Certified(certified) => {
            report.verdict(
                "decision",
                "certified",
                Some(json!({
                    "eta": certified.certificate.eta,
                    "alpha": certified.certificate.alpha,
                    "ball_center": certified.ball.center.coords(),
                })),
            );
            record_certified("certificate", &certified, report);
            oracle_interior_check("sum-interior", &patch, &certified, config, report, files)?;
        }
    }
    Ok(())
}

fn run_vw(
    config: &ExperimentConfig,
    base_dir: &FsPath,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    let ctx = ResolveCtx {
        table: &config.bodies,
        base_dir,
    };
    let body = ctx.body(config.body.as_ref().expect("validated"), &mut Vec::new())?;
    let ambient = match &config.ambient {
        Some(n) => ctx.norm(n, &mut Vec::new())?,
        None => default_ambient(&body),
    };
    let arcs: Vec<BoundaryPatch> = config
        .arcs
        .as_ref()
        .expect("validated")
        .iter()
        .map(|a| {
            BoundaryPatch::new(
                Arc::clone(&body),
                Vector::new(a.x0.clone())?,
                a.eps,
                ambient.clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let params = config.tolerances.decide_params();
    match volkmann_walter_check(&arcs, &params)? {
        VwOutcome::Certified { case, certified } => {
            report.verdict(
                "dichotomy",
                match case {
                    crate::paths::VwCase::NonFlatPoint => "certified-non-flat-point",
                    crate::paths::VwCase::TwoHyperplanes => "certified-two-hyperplanes",
                },
                None,
            );
            record_certified("certificate", &certified, report);
            let arc_for_oracle = &certified.patch_used;
            oracle_interior_check("sum-interior", arc_for_oracle, &certified, config, report, files)?;
        }
        VwOutcome::NotApplicable { reason } => {
            report.verdict("dichotomy", "not-applicable", Some(json!({ "reason": reason })));
            // A + A over the whole union should then be interior-free.
            let mut chains = Vec::new();
            for arc in &arcs {
                chains.push(patch_chain(arc, arc.eps() / 128.0)?);
            }
            let res = config
                .resolutions
                .clone()
                .unwrap_or_else(|| vec![arcs[0].eps() / 16.0, arcs[0].eps() / 32.0]);
            oracle_empty_check(
                "union-sum-empty",
                chains,
                &ambient,
                &res,
                config.tolerances.r_cells,
                report,
            )?;
        }
    }
    Ok(())
}

fn csv_bytes(rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| {
                if c.contains(',') || c.contains('"') || c.contains('\n') {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c.clone()
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    }
    out.into_bytes()
}

fn run_cantor(
    config: &ExperimentConfig,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    let [num, den] = config.lambda.expect("validated");
    let lambda = rational(num, den)?;
    let depth = config.depth.expect("validated");
    let k_star = predicted_k(&lambda)?;
    let k_max = config.k_max.unwrap_or(k_star);
    report.verdict("predicted-k", &k_star.to_string(), None);
    let ssp = ssp_classify(&lambda, k_max.max(1), depth)?;
    let mut rows = vec![vec![
        "k".to_string(),
        "depth".to_string(),
        "prev_sum_measure_exact".to_string(),
        "prev_sum_measure".to_string(),
    ]];
    for kr in &ssp.per_k {
        report.verdict(
            &format!("S_{} = [0,{}]", kr.k, kr.k),
            if kr.sum_is_full_interval { "true" } else { "false" },
            None,
        );
        if kr.k == k_star && !kr.sum_is_full_interval {
            report.ok = false;
        }
        if kr.k >= 2 {
            report.verdict(
                &format!("S_{} stage measures strictly decreasing", kr.k - 1),
                if kr.prev_sum_strictly_decreasing {
                    "true"
                } else {
                    "false"
                },
                None,
            );
            if kr.k == k_star && !kr.prev_sum_strictly_decreasing {
                report.ok = false;
            }
            for (i, m) in kr.prev_sum_measures.iter().enumerate() {
                rows.push(vec![
                    kr.k.to_string(),
                    (i + 1).to_string(),
                    m.exact.clone(),
                    format!("{}", m.approx),
                ]);
                report.exact.push(ExactValue {
                    name: format!("measure S_{}(C^({}))", kr.k - 1, i + 1),
                    value: m.clone(),
                });
            }
        }
    }
    files.push(("measures.csv".into(), csv_bytes(&rows)));

    if config.raster_check.unwrap_or(false) {
        let dcheck = depth.min(5);
        let stage = cantor_stage(&lambda, dcheck)?;
        let exact2 = interval_sum(&stage, &stage)?;
        let h = (lambda.pow(dcheck as i32))
            .to_f64()
            .max(1.0 / 4096.0)
            / 2.0;
        let raster = rasterize(
            &SetDescriptor::IntervalProduct {
                axis: stage.clone(),
                boxes: vec![],
                norm: NormSpec::euclid(),
            },
            h,
            0.0,
        )?;
        let raster_sum = minkowski_sum(&raster, &raster)?;
        let ok = union_raster_agree(&exact2, &raster_sum, h)?;
        report.verdict(
            "raster-cross-check",
            if ok { "agree" } else { "disagree" },
            None,
        );
        if !ok {
            report.ok = false;
        }
        // Product form: C × [0,1]; the sum stays exact per axis, the grid
        // confirms the interior at the predicted k.
        let verdict = has_interior(
            |h| {
                let g = rasterize(
                    &SetDescriptor::IntervalProduct {
                        axis: cantor_stage(&lambda, dcheck)?,
                        boxes: vec![(0.0, 1.0)],
                        norm: NormSpec::euclid(),
                    },
                    h,
                    0.0,
                )?;
                iterate_sumset(&g, k_star.max(2) as usize)
            },
            config.tolerances.r_cells,
            &[1.0 / 64.0, 1.0 / 128.0],
            &NormSpec::euclid(),
        )?;
        let outcome = match verdict {
            InteriorVerdict::Interior { .. } => "interior",
            InteriorVerdict::Empty => "empty",
            InteriorVerdict::Inconclusive => "inconclusive",
        };
        report.verdict("product-sum-interior", outcome, None);
        if outcome != "interior" {
            report.ok = false;
        }
    }
    report.exact.push(ExactValue {
        name: format!("measure C^({depth})"),
        value: RationalValue::of(&cantor_stage(&lambda, depth)?.measure()),
    });
    Ok(())
}

/// One-cell-slack agreement between an exact 1D union and a rasterized sum.
fn union_raster_agree(exact: &IntervalUnion, raster: &GridSet, h: f64) -> Result<bool> {
    let pieces = exact.pieces_f64();
    let slack = 1.5 * h;
    // Every occupied center is near the union.
    for idx in raster.occupied_indices() {
        let c = raster.cell_center(&idx).get(0);
        let dist = pieces
            .iter()
            .map(|(lo, hi)| (lo - c).max(c - *hi).max(0.0))
            .fold(f64::INFINITY, f64::min);
        if dist > slack {
            return Ok(false);
        }
    }
    // Every piece is covered by occupied centers at the cell scale.
    for (lo, hi) in &pieces {
        let mut x = *lo;
        loop {
            let covered = raster.cell_of(&Vector::new(vec![x])?).is_some_and(|idx| {
                // scan the 3-cell window around x
                let i = idx[0];
                (i.saturating_sub(1)..=(i + 1).min(raster.dims()[0] - 1))
                    .any(|j| raster.get(&[j]))
            });
            if !covered {
                return Ok(false);
            }
            if x >= *hi {
                break;
            }
            x = (x + h).min(*hi);
        }
    }
    Ok(true)
}

fn polyline_vertices(n: u32) -> Result<Vec<Vector>> {
    let dim = n as usize;
    let mut pts = vec![Vector::zeros(dim)];
    for i in 0..dim {
        pts.push(Vector::unit(dim, i));
    }
    Ok(pts)
}

fn default_polyline_resolutions(n: u32) -> Vec<f64> {
    if n <= 2 {
        vec![0.02, 0.01]
    } else {
        vec![0.05, 0.025]
    }
}

fn run_polyline(
    config: &ExperimentConfig,
    report: &mut RunReport,
    files: &mut Vec<(String, Vec<u8>)>,
) -> Result<()> {
    let n = config.n.expect("validated");
    if !(2..=3).contains(&n) {
        return Err(Error::Config(format!("polyline dimension must be 2 or 3, got {n}")));
    }
    let verts = polyline_vertices(n)?;
    let resolutions = config
        .resolutions
        .clone()
        .unwrap_or_else(|| default_polyline_resolutions(n));
    let norm = NormSpec::euclid();
    let fatten = config.fatten.unwrap_or(0.0);
    let build = |k: usize| {
        let verts = verts.clone();
        let norm = norm.clone();
        move |h: f64| -> Result<GridSet> {
            let g = rasterize(
                &SetDescriptor::Polylines {
                    chains: vec![verts.clone()],
                    norm: norm.clone(),
                },
                h,
                fatten,
            )?;
            iterate_sumset(&g, k)
        }
    };
    for (k, expect) in [(n as usize - 1, "empty"), (n as usize, "interior")] {
        if k == 0 {
            continue;
        }
        let verdict = has_interior(build(k), config.tolerances.r_cells, &resolutions, &norm)?;
        let outcome = match verdict {
            InteriorVerdict::Interior { .. } => "interior",
            InteriorVerdict::Empty => "empty",
            InteriorVerdict::Inconclusive => "inconclusive",
        };
        report.verdict(&format!("S_{k} interior"), outcome, None);
        if outcome != expect {
            report.ok = false;
        }
    }
    if n == 2 {
        let h = resolutions[resolutions.len() - 1];
        let g = build(2)(h)?;
        let mut scene = render::SvgScene::new();
        scene.add_grid(&g, "#a1d99b", 0.8)?;
        scene.add_polyline(&verts, "#31a354", 0.01);
        files.push(("polyline.svg".into(), scene.finish().into_bytes()));
    }
    Ok(())
}

fn run_curve_sp(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let n = config.n.expect("validated") as usize;
    if !(2..=3).contains(&n) {
        return Err(Error::Config(format!("curve dimension must be 2 or 3, got {n}")));
    }
    let curve = config.curve.as_ref().expect("validated");
    let (chain, through): (Vec<Vector>, Vec<Vector>) = match (&curve.points, &curve.arc) {
        (Some(points), None) => {
            let pts = points
                .iter()
                .map(|p| Vector::new(p.clone()))
                .collect::<Result<Vec<_>>>()?;
            (pts.clone(), pts)
        }
        (None, Some(arc)) => {
            if n != 2 {
                return Err(Error::Config("arc curves are 2D".into()));
            }
            let c = Vector::new(arc.center.clone())?;
            let m = curve.samples.max(3);
            let mut pts = Vec::with_capacity(m);
            for i in 0..m {
                let t = i as f64 / (m - 1) as f64;
                let th = arc.from_angle + t * (arc.to_angle - arc.from_angle);
                pts.push(c.add(&Vector::new(vec![th.cos(), th.sin()])?.scale(arc.radius)));
            }
            let through = vec![
                pts[0].clone(),
                pts[m / 2].clone(),
                pts[m - 1].clone(),
            ];
            (pts, through)
        }
        _ => {
            return Err(Error::Config(
                "curve takes exactly one of `points` or `arc`".into(),
            ))
        }
    };
    if through.len() < n + 1 {
        return Err(Error::Config(format!(
            "curve must pass through {} declared points, got {}",
            n + 1,
            through.len()
        )));
    }
    // Affine independence of the first n+1 through-points.
    let base = &through[0];
    let rows: Vec<Vector> = through[1..=n].iter().map(|p| p.sub(base)).collect();
    let det = match n {
        2 => rows[0].get(0) * rows[1].get(1) - rows[0].get(1) * rows[1].get(0),
        _ => {
            let (a, b, c) = (&rows[0], &rows[1], &rows[2]);
            a.get(0) * (b.get(1) * c.get(2) - b.get(2) * c.get(1))
                - a.get(1) * (b.get(0) * c.get(2) - b.get(2) * c.get(0))
                + a.get(2) * (b.get(0) * c.get(1) - b.get(1) * c.get(0))
        }
    };
    let scale = through
        .iter()
        .flat_map(|p| p.coords().iter().map(|c| c.abs()))
        .fold(1.0f64, f64::max);
    if det.abs() <= 1e-9 * scale.powi(n as i32) {
        return Err(Error::Config(format!(
            "curve through-points are not affinely independent (det = {det:.3e})"
        )));
    }
    let resolutions = config
        .resolutions
        .clone()
        .unwrap_or_else(|| default_polyline_resolutions(n as u32));
    let norm = NormSpec::euclid();
    let verdict = has_interior(
        |h| {
            let g = rasterize(
                &SetDescriptor::Polylines {
                    chains: vec![chain.clone()],
                    norm: norm.clone(),
                },
                h,
                config.fatten.unwrap_or(0.0),
            )?;
            iterate_sumset(&g, n)
        },
        config.tolerances.r_cells,
        &resolutions,
        &norm,
    )?;
    let outcome = match verdict {
        InteriorVerdict::Interior { .. } => "interior",
        InteriorVerdict::Empty => "empty",
        InteriorVerdict::Inconclusive => "inconclusive",
    };
    // Empirical only: no expectation is attached to the outcome.
    report.verdicts.push(Verdict {
        name: format!("S_{n} interior (exploration, not a theorem)"),
        outcome: outcome.into(),
        value: None,
    });
    Ok(())
}

fn run_gauge_renorm(
    config: &ExperimentConfig,
    base_dir: &FsPath,
    report: &mut RunReport,
) -> Result<()> {
    let ctx = ResolveCtx {
        table: &config.bodies,
        base_dir,
    };
    let body = ctx.body(config.body.as_ref().expect("validated"), &mut Vec::new())?;
    let ambient = match &config.ambient {
        Some(n) => ctx.norm(n, &mut Vec::new())?,
        None => NormSpec::euclid(),
    };
    let x0 = Vector::new(config.x0.clone().expect("validated"))?;
    let (gauge, delta) =
        build_gauge_body_with(&body, &x0, &ambient, config.tolerances.arc_samples)?;
    let z = body.interior_point_ref();
    let mu_x0 = gauge.gauge(&x0.sub(z))?;
    let mut asym: f64 = 0.0;
    for u in direction_fan(body.dim(), 64) {
        let a = gauge.gauge(&u)?;
        let b = gauge.gauge(&u.neg())?;
        asym = asym.max((a - b).abs());
    }
    gauge.validate(200)?;
    report.verdict(
        "gauge-body",
        "built",
        Some(json!({
            "delta": delta,
            "mu_x0": mu_x0,
            "max_asymmetry": asym,
            "cloud_size": config.tolerances.arc_samples,
        })),
    );
    if (mu_x0 - 1.0).abs() > 1e-6 || asym > 1e-9 {
        report.ok = false;
    }
    Ok(())
}

/// Writes an output bundle into `dir` (created if needed).
pub fn write_output(out: &RunOutput, dir: &FsPath) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in &out.files {
        std::fs::write(dir.join(name), bytes)?;
    }
    let mut rows = vec![vec!["phase".to_string(), "seconds".to_string()]];
    for (phase, secs) in &out.timings {
        rows.push(vec![phase.clone(), format!("{secs:.6}")]);
    }
    std::fs::write(dir.join("timings.csv"), csv_bytes(&rows))?;
    Ok(())
}

/// Stand-alone re-verification of a report: the config digest must match and
/// every embedded certificate must pass `witness_verify` afresh.
pub fn verify_report(report: &RunReport) -> Result<bool> {
    let digest = super::report::config_digest(&report.config)?;
    if digest != report.config_digest {
        return Ok(false);
    }
    let t = &report.config.tolerances;
    for record in &report.certificates {
        let patch = record.patch.build()?;
        let path = record.path.build()?;
        let verify = witness_verify(
            &record.certificate,
            &patch,
            &path,
            t.verify_nz,
            t.verify_tol,
        )?;
        if !verify.pass {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs a batch; each entry lands in its own subdirectory.
pub fn run_batch(
    batch: &super::config::BatchConfig,
    base_dir: &FsPath,
) -> Result<Vec<(String, RunOutput)>> {
    let mut seen = std::collections::BTreeSet::new();
    for entry in &batch.runs {
        if entry.name.is_empty()
            || entry
                .name
                .chars()
                .any(|c| !(c.is_ascii_alphanumeric() || c == '-' || c == '_'))
        {
            return Err(Error::Config(format!(
                "batch entry name `{}` must be non-empty alphanumeric/-/_",
                entry.name
            )));
        }
        if !seen.insert(&entry.name) {
            return Err(Error::Config(format!("duplicate batch entry `{}`", entry.name)));
        }
    }
    let mut out = Vec::with_capacity(batch.runs.len());
    for entry in &batch.runs {
        out.push((entry.name.clone(), run(&entry.config, base_dir)?));
    }
    Ok(out)
}
