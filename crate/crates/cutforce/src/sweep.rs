//! Batch sweep driver: runs feed/depth (or threading infeed) sweeps through
//! the selected force models and writes CSV tables and SVG plots.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{Matrix3, Vector3};

use crate::chipflow::{
    colwell_model, curved_decomposition, trace_streamline, young_decomposition, Streamline,
};
use crate::config::{ModelKind, RunConfig};
use crate::error::{Error, Result};
use crate::force::{
    compensate_deflection, integrate_forces, integrate_forces_colwell, integrate_forces_young,
    ComplianceModel, ForceResult, MaterialModel,
};
use crate::geometry::{
    build_threading_region, build_turning_region, max_feed, triangulate, BoundaryLabel,
    ProcessParams, ToolGeometry, TriMesh, UncutChipRegion,
};
use crate::plate_fe::{gradient_field, solve_plate, FlowField};
use crate::point2::P2;
use crate::svg::{Chart, SvgCanvas};

/// One CSV row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub model: ModelKind,
    pub feed_mm: f64,
    pub depth_mm: f64,
    pub force: Option<Vector3<f64>>,
    pub area_mm2: Option<f64>,
    pub n_cells: usize,
    pub a_eff_mm: Option<f64>,
    pub iterations: usize,
    pub wall_ms: f64,
    pub error: Option<String>,
    /// Normalized force F / (K_uc A_max) and f / f_max, when requested.
    pub normalized: Option<(f64, Vector3<f64>)>,
}

/// Geometry of one sweep point kept for plotting.
pub struct GeometryArtifacts {
    pub region: UncutChipRegion,
    pub mesh: TriMesh,
    pub field: FlowField,
    pub streamlines: Vec<Streamline>,
}

pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub artifacts: Option<GeometryArtifacts>,
}

impl SweepReport {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.error.is_some())
    }
}

struct Prepared {
    region: UncutChipRegion,
    mesh: TriMesh,
    field: FlowField,
}

fn prepare(region: UncutChipRegion, mesh_size: f64, poisson: f64) -> Result<Prepared> {
    let mesh = triangulate(&region, mesh_size)?;
    let solution = solve_plate(&mesh, poisson)?;
    let field = gradient_field(&mesh, &solution)?;
    Ok(Prepared { region, mesh, field })
}

fn evaluate_model(
    prepared: &Prepared,
    model: ModelKind,
    tool: &ToolGeometry,
    material: &MaterialModel,
    young_segments: usize,
) -> Result<ForceResult> {
    match model {
        ModelKind::Curved => {
            let decomp = curved_decomposition(&prepared.mesh, &prepared.field, tool)?;
            integrate_forces(&decomp, material)
        }
        ModelKind::Colwell => {
            let m = colwell_model(&prepared.region, tool)?;
            integrate_forces_colwell(&m, material)
        }
        ModelKind::Young => {
            let y = young_decomposition(&prepared.region, young_segments, tool)?;
            integrate_forces_young(&y, material)
        }
    }
}

/// Run the configured sweep. Per-row failures are recorded in the row's
/// error column; only configuration errors abort the sweep.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport> {
    config.validate()?;
    let tool = config.tool.build()?;
    let compliance = config.compliance_m_per_n.map(|c| {
        ComplianceModel::new(Matrix3::from_fn(|i, j| c[i][j]))
    });

    let mut rows = Vec::new();
    let mut artifacts = None;

    if let Some(process) = &config.process {
        let feeds = process.feeds_mm.values();
        for &depth in &process.depths_mm {
            let f_max = max_feed(&tool, depth);
            // Normalization scale per depth: largest chip area at f_max.
            let norm = if config.normalized {
                let k_uc = match config.material {
                    MaterialModel::Linear { k_uc, .. } => k_uc,
                    _ => unreachable!("validated: normalized requires linear material"),
                };
                let area_max = build_turning_region(
                    &tool,
                    &ProcessParams::new(f_max, depth)?,
                )?
                .area();
                Some((f_max, k_uc * area_max))
            } else {
                None
            };
            for &feed in &feeds {
                if feed > f_max * (1.0 + 1e-9) {
                    for &model in &config.models {
                        rows.push(SweepRow {
                            model,
                            feed_mm: feed,
                            depth_mm: depth,
                            force: None,
                            area_mm2: None,
                            n_cells: 0,
                            a_eff_mm: None,
                            iterations: 0,
                            wall_ms: 0.0,
                            error: Some(format!(
                                "skipped: feed {feed} exceeds max feed {f_max:.6}"
                            )),
                            normalized: None,
                        });
                    }
                    continue;
                }
                let prep = ProcessParams::new(feed, depth)
                    .and_then(|p| build_turning_region(&tool, &p))
                    .and_then(|r| prepare(r, config.mesh_size_mm, config.poisson));
                let prep = match prep {
                    Ok(p) => p,
                    Err(e) => {
                        for &model in &config.models {
                            rows.push(failed_row(model, feed, depth, &e));
                        }
                        continue;
                    }
                };
                for &model in &config.models {
                    let start = Instant::now();
                    let result = run_row(
                        &prep, model, &tool, &config.material, config.young_segments,
                        compliance.as_ref(), depth, config.mesh_size_mm, config.poisson,
                        |a_eff| {
                            let p = ProcessParams::new(feed, a_eff)?;
                            build_turning_region(&tool, &p)
                        },
                    );
                    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    rows.push(finish_row(result, model, feed, depth, wall_ms, norm, &prep));
                }
                if artifacts.is_none() && config.plots {
                    artifacts = Some(build_artifacts(prep));
                }
            }
        }
    } else if let Some(threading) = &config.threading {
        for &delta_a in &threading.delta_a_mm {
            let feed = 2.0 * threading.pitch_width_mm;
            let prep = threading
                .profile_for(delta_a)
                .and_then(|p| build_threading_region(&p, threading.tooth))
                .and_then(|r| prepare(r, config.mesh_size_mm, config.poisson));
            let prep = match prep {
                Ok(p) => p,
                Err(e) => {
                    for &model in &config.models {
                        rows.push(failed_row(model, feed, delta_a, &e));
                    }
                    continue;
                }
            };
            for &model in &config.models {
                let start = Instant::now();
                let result = evaluate_model(&prep, model, &tool, &config.material, config.young_segments)
                    .map(|f| (f, delta_a, 0usize));
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                rows.push(finish_row(result, model, feed, delta_a, wall_ms, None, &prep));
            }
            if artifacts.is_none() && config.plots {
                artifacts = Some(build_artifacts(prep));
            }
        }
    }

    Ok(SweepReport { rows, artifacts })
}

#[allow(clippy::too_many_arguments)]
fn run_row(
    prep: &Prepared,
    model: ModelKind,
    tool: &ToolGeometry,
    material: &MaterialModel,
    young_segments: usize,
    compliance: Option<&ComplianceModel>,
    depth: f64,
    mesh_size: f64,
    poisson: f64,
    region_of_depth: impl Fn(f64) -> Result<UncutChipRegion>,
) -> Result<(ForceResult, f64, usize)> {
    match compliance {
        None => evaluate_model(prep, model, tool, material, young_segments).map(|f| (f, depth, 0)),
        Some(c) => {
            let out = compensate_deflection(
                c,
                |a_eff| {
                    let p = prepare(region_of_depth(a_eff)?, mesh_size, poisson)?;
                    evaluate_model(&p, model, tool, material, young_segments)
                },
                depth,
            )?;
            Ok((out.force, out.a_eff, out.iterations))
        }
    }
}

fn failed_row(model: ModelKind, feed: f64, depth: f64, e: &Error) -> SweepRow {
    SweepRow {
        model,
        feed_mm: feed,
        depth_mm: depth,
        force: None,
        area_mm2: None,
        n_cells: 0,
        a_eff_mm: None,
        iterations: 0,
        wall_ms: 0.0,
        error: Some(e.to_string()),
        normalized: None,
    }
}

fn finish_row(
    result: Result<(ForceResult, f64, usize)>,
    model: ModelKind,
    feed: f64,
    depth: f64,
    wall_ms: f64,
    norm: Option<(f64, f64)>,
    prep: &Prepared,
) -> SweepRow {
    match result {
        Ok((f, a_eff, iterations)) => {
            let normalized = norm.map(|(f_max, scale)| (feed / f_max, f.force / scale));
            SweepRow {
                model,
                feed_mm: feed,
                depth_mm: depth,
                force: Some(f.force),
                area_mm2: Some(prep.region.area()),
                n_cells: f.n_cells,
                a_eff_mm: Some(a_eff),
                iterations,
                wall_ms,
                error: None,
                normalized,
            }
        }
        Err(e) => failed_row(model, feed, depth, &e),
    }
}

fn build_artifacts(prep: Prepared) -> GeometryArtifacts {
    let mut streamlines = Vec::new();
    for t in (0..prep.mesh.triangles().len()).step_by((prep.mesh.triangles().len() / 48).max(1)) {
        if let Ok(line) = trace_streamline(&prep.field, prep.mesh.triangle_centroid(t), &prep.mesh) {
            streamlines.push(line);
        }
    }
    GeometryArtifacts { region: prep.region, mesh: prep.mesh, field: prep.field, streamlines }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// CSV with columns
/// `model,feed_mm,depth_mm,Fx_N,Fy_N,Fz_N,area_mm2,Ne,a_eff_mm,iters,error`.
pub fn write_csv(report: &SweepReport) -> String {
    let mut out = String::from("model,feed_mm,depth_mm,Fx_N,Fy_N,Fz_N,area_mm2,Ne,a_eff_mm,iters,error\n");
    for r in &report.rows {
        let (fx, fy, fz) = match r.force {
            Some(f) => (Some(f.x), Some(f.y), Some(f.z)),
            None => (None, None, None),
        };
        out.push_str(&format!(
            "{},{:.6},{:.6},{},{},{},{},{},{},{},{}\n",
            r.model.as_str(),
            r.feed_mm,
            r.depth_mm,
            fmt_opt(fx),
            fmt_opt(fy),
            fmt_opt(fz),
            fmt_opt(r.area_mm2),
            r.n_cells,
            fmt_opt(r.a_eff_mm),
            r.iterations,
            r.error.as_deref().unwrap_or(""),
        ));
    }
    out
}

/// Normalized sweep CSV (`f/f_max`, `F/(K_uc A_max)`), rows that carry
/// normalized data only.
pub fn write_normalized_csv(report: &SweepReport) -> String {
    let mut out = String::from("model,f_over_fmax,Fx_norm,Fy_norm,Fz_norm\n");
    for r in &report.rows {
        if let Some((fr, f)) = r.normalized {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6}\n",
                r.model.as_str(),
                fr,
                f.x,
                f.y,
                f.z
            ));
        }
    }
    out
}

/// Quiver arrows (base, unit direction) for a flow field, one per node.
pub fn quiver_segments(mesh: &TriMesh, field: &FlowField) -> Vec<(P2, P2)> {
    mesh.nodes()
        .iter()
        .zip(field.vectors())
        .map(|(&p, &g)| (p, g))
        .collect()
}

/// Nodal flow field as CSV: `x_mm,z_mm,gx,gz`.
pub fn write_field_csv(mesh: &TriMesh, field: &FlowField) -> String {
    let mut out = String::from("x_mm,z_mm,gx,gz\n");
    for (p, g) in mesh.nodes().iter().zip(field.vectors()) {
        out.push_str(&format!("{:.6},{:.6},{:.9},{:.9}\n", p.x, p.z, g.x, g.z));
    }
    out
}

/// Chip cells as CSV: `cell,h_mm,area_mm2` (one row per area element of a
/// curved or straight-segment decomposition).
pub fn write_cells_csv(decomp: &crate::chipflow::ChipDecomposition) -> String {
    let mut out = String::from("cell,h_mm,area_mm2\n");
    for (i, c) in decomp.cells.iter().enumerate() {
        out.push_str(&format!("{i},{:.6},{:.9}\n", c.h, c.area));
    }
    out
}

/// Render deterministic SVG plots: the chip region, its mesh, the flow
/// field, streamlines, and one force-versus-feed chart per component.
pub fn render_plots(report: &SweepReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    if let Some(art) = &report.artifacts {
        let (lo, hi) = art.region.bbox();

        let mut region_svg = SvgCanvas::fit(lo, hi, 720.0);
        for (a, b, label) in art.region.segments() {
            let color = match label {
                BoundaryLabel::CuttingEdge => "#cc2222",
                BoundaryLabel::Free => "#2266cc",
            };
            region_svg.line(a, b, color, 1.6);
        }
        let path = out_dir.join("region.svg");
        region_svg.save(&path)?;
        written.push(path);

        let mut mesh_svg = SvgCanvas::fit(lo, hi, 720.0);
        for tri in art.mesh.triangles() {
            let pts: Vec<P2> = tri.iter().map(|&v| art.mesh.nodes()[v]).collect();
            mesh_svg.polyline(&pts, "#999999", 0.5, true);
        }
        for (a, b, label) in art.region.segments() {
            if label == BoundaryLabel::CuttingEdge {
                mesh_svg.line(a, b, "#cc2222", 1.6);
            }
        }
        let path = out_dir.join("mesh.svg");
        mesh_svg.save(&path)?;
        written.push(path);

        let mut field_svg = SvgCanvas::fit(lo, hi, 720.0);
        let arrow_len = 0.6 * art.mesh.target();
        for (p, g) in quiver_segments(&art.mesh, &art.field) {
            field_svg.arrow(p, g, arrow_len, "#116611");
        }
        let path = out_dir.join("field.svg");
        field_svg.save(&path)?;
        written.push(path);

        let path = out_dir.join("field.csv");
        std::fs::write(&path, write_field_csv(&art.mesh, &art.field))?;
        written.push(path);

        let mut lines_svg = SvgCanvas::fit(lo, hi, 720.0);
        for (a, b, label) in art.region.segments() {
            let color = match label {
                BoundaryLabel::CuttingEdge => "#cc2222",
                BoundaryLabel::Free => "#bbbbbb",
            };
            lines_svg.line(a, b, color, 1.2);
        }
        for line in &art.streamlines {
            lines_svg.polyline(&line.points, "#116611", 0.9, false);
        }
        let path = out_dir.join("streamlines.svg");
        lines_svg.save(&path)?;
        written.push(path);
    }

    // Force-versus-feed charts, one file per machine-frame component.
    let colors = [("curved", "#117711"), ("colwell", "#bb2222"), ("young", "#2233bb")];
    for (ci, comp) in ["Fx_N", "Fy_N", "Fz_N"].iter().enumerate() {
        let mut chart = Chart::new("feed_mm", comp);
        for &(name, color) in &colors {
            let pts: Vec<(f64, f64)> = report
                .rows
                .iter()
                .filter(|r| r.model.as_str() == name && r.error.is_none())
                .filter_map(|r| r.force.map(|f| (r.feed_mm, f[ci])))
                .collect();
            if !pts.is_empty() {
                chart.add_series(name, color, pts);
            }
        }
        let path = out_dir.join(format!("force_{}.svg", ["fx", "fy", "fz"][ci]));
        chart.save(&path)?;
        written.push(path);
    }
    Ok(written)
}
