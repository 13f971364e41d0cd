//! Geometry and flow-field visualisation: builds the V-tool chip region,
//! meshes it, solves the compressed plate, and writes SVG plots of the
//! region, mesh, flow field and curved chip segments to `out/flow_field/`.
//!
//! Inspection checklist for the streamline plot:
//!   - every streamline starts on the cutting edge (red) and ends on a
//!     free boundary (grey),
//!   - streamlines leave the edge perpendicular to it,
//!   - the field fans out radially around the nose arc,
//!   - no two streamlines cross.

use cutforce::chipflow::{curved_decomposition, trace_streamline};
use cutforce::geometry::{build_turning_region, max_feed, triangulate, BoundaryLabel, ProcessParams, ToolGeometry};
use cutforce::plate_fe::{gradient_field, solve_plate};
use cutforce::point2::P2;
use cutforce::svg::SvgCanvas;

fn main() -> cutforce::Result<()> {
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0)?;
    let feed = 0.6 * max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(feed, 1.0)?)?;
    let mesh = triangulate(&region, 0.05)?;
    let solution = solve_plate(&mesh, 0.3)?;
    let field = gradient_field(&mesh, &solution)?;

    let out = std::path::Path::new("out/flow_field");
    std::fs::create_dir_all(out)?;
    let (lo, hi) = region.bbox();

    let mut region_svg = SvgCanvas::fit(lo, hi, 720.0);
    for (a, b, label) in region.segments() {
        let color = match label {
            BoundaryLabel::CuttingEdge => "#cc2222",
            BoundaryLabel::Free => "#2266cc",
        };
        region_svg.line(a, b, color, 1.6);
    }
    region_svg.save(&out.join("region.svg"))?;

    let mut mesh_svg = SvgCanvas::fit(lo, hi, 720.0);
    for tri in mesh.triangles() {
        let pts: Vec<P2> = tri.iter().map(|&v| mesh.nodes()[v]).collect();
        mesh_svg.polyline(&pts, "#999999", 0.5, true);
    }
    mesh_svg.save(&out.join("mesh.svg"))?;

    let mut field_svg = SvgCanvas::fit(lo, hi, 720.0);
    for (&p, &g) in mesh.nodes().iter().zip(field.vectors()) {
        field_svg.arrow(p, g, 0.6 * mesh.target(), "#116611");
    }
    field_svg.save(&out.join("field.svg"))?;

    let mut lines_svg = SvgCanvas::fit(lo, hi, 720.0);
    for (a, b, label) in region.segments() {
        let color = match label {
            BoundaryLabel::CuttingEdge => "#cc2222",
            BoundaryLabel::Free => "#bbbbbb",
        };
        lines_svg.line(a, b, color, 1.2);
    }
    let n = mesh.triangles().len();
    for t in (0..n).step_by((n / 60).max(1)) {
        let line = trace_streamline(&field, mesh.triangle_centroid(t), &mesh)?;
        lines_svg.polyline(&line.points, "#116611", 0.9, false);
    }
    lines_svg.save(&out.join("streamlines.svg"))?;

    // Per-cell curved chip thickness table.
    let decomp = curved_decomposition(&mesh, &field, &tool)?;
    std::fs::write(out.join("chip_cells.csv"), cutforce::sweep::write_cells_csv(&decomp))?;
    std::fs::write(out.join("field.csv"), cutforce::sweep::write_field_csv(&mesh, &field))?;

    println!(
        "wrote region/mesh/field/streamlines SVGs plus field.csv and chip_cells.csv to {}",
        out.display()
    );
    println!("mesh: {} nodes, {} triangles, min angle {:.1} deg",
        mesh.nodes().len(), mesh.triangles().len(), mesh.min_angle().to_degrees());
    Ok(())
}
