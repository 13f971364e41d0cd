//! Static deflection compensation: the cutting force deflects the tool
//! tip, which changes the effective depth of cut, which changes the force.
//! The fixed point of dr = C F(a - dr_x) is found in a few iterations with
//! the measured tool-holder compliance matrix.

use cutforce::chipflow::curved_decomposition;
use cutforce::force::{compensate_deflection, integrate_forces, ComplianceModel, MaterialModel};
use cutforce::geometry::{build_turning_region, triangulate, ProcessParams, ToolGeometry};
use cutforce::plate_fe::{gradient_field, solve_plate};

fn main() -> cutforce::Result<()> {
    let tool = ToolGeometry::from_degrees(90.0, 60.0, 0.4, 0.0, 0.0)?;
    let material = MaterialModel::ti6al4v();
    let compliance = ComplianceModel::lab_tool_holder();
    let feed = 0.1;
    let a_nominal = 1.0;

    let force_at = |a_eff: f64| {
        let region = build_turning_region(&tool, &ProcessParams::new(feed, a_eff)?)?;
        let mesh = triangulate(&region, 0.05)?;
        let field = gradient_field(&mesh, &solve_plate(&mesh, 0.3)?)?;
        integrate_forces(&curved_decomposition(&mesh, &field, &tool)?, &material)
    };

    let rigid = force_at(a_nominal)?;
    let out = compensate_deflection(&compliance, force_at, a_nominal)?;

    println!("feed {feed} mm/rev, nominal depth {a_nominal} mm, Ti-6Al-4V");
    println!(
        "rigid tool:       F = ({:8.2}, {:8.2}, {:8.2}) N",
        rigid.force.x, rigid.force.y, rigid.force.z
    );
    println!(
        "compensated:      F = ({:8.2}, {:8.2}, {:8.2}) N",
        out.force.force.x, out.force.force.y, out.force.force.z
    );
    println!(
        "tip deflection:   ({:+.2}, {:+.2}, {:+.2}) um",
        out.deflection.x * 1e6,
        out.deflection.y * 1e6,
        out.deflection.z * 1e6
    );
    println!("effective depth:  {:.6} mm", out.a_eff);
    println!("iterations:       {}", out.iterations);
    let change = (out.force.force - rigid.force).norm() / rigid.force.norm();
    println!("force change:     {:.3}%", 100.0 * change);
    Ok(())
}
