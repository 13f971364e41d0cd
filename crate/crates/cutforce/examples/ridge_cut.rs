//! Straight-edge ridge cut: the baseline case where every model must
//! reproduce the closed form F_j = b * f_j(h).
//!
//! A premachined ridge of width b is cut orthogonally at uncut chip
//! thickness h, so the chip area is an exact b x h rectangle with the
//! cutting edge along one side. Runs the full curved-model pipeline (mesh,
//! plate solve, streamlines, force integral) and prints the comparison.

use cutforce::chipflow::curved_decomposition;
use cutforce::force::{characteristic, integrate_forces, MaterialModel};
use cutforce::geometry::{triangulate, ToolGeometry, UncutChipRegion};
use cutforce::plate_fe::{gradient_field, solve_plate};

fn main() -> cutforce::Result<()> {
    let b = 2.0;
    let material = MaterialModel::ti6al4v();
    let tool = ToolGeometry::from_degrees(90.0, 60.0, 0.0, 0.0, 0.0)?;

    println!("ridge cut, b = {b} mm, Ti-6Al-4V");
    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>10}", "h_mm", "Fy_N", "Fy_closed", "Fz_N", "Fz_closed", "err_max");
    for h in [0.02, 0.1, 0.25] {
        let region = UncutChipRegion::rectangle(b, h)?;
        let mesh = triangulate(&region, h / 10.0)?;
        let solution = solve_plate(&mesh, 0.3)?;
        let field = gradient_field(&mesh, &solution)?;
        let decomp = curved_decomposition(&mesh, &field, &tool)?;
        let f = integrate_forces(&decomp, &material)?;

        let ch = characteristic(&material, h, 0.0, 0.0, 0.0)?;
        let fy_closed = -b * ch.f_v;
        let fz_closed = b * ch.f_u;
        let err = ((f.force.y - fy_closed) / fy_closed)
            .abs()
            .max(((f.force.z - fz_closed) / fz_closed).abs());
        println!(
            "{h:>8.3} {:>12.3} {fy_closed:>12.3} {:>12.3} {fz_closed:>12.3} {:>9.4}%",
            f.force.y,
            f.force.z,
            err * 100.0
        );
    }
    Ok(())
}
