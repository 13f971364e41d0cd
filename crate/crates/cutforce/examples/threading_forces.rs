//! Two-point threading: forces on the second tooth as the radial infeed
//! increment grows.
//!
//! Tooth 2 deepens the groove left by tooth 1, removing a U-shaped shell
//! that engages both flanks and the nose arc. Straight perpendicular
//! segments self-intersect at the inner corners once the infeed increment
//! exceeds the nose radius and have to be chopped, while the curved
//! segments stay consistent; with the nonlinear AISI 1045 law the model
//! predictions split apart as the increment grows.

use cutforce::chipflow::{colwell_model, curved_decomposition, young_decomposition};
use cutforce::force::{
    integrate_forces, integrate_forces_colwell, integrate_forces_young, MaterialModel,
};
use cutforce::geometry::{build_threading_region, triangulate, ThreadingProfile, ToolGeometry, ToothOutline};
use cutforce::plate_fe::{gradient_field, solve_plate};

fn main() -> cutforce::Result<()> {
    let material = MaterialModel::aisi1045();
    // Orthogonal flat tool for the reference-plane frames.
    let tool = ToolGeometry::from_degrees(90.0, 60.0, 0.1, 0.0, 0.0)?;
    let tooth = ToothOutline::buttress(30f64.to_radians(), 60f64.to_radians(), 1.5, 0.1)?;
    let (w, a1) = (1.0, 0.1);

    println!("threading tooth 2, w = {w} mm (f = 2w), a1 = {a1} mm, AISI 1045");
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}",
        "da_mm", "Fx_cur", "Fx_col", "Fx_yng", "Fz_cur", "Fz_col", "Fz_yng", "chopped"
    );
    for da in [0.05, 0.1, 0.15, 0.2, 0.25, 0.3] {
        let profile = ThreadingProfile::new(vec![tooth.clone(), tooth.clone()], w, vec![a1, a1 + da])?;
        let region = build_threading_region(&profile, 2)?;
        let mesh = triangulate(&region, da / 8.0)?;
        let field = gradient_field(&mesh, &solve_plate(&mesh, 0.3)?)?;

        let curved = integrate_forces(&curved_decomposition(&mesh, &field, &tool)?, &material)?;
        let colwell = integrate_forces_colwell(&colwell_model(&region, &tool)?, &material)?;
        let young = integrate_forces_young(&young_decomposition(&region, 192, &tool)?, &material)?;
        let chopped = young_decomposition(&region, 192, &tool)?.chopped_count();

        println!(
            "{da:>8.3} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {chopped:>8}",
            curved.force.x, colwell.force.x, young.force.x,
            curved.force.z, colwell.force.z, young.force.z,
        );
    }
    Ok(())
}
