//! Orthogonal-to-oblique transformation walkthrough: from the holder rake
//! angles to the rake-face normal, the local rake/inclination angles along
//! a range of flow directions, and the resulting cutting coefficients.

use cutforce::force::{characteristic, MaterialModel};
use cutforce::geometry::rake_normal;
use cutforce::point2::P2;
use cutforce::transforms::LocalFrame;

fn main() -> cutforce::Result<()> {
    // The oblique tool holder used in the titanium cutting tests.
    let (gamma_f, gamma_p) = (-7.5f64.to_radians(), -5f64.to_radians());
    let n = rake_normal(gamma_f, gamma_p);
    println!("rake normal n = ({:.6}, {:.6}, {:.6})", n.x, n.y, n.z);

    let material = MaterialModel::ti6al4v();
    println!(
        "\n{:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "phi_deg", "alpha_deg", "lambda_deg", "K_uc_MPa", "K_vc_MPa", "residual"
    );
    for phi_deg in [-60.0, -30.0, 0.0, 30.0, 60.0, 90.0] {
        let phi = (phi_deg as f64).to_radians();
        let g = P2::new(phi.sin(), phi.cos());
        let frame = LocalFrame::from_flow(g, &n)?;
        let ch = characteristic(&material, 0.1, frame.alpha_n, frame.lambda_s, frame.eta)?;
        // The first column of T40 must be the negated rake normal.
        let residual = (frame.t40 * nalgebra::Vector3::new(1.0, 0.0, 0.0) + n).norm();
        println!(
            "{:>10.1} {:>10.3} {:>10.3} {:>10.1} {:>10.1} {:>10.2e}",
            phi_deg,
            frame.alpha_n.to_degrees(),
            frame.lambda_s.to_degrees(),
            ch.k_uc,
            ch.k_vc,
            residual
        );
    }
    println!("\nchip flow angle follows Stabler's rule (eta = lambda_s)");
    Ok(())
}
