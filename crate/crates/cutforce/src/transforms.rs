//! Rotations between the machine, orthogonal, cutting-edge, rake-face and
//! chip-flow coordinate systems, and the local oblique-cutting angles.
//!
//! The chain of intrinsic rotations
//! `T40 = R_y(phi) * R_z(-pi/2) * R_z(lambda_s) * R_y(alpha_n) * R_x(eta)`
//! maps chip-flow components into the machine frame. Its first column is
//! the outward rake-face normal negated, which is what lets the local
//! normal rake angle `alpha_n` and inclination angle `lambda_s` be solved
//! from a known rake-face normal and an in-plane flow direction.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::point2::P2;

/// Threshold on |sin(phi)| below which the direct angle solution becomes
/// singular and the degenerate branch is used. Both branches agree
/// analytically at cos(phi) = +/-1, so the crossover is seamless.
const SINGULAR_PHI: f64 = 1e-8;

/// Threshold on |cos(alpha_n)| below which the inclination angle is
/// undefined (the rake face is parallel to the flow plane).
const GIMBAL_COS: f64 = 1e-8;

/// Right-handed rotation about the x axis.
pub fn rotation_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Right-handed rotation about the y axis.
pub fn rotation_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Right-handed rotation about the z axis.
pub fn rotation_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Solve the local normal rake angle and inclination angle from the
/// rake-face normal `n` (unit, machine frame) and the flow azimuth `phi`
/// (angle of the in-plane flow direction to the z axis).
///
/// Returns `(alpha_n, lambda_s)` in radians. The arcsin branch is valid in
/// the technologically relevant small-angle regime; outside it the solve
/// reports [`Error::GimbalSingularity`].
pub fn solve_local_angles(n: &Vector3<f64>, phi: f64) -> Result<(f64, f64)> {
    let (sin_phi, cos_phi) = phi.sin_cos();
    let (alpha_n, lambda_s);
    if sin_phi.abs() < SINGULAR_PHI {
        // Degenerate branch: flow along +/-z.
        let sin_alpha = n.z * cos_phi;
        alpha_n = clamped_asin(sin_alpha)?;
        let cos_alpha = alpha_n.cos();
        if cos_alpha.abs() < GIMBAL_COS {
            return Err(Error::GimbalSingularity);
        }
        lambda_s = clamped_asin(-n.x / (cos_alpha * cos_phi))?;
    } else {
        let sin_alpha = n.x * sin_phi + n.z * cos_phi;
        alpha_n = clamped_asin(sin_alpha)?;
        let cos_alpha = alpha_n.cos();
        if cos_alpha.abs() < GIMBAL_COS {
            return Err(Error::GimbalSingularity);
        }
        lambda_s = clamped_asin((n.z - cos_phi * sin_alpha) / (cos_alpha * sin_phi))?;
    }
    Ok((alpha_n, lambda_s))
}

fn clamped_asin(s: f64) -> Result<f64> {
    if !s.is_finite() || s.abs() > 1.0 + 1e-9 {
        return Err(Error::GimbalSingularity);
    }
    Ok(s.clamp(-1.0, 1.0).asin())
}

/// Transformation from chip-flow components to the machine frame.
pub fn build_t40(phi: f64, lambda_s: f64, alpha_n: f64, eta: f64) -> Matrix3<f64> {
    rotation_y(phi)
        * rotation_z(-std::f64::consts::FRAC_PI_2)
        * rotation_z(lambda_s)
        * rotation_y(alpha_n)
        * rotation_x(eta)
}

/// Local equivalent oblique-cutting frame at one point of the chip area.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    /// Azimuth of the in-plane flow direction, measured from the z axis.
    pub phi: f64,
    /// Local normal rake angle.
    pub alpha_n: f64,
    /// Local inclination angle.
    pub lambda_s: f64,
    /// Chip flow angle on the rake face; equals `lambda_s` under Stabler's rule.
    pub eta: f64,
    /// Chip-flow-to-machine transformation.
    pub t40: Matrix3<f64>,
}

impl LocalFrame {
    /// Build the frame from an in-plane flow direction and the rake normal.
    ///
    /// `phi` is computed with the two-argument arctangent of `(g.x, g.z)`
    /// so flows with negative z are handled unambiguously.
    pub fn from_flow(g: P2, n: &Vector3<f64>) -> Result<Self> {
        let phi = g.x.atan2(g.z);
        Self::from_phi(phi, n)
    }

    /// Build the frame from a flow azimuth and the rake normal, following
    /// Stabler's rule for the chip flow angle.
    pub fn from_phi(phi: f64, n: &Vector3<f64>) -> Result<Self> {
        let (alpha_n, lambda_s) = solve_local_angles(n, phi)?;
        let eta = lambda_s;
        Ok(Self {
            phi,
            alpha_n,
            lambda_s,
            eta,
            t40: build_t40(phi, lambda_s, alpha_n, eta),
        })
    }

    /// Flow direction lifted to the rake face, in the machine frame.
    pub fn tilted_flow(&self) -> Vector3<f64> {
        self.t40 * Vector3::new(0.0, 0.0, 1.0)
    }
}

/// Tilt an in-plane unit flow direction onto the rake face with normal `n`.
///
/// For a flat orthogonal tool (`n = (0, 1, 0)`) this degenerates to
/// `(g.x, 0, g.z)` exactly.
pub fn tilt_field(g: P2, n: &Vector3<f64>) -> Result<Vector3<f64>> {
    Ok(LocalFrame::from_flow(g, n)?.tilted_flow())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn rotation_z_zero_is_identity() {
        assert_relative_eq!(rotation_z(0.0), Matrix3::identity(), epsilon = 0.0);
    }

    #[test]
    fn rotation_inverse_pairs() {
        let l = 0.7;
        let prod = rotation_z(l) * rotation_z(-l);
        assert_relative_eq!(prod, Matrix3::identity(), epsilon = 1e-14);
    }

    #[test]
    fn rotation_x_third_column() {
        let eta = 0.3;
        let v = rotation_x(eta) * Vector3::new(0.0, 0.0, 1.0);
        assert_relative_eq!(v, Vector3::new(0.0, -eta.sin(), eta.cos()), epsilon = 1e-15);
    }

    #[test]
    fn flat_tool_gives_zero_angles() {
        let n = Vector3::new(0.0, 1.0, 0.0);
        for phi in [0.0, 0.4, 1.2, std::f64::consts::PI, -0.9] {
            let (a, l) = solve_local_angles(&n, phi).unwrap();
            assert!(a.abs() < 1e-15 && l.abs() < 1e-15, "phi={phi}");
        }
    }

    #[test]
    fn holder_angles_from_rake_normal_at_phi_zero() {
        // Oblique holder with side rake -7.5 deg and back rake -5 deg;
        // normal frozen from the cross-product evaluation.
        let n = Vector3::new(-0.086415705247, 0.987736030751, -0.130037915405);
        let (a, l) = solve_local_angles(&n, 0.0).unwrap();
        assert!((a.to_degrees() - -7.5).abs() < 0.05, "alpha_n = {}", a.to_degrees());
        assert!((l.to_degrees() - 5.0).abs() < 0.05, "lambda_s = {}", l.to_degrees());
    }

    #[test]
    fn axis_aligned_reduction() {
        let g = deg(6.0);
        let n = Vector3::new(g.sin(), g.cos(), 0.0);
        let (a, l) = solve_local_angles(&n, std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(a, g, epsilon = 1e-12);
        assert_relative_eq!(l, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn t40_collapses_to_rz_minus_half_pi() {
        let t = build_t40(0.0, 0.0, 0.0, 0.0);
        let expect = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_relative_eq!(t, expect, epsilon = 1e-15);
    }

    #[test]
    fn t40_matches_explicit_factor_product() {
        // Independent composition of the five factors for the oblique holder.
        let phi = 0.37;
        let (alpha, lambda) = (deg(-7.5), deg(5.0));
        let eta = lambda;
        let expect = rotation_y(phi)
            * rotation_z(-std::f64::consts::FRAC_PI_2)
            * rotation_z(lambda)
            * rotation_y(alpha)
            * rotation_x(eta);
        assert_relative_eq!(build_t40(phi, lambda, alpha, eta), expect, epsilon = 0.0);
    }

    #[test]
    fn normal_identity_roundtrip() {
        // Construct n from known angles, solve them back, rebuild T40 and
        // check T40 * e_x = -n.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for k in 0..10_000 {
            let alpha = deg(60.0 * next() - 30.0);
            let lambda = deg(60.0 * next() - 30.0);
            // Exercise the singular branch explicitly on a few samples.
            let phi = match k % 100 {
                0 => 0.0,
                1 => std::f64::consts::PI,
                _ => 2.0 * std::f64::consts::PI * next() - std::f64::consts::PI,
            };
            let t = build_t40(phi, lambda, alpha, lambda);
            let n = -(t * Vector3::new(1.0, 0.0, 0.0));
            let (a2, l2) = solve_local_angles(&n, phi).unwrap();
            let t2 = build_t40(phi, l2, a2, l2);
            let residual = (t2 * Vector3::new(1.0, 0.0, 0.0) + n).norm();
            assert!(residual < 1e-10, "residual {residual} at k={k}");
            // Orthonormality and orientation.
            let orto = (t2.transpose() * t2 - Matrix3::identity()).norm();
            assert!(orto < 1e-12);
            assert!((t2.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_continuity_away_from_singular_branch() {
        let n = Vector3::new(-0.086415705247, 0.987736030751, -0.130037915405);
        for &phi in &[0.3, 1.0, 2.0, -1.3] {
            let (a0, l0) = solve_local_angles(&n, phi).unwrap();
            let (a1, l1) = solve_local_angles(&n, phi + 1e-6).unwrap();
            assert!((a1 - a0).abs() <= 1e-4);
            assert!((l1 - l0).abs() <= 1e-4);
        }
    }

    #[test]
    fn tilt_degenerates_for_orthogonal_tool() {
        let n = Vector3::new(0.0, 1.0, 0.0);
        let g = tilt_field(P2::new(0.0, 1.0), &n).unwrap();
        assert_relative_eq!(g, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-14);
        let g = tilt_field(P2::new(1.0, 0.0), &n).unwrap();
        assert_relative_eq!(g, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-14);
    }

    #[test]
    fn tilt_matches_matrix_product_for_oblique_tool() {
        let n = Vector3::new(-0.086415705247, 0.987736030751, -0.130037915405);
        let g = P2::new(0.0, 1.0);
        let frame = LocalFrame::from_flow(g, &n).unwrap();
        let tilted = tilt_field(g, &n).unwrap();
        assert_relative_eq!(tilted, frame.t40 * Vector3::new(0.0, 0.0, 1.0), epsilon = 0.0);
        assert!(tilted.y.abs() > 1e-3, "oblique tilt must leave the reference plane");
        assert_relative_eq!(tilted.norm(), 1.0, epsilon = 1e-12);
    }
}
