use super::*;
use approx::assert_relative_eq;

fn deg(d: f64) -> f64 {
    d.to_radians()
}

#[test]
fn rake_normal_flat() {
    let n = rake_normal(0.0, 0.0);
    assert_relative_eq!(n, Vector3::new(0.0, 1.0, 0.0), epsilon = 1e-15);
}

#[test]
fn rake_normal_single_angle() {
    let g = deg(12.0);
    let n = rake_normal(0.0, g);
    assert_relative_eq!(n, Vector3::new(g.sin(), g.cos(), 0.0), epsilon = 1e-14);
}

#[test]
fn rake_normal_oblique_holder() {
    // Frozen from a direct evaluation of the cross product, normalized.
    let n = rake_normal(deg(-7.5), deg(-5.0));
    assert_relative_eq!(n.x, -0.086415705247, epsilon = 1e-9);
    assert_relative_eq!(n.y, 0.987736030751, epsilon = 1e-9);
    assert_relative_eq!(n.z, -0.130037915405, epsilon = 1e-9);
    assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
}

#[test]
fn turning_rectangle_degeneration() {
    // 90 degree edge, sharp nose, flat trailing flank: exact rectangle.
    let tool = ToolGeometry::from_degrees(90.0, 90.0, 0.0, 0.0, 0.0).unwrap();
    let process = ProcessParams::new(0.1, 1.0).unwrap();
    let region = build_turning_region(&tool, &process).unwrap();
    assert_relative_eq!(region.area(), 0.1, epsilon = 1e-12);
    let (lo, hi) = region.bbox();
    assert_relative_eq!(hi.x - lo.x, 1.0, epsilon = 1e-12);
    assert_relative_eq!(hi.z - lo.z, 0.1, epsilon = 1e-12);
}

#[test]
fn max_feed_matches_reported_values() {
    let tool = ToolGeometry::from_degrees(62.5, 55.0, 0.4, 0.0, 0.0).unwrap();
    for (a, expect) in [(0.4, 0.902), (0.8, 1.318), (1.2, 1.735)] {
        let f = max_feed(&tool, a);
        assert!((f - expect).abs() / expect < 0.01, "a={a}: f_max={f}, expected {expect}");
    }
}

#[test]
fn turning_region_valid_at_exact_max_feed() {
    let tool = ToolGeometry::from_degrees(62.5, 55.0, 0.4, 0.0, 0.0).unwrap();
    let f_max = max_feed(&tool, 0.4);
    let region = build_turning_region(&tool, &ProcessParams::new(f_max, 0.4).unwrap()).unwrap();
    assert!(region.area() > 0.0);
    assert!(region.is_simple());
}

#[test]
fn turning_region_rejects_feed_above_max() {
    let tool = ToolGeometry::from_degrees(62.5, 55.0, 0.4, 0.0, 0.0).unwrap();
    let f_max = max_feed(&tool, 0.4);
    let err = build_turning_region(&tool, &ProcessParams::new(f_max * 1.02, 0.4).unwrap());
    assert!(matches!(err, Err(Error::FeedTooLarge { .. })));
}

#[test]
fn turning_region_crescent_outline() {
    // V-shaped insert; crescent bounded by the nose arc and both passes.
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0).unwrap();
    let f = 0.5 * max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(f, 1.0).unwrap()).unwrap();
    assert!(region.is_simple());
    assert!(region.area() > 0.0);
    // Nose arc points sit at distance r_eps from the arc center (r_eps, 0).
    let center = P2::new(0.2, 0.0);
    let on_arc = region
        .cutting_edge_polyline()
        .iter()
        .filter(|p| (p.distance(center) - 0.2).abs() < 1e-9)
        .count();
    assert!(on_arc >= 5, "expected several chord points on the nose arc, got {on_arc}");
    // The engaged edge spans from the cusp up to the free surface at x = a.
    let chain = region.cutting_edge_polyline();
    assert_relative_eq!(chain.last().unwrap().x, 1.0, epsilon = 1e-9);
    assert!(chain[0].x < 1.0 - 1e-6, "cusp must sit strictly below the free surface");
    // The chain passes the tool tip at the origin within the chord sagitta
    // of the arc discretization.
    let tip_dist = chain
        .windows(2)
        .map(|w| crate::point2::point_segment_distance_sq(P2::new(0.0, 0.0), w[0], w[1]).0)
        .fold(f64::INFINITY, f64::min)
        .sqrt();
    let sagitta = 0.2 * (1.0 - (ARC_CHORD_ANGLE / 2.0).cos());
    assert!(tip_dist <= sagitta + 1e-12, "edge misses the tip by {tip_dist}");
}

#[test]
fn feed_slightly_below_max_is_simple_polygon() {
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0).unwrap();
    let f_max = max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(f_max * 0.999, 1.0).unwrap()).unwrap();
    assert!(region.is_simple());
}

#[test]
fn degenerate_depth_rejected() {
    let tool = ToolGeometry::from_degrees(90.0, 90.0, 0.0, 0.0, 0.0).unwrap();
    assert!(ProcessParams::new(0.1, 0.0).is_err());
    assert!(ProcessParams::new(0.0, 1.0).is_err());
    let _ = tool;
}

#[test]
fn region_area_is_shoelace_consistent() {
    let region = UncutChipRegion::rectangle(2.0, 0.1).unwrap();
    assert_relative_eq!(region.area(), 0.2, epsilon = 1e-12);
    assert_relative_eq!(region.cutting_edge_length(), 2.0, epsilon = 1e-12);
}

#[test]
fn threading_tooth2_is_u_shell_of_depth_delta() {
    let tooth = ToothOutline::symmetric_v(deg(30.0), 1.0, 0.1).unwrap();
    let profile = ThreadingProfile::new(vec![tooth.clone(), tooth], 1.0, vec![0.1, 0.2]).unwrap();
    let region = build_threading_region(&profile, 2).unwrap();
    assert!(region.is_simple());
    // Depth of the shell at the groove bottom equals the infeed increment.
    let (lo, _) = region.bbox();
    assert_relative_eq!(lo.x, 0.0, epsilon = 1e-9);
    // The inner boundary bottom sits delta_a above the outer bottom.
    let min_inner = region
        .segments()
        .filter(|(_, _, l)| *l == BoundaryLabel::Free)
        .map(|(a, _, _)| a.x)
        .fold(f64::INFINITY, f64::min);
    assert_relative_eq!(min_inner, 0.1, epsilon = 1e-6);
    // Both flanks plus nose are one connected cutting edge reaching the
    // raw surface on both sides.
    let chain = region.cutting_edge_polyline();
    assert_relative_eq!(chain[0].x, 0.2, epsilon = 1e-9);
    assert_relative_eq!(chain.last().unwrap().x, 0.2, epsilon = 1e-9);
}

#[test]
fn threading_vanishing_infeed_rejected() {
    let tooth = ToothOutline::symmetric_v(deg(30.0), 1.0, 0.1).unwrap();
    assert!(ThreadingProfile::new(vec![tooth.clone(), tooth], 1.0, vec![0.1, 0.1]).is_err());
}

#[test]
fn threading_area_vanishes_with_infeed() {
    let tooth = ToothOutline::symmetric_v(deg(30.0), 1.0, 0.1).unwrap();
    let mut prev = f64::INFINITY;
    for da in [0.05, 0.01, 0.002] {
        let profile =
            ThreadingProfile::new(vec![tooth.clone(), tooth.clone()], 1.0, vec![0.1, 0.1 + da]).unwrap();
        let area = build_threading_region(&profile, 2).unwrap().area();
        assert!(area < prev);
        prev = area;
    }
    assert!(prev < 0.02);
}

#[test]
fn threading_tooth1_cuts_full_profile() {
    let tooth = ToothOutline::buttress(deg(10.0), deg(45.0), 1.0, 0.1).unwrap();
    let profile = ThreadingProfile::new(vec![tooth], 1.0, vec![0.25]).unwrap();
    let region = build_threading_region(&profile, 1).unwrap();
    assert!(region.is_simple());
    let (lo, hi) = region.bbox();
    assert_relative_eq!(hi.x - lo.x, 0.25, epsilon = 1e-9);
}

#[test]
fn unit_square_triangulation_exact_cover() {
    let region = UncutChipRegion::rectangle(1.0, 1.0).unwrap();
    let mesh = triangulate(&region, 0.5).unwrap();
    assert!(mesh.triangles().len() >= 8, "got {} triangles", mesh.triangles().len());
    assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-9);
    assert!(mesh.triangles().iter().enumerate().all(|(t, _)| mesh.triangle_area(t) > 0.0));
}

#[test]
fn triangulation_area_independent_of_target() {
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0).unwrap();
    let f = 0.5 * max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(f, 1.0).unwrap()).unwrap();
    let coarse = triangulate(&region, 0.1).unwrap();
    let fine = triangulate(&region, 0.05).unwrap();
    assert_relative_eq!(coarse.total_area(), region.area(), max_relative = 1e-9);
    assert_relative_eq!(fine.total_area(), region.area(), max_relative = 1e-9);
}

#[test]
fn v_region_edge_nodes_lie_on_edge_curves() {
    // Point-to-curve distance oracle: every edge node must sit on the main
    // edge line or the nose arc (or the trailing flank up to the cusp).
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0).unwrap();
    let f = 0.5 * max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(f, 1.0).unwrap()).unwrap();
    let mesh = triangulate(&region, 0.05).unwrap();
    // Oracle: distance to the region's own cutting-edge polyline.
    let chain = region.cutting_edge_polyline();
    for &ni in mesh.edge_nodes() {
        let p = mesh.nodes()[ni];
        let d = chain
            .windows(2)
            .map(|w| crate::point2::point_segment_distance_sq(p, w[0], w[1]).0)
            .fold(f64::INFINITY, f64::min)
            .sqrt();
        assert!(d < 1e-9, "edge node {ni} at {p:?} lies {d} mm off the cutting edge");
    }
}

#[test]
fn mesh_quality_bound() {
    let tool = ToolGeometry::from_degrees(60.0, 60.0, 0.2, 0.0, 0.0).unwrap();
    let f = 0.5 * max_feed(&tool, 1.0);
    let region = build_turning_region(&tool, &ProcessParams::new(f, 1.0).unwrap()).unwrap();
    let mesh = triangulate(&region, 0.05).unwrap();
    let min_angle = mesh.min_angle().to_degrees();
    assert!(min_angle >= 20.0, "min angle {min_angle} below quality bound");
}

#[test]
fn mesh_locate_walk() {
    let region = UncutChipRegion::rectangle(2.0, 0.5).unwrap();
    let mesh = triangulate(&region, 0.1).unwrap();
    match mesh.locate(P2::new(1.0, 0.25), 0) {
        super::mesh::Walk::Inside(t, bary) => {
            assert!(bary.iter().all(|&b| b >= -1e-12));
            assert!(t < mesh.triangles().len());
        }
        other => panic!("expected inside, got {other:?}"),
    }
    match mesh.locate(P2::new(5.0, 0.25), 0) {
        super::mesh::Walk::Outside(..) => {}
        other => panic!("expected outside, got {other:?}"),
    }
}

#[test]
fn process_speed_consistency() {
    let mut p = ProcessParams::new(0.1, 1.0).unwrap();
    p.cutting_speed = Some(300.0);
    p.workpiece_radius = Some(50.0);
    p.spindle_speed = Some(300.0 * 1000.0 / (2.0 * std::f64::consts::PI * 50.0));
    assert!(p.validate().is_ok());
    p.spindle_speed = Some(1234.0);
    assert!(p.validate().is_err());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn turning_regions_are_simple_positive_and_meshable(
            kappa in 45.0f64..95.0,
            eps_angle in 35.0f64..80.0,
            r_eps in 0.0f64..0.45,
            depth in 0.3f64..1.5,
            feed_frac in 0.1f64..0.98,
        ) {
            prop_assume!(kappa + eps_angle < 174.0);
            let tool = ToolGeometry::from_degrees(kappa, eps_angle, r_eps, 0.0, 0.0).unwrap();
            let f_max = max_feed(&tool, depth);
            prop_assume!(f_max.is_finite());
            let feed = feed_frac * f_max;
            prop_assume!(feed > 1e-3);
            let region = build_turning_region(&tool, &ProcessParams::new(feed, depth).unwrap()).unwrap();
            prop_assert!(region.area() > 0.0);
            prop_assert!(region.is_simple());
            let mesh = triangulate(&region, depth / 12.0).unwrap();
            let diff = (mesh.total_area() - region.area()).abs() / region.area();
            prop_assert!(diff < 5e-3, "area mismatch {diff}");
            prop_assert!((0..mesh.triangles().len()).all(|t| mesh.triangle_area(t) > 0.0));
        }
    }
}
