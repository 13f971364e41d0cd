//! Tool and insert definitions plus construction of the planar uncut chip
//! region removed per pass.
//!
//! All geometry lives on the (x, z) reference plane: x is the depth-of-cut
//! direction, z the feed direction. Workpiece curvature is ignored (the
//! workpiece radius is much larger than the feed in every relevant setup),
//! and the surface left by the previous pass is the current edge curve
//! translated by the feed along z.

pub mod mesh;

pub use mesh::{triangulate, TriMesh, Walk};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::point2::{seg_seg_intersection, P2};

/// Nose arcs are discretized into chords subtending at most this angle.
/// Boundary labels follow this discretization.
pub const ARC_CHORD_ANGLE: f64 = 5.0 * std::f64::consts::PI / 180.0;

/// Regions with shoelace area below this are rejected as degenerate (mm^2).
pub const MIN_REGION_AREA: f64 = 1e-9;

/// Rake-face normal from the side rake and back rake angles.
///
/// The normal is the normalized cross product of the two in-face direction
/// vectors set by the rake angles; it points away from the chip side
/// (positive y for small angles).
pub fn rake_normal(gamma_f: f64, gamma_p: f64) -> Vector3<f64> {
    let a = Vector3::new(0.0, -gamma_f.sin(), gamma_f.cos());
    let b = Vector3::new(gamma_p.cos(), -gamma_p.sin(), 0.0);
    a.cross(&b).normalize()
}

/// Single-point turning insert geometry.
#[derive(Debug, Clone)]
pub struct ToolGeometry {
    /// Main cutting edge angle to the feed direction (rad).
    pub kappa_r: f64,
    /// Nose angle between the main and secondary edges (rad).
    pub epsilon: f64,
    /// Nose radius (mm).
    pub r_eps: f64,
    /// Side rake angle (rad).
    pub gamma_f: f64,
    /// Back rake angle (rad).
    pub gamma_p: f64,
    rake_normal: Vector3<f64>,
}

impl ToolGeometry {
    pub fn new(kappa_r: f64, epsilon: f64, r_eps: f64, gamma_f: f64, gamma_p: f64) -> Result<Self> {
        if !(r_eps >= 0.0) {
            return Err(Error::InvalidGeometry(format!("nose radius {r_eps} < 0")));
        }
        if !(epsilon > 0.0 && epsilon < std::f64::consts::PI) {
            return Err(Error::InvalidGeometry(format!("nose angle {epsilon} outside (0, pi)")));
        }
        if !(kappa_r > 0.0 && kappa_r < std::f64::consts::PI) || kappa_r.sin() < 1e-6 {
            return Err(Error::InvalidGeometry(format!(
                "main cutting edge angle {kappa_r} outside (0, pi) or grazing"
            )));
        }
        if gamma_f.abs() >= std::f64::consts::FRAC_PI_2 || gamma_p.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidGeometry("rake angles must satisfy |gamma| < pi/2".into()));
        }
        let kappa2 = std::f64::consts::PI - kappa_r - epsilon;
        if kappa2 < -1e-12 {
            return Err(Error::InvalidGeometry(format!(
                "kappa_r + epsilon = {} exceeds pi; secondary edge would undercut",
                kappa_r + epsilon
            )));
        }
        Ok(Self {
            kappa_r,
            epsilon,
            r_eps,
            gamma_f,
            gamma_p,
            rake_normal: rake_normal(gamma_f, gamma_p),
        })
    }

    pub fn from_degrees(kappa_r: f64, epsilon: f64, r_eps: f64, gamma_f: f64, gamma_p: f64) -> Result<Self> {
        Self::new(
            kappa_r.to_radians(),
            epsilon.to_radians(),
            r_eps,
            gamma_f.to_radians(),
            gamma_p.to_radians(),
        )
    }

    /// Unit rake-face normal in the machine frame.
    pub fn rake_normal(&self) -> Vector3<f64> {
        self.rake_normal
    }

    /// Secondary (minor) cutting edge angle to the feed direction.
    pub fn kappa_secondary(&self) -> f64 {
        (std::f64::consts::PI - self.kappa_r - self.epsilon).max(0.0)
    }
}

/// Turning process parameters.
#[derive(Debug, Clone)]
pub struct ProcessParams {
    /// Feed per revolution (mm/rev).
    pub feed: f64,
    /// Depth of cut (mm).
    pub depth: f64,
    /// Cutting speed (m/min).
    pub cutting_speed: Option<f64>,
    /// Spindle speed (1/min).
    pub spindle_speed: Option<f64>,
    /// Workpiece radius (mm).
    pub workpiece_radius: Option<f64>,
}

impl ProcessParams {
    pub fn new(feed: f64, depth: f64) -> Result<Self> {
        let p = Self { feed, depth, cutting_speed: None, spindle_speed: None, workpiece_radius: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.feed > 0.0) {
            return Err(Error::InvalidGeometry(format!("feed {} must be > 0", self.feed)));
        }
        if !(self.depth > 0.0) {
            return Err(Error::InvalidGeometry(format!("depth {} must be > 0", self.depth)));
        }
        if let (Some(vc), Some(n), Some(r)) = (self.cutting_speed, self.spindle_speed, self.workpiece_radius) {
            // v_c [m/min] = 2 pi R[mm] n[1/min] / 1000
            let vc_from = 2.0 * std::f64::consts::PI * r * n / 1000.0;
            if (vc_from - vc).abs() > 1e-6 * vc.abs().max(1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "cutting speed {vc} m/min inconsistent with 2*pi*R*n = {vc_from} m/min"
                )));
            }
        }
        Ok(())
    }
}

/// Classification of a boundary segment of the uncut chip region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryLabel {
    /// Part of the engaged cutting edge of the current pass.
    CuttingEdge,
    /// Free surface: previous-pass surface or uncut outer surface.
    Free,
}

/// Planar uncut chip area with a classified boundary.
///
/// The boundary is a simple closed polygon; `labels()[i]` classifies the
/// segment from `points()[i]` to `points()[(i+1) % n]`. The cutting-edge
/// segments form one connected run.
#[derive(Debug, Clone)]
pub struct UncutChipRegion {
    points: Vec<P2>,
    labels: Vec<BoundaryLabel>,
    area: f64,
}

impl UncutChipRegion {
    /// Build a region from an explicit polygon, validating simplicity,
    /// area, and cutting-edge connectivity. Orientation is normalized to
    /// counter-clockwise in the (x, z) plane.
    pub fn from_polygon(points: Vec<P2>, labels: Vec<BoundaryLabel>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::DegenerateRegion("points/labels length mismatch".into()));
        }
        let (mut points, mut labels) = dedup_ring(points, labels);
        if points.len() < 3 {
            return Err(Error::DegenerateRegion("fewer than 3 distinct boundary points".into()));
        }
        let signed = shoelace(&points);
        if signed.abs() < MIN_REGION_AREA {
            return Err(Error::DegenerateRegion(format!("area {} below {MIN_REGION_AREA}", signed.abs())));
        }
        if signed < 0.0 {
            reverse_ring(&mut points, &mut labels);
        }
        let region = Self { area: signed.abs(), points, labels };
        if !region.is_simple() {
            return Err(Error::DegenerateRegion("boundary is self-intersecting".into()));
        }
        region.check_edge_connected()?;
        Ok(region)
    }

    /// Axis-aligned rectangular chip: cutting edge of length `edge_len`
    /// along x at z = 0, chip thickness `thickness` along z.
    pub fn rectangle(edge_len: f64, thickness: f64) -> Result<Self> {
        Self::from_polygon(
            vec![
                P2::new(0.0, 0.0),
                P2::new(edge_len, 0.0),
                P2::new(edge_len, thickness),
                P2::new(0.0, thickness),
            ],
            vec![
                BoundaryLabel::CuttingEdge,
                BoundaryLabel::Free,
                BoundaryLabel::Free,
                BoundaryLabel::Free,
            ],
        )
    }

    pub fn points(&self) -> &[P2] {
        &self.points
    }

    pub fn labels(&self) -> &[BoundaryLabel] {
        &self.labels
    }

    /// Shoelace area (mm^2).
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn segments(&self) -> impl Iterator<Item = (P2, P2, BoundaryLabel)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n], self.labels[i]))
    }

    /// Ordered polyline of the engaged cutting edge.
    pub fn cutting_edge_polyline(&self) -> Vec<P2> {
        let n = self.points.len();
        let start = (0..n)
            .find(|&i| {
                self.labels[i] == BoundaryLabel::CuttingEdge
                    && self.labels[(i + n - 1) % n] == BoundaryLabel::Free
            })
            .unwrap_or(0);
        let mut chain = vec![self.points[start]];
        let mut i = start;
        while self.labels[i] == BoundaryLabel::CuttingEdge {
            chain.push(self.points[(i + 1) % n]);
            i = (i + 1) % n;
            if i == start {
                break;
            }
        }
        chain
    }

    pub fn cutting_edge_length(&self) -> f64 {
        let chain = self.cutting_edge_polyline();
        chain.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().map(|(a, b, _)| a.distance(b)).sum()
    }

    /// Mean thickness estimate 2A/P, used to bound mesh spacing on thin chips.
    pub fn mean_thickness(&self) -> f64 {
        2.0 * self.area / self.perimeter()
    }

    pub fn bbox(&self) -> (P2, P2) {
        let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Polygon centroid.
    pub fn centroid(&self) -> P2 {
        let n = self.points.len();
        let mut cx = 0.0;
        let mut cz = 0.0;
        let mut a = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            let w = p.cross(q);
            a += w;
            cx += (p.x + q.x) * w;
            cz += (p.z + q.z) * w;
        }
        P2::new(cx / (3.0 * a), cz / (3.0 * a))
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: P2) -> bool {
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            if (a.z > p.z) != (b.z > p.z) {
                let x_cross = a.x + (p.z - a.z) / (b.z - a.z) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: P2) -> f64 {
        self.segments()
            .map(|(a, b, _)| crate::point2::point_segment_distance_sq(p, a, b).0)
            .fold(f64::INFINITY, f64::min)
            .sqrt()
    }

    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            let (a0, a1) = (self.points[i], self.points[(i + 1) % n]);
            for j in i + 1..n {
                // Skip adjacent segments (shared endpoint).
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let (b0, b1) = (self.points[j], self.points[(j + 1) % n]);
                if seg_seg_intersection(a0, a1, b0, b1, -1e-12).is_some() {
                    return false;
                }
            }
        }
        true
    }

    fn check_edge_connected(&self) -> Result<()> {
        let n = self.labels.len();
        let edges: Vec<usize> = (0..n).filter(|&i| self.labels[i] == BoundaryLabel::CuttingEdge).collect();
        if edges.is_empty() {
            return Err(Error::DegenerateRegion("no cutting-edge segment on boundary".into()));
        }
        // Count run starts: a cutting segment whose predecessor is free.
        let starts = edges
            .iter()
            .filter(|&&i| self.labels[(i + n - 1) % n] == BoundaryLabel::Free)
            .count();
        if starts > 1 {
            return Err(Error::DegenerateRegion(format!(
                "cutting edge split into {starts} disconnected runs"
            )));
        }
        Ok(())
    }
}

fn shoelace(points: &[P2]) -> f64 {
    let n = points.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        s += p.cross(q);
    }
    0.5 * s
}

fn dedup_ring(points: Vec<P2>, labels: Vec<BoundaryLabel>) -> (Vec<P2>, Vec<BoundaryLabel>) {
    const TOL: f64 = 1e-9;
    let mut out_p: Vec<P2> = Vec::with_capacity(points.len());
    let mut out_l: Vec<BoundaryLabel> = Vec::with_capacity(labels.len());
    for (p, l) in points.into_iter().zip(labels) {
        if let Some(&last) = out_p.last() {
            if last.distance(p) < TOL {
                // Merging a near-zero segment; the surviving segment is the
                // one that follows, so its label wins.
                *out_l.last_mut().unwrap() = l;
                continue;
            }
        }
        out_p.push(p);
        out_l.push(l);
    }
    // Closing duplicate.
    if out_p.len() >= 2 && out_p[0].distance(*out_p.last().unwrap()) < TOL {
        out_p.pop();
        out_l.pop();
    }
    (out_p, out_l)
}

fn reverse_ring(points: &mut Vec<P2>, labels: &mut Vec<BoundaryLabel>) {
    points.reverse();
    labels.reverse();
    // After reversing points, segment i runs from old point n-1-i to
    // n-2-i, which carried label n-2-i; rotating the reversed labels by
    // one restores the pairing.
    labels.rotate_left(1);
}

/// The current-pass edge curve (secondary edge, nose arc, main edge) as a
/// polyline ordered from the main-edge far end (most negative z) to the
/// secondary-edge far end, with the tool tip at the origin.
fn edge_profile_polyline(tool: &ToolGeometry, x_max: f64, z_span: f64) -> Vec<P2> {
    let r = tool.r_eps;
    let kr = tool.kappa_r;
    let k2 = tool.kappa_secondary();
    let center = P2::new(r, 0.0);
    let arc_point = |u: f64| center + P2::new(-u.cos(), u.sin()) * r;

    let p_main = arc_point(-kr);
    let p_sec = arc_point(k2);
    let dir_main = P2::new(kr.sin(), -kr.cos()); // up the main edge, away from the nose
    let dir_sec = P2::new(k2.sin(), k2.cos());

    let len_main = (x_max - p_main.x) / kr.sin();
    let len_sec = if k2.sin() > 1e-9 {
        ((x_max - p_sec.x) / k2.sin()).max(z_span)
    } else {
        z_span
    };

    let mut pts = vec![p_main + dir_main * len_main];
    if r > 0.0 {
        let span = kr + k2;
        let n = (span / ARC_CHORD_ANGLE).ceil().max(1.0) as usize;
        for i in 0..=n {
            pts.push(arc_point(-kr + span * i as f64 / n as f64));
        }
    } else {
        pts.push(P2::new(0.0, 0.0));
    }
    pts.push(p_sec + dir_sec * len_sec);
    pts
}

/// Find where the profile polyline crosses depth `x = a`, walking from the
/// main-edge far end. Returns (leading crossing z, trailing crossing z if any).
fn profile_depth_crossings(profile: &[P2], a: f64) -> (Option<(usize, f64)>, Option<(usize, f64)>) {
    let mut down = None;
    let mut up = None;
    for i in 0..profile.len() - 1 {
        let (p, q) = (profile[i], profile[i + 1]);
        if down.is_none() && p.x >= a && q.x < a {
            down = Some((i, (p.x - a) / (p.x - q.x)));
        } else if down.is_some() && p.x < a && q.x >= a {
            up = Some((i, (a - p.x) / (q.x - p.x)));
            break;
        }
    }
    (down, up)
}

fn point_on_segment(profile: &[P2], seg: usize, t: f64) -> P2 {
    profile[seg].lerp(profile[seg + 1], t)
}

/// Lowest intersection (smallest x) between the current edge polyline and
/// the same polyline translated by `feed` along z (the previous pass).
///
/// Returns the cusp point and its parameters on the current and previous
/// polylines as (segment index, segment parameter).
fn cusp_between_passes(profile: &[P2], feed: f64, x_limit: f64) -> Option<(P2, (usize, f64), (usize, f64))> {
    let mut best: Option<(P2, (usize, f64), (usize, f64))> = None;
    let shift = P2::new(0.0, feed);
    for i in 0..profile.len() - 1 {
        let (a0, a1) = (profile[i], profile[i + 1]);
        for j in 0..profile.len() - 1 {
            let (b0, b1) = (profile[j] + shift, profile[j + 1] + shift);
            if let Some((t, u)) = seg_seg_intersection(a0, a1, b0, b1, 1e-9) {
                let p = a0.lerp(a1, t);
                if p.x < -1e-9 || p.x > x_limit {
                    continue;
                }
                if best.map_or(true, |(bp, _, _)| p.x < bp.x) {
                    best = Some((p, (i, t), (j, u)));
                }
            }
        }
    }
    best
}

/// Largest feed for which the current and previous edge curves still
/// intersect at or below the depth of cut, keeping the uncut chip region
/// bounded by both edges. Returns infinity when the trailing flank never
/// rises back to the depth of cut (subsequent cuts always overlap).
pub fn max_feed(tool: &ToolGeometry, depth: f64) -> f64 {
    assert!(depth > 0.0, "depth must be positive");
    let x_max = depth * 1.5 + tool.r_eps + 1.0;
    let profile = edge_profile_polyline(tool, x_max, depth * 10.0 + 10.0);
    let (down, up) = profile_depth_crossings(&profile, depth);
    match (down, up) {
        (Some((i, t)), Some((j, u))) => {
            let z_lead = point_on_segment(&profile, i, t).z;
            let z_trail = point_on_segment(&profile, j, u).z;
            z_trail - z_lead
        }
        _ => f64::INFINITY,
    }
}

/// Construct the uncut chip region for single-point turning.
///
/// The region is bounded by the engaged part of the current edge (labeled
/// cutting edge), the free surface at the depth of cut, and the
/// previous-pass edge (current edge translated by the feed along z).
pub fn build_turning_region(tool: &ToolGeometry, process: &ProcessParams) -> Result<UncutChipRegion> {
    process.validate()?;
    let a = process.depth;
    let f = process.feed;
    if !(a > 0.0) {
        return Err(Error::DegenerateRegion("depth of cut must be positive".into()));
    }
    let f_max = max_feed(tool, a);
    if f > f_max * (1.0 + 1e-9) {
        return Err(Error::FeedTooLarge { feed: f, max: f_max });
    }

    let x_max = a * 1.5 + tool.r_eps + f + 1.0;
    let profile = edge_profile_polyline(tool, x_max, f + a * 10.0 + 10.0);
    let (cusp, (ci, _), (pi, _)) = cusp_between_passes(&profile, f, a * (1.0 + 1e-9) + 1e-9)
        .ok_or_else(|| Error::FeedTooLarge { feed: f, max: f_max })?;

    let (down, _) = profile_depth_crossings(&profile, a);
    let (bi, bt) = down.ok_or_else(|| Error::DegenerateRegion("edge never reaches depth of cut".into()))?;
    let b = point_on_segment(&profile, bi, bt);
    let c = b + P2::new(0.0, f);

    // Cutting edge path: cusp -> (walk towards the main-edge far end) -> B.
    let mut pts = vec![cusp];
    let mut labels = Vec::new();
    debug_assert!(bi <= ci, "depth crossing must precede the cusp along the profile");
    for k in (bi + 1..=ci).rev() {
        pts.push(profile[k]);
    }
    pts.push(b);
    while labels.len() < pts.len() - 1 {
        labels.push(BoundaryLabel::CuttingEdge);
    }

    // Free surface B -> C, then previous edge C -> cusp. At exactly the
    // maximum feed C coincides with the cusp and the previous-edge part
    // vanishes.
    if c.distance(cusp) > 1e-9 {
        pts.push(c);
        labels.push(BoundaryLabel::Free);
        let shift = P2::new(0.0, f);
        for k in bi + 1..=pi {
            pts.push(profile[k] + shift);
        }
        while labels.len() < pts.len() - 1 {
            labels.push(BoundaryLabel::Free);
        }
    }
    // Close back to the cusp.
    labels.push(BoundaryLabel::Free);

    UncutChipRegion::from_polygon(pts, labels)
}

/// One tooth outline of a multi-tooth (threading) insert.
///
/// The profile polyline is given in tooth-local coordinates (x = height
/// above the tip, z = lateral offset) from the left flank top, through the
/// tip vertex, to the right flank top; the tip vertex is blended by a nose
/// arc of radius `r_eps`. After filleting the outline is re-anchored so the
/// lowest point sits at the local origin.
#[derive(Debug, Clone)]
pub struct ToothOutline {
    pub profile: Vec<P2>,
    pub r_eps: f64,
}

impl ToothOutline {
    pub fn new(profile: Vec<P2>, r_eps: f64) -> Result<Self> {
        if profile.len() < 3 {
            return Err(Error::InvalidGeometry("tooth profile needs at least 3 points".into()));
        }
        if r_eps < 0.0 {
            return Err(Error::InvalidGeometry("tooth nose radius must be >= 0".into()));
        }
        Ok(Self { profile, r_eps })
    }

    /// Symmetric V tooth with the given flank half-angle from the depth axis.
    pub fn symmetric_v(half_angle: f64, height: f64, r_eps: f64) -> Result<Self> {
        Self::new(
            vec![
                P2::new(height, -height * half_angle.tan()),
                P2::new(0.0, 0.0),
                P2::new(height, height * half_angle.tan()),
            ],
            r_eps,
        )
    }

    /// Buttress tooth: a steep flank on the left, a slanted flank on the
    /// right; angles measured from the depth axis.
    pub fn buttress(steep_angle: f64, slant_angle: f64, height: f64, r_eps: f64) -> Result<Self> {
        Self::new(
            vec![
                P2::new(height, -height * steep_angle.tan()),
                P2::new(0.0, 0.0),
                P2::new(height, height * slant_angle.tan()),
            ],
            r_eps,
        )
    }

    /// Outline polyline with the tip vertex replaced by the nose arc,
    /// translated so the lowest point is at (0, 0).
    pub fn filleted(&self) -> Result<Vec<P2>> {
        let tip = self
            .profile
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.x.total_cmp(&b.1.x))
            .map(|(i, _)| i)
            .unwrap();
        if tip == 0 || tip == self.profile.len() - 1 {
            return Err(Error::InvalidGeometry("tooth tip must be an interior profile vertex".into()));
        }
        let v = self.profile[tip];
        let mut pts: Vec<P2> = self.profile[..tip].to_vec();
        if self.r_eps > 0.0 {
            let d_in = (v - self.profile[tip - 1]).normalize();
            let d_out = (self.profile[tip + 1] - v).normalize();
            let gamma = (-d_in).dot(d_out).clamp(-1.0, 1.0).acos();
            if gamma < 1e-9 || gamma > std::f64::consts::PI - 1e-9 {
                return Err(Error::InvalidGeometry("degenerate tooth tip angle".into()));
            }
            let tan_dist = self.r_eps / (gamma / 2.0).tan();
            let t1 = v - d_in * tan_dist;
            let t2 = v + d_out * tan_dist;
            let bisector = ((-d_in) + d_out).normalize();
            let center = v + bisector * (self.r_eps / (gamma / 2.0).sin());
            let a1 = (t1 - center).z.atan2((t1 - center).x);
            let mut a2 = (t2 - center).z.atan2((t2 - center).x);
            // Walk the short way around (the arc subtends pi - gamma).
            if a2 - a1 > std::f64::consts::PI {
                a2 -= 2.0 * std::f64::consts::PI;
            } else if a1 - a2 > std::f64::consts::PI {
                a2 += 2.0 * std::f64::consts::PI;
            }
            let n = ((a2 - a1).abs() / ARC_CHORD_ANGLE).ceil().max(1.0) as usize;
            for i in 0..=n {
                let ang = a1 + (a2 - a1) * i as f64 / n as f64;
                pts.push(center + P2::new(ang.cos(), ang.sin()) * self.r_eps);
            }
        } else {
            pts.push(v);
        }
        pts.extend_from_slice(&self.profile[tip + 1..]);

        let min_x = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
        let z_at_min = pts
            .iter()
            .min_by(|a, b| a.x.total_cmp(&b.x))
            .map(|p| p.z)
            .unwrap();
        Ok(pts.into_iter().map(|p| P2::new(p.x - min_x, p.z - z_at_min)).collect())
    }
}

/// Multi-tooth threading definition: tooth outlines, the pitch width `w`
/// between teeth (feed per revolution is `2w`), and the per-tooth infeeds.
#[derive(Debug, Clone)]
pub struct ThreadingProfile {
    pub teeth: Vec<ToothOutline>,
    pub pitch_width: f64,
    pub infeeds: Vec<f64>,
}

impl ThreadingProfile {
    pub fn new(teeth: Vec<ToothOutline>, pitch_width: f64, infeeds: Vec<f64>) -> Result<Self> {
        if teeth.is_empty() {
            return Err(Error::InvalidGeometry("threading profile needs at least one tooth".into()));
        }
        if !(pitch_width > 0.0) {
            return Err(Error::InvalidGeometry("pitch width must be positive".into()));
        }
        if infeeds.is_empty() || infeeds.windows(2).any(|w| w[1] <= w[0]) || infeeds[0] <= 0.0 {
            return Err(Error::InvalidGeometry("infeeds must be positive and strictly increasing".into()));
        }
        Ok(Self { teeth, pitch_width, infeeds })
    }

    /// Feed per revolution, `2w`.
    pub fn feed_per_rev(&self) -> f64 {
        2.0 * self.pitch_width
    }

    fn outline_for(&self, tooth: usize) -> &ToothOutline {
        &self.teeth[(tooth - 1).min(self.teeth.len() - 1)]
    }
}

/// Crossings of an outline (ordered left-top .. tip .. right-top) with the
/// horizontal line x = level: ((segment, param, point) left, same right).
fn outline_level_crossings(outline: &[P2], level: f64) -> Result<((usize, f64, P2), (usize, f64, P2))> {
    let mut left = None;
    let mut right = None;
    for i in 0..outline.len() - 1 {
        let (p, q) = (outline[i], outline[i + 1]);
        if p.x >= level && q.x < level && left.is_none() {
            let t = (p.x - level) / (p.x - q.x);
            left = Some((i, t, p.lerp(q, t)));
        }
        if p.x < level && q.x >= level {
            let t = (level - p.x) / (q.x - p.x);
            right = Some((i, t, p.lerp(q, t)));
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Ok((l, r)),
        _ => Err(Error::InvalidGeometry(format!(
            "tooth outline does not reach the surface level {level}; increase the profile height"
        ))),
    }
}

/// Region removed by the selected tooth (1-based index), given the surface
/// left by the preceding tooth. Tooth 1 cuts the raw surface; tooth k >= 2
/// removes a U-shaped shell of radial thickness `a_k - a_(k-1)` around the
/// previous tooth's groove. Flanks and nose arc are labeled cutting edge.
pub fn build_threading_region(profile: &ThreadingProfile, tooth_index: usize) -> Result<UncutChipRegion> {
    if tooth_index == 0 || tooth_index > profile.infeeds.len() {
        return Err(Error::InvalidGeometry(format!(
            "tooth index {tooth_index} outside 1..={}",
            profile.infeeds.len()
        )));
    }
    let a_k = profile.infeeds[tooth_index - 1];
    let outer = profile.outline_for(tooth_index).filleted()?;

    let (mut pts, mut labels) = (Vec::new(), Vec::new());
    if tooth_index == 1 {
        // Full profile cut into the raw surface at depth a_1.
        let ((li, _, lp), (ri, _, rp)) = outline_level_crossings(&outer, a_k)?;
        pts.push(lp);
        for k in li + 1..=ri {
            pts.push(outer[k]);
        }
        pts.push(rp);
        while labels.len() < pts.len() - 1 {
            labels.push(BoundaryLabel::CuttingEdge);
        }
        // Raw surface cap.
        labels.push(BoundaryLabel::Free);
    } else {
        let delta_a = a_k - profile.infeeds[tooth_index - 2];
        if delta_a <= 1e-12 {
            return Err(Error::DegenerateRegion(format!("infeed increment {delta_a} <= 0")));
        }
        let inner: Vec<P2> = profile
            .outline_for(tooth_index - 1)
            .filleted()?
            .into_iter()
            .map(|p| P2::new(p.x + delta_a, p.z))
            .collect();
        let ((lo_i, _, lo_p), (ro_i, _, ro_p)) = outline_level_crossings(&outer, a_k)?;
        let ((li_i, _, li_p), (ri_i, _, ri_p)) = outline_level_crossings(&inner, a_k)?;

        // Outer outline, left top -> around the nose -> right top: cutting edge.
        pts.push(lo_p);
        for k in lo_i + 1..=ro_i {
            pts.push(outer[k]);
        }
        pts.push(ro_p);
        while labels.len() < pts.len() - 1 {
            labels.push(BoundaryLabel::CuttingEdge);
        }
        // Right raw-surface cap.
        pts.push(ri_p);
        labels.push(BoundaryLabel::Free);
        // Inner outline reversed (right top -> around -> left top): free.
        for k in (li_i + 1..=ri_i).rev() {
            pts.push(inner[k]);
        }
        pts.push(li_p);
        while labels.len() < pts.len() - 1 {
            labels.push(BoundaryLabel::Free);
        }
        // Left raw-surface cap closes the ring.
        labels.push(BoundaryLabel::Free);
    }

    let region = UncutChipRegion::from_polygon(pts, labels)?;
    let (lo, hi) = region.bbox();
    if hi.z - lo.z > 2.0 * profile.pitch_width {
        return Err(Error::InvalidGeometry(
            "tooth engagement wider than the thread pitch; teeth would collide".into(),
        ));
    }
    Ok(region)
}

#[cfg(test)]
mod tests;
