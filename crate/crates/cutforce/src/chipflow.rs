//! Chip decompositions: curved segments from flow-field streamlines, plus
//! the Colwell (equivalent chord) and Young (straight perpendicular
//! segments) baselines.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryLabel, ToolGeometry, TriMesh, UncutChipRegion, Walk};
use crate::plate_fe::FlowField;
use crate::point2::{point_segment_distance_sq, seg_seg_intersection, P2};
use crate::transforms::LocalFrame;

/// One streamline of the flow field, from the cutting edge to a free
/// boundary. Its arc length is the curved uncut chip thickness of the
/// chip segment through its seed.
#[derive(Debug, Clone)]
pub struct Streamline {
    pub points: Vec<P2>,
    pub arc_length: f64,
}

impl Streamline {
    /// True when no two non-adjacent segments of the polyline cross.
    pub fn is_self_intersection_free(&self, tol: f64) -> bool {
        polyline_pair_clear(&self.points, &self.points, true, tol)
    }
}

fn polyline_pair_clear(a: &[P2], b: &[P2], same: bool, tol: f64) -> bool {
    for i in 0..a.len().saturating_sub(1) {
        for j in 0..b.len().saturating_sub(1) {
            if same && (i == j || i + 1 == j || j + 1 == i) {
                continue;
            }
            if let Some((t, u)) = seg_seg_intersection(a[i], a[i + 1], b[j], b[j + 1], -1e-12) {
                // Endpoint grazing within tol is not an intersection.
                let p = a[i].lerp(a[i + 1], t);
                let q = b[j].lerp(b[j + 1], u);
                if p.distance(q) < tol
                    && (t > 1e-9 && t < 1.0 - 1e-9 || u > 1e-9 && u < 1.0 - 1e-9)
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether two distinct streamlines cross anywhere (shared endpoints on the
/// boundary are tolerated within `tol`).
pub fn streamlines_intersect(a: &Streamline, b: &Streamline, tol: f64) -> bool {
    !polyline_pair_clear(&a.points, &b.points, false, tol)
}

struct Tracer<'m> {
    mesh: &'m TriMesh,
    field: &'m FlowField,
    step: f64,
    max_steps: usize,
}

enum TraceEnd {
    Boundary,
    Stalled(usize),
}

impl<'m> Tracer<'m> {
    fn new(mesh: &'m TriMesh, field: &'m FlowField) -> Self {
        let step = mesh.target() / 4.0;
        let (lo, hi) = bbox(mesh.nodes());
        let diameter = (hi - lo).norm();
        Tracer { mesh, field, step, max_steps: (10.0 * diameter / step).ceil() as usize + 16 }
    }

    fn eval(&self, p: P2, hint: &mut usize, sign: f64) -> P2 {
        let (g, t) = self.field.sample(self.mesh, p, *hint);
        *hint = t;
        g * sign
    }

    /// March from `seed` along `sign * g` until a boundary is crossed.
    fn march(&self, seed: P2, sign: f64, out: &mut Vec<P2>) -> TraceEnd {
        let mut p = seed;
        let mut hint = match self.mesh.locate(seed, 0) {
            Walk::Inside(t, _) => t,
            Walk::Outside(t, _) | Walk::Stuck(t) => t,
        };
        for _ in 0..self.max_steps {
            let h = self.step;
            let k1 = self.eval(p, &mut hint, sign);
            let k2 = self.eval(p + k1 * (h / 2.0), &mut hint, sign);
            let k3 = self.eval(p + k2 * (h / 2.0), &mut hint, sign);
            let k4 = self.eval(p + k3 * h, &mut hint, sign);
            let q = p + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
            match self.mesh.locate(q, hint) {
                Walk::Inside(t, _) => {
                    hint = t;
                    out.push(q);
                    p = q;
                }
                Walk::Outside(t, edge) => {
                    // Clip the step at the boundary crossing.
                    let hit = self.clip(p, q, t, edge).or_else(|| self.clip_global(p, q));
                    out.push(hit.map(|(point, _)| point).unwrap_or(q));
                    return TraceEnd::Boundary;
                }
                Walk::Stuck(_) => return TraceEnd::Stalled(self.max_steps),
            }
        }
        TraceEnd::Stalled(self.max_steps)
    }

    fn clip(&self, p: P2, q: P2, tri: usize, edge: usize) -> Option<(P2, BoundaryLabel)> {
        let t = self.mesh.triangles()[tri];
        let (a, b) = (t[edge], t[(edge + 1) % 3]);
        let seg = self
            .mesh
            .boundary_segments()
            .iter()
            .find(|&&(sa, sb, _)| (sa == a && sb == b) || (sa == b && sb == a));
        let &(sa, sb, label) = seg?;
        let (pa, pb) = (self.mesh.nodes()[sa], self.mesh.nodes()[sb]);
        let (tt, _) = seg_seg_intersection(p, q, pa, pb, 1e-9)?;
        Some((p.lerp(q, tt.clamp(0.0, 1.0)), label))
    }

    fn clip_global(&self, p: P2, q: P2) -> Option<(P2, BoundaryLabel)> {
        let mut best: Option<(f64, P2, BoundaryLabel)> = None;
        for &(sa, sb, label) in self.mesh.boundary_segments() {
            let (pa, pb) = (self.mesh.nodes()[sa], self.mesh.nodes()[sb]);
            if let Some((t, _)) = seg_seg_intersection(p, q, pa, pb, 1e-9) {
                if best.map_or(true, |(bt, _, _)| t < bt) {
                    best = Some((t, p.lerp(q, t.clamp(0.0, 1.0)), label));
                }
            }
        }
        best.map(|(_, pt, l)| (pt, l))
    }
}

fn bbox(pts: &[P2]) -> (P2, P2) {
    let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.z = lo.z.min(p.z);
        hi.x = hi.x.max(p.x);
        hi.z = hi.z.max(p.z);
    }
    (lo, hi)
}

/// Trace the streamline through `seed`: backward to the cutting edge,
/// forward to a free boundary, with fixed-step fourth-order integration
/// (step = mesh target / 4) and exact clipping at the boundary.
pub fn trace_streamline(field: &FlowField, seed: P2, mesh: &TriMesh) -> Result<Streamline> {
    let tracer = Tracer::new(mesh, field);
    let mut back = Vec::new();
    match tracer.march(seed, -1.0, &mut back) {
        TraceEnd::Boundary => {}
        TraceEnd::Stalled(steps) => return Err(Error::TraceStalled { steps }),
    }
    let mut fwd = Vec::new();
    match tracer.march(seed, 1.0, &mut fwd) {
        TraceEnd::Boundary => {}
        TraceEnd::Stalled(steps) => return Err(Error::TraceStalled { steps }),
    }
    let mut points: Vec<P2> = back.into_iter().rev().collect();
    points.push(seed);
    points.extend(fwd);
    points.dedup_by(|a, b| a.distance(*b) < 1e-12);
    let arc_length = points.windows(2).map(|w| w[0].distance(w[1])).sum();
    Ok(Streamline { points, arc_length })
}

/// One cell of a chip decomposition: a patch of chip area with its local
/// uncut chip thickness and equivalent oblique frame.
#[derive(Debug, Clone)]
pub struct ChipCell {
    pub h: f64,
    pub area: f64,
    pub frame: LocalFrame,
}

/// One elementary stretch of the engaged cutting edge.
#[derive(Debug, Clone)]
pub struct EdgeSegment {
    pub length: f64,
    pub midpoint: P2,
    pub frame: LocalFrame,
}

/// Discrete decomposition of the chip area and cutting edge used by the
/// force integral: area cells with thickness h_i and frame T40_i, and edge
/// segments with length dL_j and frame T40_j.
#[derive(Debug, Clone)]
pub struct ChipDecomposition {
    pub cells: Vec<ChipCell>,
    pub edge_segments: Vec<EdgeSegment>,
}

impl ChipDecomposition {
    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn edge_length(&self) -> f64 {
        self.edge_segments.iter().map(|e| e.length).sum()
    }
}

/// Curved chip decomposition: per-element streamline lengths as h_i, with
/// frames from the flow direction at each element centroid, and edge
/// segments along the meshed cutting edge with frames at their midpoints.
///
/// Streamlines are traced on the in-plane projection of the field tilted
/// onto the rake face; for an orthogonal tool that projection is the field
/// itself.
pub fn curved_decomposition(
    mesh: &TriMesh,
    field: &FlowField,
    tool: &ToolGeometry,
) -> Result<ChipDecomposition> {
    let n = tool.rake_normal();
    let orthogonal = (n - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-14;
    let trace_field = if orthogonal {
        field.clone()
    } else {
        let tilted = field
            .vectors()
            .iter()
            .map(|&g| {
                let v = crate::transforms::tilt_field(g, &n)?;
                P2::new(v.x, v.z)
                    .try_normalize(1e-12)
                    .ok_or(Error::GimbalSingularity)
            })
            .collect::<Result<Vec<_>>>()?;
        FlowField::from_vectors(tilted)?
    };

    let mut cells = Vec::with_capacity(mesh.triangles().len());
    for t in 0..mesh.triangles().len() {
        let centroid = mesh.triangle_centroid(t);
        let (g, _) = field.sample(mesh, centroid, t);
        let frame = LocalFrame::from_flow(g, &n)?;
        let line = trace_streamline(&trace_field, centroid, mesh)
            .map_err(|e| Error::ElementTrace { element: t, source: Box::new(e) })?;
        if !(line.arc_length > 0.0) {
            return Err(Error::InvalidChipThickness(line.arc_length));
        }
        cells.push(ChipCell { h: line.arc_length, area: mesh.triangle_area(t), frame });
    }

    let chain = mesh.cutting_edge_chain();
    let mut edge_segments = Vec::with_capacity(chain.len().saturating_sub(1));
    for w in chain.windows(2) {
        let (a, b) = (mesh.nodes()[w[0]], mesh.nodes()[w[1]]);
        let midpoint = (a + b) * 0.5;
        let hint = mesh.node_triangles(w[0]).first().copied().unwrap_or(0);
        let (g, _) = field.sample(mesh, midpoint, hint);
        edge_segments.push(EdgeSegment {
            length: a.distance(b),
            midpoint,
            frame: LocalFrame::from_flow(g, &n)?,
        });
    }
    Ok(ChipDecomposition { cells, edge_segments })
}

/// Colwell's equivalent-chord model: a single flow direction perpendicular
/// to the chord that connects the two extremities of the engaged cutting
/// edge, with the force magnitude set by the total chip area.
#[derive(Debug, Clone)]
pub struct ColwellModel {
    pub chord: [P2; 2],
    /// Unit flow direction, perpendicular to the chord, oriented from the
    /// cutting edge into the chip area.
    pub flow_direction: P2,
    pub area: f64,
    pub edge_length: f64,
    /// Equivalent uncut chip thickness, area / chord length.
    pub equivalent_h: f64,
    pub frame: LocalFrame,
}

pub fn colwell_model(region: &UncutChipRegion, tool: &ToolGeometry) -> Result<ColwellModel> {
    let chain = region.cutting_edge_polyline();
    if chain.len() < 2 {
        return Err(Error::DegenerateRegion("cutting edge too short for a chord".into()));
    }
    let (e0, e1) = (chain[0], *chain.last().unwrap());
    let chord_vec = e1 - e0;
    let chord_len = chord_vec.norm();
    if chord_len < 1e-12 {
        return Err(Error::DegenerateRegion("chord endpoints coincide".into()));
    }
    let mut flow = chord_vec.perp().normalize();
    // Orient from the edge into the chip area: align with the average
    // inward normal of the engaged edge (the boundary is counter-clockwise,
    // so the inward normal of a segment is its left perpendicular).
    let mut inward = P2::new(0.0, 0.0);
    for w in chain.windows(2) {
        inward = inward + (w[1] - w[0]).perp();
    }
    if flow.dot(inward) < 0.0 {
        flow = -flow;
    }
    let frame = LocalFrame::from_flow(flow, &tool.rake_normal())?;
    Ok(ColwellModel {
        chord: [e0, e1],
        flow_direction: flow,
        area: region.area(),
        edge_length: region.cutting_edge_length(),
        equivalent_h: region.area() / chord_len,
        frame,
    })
}

/// One straight Young segment, perpendicular to the local cutting edge.
#[derive(Debug, Clone)]
pub struct YoungSegment {
    pub seed: P2,
    pub end: P2,
    pub h: f64,
    pub area: f64,
    /// Set when the segment was truncated against an earlier one.
    pub chopped: bool,
    pub frame: LocalFrame,
}

/// Young's straight-segment decomposition with the chopping rule for
/// self-intersections.
#[derive(Debug, Clone)]
pub struct YoungDecomposition {
    pub segments: Vec<YoungSegment>,
    pub edge_segments: Vec<EdgeSegment>,
}

impl YoungDecomposition {
    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.area).sum()
    }

    pub fn chopped_count(&self) -> usize {
        self.segments.iter().filter(|s| s.chopped).count()
    }

    /// View the segments as chip cells for the shared force integral.
    pub fn to_chip_decomposition(&self) -> ChipDecomposition {
        ChipDecomposition {
            cells: self
                .segments
                .iter()
                .map(|s| ChipCell { h: s.h, area: s.area, frame: s.frame })
                .collect(),
            edge_segments: self.edge_segments.clone(),
        }
    }
}

/// Arc-length resampling of a polyline; returns points and unit tangents.
fn resample_polyline(chain: &[P2], at: &[f64]) -> Vec<(P2, P2)> {
    let mut cum = vec![0.0];
    for w in chain.windows(2) {
        cum.push(cum.last().unwrap() + w[0].distance(w[1]));
    }
    let total = *cum.last().unwrap();
    at.iter()
        .map(|&s| {
            let s = (s * total).clamp(0.0, total);
            let k = match cum.binary_search_by(|c| c.total_cmp(&s)) {
                Ok(k) => k.min(chain.len() - 2),
                Err(k) => (k - 1).min(chain.len() - 2),
            };
            let seg_len = (cum[k + 1] - cum[k]).max(1e-300);
            let t = (s - cum[k]) / seg_len;
            (chain[k].lerp(chain[k + 1], t), (chain[k + 1] - chain[k]).normalize())
        })
        .collect()
}

pub fn young_decomposition(
    region: &UncutChipRegion,
    n_segments: usize,
    tool: &ToolGeometry,
) -> Result<YoungDecomposition> {
    if n_segments < 8 {
        return Err(Error::InvalidGeometry("Young decomposition needs >= 8 segments".into()));
    }
    let chain = region.cutting_edge_polyline();
    let n = tool.rake_normal();
    let seeds: Vec<f64> = (0..n_segments).map(|k| (k as f64 + 0.5) / n_segments as f64).collect();
    let samples = resample_polyline(&chain, &seeds);

    // The boundary is counter-clockwise, so the inward normal of a boundary
    // tangent is its left perpendicular.
    let max_len = 4.0 * region.diameter();
    let mut segments: Vec<YoungSegment> = Vec::with_capacity(n_segments);
    for &(seed, tangent) in &samples {
        let dir = tangent.perp();
        let far = seed + dir * max_len;
        // Nearest boundary crossing, ignoring hits at the seed itself.
        let mut best_t = f64::INFINITY;
        for (a, b, _) in region.segments() {
            if let Some((t, _)) = seg_seg_intersection(seed, far, a, b, 1e-9) {
                if t > 1e-9 / max_len && t < best_t {
                    best_t = t;
                }
            }
        }
        // Chop against previously placed segments.
        let mut chopped = false;
        for prev in &segments {
            if let Some((t, _)) = seg_seg_intersection(seed, far, prev.seed, prev.end, 1e-12) {
                if t > 1e-12 && t < best_t {
                    best_t = t;
                    chopped = true;
                }
            }
        }
        if !best_t.is_finite() {
            return Err(Error::DegenerateRegion("Young segment found no far boundary".into()));
        }
        let end = seed + dir * (max_len * best_t);
        let frame = LocalFrame::from_flow(dir, &n)?;
        segments.push(YoungSegment {
            seed,
            end,
            h: seed.distance(end),
            area: 0.0,
            chopped,
            frame,
        });
    }

    // Area apportionment: the chip area is split into strips owned by each
    // segment, a strip being the set of points whose nearest point on the
    // cutting edge falls in the segment's arc-length span. Computed exactly
    // by recursively subdividing an ear-clip triangulation of the region.
    let areas = apportion_areas(region, &chain, n_segments);
    for (s, a) in segments.iter_mut().zip(areas) {
        s.area = a;
    }

    // Edge segments for the ploughing term, one per boundary polyline piece.
    let mut edge_segments = Vec::new();
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        let dir = (b - a).normalize().perp();
        edge_segments.push(EdgeSegment {
            length: a.distance(b),
            midpoint: (a + b) * 0.5,
            frame: LocalFrame::from_flow(dir, &n)?,
        });
    }
    Ok(YoungDecomposition { segments, edge_segments })
}

/// Exact-area strip ownership: ear-clip the polygon, subdivide triangles
/// until small against the edge bins, assign each piece by the arc-length
/// of the nearest edge foot of its centroid.
fn apportion_areas(region: &UncutChipRegion, chain: &[P2], n_segments: usize) -> Vec<f64> {
    let mut cum = vec![0.0];
    for w in chain.windows(2) {
        cum.push(cum.last().unwrap() + w[0].distance(w[1]));
    }
    let total_len = *cum.last().unwrap();
    let bin_of = |p: P2| -> usize {
        let mut best = (f64::INFINITY, 0.0);
        for (k, w) in chain.windows(2).enumerate() {
            let (d2, t) = point_segment_distance_sq(p, w[0], w[1]);
            if d2 < best.0 {
                best = (d2, cum[k] + t * (cum[k + 1] - cum[k]));
            }
        }
        (((best.1 / total_len) * n_segments as f64) as usize).min(n_segments - 1)
    };

    let max_diam = (total_len / n_segments as f64).max(region.diameter() / 64.0) * 0.5;
    let mut areas = vec![0.0; n_segments];
    let mut stack: Vec<[P2; 3]> = ear_clip(region.points());
    while let Some(tri) = stack.pop() {
        let [a, b, c] = tri;
        let d = a.distance(b).max(b.distance(c)).max(c.distance(a));
        let area = 0.5 * (b - a).cross(c - a).abs();
        if area < 1e-300 {
            continue;
        }
        if d > max_diam {
            // Split the longest edge at its midpoint.
            let (p, q, r) = if a.distance(b) >= b.distance(c) && a.distance(b) >= c.distance(a) {
                (a, b, c)
            } else if b.distance(c) >= c.distance(a) {
                (b, c, a)
            } else {
                (c, a, b)
            };
            let m = (p + q) * 0.5;
            stack.push([p, m, r]);
            stack.push([m, q, r]);
        } else {
            areas[bin_of((a + b + c) * (1.0 / 3.0))] += area;
        }
    }
    areas
}

/// Ear clipping for a simple polygon (any orientation).
fn ear_clip(points: &[P2]) -> Vec<[P2; 3]> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    // Ensure counter-clockwise.
    let mut signed = 0.0;
    for i in 0..points.len() {
        signed += points[i].cross(points[(i + 1) % points.len()]);
    }
    if signed < 0.0 {
        idx.reverse();
    }
    let mut tris = Vec::new();
    let mut guard = 0usize;
    while idx.len() > 3 && guard < points.len() * points.len() * 4 {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for i in 0..n {
            let (pi, ci, ni) = (idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]);
            let (a, b, c) = (points[pi], points[ci], points[ni]);
            if (b - a).cross(c - b) <= 1e-14 {
                continue; // reflex or collinear
            }
            // No other vertex inside the candidate ear.
            let mut ok = true;
            for &j in &idx {
                if j == pi || j == ci || j == ni {
                    continue;
                }
                let p = points[j];
                let s1 = (b - a).cross(p - a);
                let s2 = (c - b).cross(p - b);
                let s3 = (a - c).cross(p - c);
                if s1 >= -1e-14 && s2 >= -1e-14 && s3 >= -1e-14 {
                    ok = false;
                    break;
                }
            }
            if ok {
                tris.push([a, b, c]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        tris.push([points[idx[0]], points[idx[1]], points[idx[2]]]);
    }
    tris
}
