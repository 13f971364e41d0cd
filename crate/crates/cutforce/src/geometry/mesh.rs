//! Conforming triangulation of the uncut chip region.
//!
//! Bowyer-Watson point insertion over boundary samples plus an interior
//! hex-grid point set, followed by boundary-edge recovery, outside-triangle
//! removal by flood fill across non-boundary edges, and Laplacian smoothing
//! of interior nodes. The polygon boundary is reproduced exactly, so the
//! summed element area equals the region's shoelace area to rounding.

use std::collections::HashMap;

use super::{BoundaryLabel, UncutChipRegion};
use crate::error::{Error, Result};
use crate::point2::P2;

/// Triangulated uncut chip region.
#[derive(Debug, Clone)]
pub struct TriMesh {
    nodes: Vec<P2>,
    triangles: Vec<[usize; 3]>,
    /// Neighbor across the edge (v[k], v[k+1]) of each triangle.
    neighbors: Vec<[Option<usize>; 3]>,
    /// Sorted indices of nodes on cutting-edge boundary segments.
    edge_nodes: Vec<usize>,
    is_edge_node: Vec<bool>,
    is_boundary_node: Vec<bool>,
    /// Boundary ring as (from-node, to-node, label), in polygon order.
    boundary_segments: Vec<(usize, usize, BoundaryLabel)>,
    /// Effective target edge length used for this mesh (mm).
    target: f64,
    node_tris: Vec<Vec<usize>>,
    grid: LocatorGrid,
}

/// Uniform bins of triangle indices for robust point location: the greedy
/// adjacency walk can exit through the boundary of a non-convex mesh even
/// when the query point is inside.
#[derive(Debug, Clone)]
struct LocatorGrid {
    lo: P2,
    cell: f64,
    nx: usize,
    nz: usize,
    bins: Vec<Vec<usize>>,
}

impl LocatorGrid {
    fn build(nodes: &[P2], triangles: &[[usize; 3]], target: f64) -> Self {
        let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in nodes {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        let cell = (2.0 * target).max(1e-9);
        let nx = (((hi.x - lo.x) / cell).ceil() as usize + 1).max(1);
        let nz = (((hi.z - lo.z) / cell).ceil() as usize + 1).max(1);
        let mut bins = vec![Vec::new(); nx * nz];
        for (t, tri) in triangles.iter().enumerate() {
            let (mut tlo, mut thi) = (nodes[tri[0]], nodes[tri[0]]);
            for &v in &tri[1..] {
                tlo.x = tlo.x.min(nodes[v].x);
                tlo.z = tlo.z.min(nodes[v].z);
                thi.x = thi.x.max(nodes[v].x);
                thi.z = thi.z.max(nodes[v].z);
            }
            let i0 = (((tlo.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((thi.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((tlo.z - lo.z) / cell).floor() as isize).clamp(0, nz as isize - 1) as usize;
            let j1 = (((thi.z - lo.z) / cell).floor() as isize).clamp(0, nz as isize - 1) as usize;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    bins[i * nz + j].push(t);
                }
            }
        }
        Self { lo, cell, nx, nz, bins }
    }

    fn candidates(&self, p: P2) -> &[usize] {
        let i = (((p.x - self.lo.x) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let j = (((p.z - self.lo.z) / self.cell).floor() as isize).clamp(0, self.nz as isize - 1) as usize;
        &self.bins[i * self.nz + j]
    }
}

impl TriMesh {
    pub fn nodes(&self) -> &[P2] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge_nodes(&self) -> &[usize] {
        &self.edge_nodes
    }

    pub fn is_edge_node(&self, node: usize) -> bool {
        self.is_edge_node[node]
    }

    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.is_boundary_node[node]
    }

    pub fn boundary_segments(&self) -> &[(usize, usize, BoundaryLabel)] {
        &self.boundary_segments
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn node_triangles(&self, node: usize) -> &[usize] {
        &self.node_tris[node]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn triangle_centroid(&self, t: usize) -> P2 {
        let [a, b, c] = self.triangles[t];
        (self.nodes[a] + self.nodes[b] + self.nodes[c]) * (1.0 / 3.0)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        let mut min = f64::INFINITY;
        for tri in &self.triangles {
            for k in 0..3 {
                let a = self.nodes[tri[k]];
                let b = self.nodes[tri[(k + 1) % 3]];
                let c = self.nodes[tri[(k + 2) % 3]];
                let u = (b - a).normalize();
                let v = (c - a).normalize();
                min = min.min(u.dot(v).clamp(-1.0, 1.0).acos());
            }
        }
        min
    }

    /// Ordered node chain along the cutting edge, from one end to the other.
    pub fn cutting_edge_chain(&self) -> Vec<usize> {
        let cut: Vec<(usize, usize)> = self
            .boundary_segments
            .iter()
            .filter(|(_, _, l)| *l == BoundaryLabel::CuttingEdge)
            .map(|&(a, b, _)| (a, b))
            .collect();
        if cut.is_empty() {
            return Vec::new();
        }
        let succ: HashMap<usize, usize> = cut.iter().copied().collect();
        let mut start = cut[0].0;
        // Walk back to the run start (a node that is no segment's target).
        let targets: std::collections::HashSet<usize> = cut.iter().map(|&(_, b)| b).collect();
        for &(a, _) in &cut {
            if !targets.contains(&a) {
                start = a;
                break;
            }
        }
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(&next) = succ.get(&cur) {
            chain.push(next);
            cur = next;
            if cur == start || chain.len() > cut.len() + 1 {
                break;
            }
        }
        chain
    }

    /// Barycentric coordinates of `p` in triangle `t`.
    pub fn barycentric(&self, t: usize, p: P2) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        let total = signed_area(pa, pb, pc);
        [
            signed_area(p, pb, pc) / total,
            signed_area(pa, p, pc) / total,
            signed_area(pa, pb, p) / total,
        ]
    }

    /// Walk from `hint` towards `p`, falling back to the grid locator when
    /// the walk leaves the mesh (which a non-convex boundary allows even
    /// for interior points). Returns the containing triangle, or the last
    /// triangle and its local boundary-edge index when `p` lies outside.
    pub fn locate(&self, p: P2, hint: usize) -> Walk {
        let mut t = hint.min(self.triangles.len() - 1);
        for _ in 0..4 * self.triangles.len() + 16 {
            let bary = self.barycentric(t, p);
            let mut worst = 0;
            for k in 1..3 {
                if bary[k] < bary[worst] {
                    worst = k;
                }
            }
            if bary[worst] >= -1e-12 {
                return Walk::Inside(t, bary);
            }
            // Exit edge is opposite the most negative vertex.
            let edge = (worst + 1) % 3;
            match self.neighbors[t][edge] {
                Some(n) => t = n,
                None => {
                    return match self.locate_global(p) {
                        Some((tg, bary)) => Walk::Inside(tg, bary),
                        None => Walk::Outside(t, edge),
                    };
                }
            }
        }
        match self.locate_global(p) {
            Some((tg, bary)) => Walk::Inside(tg, bary),
            None => Walk::Stuck(t),
        }
    }

    /// Exact containment query through the grid index.
    pub fn locate_global(&self, p: P2) -> Option<(usize, [f64; 3])> {
        for &t in self.grid.candidates(p) {
            let bary = self.barycentric(t, p);
            if bary.iter().all(|&b| b >= -1e-12) {
                return Some((t, bary));
            }
        }
        None
    }

    /// Assemble a mesh from parts (used by tests and custom regions):
    /// `boundary_ring` lists boundary nodes in polygon order with the label
    /// of the segment that follows each node.
    pub fn from_parts(
        nodes: Vec<P2>,
        triangles: Vec<[usize; 3]>,
        boundary_ring: Vec<(usize, BoundaryLabel)>,
        target: f64,
    ) -> Result<TriMesh> {
        build_mesh(nodes, triangles, &boundary_ring, target)
    }
}

/// Result of a point-location walk.
#[derive(Debug, Clone, Copy)]
pub enum Walk {
    /// Containing triangle and its barycentric coordinates.
    Inside(usize, [f64; 3]),
    /// Last triangle before leaving the mesh and the local edge crossed.
    Outside(usize, usize),
    Stuck(usize),
}

fn signed_area(a: P2, b: P2, c: P2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Conforming triangulation with boundary labels preserved.
///
/// `target_edge_length` is clamped internally by the region's mean
/// thickness so thin chips still mesh with sound aspect ratios.
pub fn triangulate(region: &UncutChipRegion, target_edge_length: f64) -> Result<TriMesh> {
    if !(target_edge_length > 0.0) {
        return Err(Error::MeshFailure("target edge length must be positive".into()));
    }
    let spacing = target_edge_length.min(region.mean_thickness());

    // Boundary ring: subdivide each polygon segment to the spacing. The
    // interior subdivision points get a small deterministic jitter along
    // the segment (staying exactly on the boundary): the previous-pass
    // curve is a translated copy of the current edge, and unjittered
    // samples of parallel offset lines form exactly cocircular quadruples
    // that break the incremental Delaunay insertion.
    let mut ring: Vec<(P2, BoundaryLabel)> = Vec::new();
    for (si, (a, b, label)) in region.segments().enumerate() {
        let n = (a.distance(b) / spacing).ceil().max(1.0) as usize;
        for i in 0..n {
            let mut t = i as f64 / n as f64;
            if i > 0 {
                t += hash_jitter(si, i, 2) * 0.3 / n as f64;
            }
            ring.push((a.lerp(b, t), label));
        }
    }

    // Interior points on a hex grid, culled near the boundary, with a tiny
    // deterministic jitter to break cocircular quadruples.
    let (lo, hi) = region.bbox();
    let dy = spacing * 0.8660254037844386;
    let mut interior: Vec<P2> = Vec::new();
    let mut row = 0usize;
    let mut z = lo.z + 0.5 * dy;
    while z < hi.z {
        let offset = if row % 2 == 0 { 0.0 } else { 0.5 * spacing };
        let mut col = 0usize;
        let mut x = lo.x + 0.5 * spacing + offset;
        while x < hi.x {
            let jx = hash_jitter(row, col, 0) * 0.06 * spacing;
            let jz = hash_jitter(row, col, 1) * 0.06 * spacing;
            let p = P2::new(x + jx, z + jz);
            if region.contains(p) && region.distance_to_boundary(p) > 0.6 * spacing {
                interior.push(p);
            }
            x += spacing;
            col += 1;
        }
        z += dy;
        row += 1;
    }

    // Insert points, recover boundary edges, split fully-constrained
    // triangles, and refine low-quality triangles at their circumcenters,
    // re-running the insertion whenever new points are needed.
    const MAX_ROUNDS: usize = 40;
    let min_boundary_len = spacing / 8.0;
    let mut extra: Vec<P2> = Vec::new();
    let push_extra = |extra: &mut Vec<P2>, p: P2| -> bool {
        if extra.iter().all(|q| q.distance(p) > 1e-9) {
            extra.push(p);
            true
        } else {
            false
        }
    };
    let mut best: Option<TriMesh> = None;
    for round in 0..MAX_ROUNDS {
        let points: Vec<P2> = ring
            .iter()
            .map(|&(p, _)| p)
            .chain(interior.iter().copied())
            .chain(extra.iter().copied())
            .collect();
        let n_ring = ring.len();
        let tris = bowyer_watson_robust(&points)?;

        // Boundary edges present?
        let mut edge_set: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
        for t in &tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edge_set.insert((a.min(b), a.max(b)));
            }
        }
        let mut missing = Vec::new();
        for i in 0..n_ring {
            let j = (i + 1) % n_ring;
            if !edge_set.contains(&(i.min(j), i.max(j))) {
                missing.push(i);
            }
        }
        if !missing.is_empty() {
            // Split the missing boundary segments.
            for &i in missing.iter().rev() {
                let j = (i + 1) % n_ring;
                let mid = ring[i].0.lerp(ring[j].0, 0.5);
                ring.insert(i + 1, (mid, ring[i].1));
            }
            continue;
        }

        // Drop triangles outside the region: flood from the convex hull
        // inwards across non-boundary edges.
        let tris = discard_outside(tris, n_ring);
        if tris.is_empty() {
            return Err(Error::MeshFailure("no interior triangles".into()));
        }

        // Split triangles whose three corners all sit on the cutting edge:
        // they would carry an identically zero displacement gradient.
        let on_cut: Vec<bool> = {
            let mut f = vec![false; points.len()];
            for i in 0..n_ring {
                let prev = (i + n_ring - 1) % n_ring;
                if ring[i].1 == BoundaryLabel::CuttingEdge || ring[prev].1 == BoundaryLabel::CuttingEdge {
                    f[i] = true;
                }
            }
            f
        };
        let mut split_any = false;
        for t in &tris {
            if t.iter().all(|&v| on_cut[v]) {
                let c = (points[t[0]] + points[t[1]] + points[t[2]]) * (1.0 / 3.0);
                split_any |= push_extra(&mut extra, c);
            }
        }
        if split_any && round + 4 < MAX_ROUNDS {
            continue;
        }

        let boundary_ring: Vec<(usize, BoundaryLabel)> =
            (0..n_ring).map(|i| (i, ring[i].1)).collect();
        let mut mesh = build_mesh(points, tris, &boundary_ring, spacing)?;
        smooth(&mut mesh, 4);
        let covered = mesh.total_area();
        if ((covered - region.area()) / region.area()).abs() > 5e-3 {
            return Err(Error::MeshFailure(format!(
                "mesh area {covered} differs from region area {}",
                region.area()
            )));
        }

        // Quality refinement: split triangles below the angle bound at
        // their circumcenters; encroaching circumcenters split the nearest
        // boundary segment instead.
        let quality = 20.0f64.to_radians();
        let mut refined = false;
        if round + 2 < MAX_ROUNDS {
            for (t, tri) in mesh.triangles().iter().enumerate() {
                if tri_min_angle(&mesh, t) >= quality {
                    continue;
                }
                let [a, b, c] = [mesh.nodes()[tri[0]], mesh.nodes()[tri[1]], mesh.nodes()[tri[2]]];
                let cc = circumcenter(a, b, c);
                if region.contains(cc) && region.distance_to_boundary(cc) > 0.25 * spacing {
                    refined |= push_extra(&mut extra, cc);
                } else {
                    // Split the closest boundary ring segment, unless it is
                    // already short (sharp input corners stay as they are).
                    let centroid = (a + b + c) * (1.0 / 3.0);
                    let mut best_seg = (f64::INFINITY, usize::MAX);
                    for i in 0..ring.len() {
                        let j = (i + 1) % ring.len();
                        let (d2, _) =
                            crate::point2::point_segment_distance_sq(centroid, ring[i].0, ring[j].0);
                        if d2 < best_seg.0 {
                            best_seg = (d2, i);
                        }
                    }
                    let i = best_seg.1;
                    let j = (i + 1) % ring.len();
                    if ring[i].0.distance(ring[j].0) > min_boundary_len {
                        let mid = ring[i].0.lerp(ring[j].0, 0.5);
                        ring.insert(i + 1, (mid, ring[i].1));
                        refined = true;
                    }
                }
            }
        }
        if refined {
            best = Some(mesh);
            continue;
        }
        return Ok(mesh);
    }
    best.ok_or_else(|| Error::MeshFailure("boundary recovery did not converge".into()))
}

fn tri_min_angle(mesh: &TriMesh, t: usize) -> f64 {
    let tri = mesh.triangles()[t];
    let mut min = f64::INFINITY;
    for k in 0..3 {
        let a = mesh.nodes()[tri[k]];
        let b = mesh.nodes()[tri[(k + 1) % 3]];
        let c = mesh.nodes()[tri[(k + 2) % 3]];
        let u = (b - a).normalize();
        let v = (c - a).normalize();
        min = min.min(u.dot(v).clamp(-1.0, 1.0).acos());
    }
    min
}

fn circumcenter(a: P2, b: P2, c: P2) -> P2 {
    let d = 2.0 * ((b - a).cross(c - a));
    let a2 = a.norm_squared();
    let b2 = b.norm_squared();
    let c2 = c.norm_squared();
    P2::new(
        (a2 * (b.z - c.z) + b2 * (c.z - a.z) + c2 * (a.z - b.z)) / d,
        (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
    )
}


fn hash_jitter(a: usize, b: usize, salt: u64) -> f64 {
    let mut h = (a as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ (b as u64).wrapping_mul(0xbf58476d1ce4e5b9) ^ salt.wrapping_mul(0x94d049bb133111eb);
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

struct BwTri {
    v: [usize; 3],
    nb: [Option<usize>; 3],
    alive: bool,
}

/// Incremental Delaunay insertion with retries over the insertion order:
/// long collinear or cocircular runs can defeat the epsilon predicates and
/// leave an exactly degenerate triangle, which a reshuffled order avoids.
fn bowyer_watson_robust(points: &[P2]) -> Result<Vec<[usize; 3]>> {
    let span = {
        let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        (hi - lo).norm().max(1e-12)
    };
    let mut last_err = None;
    for seed in 0..4u64 {
        let tris = bowyer_watson(points, seed)?;
        let degenerate = tris.iter().any(|t| {
            signed_area(points[t[0]], points[t[1]], points[t[2]]).abs() < 1e-16 * span * span
        });
        if !degenerate {
            return Ok(tris);
        }
        last_err = Some(Error::MeshFailure(format!(
            "degenerate triangle with insertion seed {seed}"
        )));
    }
    Err(last_err.unwrap())
}

/// Delaunay triangulation by incremental insertion in a seed-dependent
/// deterministic order. Point indices are preserved; the three
/// super-triangle vertices are appended last and all triangles touching
/// them are removed at the end.
fn bowyer_watson(points: &[P2], seed: u64) -> Result<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::MeshFailure("fewer than 3 points".into()));
    }
    // Deterministic shuffle of the insertion order.
    let mut order: Vec<usize> = (0..n).collect();
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x2545f4914f6cdd1d);
    for i in (1..n).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        order.swap(i, (state % (i as u64 + 1)) as usize);
    }
    let mut lo = P2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.z = lo.z.min(p.z);
        hi.x = hi.x.max(p.x);
        hi.z = hi.z.max(p.z);
    }
    let span = (hi - lo).norm().max(1e-9);
    let mid = (lo + hi) * 0.5;
    let mut pts = points.to_vec();
    pts.push(mid + P2::new(-20.0 * span, -12.0 * span));
    pts.push(mid + P2::new(20.0 * span, -12.0 * span));
    pts.push(mid + P2::new(0.0, 24.0 * span));

    let mut tris: Vec<BwTri> = vec![BwTri { v: [n, n + 1, n + 2], nb: [None; 3], alive: true }];
    let mut last_alive = 0usize;

    for &p_idx in &order {
        let p = pts[p_idx];
        // Find one triangle whose circumcircle contains p, walking first.
        let t0 = walk_to(&pts, &tris, last_alive, p).ok_or_else(|| {
            Error::MeshFailure("point location failed during insertion".into())
        })?;
        // Grow the cavity by BFS over neighbors.
        let mut cavity = vec![t0];
        let mut seen = vec![false; tris.len()];
        seen[t0] = true;
        let mut stack = vec![t0];
        while let Some(t) = stack.pop() {
            for k in 0..3 {
                if let Some(nb) = tris[t].nb[k] {
                    if !seen[nb] && tris[nb].alive && in_circumcircle(&pts, &tris[nb].v, p) {
                        seen[nb] = true;
                        cavity.push(nb);
                        stack.push(nb);
                    }
                }
            }
        }
        // Cavity boundary: edges whose neighbor is not in the cavity.
        let in_cavity = |t: Option<usize>, seen: &[bool]| t.map_or(false, |t| seen[t]);
        let mut boundary: Vec<(usize, usize, Option<usize>)> = Vec::new(); // (a, b, outer)
        for &t in &cavity {
            for k in 0..3 {
                let nb = tris[t].nb[k];
                if !in_cavity(nb, &seen) {
                    boundary.push((tris[t].v[k], tris[t].v[(k + 1) % 3], nb));
                }
            }
        }
        for &t in &cavity {
            tris[t].alive = false;
        }
        // Fan of new triangles around p. Triangle i is [a, b, p]; its edge 1
        // is (b, p) and edge 2 is (p, a), so fans link start-to-end.
        let first_new = tris.len();
        let mut starts_at: HashMap<usize, usize> = HashMap::new();
        let mut ends_at: HashMap<usize, usize> = HashMap::new();
        for (i, &(a, b, outer)) in boundary.iter().enumerate() {
            let idx = first_new + i;
            tris.push(BwTri { v: [a, b, p_idx], nb: [outer, None, None], alive: true });
            if let Some(o) = outer {
                for k in 0..3 {
                    let (oa, ob) = (tris[o].v[k], tris[o].v[(k + 1) % 3]);
                    if (oa, ob) == (b, a) {
                        tris[o].nb[k] = Some(idx);
                    }
                }
            }
            starts_at.insert(a, idx);
            ends_at.insert(b, idx);
        }
        for (i, &(a, b, _)) in boundary.iter().enumerate() {
            let idx = first_new + i;
            tris[idx].nb[1] = starts_at.get(&b).copied();
            tris[idx].nb[2] = ends_at.get(&a).copied();
        }
        last_alive = first_new;
    }

    let mut out = Vec::new();
    for t in &tris {
        if t.alive && t.v.iter().all(|&v| v < n) {
            let (a, b, c) = (t.v[0], t.v[1], t.v[2]);
            if signed_area(pts[a], pts[b], pts[c]) > 0.0 {
                out.push([a, b, c]);
            } else {
                out.push([a, c, b]);
            }
        }
    }
    Ok(out)
}

fn walk_to(pts: &[P2], tris: &[BwTri], start: usize, p: P2) -> Option<usize> {
    let mut t = start;
    if !tris[t].alive {
        t = tris.iter().rposition(|t| t.alive)?;
    }
    for _ in 0..8 * tris.len() + 32 {
        if in_circumcircle(pts, &tris[t].v, p) {
            return Some(t);
        }
        // Move across the edge that separates p from the triangle.
        let v = tris[t].v;
        let mut moved = false;
        for k in 0..3 {
            let (a, b) = (pts[v[k]], pts[v[(k + 1) % 3]]);
            if (b - a).cross(p - a) < -1e-14 {
                if let Some(nb) = tris[t].nb[k] {
                    if tris[nb].alive {
                        t = nb;
                        moved = true;
                        break;
                    }
                }
            }
        }
        if !moved {
            // Containing triangle reached; circumcircle must contain p.
            return Some(t);
        }
    }
    // Fallback: exhaustive scan.
    tris.iter().position(|t| t.alive && in_circumcircle(pts, &t.v, p))
}

fn in_circumcircle(pts: &[P2], v: &[usize; 3], p: P2) -> bool {
    // Orient the triangle counter-clockwise before the determinant test.
    let (mut a, mut b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
    if signed_area(a, b, c) < 0.0 {
        std::mem::swap(&mut a, &mut b);
    }
    let (ax, az) = (a.x - p.x, a.z - p.z);
    let (bx, bz) = (b.x - p.x, b.z - p.z);
    let (cx, cz) = (c.x - p.x, c.z - p.z);
    let det = (ax * ax + az * az) * (bx * cz - cx * bz)
        - (bx * bx + bz * bz) * (ax * cz - cx * az)
        + (cx * cx + cz * cz) * (ax * bz - bx * az);
    let scale = (ax * ax + az * az).max(bx * bx + bz * bz).max(cx * cx + cz * cz);
    det > 1e-13 * scale * scale.sqrt()
}

/// Remove triangles outside the polygon: flood fill from convex-hull edges
/// inwards, blocked by boundary-ring edges.
fn discard_outside(tris: Vec<[usize; 3]>, n_ring: usize) -> Vec<[usize; 3]> {
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edge_map.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    let is_ring_edge = |a: usize, b: usize| {
        if a < n_ring && b < n_ring {
            let d = if a < b { b - a } else { a - b };
            d == 1 || d == n_ring - 1
        } else {
            false
        }
    };
    let mut outside = vec![false; tris.len()];
    let mut stack = Vec::new();
    // Seeds: triangles with a hull edge (no neighbor) that is not a ring edge.
    for (&(a, b), ts) in &edge_map {
        if ts.len() == 1 && !is_ring_edge(a, b) {
            if !outside[ts[0]] {
                outside[ts[0]] = true;
                stack.push(ts[0]);
            }
        }
    }
    while let Some(t) = stack.pop() {
        for k in 0..3 {
            let (a, b) = (tris[t][k], tris[t][(k + 1) % 3]);
            if is_ring_edge(a, b) {
                continue;
            }
            for &nb in &edge_map[&(a.min(b), a.max(b))] {
                if nb != t && !outside[nb] {
                    outside[nb] = true;
                    stack.push(nb);
                }
            }
        }
    }
    tris.into_iter()
        .enumerate()
        .filter(|&(i, _)| !outside[i])
        .map(|(_, t)| t)
        .collect()
}

fn build_mesh(
    nodes: Vec<P2>,
    triangles: Vec<[usize; 3]>,
    boundary_ring: &[(usize, BoundaryLabel)],
    target: f64,
) -> Result<TriMesh> {
    let n = nodes.len();
    let mut triangles = triangles;
    for t in &mut triangles {
        if signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
        if signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) <= 0.0 {
            return Err(Error::MeshFailure("degenerate triangle".into()));
        }
    }
    // Neighbors.
    let mut edge_map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (i, t) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            edge_map.entry((a.min(b), a.max(b))).or_default().push((i, k));
        }
    }
    let mut neighbors = vec![[None; 3]; triangles.len()];
    for list in edge_map.values() {
        if list.len() == 2 {
            let (t0, k0) = list[0];
            let (t1, k1) = list[1];
            neighbors[t0][k0] = Some(t1);
            neighbors[t1][k1] = Some(t0);
        } else if list.len() > 2 {
            return Err(Error::MeshFailure("non-manifold edge".into()));
        }
    }
    let nr = boundary_ring.len();
    let mut boundary_segments = Vec::with_capacity(nr);
    for i in 0..nr {
        let (a, la) = boundary_ring[i];
        let (b, _) = boundary_ring[(i + 1) % nr];
        boundary_segments.push((a, b, la));
    }
    let mut is_boundary_node = vec![false; n];
    let mut is_edge_node = vec![false; n];
    for &(a, b, l) in &boundary_segments {
        is_boundary_node[a] = true;
        is_boundary_node[b] = true;
        if l == BoundaryLabel::CuttingEdge {
            is_edge_node[a] = true;
            is_edge_node[b] = true;
        }
    }
    let edge_nodes: Vec<usize> = (0..n).filter(|&i| is_edge_node[i]).collect();
    let mut node_tris = vec![Vec::new(); n];
    for (i, t) in triangles.iter().enumerate() {
        for &v in t {
            node_tris[v].push(i);
        }
    }
    let grid = LocatorGrid::build(&nodes, &triangles, target);
    Ok(TriMesh {
        nodes,
        triangles,
        neighbors,
        edge_nodes,
        is_edge_node,
        is_boundary_node,
        boundary_segments,
        target,
        node_tris,
        grid,
    })
}

/// Laplacian smoothing of interior nodes; moves are rejected when they
/// would invert or nearly collapse an incident triangle.
fn smooth(mesh: &mut TriMesh, sweeps: usize) {
    let n = mesh.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if !adj[a].contains(&b) {
                adj[a].push(b);
            }
            if !adj[b].contains(&a) {
                adj[b].push(a);
            }
        }
    }
    for _ in 0..sweeps {
        for i in 0..n {
            if mesh.is_boundary_node[i] || adj[i].is_empty() {
                continue;
            }
            let mut avg = P2::new(0.0, 0.0);
            for &j in &adj[i] {
                avg = avg + mesh.nodes[j];
            }
            avg = avg * (1.0 / adj[i].len() as f64);
            let old = mesh.nodes[i];
            mesh.nodes[i] = avg;
            let ok = mesh.node_tris[i].iter().all(|&t| mesh.triangle_area(t) > 1e-14);
            if !ok {
                mesh.nodes[i] = old;
            }
        }
    }
    // Node positions moved; the locator bins are stale.
    mesh.grid = LocatorGrid::build(&mesh.nodes, &mesh.triangles, mesh.target);
}
