//! Compressed-plate finite element model over the uncut chip mesh.
//!
//! The chip area is treated as a plate of uniform thickness compressed
//! normal to the reference plane. Each triangle becomes a wedge element
//! with eight degrees of freedom: in-plane displacements (U, W) at the
//! three corners plus a prescribed uniform compression (V at the bottom
//! and top layer). In-plane displacements are pinned along the cutting
//! edge, the compression drives a Poisson expansion away from it, and the
//! normalized gradient of the displacement magnitude yields the flow
//! field along which the curved chip segments run. Only the direction of
//! that field is used downstream, so the modulus, the compression value
//! and the plate thickness are arbitrary; the Poisson ratio alone shapes
//! the field.

mod solver;

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::geometry::TriMesh;
use crate::point2::P2;

use solver::{reverse_cuthill_mckee, Skyline};

type Mat8 = SMatrix<f64, 8, 8>;
type Mat4x8 = SMatrix<f64, 4, 8>;
type Mat4 = SMatrix<f64, 4, 4>;

/// One wedge element: a triangle in the reference plane extruded by a
/// uniform thickness. DOF order: `U_a, W_a, U_b, W_b, U_c, W_c, V_B, V_T`.
#[derive(Debug, Clone, Copy)]
pub struct WedgeElement {
    pub vertices: [P2; 3],
    pub thickness: f64,
}

/// Element stiffness with its strain-displacement and material matrices.
///
/// Strain components are ordered `(eps_xx, eps_yy, eps_zz, gamma_xz)`; the
/// two remaining shears vanish identically for this element's displacement
/// interpolation and are omitted.
#[derive(Debug, Clone)]
pub struct ElementStiffness {
    pub k: Mat8,
    pub b: Mat4x8,
    pub e: Mat4,
    pub det_j: f64,
}

/// K^e = 1/2 B^T E B det(J), with linear shape functions making strains
/// constant in the element.
pub fn element_stiffness(elem: &WedgeElement, modulus: f64, poisson: f64) -> Result<ElementStiffness> {
    if !(poisson > 0.0 && poisson < 0.5) {
        return Err(Error::InvalidGeometry(format!("Poisson ratio {poisson} outside (0, 0.5)")));
    }
    if !(elem.thickness > 0.0) {
        return Err(Error::InvalidGeometry("element thickness must be positive".into()));
    }
    let [a, b, c] = elem.vertices;
    let det2 = (c.x - a.x) * (b.z - a.z) - (c.z - a.z) * (b.x - a.x);
    let two_area = -det2; // positive for counter-clockwise (a, b, c)
    if two_area <= 1e-14 {
        return Err(Error::SingularJacobian);
    }
    // In-plane shape function derivatives from the inverse Jacobian.
    let dn = |dr: f64, dt: f64| -> (f64, f64) {
        (
            ((b.z - a.z) * dr - (c.z - a.z) * dt) / det2,
            (-(b.x - a.x) * dr + (c.x - a.x) * dt) / det2,
        )
    };
    let (n1x, n1z) = dn(-1.0, -1.0);
    let (n2x, n2z) = dn(0.0, 1.0);
    let (n3x, n3z) = dn(1.0, 0.0);
    let d_inv = 1.0 / elem.thickness;

    let mut bm = Mat4x8::zeros();
    // eps_xx = dU/dx
    bm[(0, 0)] = n1x;
    bm[(0, 2)] = n2x;
    bm[(0, 4)] = n3x;
    // eps_yy = dV/dy from the through-thickness interpolation
    bm[(1, 6)] = -d_inv;
    bm[(1, 7)] = d_inv;
    // eps_zz = dW/dz
    bm[(2, 1)] = n1z;
    bm[(2, 3)] = n2z;
    bm[(2, 5)] = n3z;
    // gamma_xz = dU/dz + dW/dx
    bm[(3, 0)] = n1z;
    bm[(3, 1)] = n1x;
    bm[(3, 2)] = n2z;
    bm[(3, 3)] = n2x;
    bm[(3, 4)] = n3z;
    bm[(3, 5)] = n3x;

    let lambda = modulus * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = modulus / (2.0 * (1.0 + poisson));
    let mut em = Mat4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            em[(i, j)] = if i == j { lambda + 2.0 * mu } else { lambda };
        }
    }
    em[(3, 3)] = mu;

    let det_j = two_area * elem.thickness;
    let k = bm.transpose() * em * bm * (0.5 * det_j);
    Ok(ElementStiffness { k, b: bm, e: em, det_j })
}

/// Nodal in-plane displacements of the compressed plate.
///
/// Displacements are zero at every cutting-edge node and proportional to
/// the prescribed compression.
#[derive(Debug, Clone)]
pub struct FESolution {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub compression: f64,
}

/// Solve the compressed-plate model with unit modulus, plate thickness
/// equal to the mesh target size, and unit compression.
pub fn solve_plate(mesh: &TriMesh, poisson: f64) -> Result<FESolution> {
    solve_plate_with(mesh, 1.0, poisson, mesh.target(), 1.0)
}

/// Fully parameterized plate solve. The compression `V_T - V_B` is
/// prescribed per element layer; in-plane displacements are constrained to
/// zero on cutting-edge nodes and solved elsewhere.
pub fn solve_plate_with(
    mesh: &TriMesh,
    modulus: f64,
    poisson: f64,
    thickness: f64,
    compression: f64,
) -> Result<FESolution> {
    let n_nodes = mesh.nodes().len();
    if mesh.edge_nodes().is_empty() {
        return Err(Error::SingularSystem("no constrained cutting-edge nodes".into()));
    }

    // Free in-plane DOF numbering: two per non-edge node.
    let mut free_of_node = vec![usize::MAX; n_nodes];
    let mut n_free_nodes = 0usize;
    for i in 0..n_nodes {
        if !mesh.is_edge_node(i) {
            free_of_node[i] = n_free_nodes;
            n_free_nodes += 1;
        }
    }
    if n_free_nodes == 0 {
        // Fully constrained: the in-plane solution is identically zero.
        return Ok(FESolution { u: vec![0.0; n_nodes], w: vec![0.0; n_nodes], compression });
    }

    // Node adjacency over free nodes for the RCM ordering.
    let mut adj = vec![Vec::new(); n_free_nodes];
    for tri in mesh.triangles() {
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (free_of_node[tri[i]], free_of_node[tri[j]]);
                if a != usize::MAX && b != usize::MAX {
                    if !adj[a].contains(&b) {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
            }
        }
    }
    let perm = reverse_cuthill_mckee(&adj); // perm[new] = old
    let mut new_of_free = vec![0usize; n_free_nodes];
    for (new, &old) in perm.iter().enumerate() {
        new_of_free[old] = new;
    }
    let dof = |node: usize, comp: usize| -> Option<usize> {
        let f = free_of_node[node];
        (f != usize::MAX).then(|| 2 * new_of_free[f] + comp)
    };

    // Skyline profile.
    let n_dof = 2 * n_free_nodes;
    let mut first: Vec<usize> = (0..n_dof).collect();
    for tri in mesh.triangles() {
        let dofs: Vec<usize> = tri
            .iter()
            .flat_map(|&v| [dof(v, 0), dof(v, 1)])
            .flatten()
            .collect();
        if let Some(&lo) = dofs.iter().min() {
            for &d in &dofs {
                first[d] = first[d].min(lo);
            }
        }
    }
    let mut k_global = Skyline::new(first);
    let mut rhs = vec![0.0; n_dof];

    for (t, tri) in mesh.triangles().iter().enumerate() {
        let elem = WedgeElement {
            vertices: [mesh.nodes()[tri[0]], mesh.nodes()[tri[1]], mesh.nodes()[tri[2]]],
            thickness,
        };
        let ke = element_stiffness(&elem, modulus, poisson)
            .map_err(|e| match e {
                Error::SingularJacobian => Error::SingularSystem(format!("inverted element {t}")),
                other => other,
            })?
            .k;
        // In-plane DOF slots 0..6 map to (node, component); slot 6 is V_B
        // (prescribed 0), slot 7 is V_T (prescribed to the compression).
        let slots: [Option<usize>; 6] = [
            dof(tri[0], 0),
            dof(tri[0], 1),
            dof(tri[1], 0),
            dof(tri[1], 1),
            dof(tri[2], 0),
            dof(tri[2], 1),
        ];
        for (r, &gr) in slots.iter().enumerate() {
            let Some(gr) = gr else { continue };
            rhs[gr] -= ke[(r, 7)] * compression;
            for (c, &gc) in slots.iter().enumerate() {
                if let Some(gc) = gc {
                    if gc <= gr {
                        k_global.add(gr, gc, ke[(r, c)]);
                    }
                }
            }
        }
    }

    k_global.factor_ldlt()?;
    let x = k_global.solve(&rhs);

    let mut u = vec![0.0; n_nodes];
    let mut w = vec![0.0; n_nodes];
    for node in 0..n_nodes {
        if let (Some(du), Some(dw)) = (dof(node, 0), dof(node, 1)) {
            u[node] = x[du];
            w[node] = x[dw];
        }
    }
    Ok(FESolution { u, w, compression })
}

/// Normalized in-plane displacement-gradient field on the mesh nodes.
///
/// Every nodal vector has unit length and zero out-of-plane component;
/// values inside a triangle follow by barycentric interpolation of the
/// nodal vectors (renormalized per query point).
#[derive(Debug, Clone)]
pub struct FlowField {
    g: Vec<P2>,
}

impl FlowField {
    /// Build a field directly from nodal vectors (normalized on input).
    /// Used for analytic test fields; FE-driven fields come from
    /// [`gradient_field`].
    pub fn from_vectors(vectors: Vec<P2>) -> Result<Self> {
        let g = vectors
            .into_iter()
            .map(|v| v.try_normalize(1e-300).ok_or(Error::ZeroGradient { element: usize::MAX }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { g })
    }

    pub fn vectors(&self) -> &[P2] {
        &self.g
    }

    /// Interpolated unit flow direction at `p`, via a locate walk from
    /// `hint`. Points outside the mesh are evaluated with clamped
    /// barycentric weights of the last triangle the walk crossed. Returns
    /// the direction and the triangle to use as the next hint.
    pub fn sample(&self, mesh: &TriMesh, p: P2, hint: usize) -> (P2, usize) {
        use crate::geometry::Walk;
        let (t, bary) = match mesh.locate(p, hint) {
            Walk::Inside(t, bary) => (t, bary),
            Walk::Outside(t, _) | Walk::Stuck(t) => {
                let mut b = mesh.barycentric(t, p);
                for v in &mut b {
                    *v = v.max(0.0);
                }
                let s: f64 = b.iter().sum();
                (t, [b[0] / s, b[1] / s, b[2] / s])
            }
        };
        let tri = mesh.triangles()[t];
        let mut v = P2::new(0.0, 0.0);
        for k in 0..3 {
            v = v + self.g[tri[k]] * bary[k];
        }
        // Interpolated unit vectors can cancel at isolated singular points;
        // fall back to a corner value there.
        let v = v.try_normalize(1e-12).unwrap_or(self.g[tri[0]]);
        (v, t)
    }
}

/// Per-node gradient of the displacement-magnitude field, area-weighted
/// over incident elements and normalized to unit vectors.
pub fn gradient_field(mesh: &TriMesh, sol: &FESolution) -> Result<FlowField> {
    let n_nodes = mesh.nodes().len();
    if sol.u.len() != n_nodes || sol.w.len() != n_nodes {
        return Err(Error::SingularSystem("solution does not match mesh".into()));
    }
    let g_mag: Vec<f64> = (0..n_nodes).map(|i| sol.u[i].hypot(sol.w[i])).collect();

    let mut acc = vec![P2::new(0.0, 0.0); n_nodes];
    let mut weight = vec![0.0f64; n_nodes];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let [a, b, c] = *tri;
        let (pa, pb, pc) = (mesh.nodes()[a], mesh.nodes()[b], mesh.nodes()[c]);
        let det2 = (pc.x - pa.x) * (pb.z - pa.z) - (pc.z - pa.z) * (pb.x - pa.x);
        let dr = g_mag[c] - g_mag[a];
        let dt = g_mag[b] - g_mag[a];
        let grad = P2::new(
            ((pb.z - pa.z) * dr - (pc.z - pa.z) * dt) / det2,
            (-(pb.x - pa.x) * dr + (pc.x - pa.x) * dt) / det2,
        );
        if grad.norm() < 1e-14 {
            return Err(Error::ZeroGradient { element: t });
        }
        let area = mesh.triangle_area(t);
        for &v in tri {
            acc[v] = acc[v] + grad * area;
            weight[v] += area;
        }
    }
    let g = (0..n_nodes)
        .map(|i| {
            (acc[i] * (1.0 / weight[i]))
                .try_normalize(1e-300)
                .ok_or(Error::ZeroGradient { element: i })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowField { g })
}
