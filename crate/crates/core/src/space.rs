//! Degrees of freedom of the discontinuous space on tensor GLL nodes and the
//! splitting into the boundary-node space `V_B` and the conforming space `V_C`.
//!
//! Geometric nodes are identified through integer lattice coordinates
//! `(col * p + i, row * p + j)`, never by comparing floating-point positions.

use crate::error::{Error, Result};
use crate::gll::{GllRule, LagrangeBasis1D};
use crate::mesh::Mesh;
use crate::sparse::{CsrBuilder, CsrMatrix};

/// Layout of the DG degrees of freedom: dof `e * (p+1)^2 + i + (p+1) j`
/// sits at GLL node `(i, j)` of element `e`.
#[derive(Debug, Clone)]
pub struct DofMap {
    p: usize,
    n: usize,
    h: f64,
    lower: f64,
    basis: LagrangeBasis1D,
    /// Dofs attached to each geometric node, ascending.
    node_ptr: Vec<usize>,
    node_dofs: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument(format!("polynomial degree must be at least 2, got {p}")));
        }
        let basis = LagrangeBasis1D::new(GllRule::new(p)?);
        let n = mesh.n();
        let side = n * p + 1;
        let npe = (p + 1) * (p + 1);
        let total = n * n * npe;
        let mut counts = vec![0usize; side * side];
        let node_of = |dof: usize| {
            let (e, a) = (dof / npe, dof % npe);
            let (row, col) = (e / n, e % n);
            let (i, j) = (a % (p + 1), a / (p + 1));
            (row * p + j) * side + col * p + i
        };
        for dof in 0..total {
            counts[node_of(dof)] += 1;
        }
        let mut node_ptr = vec![0; side * side + 1];
        for k in 0..side * side {
            node_ptr[k + 1] = node_ptr[k] + counts[k];
        }
        let mut fill = node_ptr.clone();
        let mut node_dofs = vec![0; total];
        for dof in 0..total {
            let g = node_of(dof);
            node_dofs[fill[g]] = dof;
            fill[g] += 1;
        }
        Ok(DofMap { p, n, h: mesh.h(), lower: mesh.domain().0, basis, node_ptr, node_dofs })
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn basis(&self) -> &LagrangeBasis1D {
        &self.basis
    }

    pub fn dofs_per_element(&self) -> usize {
        (self.p + 1) * (self.p + 1)
    }

    pub fn total_dofs(&self) -> usize {
        self.n * self.n * self.dofs_per_element()
    }

    pub fn dof(&self, element: usize, local: usize) -> usize {
        element * self.dofs_per_element() + local
    }

    pub fn element_dofs(&self, element: usize) -> std::ops::Range<usize> {
        let npe = self.dofs_per_element();
        element * npe..(element + 1) * npe
    }

    /// Local GLL index pair `(i, j)` of a dof, `i` along x.
    pub fn local_index(&self, dof: usize) -> (usize, usize) {
        let a = dof % self.dofs_per_element();
        (a % (self.p + 1), a / (self.p + 1))
    }

    pub fn element_of(&self, dof: usize) -> usize {
        dof / self.dofs_per_element()
    }

    /// Whether the dof sits at an element-interior node (`N_I`).
    pub fn is_element_interior(&self, dof: usize) -> bool {
        let (i, j) = self.local_index(dof);
        i > 0 && i < self.p && j > 0 && j < self.p
    }

    fn lattice_side(&self) -> usize {
        self.n * self.p + 1
    }

    /// Global lattice coordinates of the geometric node of a dof.
    pub fn lattice(&self, dof: usize) -> (usize, usize) {
        let e = self.element_of(dof);
        let (row, col) = (e / self.n, e % self.n);
        let (i, j) = self.local_index(dof);
        (col * self.p + i, row * self.p + j)
    }

    pub fn geometric_node(&self, dof: usize) -> usize {
        let (gx, gy) = self.lattice(dof);
        gy * self.lattice_side() + gx
    }

    pub fn num_geometric_nodes(&self) -> usize {
        self.lattice_side() * self.lattice_side()
    }

    /// DG dofs coincident at a geometric node.
    pub fn node_dofs(&self, node: usize) -> &[usize] {
        &self.node_dofs[self.node_ptr[node]..self.node_ptr[node + 1]]
    }

    pub fn node_on_boundary(&self, node: usize) -> bool {
        let side = self.lattice_side();
        let (gx, gy) = (node % side, node / side);
        gx == 0 || gy == 0 || gx == side - 1 || gy == side - 1
    }

    /// Physical coordinate of lattice index `g` along one axis.
    pub fn lattice_coordinate(&self, g: usize) -> f64 {
        let (cell, i) = if g == self.n * self.p { (self.n - 1, self.p) } else { (g / self.p, g % self.p) };
        self.lower + self.h * (cell as f64 + 0.5 * (self.basis.nodes()[i] + 1.0))
    }

    pub fn dof_coords(&self, dof: usize) -> [f64; 2] {
        let (gx, gy) = self.lattice(dof);
        [self.lattice_coordinate(gx), self.lattice_coordinate(gy)]
    }

    /// Dofs at element-boundary nodes (`N_B(kappa)` over all elements), ascending.
    pub fn vb_dofs(&self) -> Vec<usize> {
        (0..self.total_dofs()).filter(|&d| !self.is_element_interior(d)).collect()
    }

    /// Index of the conforming dof at a geometric node, if the node is not on
    /// the domain boundary.
    pub fn conforming_index(&self, node: usize) -> Option<usize> {
        if self.node_on_boundary(node) {
            return None;
        }
        let side = self.lattice_side();
        let (gx, gy) = (node % side, node / side);
        Some((gy - 1) * (side - 2) + gx - 1)
    }

    pub fn conforming_dim(&self) -> usize {
        let m = self.n * self.p - 1;
        m * m
    }

    /// Oswald averaging operator: nodal average over coincident element
    /// traces, zero on the domain boundary.
    pub fn oswald(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.total_dofs());
        let mut out = vec![0.0; v.len()];
        for node in 0..self.num_geometric_nodes() {
            if self.node_on_boundary(node) {
                continue;
            }
            let dofs = self.node_dofs(node);
            let avg = dofs.iter().map(|&d| v[d]).sum::<f64>() / dofs.len() as f64;
            for &d in dofs {
                out[d] = avg;
            }
        }
        out
    }

    /// Sparse basis of `ker(Q_h)`: consecutive differences over the dofs of
    /// each interior geometric node, unit vectors at domain-boundary nodes.
    pub fn ker_q_basis(&self) -> CsrMatrix {
        let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
        for node in 0..self.num_geometric_nodes() {
            let dofs = self.node_dofs(node);
            if self.node_on_boundary(node) {
                columns.extend(dofs.iter().map(|&d| vec![(d, 1.0)]));
            } else {
                columns.extend(dofs.windows(2).map(|w| vec![(w[0], 1.0), (w[1], -1.0)]));
            }
        }
        let mut b = CsrBuilder::new(self.total_dofs(), columns.len());
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                b.add(r, c, v);
            }
        }
        b.build(false)
    }
}

/// Embedding `E` of the conforming space `V_C` (continuous, zero on the
/// boundary) into the DG space.
#[derive(Debug, Clone)]
pub struct ConformingMap {
    /// Conforming index of every DG dof, `None` at domain-boundary nodes.
    dg_to_conforming: Vec<Option<usize>>,
    multiplicity: Vec<usize>,
    embedding: CsrMatrix,
}

impl ConformingMap {
    pub fn new(dofmap: &DofMap) -> Self {
        let nc = dofmap.conforming_dim();
        let total = dofmap.total_dofs();
        let mut dg_to_conforming = vec![None; total];
        let mut multiplicity = vec![0; nc];
        let mut b = CsrBuilder::new(total, nc);
        for (d, slot) in dg_to_conforming.iter_mut().enumerate() {
            if let Some(c) = dofmap.conforming_index(dofmap.geometric_node(d)) {
                *slot = Some(c);
                multiplicity[c] += 1;
                b.add(d, c, 1.0);
            }
        }
        ConformingMap { dg_to_conforming, multiplicity, embedding: b.build(false) }
    }

    pub fn dim(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn embedding(&self) -> &CsrMatrix {
        &self.embedding
    }

    pub fn conforming_of(&self, dof: usize) -> Option<usize> {
        self.dg_to_conforming[dof]
    }

    /// Number of DG dofs sharing each conforming node (diagonal of `E^T E`).
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    /// `E x`: copies conforming values to every coincident DG dof.
    pub fn scatter(&self, x: &[f64]) -> Vec<f64> {
        self.dg_to_conforming.iter().map(|c| c.map_or(0.0, |c| x[c])).collect()
    }

    /// `E^T r`: sums DG values over coincident dofs.
    pub fn gather(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (d, c) in self.dg_to_conforming.iter().enumerate() {
            if let Some(c) = c {
                out[*c] += r[d];
            }
        }
        out
    }

    /// `E^T A E`.
    pub fn restrict_operator(&self, a: &CsrMatrix) -> CsrMatrix {
        let mut b = CsrBuilder::new(self.dim(), self.dim());
        for i in 0..a.nrows() {
            let Some(ci) = self.dg_to_conforming[i] else { continue };
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if let Some(cj) = self.dg_to_conforming[j] {
                    b.add(ci, cj, v);
                }
            }
        }
        b.build(a.is_symmetric())
    }
}

/// 1D hat function of a mesh vertex at position `t` measured in element
/// widths.
fn hat(t: f64, vertex: usize) -> f64 {
    (1.0 - (t - vertex as f64).abs()).max(0.0)
}

/// Position of lattice index `g` in units of `h` from the lower corner.
fn lattice_position(dofmap: &DofMap, g: usize) -> f64 {
    let p = dofmap.degree();
    let (cell, i) = if g == dofmap.n * p { (dofmap.n - 1, p) } else { (g / p, g % p) };
    cell as f64 + 0.5 * (dofmap.basis().nodes()[i] + 1.0)
}

/// Prolongation `R_0^T` from the piecewise bilinear space on the mesh (one
/// hat per interior vertex) to conforming coefficients; shape `dim V_C x (n-1)^2`.
pub fn coarse_prolongation(mesh: &Mesh, dofmap: &DofMap) -> CsrMatrix {
    let n = mesh.n();
    let p = dofmap.degree();
    let m = n * p - 1;
    let mut b = CsrBuilder::new(dofmap.conforming_dim(), mesh.num_interior_vertices());
    for v in mesh.interior_vertices() {
        let (vi, vj) = v.lattice;
        let col = (vj - 1) * (n - 1) + vi - 1;
        for gy in ((vj - 1) * p + 1)..((vj + 1) * p) {
            let wy = hat(lattice_position(dofmap, gy), vj);
            for gx in ((vi - 1) * p + 1)..((vi + 1) * p) {
                let w = wy * hat(lattice_position(dofmap, gx), vi);
                if w != 0.0 {
                    b.add((gy - 1) * m + gx - 1, col, w);
                }
            }
        }
    }
    b.build(false)
}

/// Conforming dofs strictly inside the patch of an interior vertex, ascending.
pub fn patch_restriction(mesh: &Mesh, dofmap: &DofMap, vertex_id: usize) -> Result<Vec<usize>> {
    mesh.vertex_patch(vertex_id)?;
    let (vi, vj) = mesh.vertices()[vertex_id].lattice;
    let p = dofmap.degree();
    let m = mesh.n() * p - 1;
    let mut out = Vec::with_capacity((2 * p - 1) * (2 * p - 1));
    for gy in ((vj - 1) * p + 1)..((vj + 1) * p) {
        for gx in ((vi - 1) * p + 1)..((vi + 1) * p) {
            out.push((gy - 1) * m + gx - 1);
        }
    }
    Ok(out)
}

/// Piecewise bilinear partition-of-unity function attached to one vertex patch.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    n: usize,
    /// Values at all mesh vertices, lexicographic.
    pub vertex_values: Vec<f64>,
}

impl PartitionOfUnity {
    /// Value in lattice-of-elements coordinates `(s, t)`, i.e. `x = a + s h`.
    pub fn value(&self, s: f64, t: f64) -> f64 {
        let n = self.n;
        let col = (s.floor() as usize).min(n - 1);
        let row = (t.floor() as usize).min(n - 1);
        let (u, w) = (s - col as f64, t - row as f64);
        let at = |i: usize, j: usize| self.vertex_values[j * (n + 1) + i];
        (1.0 - u) * (1.0 - w) * at(col, row)
            + u * (1.0 - w) * at(col + 1, row)
            + (1.0 - u) * w * at(col, row + 1)
            + u * w * at(col + 1, row + 1)
    }

    /// Largest partial derivative `max |d theta / d x_k|` over the mesh, in
    /// physical units.
    pub fn max_gradient(&self, h: f64) -> f64 {
        let n = self.n;
        let at = |i: usize, j: usize| self.vertex_values[j * (n + 1) + i];
        let mut worst = 0.0f64;
        for row in 0..n {
            for col in 0..n {
                // gradient of a bilinear is extremal at the corners
                for (u, w) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                    let gx = (1.0 - w) * (at(col + 1, row) - at(col, row)) + w * (at(col + 1, row + 1) - at(col, row + 1));
                    let gy = (1.0 - u) * (at(col, row + 1) - at(col, row)) + u * (at(col + 1, row + 1) - at(col + 1, row));
                    worst = worst.max(gx.abs().max(gy.abs()) / h);
                }
            }
        }
        worst
    }
}

/// Partition of unity `theta_i` of the patch around an interior vertex: one at
/// the centre and at patch-boundary vertices all of whose patch-boundary faces
/// lie on the domain boundary, zero elsewhere.
pub fn partition_of_unity(mesh: &Mesh, vertex_id: usize) -> Result<PartitionOfUnity> {
    mesh.vertex_patch(vertex_id)?;
    let n = mesh.n();
    let (ci, cj) = mesh.vertices()[vertex_id].lattice;
    let mut vertex_values = vec![0.0; (n + 1) * (n + 1)];
    let on_boundary_line = |k: usize| k == 0 || k == n;
    for dj in -1i64..=1 {
        for di in -1i64..=1 {
            let (i, j) = ((ci as i64 + di) as usize, (cj as i64 + dj) as usize);
            let value = if di == 0 && dj == 0 {
                1.0
            } else if di != 0 && dj != 0 {
                // patch corner: one patch-boundary face along each direction
                if on_boundary_line(i) && on_boundary_line(j) { 1.0 } else { 0.0 }
            } else if di != 0 {
                // midpoint of a vertical patch side: both faces lie on x = i
                if on_boundary_line(i) { 1.0 } else { 0.0 }
            } else if on_boundary_line(j) {
                1.0
            } else {
                0.0
            };
            vertex_values[j * (n + 1) + i] = value;
        }
    }
    Ok(PartitionOfUnity { n, vertex_values })
}

/// GLL interpolant of `theta_i * z` for a conforming `z`, returned in
/// conforming coefficients; it vanishes outside the patch.
pub fn interpolate_ip(dofmap: &DofMap, theta: &PartitionOfUnity, z: &[f64]) -> Vec<f64> {
    let m = dofmap.n * dofmap.degree() - 1;
    assert_eq!(z.len(), m * m);
    let pos: Vec<f64> = (1..=m).map(|g| lattice_position(dofmap, g)).collect();
    let mut out = vec![0.0; m * m];
    for gy in 0..m {
        for gx in 0..m {
            let k = gy * m + gx;
            out[k] = theta.value(pos[gx], pos[gy]) * z[k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(n: usize, p: usize) -> (Mesh, DofMap) {
        let mesh = Mesh::new(n, (-1.0, 1.0)).unwrap();
        let dm = DofMap::new(&mesh, p).unwrap();
        (mesh, dm)
    }

    #[test]
    fn counts() {
        let (_, dm) = setup(32, 2);
        assert_eq!(dm.total_dofs(), 9216);
        assert_eq!(dm.conforming_dim(), 3969);
        assert_eq!(dm.vb_dofs().len(), 8192);
        let (_, dm) = setup(1, 2);
        assert_eq!(dm.vb_dofs().len(), 8);
        let (_, dm) = setup(2, 4);
        let interior = dm.element_dofs(0).filter(|&d| dm.is_element_interior(d)).count();
        assert_eq!(interior, 9);
        assert_eq!(dm.dofs_per_element() - interior, 16);
        assert!(matches!(DofMap::new(&Mesh::new(2, (0.0, 1.0)).unwrap(), 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn coincident_dofs_are_distinct_and_multiplicities() {
        let (_, dm) = setup(3, 3);
        let cm = ConformingMap::new(&dm);
        let mut seen = std::collections::HashSet::new();
        for node in 0..dm.num_geometric_nodes() {
            let dofs = dm.node_dofs(node);
            assert!([1, 2, 4].contains(&dofs.len()));
            for &d in dofs {
                assert!(seen.insert(d));
                assert_eq!(dm.geometric_node(d), node);
            }
        }
        // E^T E = diag(multiplicity)
        let ete = cm.embedding().transpose().matmul(cm.embedding());
        for c in 0..cm.dim() {
            assert_eq!(ete.get(c, c), cm.multiplicity()[c] as f64);
            assert_eq!(ete.row(c).0.len(), 1);
        }
    }

    #[test]
    fn oswald_examples() {
        let (_, dm) = setup(3, 2);
        let cm = ConformingMap::new(&dm);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..cm.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = cm.scatter(&x);
        let q = dm.oswald(&v);
        for (a, b) in q.iter().zip(&v) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        // two traces 1 and 3 average to 2
        let node = (0..dm.num_geometric_nodes()).find(|&k| !dm.node_on_boundary(k) && dm.node_dofs(k).len() == 2).unwrap();
        let mut v = vec![0.0; dm.total_dofs()];
        let (d0, d1) = (dm.node_dofs(node)[0], dm.node_dofs(node)[1]);
        v[d0] = 1.0;
        v[d1] = 3.0;
        let q = dm.oswald(&v);
        assert_eq!((q[d0], q[d1]), (2.0, 2.0));
        // boundary nodes vanish
        let v = vec![1.0; dm.total_dofs()];
        let q = dm.oswald(&v);
        for d in 0..dm.total_dofs() {
            if dm.node_on_boundary(dm.geometric_node(d)) {
                assert_eq!(q[d], 0.0);
            } else {
                assert_eq!(q[d], 1.0);
            }
        }
    }

    #[test]
    fn oswald_projection_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in 2..=5 {
            let (_, dm) = setup(4, p);
            let v: Vec<f64> = (0..dm.total_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = dm.oswald(&v);
            let qq = dm.oswald(&q);
            for (a, b) in q.iter().zip(&qq) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-13);
            }
            for d in 0..dm.total_dofs() {
                if dm.is_element_interior(d) {
                    assert_abs_diff_eq!(v[d] - q[d], 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn kernel_basis() {
        let (_, dm) = setup(1, 2);
        let z = dm.ker_q_basis();
        assert_eq!(z.ncols(), 8);
        for (col, d) in z.transpose().to_dense().row_iter().zip(dm.vb_dofs()) {
            assert_eq!(col[d], 1.0);
        }
        let (_, dm) = setup(3, 3);
        let z = dm.ker_q_basis();
        assert_eq!(z.ncols(), dm.total_dofs() - dm.conforming_dim());
        let zt = z.transpose();
        let vb: std::collections::HashSet<_> = dm.vb_dofs().into_iter().collect();
        for c in 0..zt.nrows() {
            let (rows, vals) = zt.row(c);
            let mut col = vec![0.0; dm.total_dofs()];
            for (&r, &v) in rows.iter().zip(vals) {
                assert!(vb.contains(&r));
                col[r] = v;
            }
            assert!(dm.oswald(&col).iter().all(|&x| x.abs() < 1e-15));
        }
        // full column rank
        let dense = z.to_dense();
        let rank = dense.clone().svd(false, false).rank(1e-10);
        assert_eq!(rank, z.ncols());
    }

    #[test]
    fn coarse_hats() {
        let (mesh, dm) = setup(4, 3);
        let r0t = coarse_prolongation(&mesh, &dm);
        assert_eq!(r0t.ncols(), 9);
        let m = 4 * 3 - 1;
        let dense = r0t.to_dense();
        for v in mesh.interior_vertices() {
            let (vi, vj) = v.lattice;
            let col = mesh.interior_vertex_index(v.id).unwrap();
            for w in mesh.interior_vertices() {
                let (wi, wj) = w.lattice;
                let row = (wj * 3 - 1) * m + wi * 3 - 1;
                assert_eq!(dense[(row, col)], if (vi, vj) == (wi, wj) { 1.0 } else { 0.0 });
            }
        }
        // tensor product value at an element-interior node
        let x = dm.basis().nodes()[1];
        let t = 0.5 * (x + 1.0);
        let (gx, gy) = (3 + 1, 3 + 1); // node (1,1) of element (1,1)
        let col = mesh.interior_vertex_index(mesh.vertex_id(1, 1)).unwrap();
        assert_abs_diff_eq!(dense[((gy - 1) * m + gx - 1, col)], (1.0 - t) * (1.0 - t), epsilon = 1e-14);
        // hats sum to one away from the boundary layer
        for gy in 3..=2 * 3 + 3 {
            for gx in 3..=2 * 3 + 3 {
                let row = (gy - 1) * m + gx - 1;
                assert_abs_diff_eq!(dense.row(row).sum(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn patch_sizes_and_coverage() {
        for p in [2, 3] {
            let (mesh, dm) = setup(4, p);
            let mut covered = vec![false; dm.conforming_dim()];
            for v in mesh.interior_vertices() {
                let idx = patch_restriction(&mesh, &dm, v.id).unwrap();
                assert_eq!(idx.len(), (2 * p - 1) * (2 * p - 1));
                for c in idx {
                    covered[c] = true;
                }
            }
            assert!(covered.iter().all(|&c| c));
            assert!(matches!(patch_restriction(&mesh, &dm, 0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn partition_of_unity_properties() {
        for n in [2, 3, 6] {
            let mesh = Mesh::new(n, (0.0, 1.0)).unwrap();
            let thetas: Vec<_> = mesh.interior_vertices().map(|v| partition_of_unity(&mesh, v.id).unwrap()).collect();
            for (v, th) in mesh.interior_vertices().zip(&thetas) {
                assert_eq!(th.vertex_values[v.id], 1.0);
                assert!(th.vertex_values.iter().all(|&x| (0.0..=1.0).contains(&x)));
                // support inside the patch
                let patch = mesh.vertex_patch(v.id).unwrap();
                for e in mesh.elements() {
                    if !patch.contains(&e.id) {
                        let s = e.col as f64 + 0.5;
                        let t = e.row as f64 + 0.5;
                        assert_eq!(th.value(s, t), 0.0);
                    }
                }
                assert!(th.max_gradient(mesh.h()) <= 1.0 / mesh.h() + 1e-9);
            }
            for w in mesh.vertices() {
                let s: f64 = thetas.iter().map(|t| t.vertex_values[w.id]).sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-15);
            }
        }
        let mesh = Mesh::new(6, (0.0, 1.0)).unwrap();
        let th = partition_of_unity(&mesh, mesh.vertex_id(3, 3)).unwrap();
        assert_abs_diff_eq!(th.max_gradient(mesh.h()), 1.0 / mesh.h(), epsilon = 1e-9);
        assert!(partition_of_unity(&mesh, 0).is_err());
    }

    #[test]
    fn interpolant_reproduces_where_theta_is_one() {
        let (mesh, dm) = setup(2, 3);
        let cm = ConformingMap::new(&dm);
        let th = partition_of_unity(&mesh, mesh.vertex_id(1, 1)).unwrap();
        let z: Vec<f64> = (0..cm.dim()).map(|k| (k as f64).sin()).collect();
        // on a 2x2 mesh theta is identically one
        assert_eq!(interpolate_ip(&dm, &th, &z), z);

        let (mesh, dm) = setup(4, 2);
        let cm = ConformingMap::new(&dm);
        let z = vec![1.0; cm.dim()];
        let v = mesh.vertex_id(2, 2);
        let th = partition_of_unity(&mesh, v).unwrap();
        let out = interpolate_ip(&dm, &th, &z);
        let inside: std::collections::HashSet<_> = patch_restriction(&mesh, &dm, v).unwrap().into_iter().collect();
        for (c, &x) in out.iter().enumerate() {
            if !inside.contains(&c) {
                assert_eq!(x, 0.0);
            }
        }
        let centre = (2 * 2 - 1) * (4 * 2 - 1) + 2 * 2 - 1;
        assert_eq!(out[centre], 1.0);
    }
}
