//! The additive preconditioner `T_DG = T_B + T_C`: pointwise Jacobi on the
//! boundary-node dofs `V_B` plus a two-level overlapping additive Schwarz
//! method on the conforming space `V_C`, both with exact local solves.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::operator::LinearOperator;
use crate::space::{coarse_prolongation, patch_restriction, ConformingMap, DofMap};
use crate::sparse::CsrMatrix;

/// Which legs of the preconditioner are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    JacobiOnly,
    SchwarzOnly,
    Full,
}

/// Diagonal scaling restricted to `V_B`; element-interior dofs are left out.
#[derive(Debug, Clone)]
pub struct JacobiB {
    dim: usize,
    dofs: Vec<usize>,
    inv_diag: Vec<f64>,
}

impl JacobiB {
    pub fn new(a: &CsrMatrix, dofs: Vec<usize>) -> Result<Self> {
        let diag = a.diagonal();
        let inv_diag = dofs
            .iter()
            .map(|&d| {
                if diag[d] > 0.0 {
                    Ok(1.0 / diag[d])
                } else {
                    Err(Error::NotSpd(format!("non-positive diagonal entry {} at dof {d}", diag[d])))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(JacobiB { dim: a.nrows(), dofs, inv_diag })
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    /// Diagonal of `A` on `V_B`, in the order of [`Self::dofs`].
    pub fn diagonal(&self) -> Vec<f64> {
        self.inv_diag.iter().map(|d| 1.0 / d).collect()
    }

    /// `y += B_B r`.
    pub fn apply_add(&self, r: &[f64], y: &mut [f64]) {
        for (&d, &w) in self.dofs.iter().zip(&self.inv_diag) {
            y[d] += w * r[d];
        }
    }
}

#[derive(Debug, Clone)]
struct LocalSolver {
    dofs: Vec<usize>,
    factor: Cholesky<f64, Dyn>,
}

impl LocalSolver {
    fn new(matrix: DMatrix<f64>, dofs: Vec<usize>, what: &str) -> Result<Self> {
        let factor = matrix.cholesky().ok_or_else(|| Error::NotSpd(format!("{what} is not positive definite")))?;
        Ok(LocalSolver { dofs, factor })
    }

    fn solve_add(&self, r: &[f64], y: &mut [f64]) {
        let rhs = DVector::from_iterator(self.dofs.len(), self.dofs.iter().map(|&d| r[d]));
        let x = self.factor.solve(&rhs);
        for (&d, v) in self.dofs.iter().zip(x.iter()) {
            y[d] += v;
        }
    }
}

/// Two-level overlapping additive Schwarz method on `V_C`.
#[derive(Debug, Clone)]
pub struct SchwarzC {
    cmap: ConformingMap,
    a_c: CsrMatrix,
    /// `R_0^T`, conforming coefficients of the coarse bilinear hats.
    prolongation: CsrMatrix,
    coarse: Cholesky<f64, Dyn>,
    patches: Vec<LocalSolver>,
}

impl SchwarzC {
    pub fn new(a: &CsrMatrix, mesh: &Mesh, dofmap: &DofMap) -> Result<Self> {
        if mesh.n() < 2 {
            return Err(Error::InvalidArgument("the Schwarz method needs at least 2 elements per direction".into()));
        }
        let cmap = ConformingMap::new(dofmap);
        let a_c = cmap.restrict_operator(a);
        let prolongation = coarse_prolongation(mesh, dofmap);
        let a0 = prolongation.transpose().matmul(&a_c).matmul(&prolongation);
        let coarse = a0
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::NotSpd("coarse matrix is not positive definite".into()))?;
        let patches = mesh
            .interior_vertices()
            .map(|v| {
                let dofs = patch_restriction(mesh, dofmap, v.id)?;
                LocalSolver::new(a_c.dense_submatrix(&dofs, &dofs), dofs, "patch matrix")
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SchwarzC { cmap, a_c, prolongation, coarse, patches })
    }

    pub fn conforming_map(&self) -> &ConformingMap {
        &self.cmap
    }

    /// `A_C = E^T A E`.
    pub fn a_conforming(&self) -> &CsrMatrix {
        &self.a_c
    }

    pub fn num_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn patch_dofs(&self, i: usize) -> &[usize] {
        &self.patches[i].dofs
    }

    pub fn coarse_dim(&self) -> usize {
        self.prolongation.ncols()
    }

    /// `B_C r_c = (R_0^T A_0^{-1} R_0 + sum_i R_i^T A_i^{-1} R_i) r_c` on
    /// conforming coefficients.
    pub fn apply_conforming(&self, rc: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cmap.dim()];
        let mut r0 = vec![0.0; self.prolongation.ncols()];
        self.prolongation.mul_transpose_vec(rc, &mut r0);
        let x0 = self.coarse.solve(&DVector::from_vec(r0));
        self.prolongation.mul_vec(x0.as_slice(), &mut y);
        for patch in &self.patches {
            patch.solve_add(rc, &mut y);
        }
        y
    }

    /// Applies only the local solve of patch `i`.
    pub fn apply_patch(&self, i: usize, rc: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cmap.dim()];
        self.patches[i].solve_add(rc, &mut y);
        y
    }

    /// `y += E B_C E^T r`.
    pub fn apply_add(&self, r: &[f64], y: &mut [f64]) {
        let yc = self.apply_conforming(&self.cmap.gather(r));
        for (yi, v) in y.iter_mut().zip(self.cmap.scatter(&yc)) {
            *yi += v;
        }
    }
}

/// `B_C` as an operator on conforming coefficients.
pub struct ConformingSchwarz<'a>(pub &'a SchwarzC);

impl LinearOperator for ConformingSchwarz<'_> {
    fn dim(&self) -> usize {
        self.0.cmap.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.0.apply_conforming(x));
    }
}

/// Inverse of a block-diagonal SPD matrix, blocks found from its sparsity.
#[derive(Debug, Clone)]
pub struct BlockDiagonalInverse {
    dim: usize,
    blocks: Vec<LocalSolver>,
}

impl BlockDiagonalInverse {
    pub fn new(m: &CsrMatrix) -> Result<Self> {
        let n = m.nrows();
        let mut component = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            let mut members = vec![start];
            component[start] = id;
            let mut k = 0;
            while k < members.len() {
                let (cols, _) = m.row(members[k]);
                for &c in cols {
                    if component[c] == usize::MAX {
                        component[c] = id;
                        members.push(c);
                    }
                }
                k += 1;
            }
            members.sort_unstable();
            blocks.push(LocalSolver::new(m.dense_submatrix(&members, &members), members, "diagonal block")?);
        }
        Ok(BlockDiagonalInverse { dim: n, blocks })
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

impl LinearOperator for BlockDiagonalInverse {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for b in &self.blocks {
            b.solve_add(x, y);
        }
    }
}

/// Subspaces on which the preconditioner constants are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    /// `V_B` with the unit-vector basis of its dofs.
    Boundary,
    /// `V_C` with the basis given by the columns of `E`.
    Conforming,
    /// `ker(Q_h)`, spanned by the differences of coincident dofs and the
    /// unit vectors at domain-boundary nodes.
    KernelQ,
}

/// `A` restricted to a subspace together with the inverse of the
/// preconditioner's quadratic form on it; the constants are the reciprocal
/// extreme eigenvalues of `inverse * a`.
pub struct SubspacePair<'a> {
    pub a: CsrMatrix,
    pub inverse: Box<dyn LinearOperator + 'a>,
}

#[derive(Debug, Clone)]
pub struct Preconditioner {
    pub jacobi: JacobiB,
    pub schwarz: SchwarzC,
    mode: Mode,
}

impl Preconditioner {
    pub fn build(system: &AssembledSystem, mesh: &Mesh, dofmap: &DofMap) -> Result<Self> {
        if system.dim() != dofmap.total_dofs() {
            return Err(Error::InvalidArgument("system and dof map sizes differ".into()));
        }
        let jacobi = JacobiB::new(&system.a, dofmap.vb_dofs())?;
        let schwarz = SchwarzC::new(&system.a, mesh, dofmap)?;
        Ok(Preconditioner { jacobi, schwarz, mode: Mode::Full })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Applies the active legs, checking the residual length.
    pub fn apply_checked(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.jacobi.dim {
            return Err(Error::InvalidArgument(format!(
                "residual has {} entries, preconditioner expects {}",
                r.len(),
                self.jacobi.dim
            )));
        }
        Ok(self.apply_new(r))
    }

    pub fn apply_jacobi(&self, r: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; r.len()];
        self.jacobi.apply_add(r, &mut y);
        y
    }

    pub fn apply_schwarz(&self, r: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; r.len()];
        self.schwarz.apply_add(r, &mut y);
        y
    }

    pub fn subspace_operator<'a>(
        &'a self,
        system: &AssembledSystem,
        dofmap: &DofMap,
        which: Subspace,
    ) -> Result<SubspacePair<'a>> {
        match which {
            Subspace::Boundary => {
                let a = system.a.principal_submatrix(self.jacobi.dofs());
                let inverse = Box::new(crate::operator::Diagonal(self.jacobi.inv_diag.clone()));
                Ok(SubspacePair { a, inverse })
            }
            Subspace::Conforming => {
                Ok(SubspacePair { a: self.schwarz.a_c.clone(), inverse: Box::new(ConformingSchwarz(&self.schwarz)) })
            }
            Subspace::KernelQ => {
                let z = dofmap.ker_q_basis();
                let zt = z.transpose();
                let a = zt.matmul(&system.a).matmul(&z).with_symmetry(true);
                let d = full_diagonal(&system.a);
                let dz = d.matmul(&z);
                let m = zt.matmul(&dz).with_symmetry(true);
                Ok(SubspacePair { a, inverse: Box::new(BlockDiagonalInverse::new(&m)?) })
            }
        }
    }
}

fn full_diagonal(a: &CsrMatrix) -> CsrMatrix {
    let mut b = crate::sparse::CsrBuilder::new(a.nrows(), a.ncols());
    for (i, v) in a.diagonal().into_iter().enumerate() {
        b.add(i, i, v);
    }
    b.build(true)
}

impl LinearOperator for Preconditioner {
    fn dim(&self) -> usize {
        self.jacobi.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        if self.mode != Mode::SchwarzOnly {
            self.jacobi.apply_add(x, y);
        }
        if self.mode != Mode::JacobiOnly {
            self.schwarz.apply_add(x, y);
        }
    }
}
