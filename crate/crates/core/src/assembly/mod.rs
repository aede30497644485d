//! Assembly of the symmetric interior penalty (SIPG) and local discontinuous
//! Galerkin (LDG) stiffness matrices for `-Δu = f` with homogeneous Dirichlet
//! data, together with the split forms `A_grad` and `A_jump`.
//!
//! Consistency terms are assembled in direct face form. Liftings are only
//! materialized for the LDG stabilization term, and by the independent
//! [`assemble_via_liftings`] path used for cross-checking.

mod lifting;
mod local;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use lifting::{assemble_via_liftings, local_lifting, FaceLifting, LiftingBlock};
pub use local::ElementOperators;

use crate::error::{Error, Result};
use crate::gll::GaussRule;
use crate::mesh::{Face, Mesh};
use crate::space::DofMap;
use crate::sparse::{write_vector_matrix_market, CsrBuilder, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sipg,
    Ldg,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sipg => "sipg",
            Method::Ldg => "ldg",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sipg" => Ok(Method::Sipg),
            "ldg" => Ok(Method::Ldg),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}` (expected sipg or ldg)"))),
        }
    }
}

/// Discretization parameters. `theta` is 0 for SIPG and 1 for LDG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgConfig {
    pub method: Method,
    pub alpha: f64,
    pub beta: [f64; 2],
}

impl DgConfig {
    pub fn sipg(alpha: f64) -> Self {
        DgConfig { method: Method::Sipg, alpha, beta: [0.0, 0.0] }
    }

    pub fn ldg(alpha: f64, beta: [f64; 2]) -> Self {
        DgConfig { method: Method::Ldg, alpha, beta }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha < 1.0 {
            return Err(Error::InvalidArgument(format!("penalty scaling alpha must be >= 1, got {}", self.alpha)));
        }
        if !self.beta.iter().all(|b| b.is_finite()) {
            return Err(Error::InvalidArgument("beta must be finite".into()));
        }
        if self.method == Method::Sipg && self.beta != [0.0, 0.0] {
            return Err(Error::InvalidArgument("SIPG requires beta = 0".into()));
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        match self.method {
            Method::Sipg => 0.0,
            Method::Ldg => 1.0,
        }
    }

    /// Face penalty `sigma = alpha p^2 / h` on a uniform mesh.
    pub fn penalty(&self, p: usize, h: f64) -> f64 {
        self.alpha * (p * p) as f64 / h
    }

    /// `epsilon = h / (alpha p^2)`, the inverse penalty.
    pub fn epsilon(&self, p: usize, h: f64) -> f64 {
        1.0 / self.penalty(p, h)
    }
}

/// The assembled operator with its diagnostic split.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub a: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Broken gradient form `sum_K int grad u . grad v`.
    pub a_grad: CsrMatrix,
    /// Unweighted jump form `sum_F int_F [u] . [v]`.
    pub a_jump: CsrMatrix,
    pub penalty: f64,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Components of `||v||_DG^2`: broken `H^1` seminorm squared and weighted
    /// jump norm squared.
    pub fn energy_norms(&self, v: &[f64]) -> (f64, f64) {
        (self.a_grad.quadratic_form(v), self.penalty * self.a_jump.quadratic_form(v))
    }

    /// Writes `A` and the right-hand side in matrix-market coordinate format.
    pub fn export(&self, matrix_path: impl AsRef<Path>, rhs_path: impl AsRef<Path>) -> Result<()> {
        self.a.write_matrix_market(matrix_path)?;
        write_vector_matrix_market(&self.rhs, rhs_path)
    }
}

/// Dense operators of one face acting on the dofs of its adjacent elements.
pub(crate) struct FaceOperators {
    pub cols: Vec<usize>,
    /// Scalar jump coefficient `J`, with `[u] = J n_F`.
    pub jump: DMatrix<f64>,
    /// `{grad u} . n_F`.
    pub avg_normal: DMatrix<f64>,
    /// `(grad u+ - grad u-) . n_F`; zero on boundary faces.
    pub normal_jump: DMatrix<f64>,
}

pub(crate) fn face_operators(ops: &ElementOperators, dofmap: &DofMap, face: &Face) -> FaceOperators {
    let npe = ops.dofs_per_element();
    let m = ops.p + 1;
    let plus_tr = ops.trace(face.plus_side);
    let plus_dn = ops.normal_derivative(face.plus_side);
    match face.minus {
        None => {
            let cols = dofmap.element_dofs(face.plus).collect();
            FaceOperators {
                cols,
                jump: plus_tr,
                avg_normal: plus_dn * face.normal_sign,
                normal_jump: DMatrix::zeros(m, npe),
            }
        }
        Some((minus, minus_side)) => {
            let cols = dofmap.element_dofs(face.plus).chain(dofmap.element_dofs(minus)).collect();
            let minus_tr = ops.trace(minus_side);
            let minus_dn = ops.normal_derivative(minus_side);
            let mut jump = DMatrix::zeros(m, 2 * npe);
            let mut avg = DMatrix::zeros(m, 2 * npe);
            let mut njump = DMatrix::zeros(m, 2 * npe);
            jump.columns_mut(0, npe).copy_from(&plus_tr);
            jump.columns_mut(npe, npe).copy_from(&(-minus_tr));
            avg.columns_mut(0, npe).copy_from(&(&plus_dn * 0.5));
            avg.columns_mut(npe, npe).copy_from(&(&minus_dn * 0.5));
            njump.columns_mut(0, npe).copy_from(&plus_dn);
            njump.columns_mut(npe, npe).copy_from(&(-minus_dn));
            FaceOperators { cols, jump, avg_normal: avg, normal_jump: njump }
        }
    }
}

/// Lifting Gram term `theta int (R[u] + L(beta.[u])) . (R[v] + L(beta.[v]))`,
/// accumulated element by element.
fn add_lifting_term(
    builder: &mut CsrBuilder,
    mesh: &Mesh,
    dofmap: &DofMap,
    ops: &ElementOperators,
    config: &DgConfig,
    liftings: &[FaceLifting],
) {
    for elem in mesh.elements() {
        let (cols, g) = element_lifting_coefficients(mesh, dofmap, ops, config, liftings, elem.id);
        let mut gram = DMatrix::zeros(cols.len(), cols.len());
        for gk in &g {
            let mg = &ops.mass * gk;
            gram += gk.transpose() * mg;
        }
        builder.add_dense(&cols, &cols, &(gram * config.theta()));
    }
}

/// Coefficients on element `e` of the two components of
/// `R([u]) + L(beta . [u])` as linear maps of the returned dof columns.
pub(crate) fn element_lifting_coefficients(
    mesh: &Mesh,
    dofmap: &DofMap,
    ops: &ElementOperators,
    config: &DgConfig,
    liftings: &[FaceLifting],
    e: usize,
) -> (Vec<usize>, [DMatrix<f64>; 2]) {
    let npe = ops.dofs_per_element();
    let mut cols: Vec<usize> = dofmap.element_dofs(e).collect();
    let mut parts = Vec::new();
    for fid in mesh.element_faces(e) {
        let face = &mesh.faces()[fid];
        let fo = face_operators(ops, dofmap, face);
        let block = liftings[fid].block_for(e).expect("lifting block of an adjacent element");
        let axis = face.axis.index();
        let n_axis = face.normal_sign;
        // component `axis` of r_F(J n_F) + l_F(beta . n_F J)
        let mut map = &block.r * n_axis;
        if let Some(l) = &block.l {
            // l_F(beta . [u])_k = (n_F)_k (beta . n_F) J l, and (n_F)_k^2 = 1
            map += l * config.beta[axis];
        }
        let coeff = map * &fo.jump;
        // neighbour columns reduced to the ones carrying its trace
        let mut local_cols = Vec::with_capacity(fo.cols.len());
        for &c in &fo.cols {
            let pos = match cols.iter().position(|&x| x == c) {
                Some(pos) => pos,
                None => {
                    cols.push(c);
                    cols.len() - 1
                }
            };
            local_cols.push(pos);
        }
        parts.push((axis, local_cols, coeff));
    }
    // drop neighbour columns that carry no coefficient
    let mut g = [DMatrix::zeros(npe, cols.len()), DMatrix::zeros(npe, cols.len())];
    for (axis, local_cols, coeff) in parts {
        for (c, &pos) in local_cols.iter().enumerate() {
            for r in 0..npe {
                g[axis][(r, pos)] += coeff[(r, c)];
            }
        }
    }
    let keep: Vec<usize> =
        (0..cols.len()).filter(|&c| c < npe || (0..npe).any(|r| g[0][(r, c)] != 0.0 || g[1][(r, c)] != 0.0)).collect();
    let cols = keep.iter().map(|&c| cols[c]).collect();
    let g = [g[0].select_columns(keep.iter()), g[1].select_columns(keep.iter())];
    (cols, g)
}

/// Assembles `A`, the load vector for `f`, `A_grad` and `A_jump`.
pub fn assemble(mesh: &Mesh, dofmap: &DofMap, config: &DgConfig, f: &dyn Fn(f64, f64) -> f64) -> Result<AssembledSystem> {
    config.validate()?;
    let p = dofmap.degree();
    let h = mesh.h();
    let n = dofmap.total_dofs();
    let ops = ElementOperators::new(dofmap.basis(), h)?;
    let sigma = config.penalty(p, h);
    let face_mass = ops.face_mass();

    let mut a = CsrBuilder::new(n, n);
    let mut grad = CsrBuilder::new(n, n);
    let mut jump = CsrBuilder::new(n, n);

    for elem in mesh.elements() {
        let dofs: Vec<usize> = dofmap.element_dofs(elem.id).collect();
        a.add_dense(&dofs, &dofs, &ops.stiffness);
        grad.add_dense(&dofs, &dofs, &ops.stiffness);
    }

    for face in mesh.faces() {
        let fo = face_operators(&ops, dofmap, face);
        let wj = &face_mass * &fo.jump;
        let jj = fo.jump.transpose() * &wj;
        let gj = fo.avg_normal.transpose() * &wj;
        let mut local = &jj * sigma - &gj - gj.transpose();
        if config.method == Method::Ldg && !face.is_boundary() {
            let b = config.beta[face.axis.index()];
            if b != 0.0 {
                let hj = fo.normal_jump.transpose() * &wj;
                local -= (&hj + hj.transpose()) * b;
            }
        }
        a.add_dense(&fo.cols, &fo.cols, &local);
        jump.add_dense(&fo.cols, &fo.cols, &jj);
    }

    if config.method == Method::Ldg {
        let liftings = mesh
            .faces()
            .iter()
            .map(|face| local_lifting(mesh, dofmap, &ops, face.id))
            .collect::<Result<Vec<_>>>()?;
        add_lifting_term(&mut a, mesh, dofmap, &ops, config, &liftings);
    }

    let rhs = load_vector(mesh, dofmap, f)?;
    Ok(AssembledSystem {
        a: a.build(true),
        rhs,
        a_grad: grad.build(true),
        a_jump: jump.build(true),
        penalty: sigma,
    })
}

/// `rhs_i = int f phi_i` with the tensor `(p+1)`-point Gauss rule.
pub fn load_vector(mesh: &Mesh, dofmap: &DofMap, f: &dyn Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    let p = dofmap.degree();
    let m = p + 1;
    let h = mesh.h();
    let gauss = GaussRule::new(m)?;
    let table = dofmap.basis().eval(&gauss.nodes);
    let mut rhs = vec![0.0; dofmap.total_dofs()];
    let jac = 0.25 * h * h;
    for elem in mesh.elements() {
        let base = dofmap.dof(elem.id, 0);
        for (qy, &wy) in gauss.weights.iter().enumerate() {
            let y = elem.origin[1] + 0.5 * h * (gauss.nodes[qy] + 1.0);
            for (qx, &wx) in gauss.weights.iter().enumerate() {
                let x = elem.origin[0] + 0.5 * h * (gauss.nodes[qx] + 1.0);
                let fw = f(x, y) * wx * wy * jac;
                for j in 0..m {
                    let vy = table.values[qy][j] * fw;
                    for i in 0..m {
                        rhs[base + i + m * j] += table.values[qx][i] * vy;
                    }
                }
            }
        }
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(n: usize, p: usize) -> (Mesh, DofMap) {
        let mesh = Mesh::new(n, (-1.0, 1.0)).unwrap();
        let dofmap = DofMap::new(&mesh, p).unwrap();
        (mesh, dofmap)
    }

    #[test]
    fn config_validation() {
        assert!(DgConfig::sipg(10.0).validate().is_ok());
        assert!(DgConfig::sipg(0.5).validate().is_err());
        assert!(DgConfig::sipg(f64::NAN).validate().is_err());
        let mut c = DgConfig::sipg(10.0);
        c.beta = [1.0, 0.0];
        assert!(c.validate().is_err());
        assert!(DgConfig::ldg(1.0, [1.0, 1.0]).validate().is_ok());
        assert_eq!(DgConfig::ldg(1.0, [1.0, 1.0]).theta(), 1.0);
        assert_eq!("LDG".parse::<Method>().unwrap(), Method::Ldg);
        assert!("ip".parse::<Method>().is_err());
    }

    #[test]
    fn penalty_value() {
        assert_relative_eq!(DgConfig::sipg(10.0).penalty(2, 0.0625), 640.0, epsilon = 1e-12);
        assert!(DgConfig::sipg(10.0).epsilon(2, 0.0625) < 1.0);
    }

    #[test]
    fn symmetric_for_both_methods() {
        for p in 2..=4 {
            let (mesh, dofmap) = setup(3, p);
            for cfg in [DgConfig::sipg(10.0), DgConfig::ldg(10.0, [1.0, 1.0])] {
                let sys = assemble(&mesh, &dofmap, &cfg, &|_, _| 1.0).unwrap();
                assert!(sys.a.symmetry_defect() <= 1e-12 * sys.a.max_abs(), "{cfg:?} p={p}");
            }
        }
    }

    #[test]
    fn conforming_zero_boundary_function_sees_only_volume_term() {
        let (mesh, dofmap) = setup(4, 3);
        // u = (1 - x^2)(1 - y^2) lies in Q^2, is continuous and vanishes on the boundary
        let u: Vec<f64> = (0..dofmap.total_dofs())
            .map(|d| {
                let [x, y] = dofmap.dof_coords(d);
                (1.0 - x * x) * (1.0 - y * y)
            })
            .collect();
        for cfg in [DgConfig::sipg(10.0), DgConfig::ldg(3.0, [1.0, 1.0])] {
            let sys = assemble(&mesh, &dofmap, &cfg, &|_, _| 0.0).unwrap();
            let (semi, jump) = sys.energy_norms(&u);
            assert!(jump.abs() < 1e-10);
            // |u|_1^2 = 2 * int (2x)^2 (1-y^2)^2 = 2 * (8/3) * (16/15)
            assert_relative_eq!(semi, 256.0 / 45.0, max_relative = 1e-12);
            assert_relative_eq!(sys.a.quadratic_form(&u), 256.0 / 45.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn constants_have_only_boundary_jumps() {
        let (mesh, dofmap) = setup(2, 2);
        let sys = assemble(&mesh, &dofmap, &DgConfig::sipg(10.0), &|_, _| 1.0).unwrap();
        let ones = vec![1.0; dofmap.total_dofs()];
        let (semi, jump) = sys.energy_norms(&ones);
        assert!(semi.abs() < 1e-12);
        // boundary length 8
        assert_relative_eq!(jump, sys.penalty * 8.0, max_relative = 1e-12);
    }

    #[test]
    fn load_vector_integrates_forcing() {
        let (mesh, dofmap) = setup(3, 2);
        let rhs = load_vector(&mesh, &dofmap, &|x, y| x * x + y).unwrap();
        // partition of unity: sum_i rhs_i = int f = 4/3
        assert_relative_eq!(rhs.iter().sum::<f64>(), 4.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn conforming_functions_lie_in_jump_kernel() {
        let (mesh, dofmap) = setup(3, 3);
        let sys = assemble(&mesh, &dofmap, &DgConfig::sipg(10.0), &|_, _| 1.0).unwrap();
        let cmap = crate::space::ConformingMap::new(&dofmap);
        let ae = sys.a_jump.matmul(cmap.embedding());
        assert!(ae.max_abs() <= 1e-12 * sys.a_jump.max_abs().max(1.0));
    }
}
