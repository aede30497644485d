//! Lifting operators `r_F` and `l_F` of the DG face data.
//!
//! For a face `F` with adjacent element `K`, `r_F(tau)` restricted to `K`
//! solves `int_K r_F(tau) . eta = -int_F tau . {eta}` and `l_F(v)` solves
//! `int_K l_F(v) . eta = -int_F v [eta]`. Both are computed per component
//! with the exact element mass matrix.

use nalgebra::DMatrix;

use super::local::ElementOperators;
use super::{element_lifting_coefficients, face_operators, DgConfig};
use crate::error::Result;
use crate::gll::GaussRule;
use crate::mesh::{Mesh, Side};
use crate::space::DofMap;
use crate::sparse::{CsrBuilder, CsrMatrix};

/// Lifting of one face onto one adjacent element.
#[derive(Debug, Clone)]
pub struct LiftingBlock {
    pub element: usize,
    pub side: Side,
    /// Maps the nodal values of a scalar face function `g` (GLL order along
    /// the face) to the element coefficients of each component of `r_F(g e_k)`
    /// (that is, of `r_F(tau)_k` for `tau_k = g`).
    pub r: DMatrix<f64>,
    /// Maps scalar face data `v` to the coefficients of `l_F(v)_k / (n_F)_k`;
    /// interior faces only.
    pub l: Option<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct FaceLifting {
    pub face: usize,
    pub blocks: Vec<LiftingBlock>,
}

impl FaceLifting {
    pub fn block_for(&self, element: usize) -> Option<&LiftingBlock> {
        self.blocks.iter().find(|b| b.element == element)
    }
}

/// `int_F phi_a psi_t` for the element basis `phi_a` and the face basis `psi_t`,
/// evaluated with a Gauss rule on the face.
fn face_moments(ops: &ElementOperators, dofmap: &DofMap, side: Side) -> Result<DMatrix<f64>> {
    let basis = dofmap.basis();
    let m = ops.p + 1;
    let gauss = GaussRule::new(m)?;
    let end = if side.sign() < 0.0 { -1.0 } else { 1.0 };
    let normal_vals = basis.values_at(end);
    let mut moments = DMatrix::zeros(m * m, m);
    for (q, &w) in gauss.weights.iter().enumerate() {
        let tang = basis.values_at(gauss.nodes[q]);
        for j in 0..m {
            for i in 0..m {
                let phi = match side {
                    Side::Left | Side::Right => normal_vals[i] * tang[j],
                    Side::Bottom | Side::Top => tang[i] * normal_vals[j],
                };
                if phi == 0.0 {
                    continue;
                }
                for t in 0..m {
                    moments[(i + m * j, t)] += 0.5 * ops.h * w * phi * tang[t];
                }
            }
        }
    }
    Ok(moments)
}

/// Liftings of face `face_id` onto its adjacent elements.
pub fn local_lifting(mesh: &Mesh, dofmap: &DofMap, ops: &ElementOperators, face_id: usize) -> Result<FaceLifting> {
    let face = &mesh.faces()[face_id];
    let mut blocks = Vec::with_capacity(2);
    let mut push = |element: usize, side: Side, average_weight: f64, l_sign: Option<f64>| -> Result<()> {
        let solved = &ops.mass_inv * face_moments(ops, dofmap, side)?;
        blocks.push(LiftingBlock {
            element,
            side,
            r: &solved * (-average_weight),
            l: l_sign.map(|s| &solved * (-s)),
        });
        Ok(())
    };
    match face.minus {
        None => push(face.plus, face.plus_side, 1.0, None)?,
        Some((minus, minus_side)) => {
            push(face.plus, face.plus_side, 0.5, Some(1.0))?;
            push(minus, minus_side, 0.5, Some(-1.0))?;
        }
    }
    Ok(FaceLifting { face: face_id, blocks })
}

/// Assembles the full bilinear form by materializing every lifting and
/// integrating the volume products with Gauss quadrature. Slower than
/// [`super::assemble`] and meant for cross-checking it.
pub fn assemble_via_liftings(mesh: &Mesh, dofmap: &DofMap, config: &DgConfig) -> Result<CsrMatrix> {
    config.validate()?;
    let p = dofmap.degree();
    let m = p + 1;
    let h = mesh.h();
    let n = dofmap.total_dofs();
    let ops = ElementOperators::new(dofmap.basis(), h)?;
    let liftings = mesh
        .faces()
        .iter()
        .map(|f| local_lifting(mesh, dofmap, &ops, f.id))
        .collect::<Result<Vec<_>>>()?;

    let gauss = GaussRule::new(m)?;
    let table = dofmap.basis().eval(&gauss.nodes);
    let nq = m * m;
    let mut vals = DMatrix::zeros(nq, m * m);
    let mut grads = [DMatrix::zeros(nq, m * m), DMatrix::zeros(nq, m * m)];
    let mut weights = DMatrix::zeros(nq, nq);
    for qy in 0..m {
        for qx in 0..m {
            let q = qx + m * qy;
            weights[(q, q)] = gauss.weights[qx] * gauss.weights[qy] * 0.25 * h * h;
            for j in 0..m {
                for i in 0..m {
                    let a = i + m * j;
                    vals[(q, a)] = table.values[qx][i] * table.values[qy][j];
                    grads[0][(q, a)] = 2.0 / h * table.derivatives[qx][i] * table.values[qy][j];
                    grads[1][(q, a)] = 2.0 / h * table.values[qx][i] * table.derivatives[qy][j];
                }
            }
        }
    }

    let mut builder = CsrBuilder::new(n, n);
    for elem in mesh.elements() {
        let own: Vec<usize> = dofmap.element_dofs(elem.id).collect();
        let (cols, g) = element_lifting_coefficients(mesh, dofmap, &ops, config, &liftings, elem.id);
        let mut volume = DMatrix::zeros(own.len(), own.len());
        let mut mixed = DMatrix::zeros(own.len(), cols.len());
        let mut gram = DMatrix::zeros(cols.len(), cols.len());
        for k in 0..2 {
            let wg = &weights * &grads[k];
            volume += grads[k].transpose() * &wg;
            let lifted = &vals * &g[k];
            mixed += wg.transpose() * &lifted;
            gram += lifted.transpose() * (&weights * &lifted);
        }
        builder.add_dense(&own, &own, &volume);
        builder.add_dense(&own, &cols, &mixed);
        builder.add_dense(&cols, &own, &mixed.transpose());
        builder.add_dense(&cols, &cols, &(gram * config.theta()));
    }

    let sigma = config.penalty(p, h);
    let face_gauss = GaussRule::new(m)?;
    let psi = DMatrix::from_fn(m, m, |q, t| dofmap.basis().values_at(face_gauss.nodes[q])[t]);
    for face in mesh.faces() {
        let fo = face_operators(&ops, dofmap, face);
        let at_points = &psi * &fo.jump;
        let w = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            m,
            face_gauss.weights.iter().map(|w| w * 0.5 * h * sigma),
        ));
        builder.add_dense(&fo.cols, &fo.cols, &(at_points.transpose() * w * &at_points));
    }
    Ok(builder.build(true))
}
