//! Element-level matrices of the nodal tensor basis on a square of side `h`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gll::{LagrangeBasis1D, ReferenceMatrices1D};
use crate::mesh::Side;

/// Dense element operators shared by every element of a uniform mesh.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    pub p: usize,
    pub h: f64,
    /// 1D reference mass `int phi_i phi_j` on `[-1, 1]`.
    pub mass_1d: DMatrix<f64>,
    pub mass_1d_inv: DMatrix<f64>,
    /// `diff_1d[(k, i)] = phi_i'(x_k)` on the reference interval.
    pub diff_1d: DMatrix<f64>,
    /// `int_kappa grad phi_a . grad phi_b`.
    pub stiffness: DMatrix<f64>,
    /// `int_kappa phi_a phi_b`.
    pub mass: DMatrix<f64>,
    pub mass_inv: DMatrix<f64>,
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

impl ElementOperators {
    pub fn new(basis: &LagrangeBasis1D, h: f64) -> Result<Self> {
        let p = basis.degree();
        let m = p + 1;
        let refm = ReferenceMatrices1D::new(basis)?;
        let mass_1d = DMatrix::from_fn(m, m, |i, j| refm.mass[i][j]);
        let stiff_1d = DMatrix::from_fn(m, m, |i, j| refm.stiffness[i][j]);
        let diff_1d = DMatrix::from_fn(m, m, |k, i| basis.node_derivative(k, i));
        let mass_1d_inv = mass_1d
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Internal("reference mass matrix is singular".into()))?
            .inverse();
        // local index a = i + (p+1) j, so the y factor is the outer Kronecker factor
        let stiffness = kron(&mass_1d, &stiff_1d) + kron(&stiff_1d, &mass_1d);
        let jac = 0.25 * h * h;
        let mass = kron(&mass_1d, &mass_1d) * jac;
        let mass_inv = kron(&mass_1d_inv, &mass_1d_inv) / jac;
        Ok(ElementOperators { p, h, mass_1d, mass_1d_inv, diff_1d, stiffness, mass, mass_inv })
    }

    pub fn dofs_per_element(&self) -> usize {
        (self.p + 1) * (self.p + 1)
    }

    /// Local dofs on a side, ordered by increasing tangential coordinate.
    pub fn trace_indices(&self, side: Side) -> Vec<usize> {
        let m = self.p + 1;
        (0..m)
            .map(|t| match side {
                Side::Left => t * m,
                Side::Right => t * m + self.p,
                Side::Bottom => t,
                Side::Top => self.p * m + t,
            })
            .collect()
    }

    /// Trace operator: face nodal values from element coefficients, `(p+1) x (p+1)^2`.
    pub fn trace(&self, side: Side) -> DMatrix<f64> {
        let mut t = DMatrix::zeros(self.p + 1, self.dofs_per_element());
        for (r, a) in self.trace_indices(side).into_iter().enumerate() {
            t[(r, a)] = 1.0;
        }
        t
    }

    /// Derivative along the side's normal axis (not signed by the outward
    /// direction) at the face nodes, in physical units.
    pub fn normal_derivative(&self, side: Side) -> DMatrix<f64> {
        let m = self.p + 1;
        let end = match side {
            Side::Left | Side::Bottom => 0,
            Side::Right | Side::Top => self.p,
        };
        let scale = 2.0 / self.h;
        let mut d = DMatrix::zeros(m, self.dofs_per_element());
        for t in 0..m {
            for i in 0..m {
                let a = match side {
                    Side::Left | Side::Right => t * m + i,
                    Side::Bottom | Side::Top => i * m + t,
                };
                d[(t, a)] = scale * self.diff_1d[(end, i)];
            }
        }
        d
    }

    /// Face mass `int_F phi_s phi_t ds` in the face's 1D nodal basis.
    pub fn face_mass(&self) -> DMatrix<f64> {
        &self.mass_1d * (0.5 * self.h)
    }

    /// Nodal coefficients of `d u / d x_axis` (exact, since it lies in `Q^p`).
    pub fn gradient_component(&self, axis: usize) -> DMatrix<f64> {
        let id = DMatrix::identity(self.p + 1, self.p + 1);
        let d = &self.diff_1d * (2.0 / self.h);
        if axis == 0 {
            kron(&id, &d)
        } else {
            kron(&d, &id)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gll::GllRule;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stiffness_annihilates_constants_and_is_scale_free() {
        let basis = LagrangeBasis1D::new(GllRule::new(3).unwrap());
        let a = ElementOperators::new(&basis, 0.5).unwrap();
        let b = ElementOperators::new(&basis, 2.0).unwrap();
        let ones = nalgebra::DVector::from_element(16, 1.0);
        assert!((&a.stiffness * &ones).norm() < 1e-12);
        assert!((&a.stiffness - &b.stiffness).norm() < 1e-12);
        assert_abs_diff_eq!((ones.transpose() * &a.mass * &ones)[0], 0.25, epsilon = 1e-14);
        assert!((&a.mass * &a.mass_inv - DMatrix::identity(16, 16)).norm() < 1e-9);
    }

    #[test]
    fn derivative_of_linear_function() {
        let basis = LagrangeBasis1D::new(GllRule::new(4).unwrap());
        let ops = ElementOperators::new(&basis, 0.25).unwrap();
        let x = basis.nodes();
        // u = xi + 2 eta on the reference square => du/dx = 2/h, du/dy = 4/h
        let u = nalgebra::DVector::from_fn(25, |a, _| x[a % 5] + 2.0 * x[a / 5]);
        for side in Side::ALL {
            let d = ops.normal_derivative(side) * &u;
            let expected = if side.axis() == crate::mesh::Axis::X { 2.0 / 0.25 } else { 4.0 / 0.25 };
            for v in d.iter() {
                assert_abs_diff_eq!(*v, expected, epsilon = 1e-11);
            }
        }
        let gx = ops.gradient_component(0) * &u;
        assert!(gx.iter().all(|v| (v - 8.0).abs() < 1e-11));
    }
}
