//! Measured constants of the norm inequalities behind the preconditioner
//! analysis: element trace bounds, the Oswald approximation estimate, the
//! stability of the `V_B + V_C` splitting and the spectral bounds of `A`.
//!
//! Everything here is a diagnostic; none of it is used by the solver.

use nalgebra::{DMatrix, DVector};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assembly::{face_operators, AssembledSystem, DgConfig, ElementOperators};
use crate::error::{Error, Result};
use crate::gll::{GllRule, LagrangeBasis1D};
use crate::mesh::{Mesh, Side};
use crate::space::DofMap;

/// Largest eigenvalue of the pencil `a x = lambda b x`, `b` SPD.
pub fn generalized_max(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let chol = b.clone().cholesky().ok_or(Error::NotSpd("pencil right-hand matrix".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Internal("singular Cholesky factor".into()))?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    Ok(c.symmetric_eigen().eigenvalues.max())
}

/// Trace and inverse trace constants on one element of `Q^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConstants {
    /// Smallest `C` with `|v|^2_{boundary} <= C (p^2/h) |v|^2_kappa` on `Q^p`.
    pub trace: f64,
    /// Smallest `C` with `|v|^2_kappa <= C (h/p^2) |v|^2_{boundary}` on the
    /// functions vanishing at element-interior nodes.
    pub inverse_trace: f64,
}

/// Both constants are independent of `h`, so they are evaluated on a unit
/// square.
pub fn trace_constants(p: usize) -> Result<TraceConstants> {
    let basis = LagrangeBasis1D::new(GllRule::new(p)?);
    let ops = ElementOperators::new(&basis, 1.0)?;
    let w = ops.face_mass();
    let mut boundary_mass = DMatrix::zeros(ops.dofs_per_element(), ops.dofs_per_element());
    for side in Side::ALL {
        let t = ops.trace(side);
        boundary_mass += t.transpose() * &w * t;
    }
    let p2 = (p * p) as f64;
    let trace = generalized_max(&boundary_mass, &ops.mass)? / p2;

    let m = p + 1;
    let boundary: Vec<usize> = (0..ops.dofs_per_element())
        .filter(|&a| {
            let (i, j) = (a % m, a / m);
            i == 0 || j == 0 || i == p || j == p
        })
        .collect();
    let sub = |mat: &DMatrix<f64>| DMatrix::from_fn(boundary.len(), boundary.len(), |r, c| mat[(boundary[r], boundary[c])]);
    let inverse_trace = generalized_max(&sub(&ops.mass), &sub(&boundary_mass))? * p2;
    Ok(TraceConstants { trace, inverse_trace })
}

/// Element-wise norms of DG functions on a fixed mesh and space.
pub struct Norms<'a> {
    mesh: &'a Mesh,
    dofmap: &'a DofMap,
    ops: ElementOperators,
}

impl<'a> Norms<'a> {
    pub fn new(mesh: &'a Mesh, dofmap: &'a DofMap) -> Result<Self> {
        let ops = ElementOperators::new(dofmap.basis(), mesh.h())?;
        Ok(Norms { mesh, dofmap, ops })
    }

    fn local(&self, v: &[f64], element: usize) -> DVector<f64> {
        DVector::from_iterator(self.ops.dofs_per_element(), self.dofmap.element_dofs(element).map(|d| v[d]))
    }

    /// `|v|^2_{L2(kappa)}`.
    pub fn element_l2_sq(&self, v: &[f64], element: usize) -> f64 {
        let x = self.local(v, element);
        x.dot(&(&self.ops.mass * &x))
    }

    /// `sum_kappa |v|^2_{L2(kappa)}`.
    pub fn l2_sq(&self, v: &[f64]) -> f64 {
        (0..self.mesh.elements().len()).map(|e| self.element_l2_sq(v, e)).sum()
    }

    /// `|[v]|^2_{L2(F)}`; on boundary faces the jump is the trace.
    pub fn jump_sq(&self, v: &[f64], face: usize) -> f64 {
        let fo = face_operators(&self.ops, self.dofmap, &self.mesh.faces()[face]);
        let x = DVector::from_iterator(fo.cols.len(), fo.cols.iter().map(|&d| v[d]));
        let j = &fo.jump * x;
        j.dot(&(self.ops.face_mass() * &j))
    }

    /// Faces with at least one point in common with the closed element,
    /// including those meeting it only at a vertex.
    pub fn touching_faces(&self, element: usize) -> Vec<usize> {
        let h = self.mesh.h();
        let o = self.mesh.element(element).origin;
        let inside = |x: [f64; 2]| {
            let tol = 1e-9 * h;
            x[0] >= o[0] - tol && x[0] <= o[0] + h + tol && x[1] >= o[1] - tol && x[1] <= o[1] + h + tol
        };
        self.mesh
            .faces()
            .iter()
            .filter(|f| {
                let (a, b) = face_endpoints(self.mesh, f.plus, f.plus_side);
                inside(a) || inside(b)
            })
            .map(|f| f.id)
            .collect()
    }

    /// Largest element ratio `|v - Q_h v|^2_kappa / ((h/p^2) sum_F |[v]|^2_F)`
    /// over the faces `F` touching `kappa`.
    pub fn oswald_ratio(&self, v: &[f64]) -> f64 {
        let q = self.dofmap.oswald(v);
        let diff: Vec<f64> = v.iter().zip(&q).map(|(a, b)| a - b).collect();
        let jumps: Vec<f64> = (0..self.mesh.faces().len()).map(|f| self.jump_sq(v, f)).collect();
        let p = self.dofmap.degree() as f64;
        let scale = self.mesh.h() / (p * p);
        let mut worst = 0.0f64;
        for e in 0..self.mesh.elements().len() {
            let den: f64 = self.touching_faces(e).iter().map(|&f| jumps[f]).sum::<f64>() * scale;
            let num = self.element_l2_sq(&diff, e);
            if den > 1e-300 {
                worst = worst.max(num / den);
            } else if num > 1e-12 {
                return f64::INFINITY;
            }
        }
        worst
    }

    /// Supremum of the element ratio of [`Norms::oswald_ratio`] over all `v`,
    /// from the generalized eigenproblem on the block of elements around
    /// `element`.
    pub fn oswald_constant(&self, element: usize) -> Result<f64> {
        let n = self.mesh.n();
        let el = self.mesh.element(element);
        let mut block = Vec::new();
        for row in el.row.saturating_sub(1)..=(el.row + 1).min(n - 1) {
            for col in el.col.saturating_sub(1)..=(el.col + 1).min(n - 1) {
                block.push(self.mesh.element_id(row, col));
            }
        }
        let local: Vec<usize> = block.iter().flat_map(|&e| self.dofmap.element_dofs(e)).collect();
        let position = |d: usize| local.iter().position(|&x| x == d);
        let npe = self.ops.dofs_per_element();
        let own: Vec<usize> = self.dofmap.element_dofs(element).collect();

        // (v - Q_h v) on kappa as a map from the block dofs
        let mut l = DMatrix::zeros(npe, local.len());
        let mut v = vec![0.0; self.dofmap.total_dofs()];
        for (c, &d) in local.iter().enumerate() {
            v[d] = 1.0;
            let q = self.dofmap.oswald(&v);
            for (r, &k) in own.iter().enumerate() {
                l[(r, c)] = v[k] - q[k];
            }
            v[d] = 0.0;
        }
        let num = l.transpose() * &self.ops.mass * &l;

        let p = self.dofmap.degree() as f64;
        let w = self.ops.face_mass();
        let mut den = DMatrix::zeros(local.len(), local.len());
        for f in self.touching_faces(element) {
            let fo = face_operators(&self.ops, self.dofmap, &self.mesh.faces()[f]);
            let mut j = DMatrix::zeros(fo.jump.nrows(), local.len());
            for (c, &d) in fo.cols.iter().enumerate() {
                let k = position(d).ok_or_else(|| Error::Internal("face outside the element block".into()))?;
                j.column_mut(k).copy_from(&fo.jump.column(c));
            }
            den += j.transpose() * &w * j;
        }
        den *= self.mesh.h() / (p * p);
        range_generalized_max(&num, &den)
    }
}

/// End points of the side of an element.
fn face_endpoints(mesh: &Mesh, element: usize, side: Side) -> ([f64; 2], [f64; 2]) {
    let h = mesh.h();
    let [x, y] = mesh.element(element).origin;
    match side {
        Side::Left => ([x, y], [x, y + h]),
        Side::Right => ([x + h, y], [x + h, y + h]),
        Side::Bottom => ([x, y], [x + h, y]),
        Side::Top => ([x, y + h], [x + h, y + h]),
    }
}

/// Largest eigenvalue of `a x = lambda b x` with `b` only semidefinite, for
/// `a` vanishing on `ker b`: the pencil is reduced to the range of `b`.
pub fn range_generalized_max(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    // drop rows of b that vanish identically before the eigensolve
    let active: Vec<usize> = (0..b.nrows()).filter(|&i| b.row(i).iter().any(|&x| x != 0.0)).collect();
    let pick = |m: &DMatrix<f64>| DMatrix::from_fn(active.len(), active.len(), |r, c| m[(active[r], active[c])]);
    let (a, b) = (pick(a), pick(b));
    let b = (&b + b.transpose()) * 0.5;
    let eig = b.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericFailure("eigensolver did not converge".into()));
    }
    let top = eig.eigenvalues.amax();
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > 1e-10 * top).collect();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("pencil right-hand matrix vanishes".into()));
    }
    let mut scaled = DMatrix::zeros(b.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        scaled.set_column(c, &(eig.eigenvectors.column(i) / eig.eigenvalues[i].sqrt()));
    }
    let c = scaled.transpose() * a * &scaled;
    let c = (&c + c.transpose()) * 0.5;
    Ok(c.symmetric_eigen().eigenvalues.max())
}

/// `[A(v - Q_h v) + A(Q_h v)] / A(v)` for the splitting of `v`.
pub fn stability_ratio(system: &AssembledSystem, dofmap: &DofMap, v: &[f64]) -> f64 {
    let q = dofmap.oswald(v);
    let diff: Vec<f64> = v.iter().zip(&q).map(|(a, b)| a - b).collect();
    (system.a.quadratic_form(&diff) + system.a.quadratic_form(&q)) / system.a.quadratic_form(v)
}

/// `v^T A v / v^T A~ v` with `A~ = A_grad + sigma A_jump`.
pub fn tilde_ratio(system: &AssembledSystem, v: &[f64]) -> f64 {
    let (grad, jump) = system.energy_norms(v);
    system.a.quadratic_form(v) / (grad + jump)
}

/// Extremes of sampled ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampled {
    pub min: f64,
    pub max: f64,
}

impl Sampled {
    fn new() -> Self {
        Sampled { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn push(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }
}

/// Random DG coefficient vectors, uniform in `[-1, 1]`.
pub fn random_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-1.0, 1.0);
    (0..count).map(|_| (0..dim).map(|_| dist.sample(&mut rng)).collect()).collect()
}

/// Sampled constants of the spectral bounds of `A`:
/// `sum |v|^2_kappa <= c1 A(v,v)` and `A(v,v) <= c2 (alpha p^4/h^2) sum |v|^2_kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub c1: f64,
    pub c2: f64,
}

pub fn sampled_spectral_bounds(
    system: &AssembledSystem,
    mesh: &Mesh,
    dofmap: &DofMap,
    config: &DgConfig,
    samples: &[Vec<f64>],
) -> Result<SpectralBounds> {
    let norms = Norms::new(mesh, dofmap)?;
    let p = dofmap.degree() as f64;
    let scale = config.alpha * p.powi(4) / (mesh.h() * mesh.h());
    let (mut lower, mut upper) = (Sampled::new(), Sampled::new());
    for v in samples {
        let (l2, energy) = (norms.l2_sq(v), system.a.quadratic_form(v));
        lower.push(l2 / energy);
        upper.push(energy / (scale * l2));
    }
    Ok(SpectralBounds { c1: lower.max, c2: upper.max })
}

/// Extremes of `f` over the samples.
pub fn sample_extremes(samples: &[Vec<f64>], f: impl Fn(&[f64]) -> f64) -> Sampled {
    let mut s = Sampled::new();
    for v in samples {
        s.push(f(v));
    }
    s
}

/// Least-squares slope of `ys / mean(ys)` against `xs`: the relative growth
/// per unit step.
pub fn relative_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / n;
    let xm = xs.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y / ym - 1.0)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    sxy / sxx
}
