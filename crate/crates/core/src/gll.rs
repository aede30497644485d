//! Gauss–Legendre–Lobatto and Gauss–Legendre rules on `[-1, 1]`, and the
//! one-dimensional Lagrange basis on GLL nodes.

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_STEPS: usize = 100;

/// Legendre polynomial `P_n(x)` and its derivative, by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let d_next = d_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// GLL nodes and weights for polynomial degree `p` (so `p + 1` points).
#[derive(Debug, Clone, PartialEq)]
pub struct GllRule {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GllRule {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("GLL rule needs degree >= 1".into()));
        }
        let pf = p as f64;
        let mut nodes = vec![0.0; p + 1];
        nodes[0] = -1.0;
        nodes[p] = 1.0;
        for k in 1..p {
            // Chebyshev-Gauss-Lobatto starting guess; Newton on (1 - x^2) P_p'(x),
            // which is proportional to P_{p-1}(x) - x P_p(x).
            let mut x = -(std::f64::consts::PI * k as f64 / pf).cos();
            let mut converged = false;
            for _ in 0..NEWTON_MAX_STEPS {
                let (pp, _) = legendre(p, x);
                let (pm, _) = legendre(p - 1, x);
                let dx = (x * pp - pm) / (pf + 1.0) / pp;
                x -= dx;
                if dx.abs() <= NEWTON_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NumericFailure(format!("GLL Newton iteration did not converge for p = {p}")));
            }
            nodes[k] = x;
        }
        // exact symmetry
        for k in 0..=p / 2 {
            let m = 0.5 * (nodes[p - k] - nodes[k]);
            nodes[k] = -m;
            nodes[p - k] = m;
        }
        if p % 2 == 0 {
            nodes[p / 2] = 0.0;
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let (lp, _) = legendre(p, x);
                2.0 / (pf * (pf + 1.0) * lp * lp)
            })
            .collect();
        Ok(GllRule { degree: p, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule with `q` points, exact up to degree `2q - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("Gauss rule needs at least one point".into()));
        }
        let qf = q as f64;
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        for k in 0..q {
            let mut x = -(std::f64::consts::PI * (k as f64 + 0.75) / (qf + 0.5)).cos();
            let mut converged = false;
            for _ in 0..NEWTON_MAX_STEPS {
                let (p, d) = legendre(q, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= NEWTON_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NumericFailure(format!("Gauss Newton iteration did not converge for q = {q}")));
            }
            let (_, d) = legendre(q, x);
            nodes[k] = x;
            weights[k] = 2.0 / ((1.0 - x * x) * d * d);
        }
        for k in 0..q / 2 {
            let m = 0.5 * (nodes[q - 1 - k] - nodes[k]);
            nodes[k] = -m;
            nodes[q - 1 - k] = m;
            let w = 0.5 * (weights[k] + weights[q - 1 - k]);
            weights[k] = w;
            weights[q - 1 - k] = w;
        }
        if q % 2 == 1 {
            nodes[q / 2] = 0.0;
        }
        Ok(GaussRule { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Values and first derivatives of every basis function at a point set;
/// `values[q][i] = phi_i(x_q)`.
#[derive(Debug, Clone)]
pub struct BasisTable {
    pub values: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
}

/// Lagrange polynomials through the GLL nodes, evaluated in barycentric form.
#[derive(Debug, Clone)]
pub struct LagrangeBasis1D {
    pub rule: GllRule,
    bary: Vec<f64>,
    /// `diff[k][i] = phi_i'(x_k)` at the nodes.
    diff: Vec<Vec<f64>>,
}

impl LagrangeBasis1D {
    pub fn new(rule: GllRule) -> Self {
        let x = &rule.nodes;
        let m = x.len();
        let bary: Vec<f64> = (0..m)
            .map(|i| 1.0 / (0..m).filter(|&j| j != i).map(|j| x[i] - x[j]).product::<f64>())
            .collect();
        let mut diff = vec![vec![0.0; m]; m];
        for k in 0..m {
            let mut diag = 0.0;
            for i in 0..m {
                if i != k {
                    let d = bary[i] / bary[k] / (x[k] - x[i]);
                    diff[k][i] = d;
                    diag -= d;
                }
            }
            diff[k][k] = diag;
        }
        LagrangeBasis1D { rule, bary, diff }
    }

    pub fn degree(&self) -> usize {
        self.rule.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    /// Derivative of basis function `i` at node `k`.
    pub fn node_derivative(&self, k: usize, i: usize) -> f64 {
        self.diff[k][i]
    }

    /// All basis values at one point.
    pub fn values_at(&self, x: f64) -> Vec<f64> {
        let nodes = &self.rule.nodes;
        if let Some(k) = nodes.iter().position(|&xk| xk == x) {
            let mut v = vec![0.0; nodes.len()];
            v[k] = 1.0;
            return v;
        }
        let terms: Vec<f64> = nodes.iter().zip(&self.bary).map(|(&xk, &b)| b / (x - xk)).collect();
        let denom: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// All basis derivatives at one point; `phi_i'` is reproduced exactly by its
    /// interpolant, so `phi_i'(x) = sum_k phi_i'(x_k) phi_k(x)`.
    pub fn derivatives_at(&self, x: f64) -> Vec<f64> {
        let vals = self.values_at(x);
        let m = vals.len();
        (0..m).map(|i| (0..m).map(|k| self.diff[k][i] * vals[k]).sum()).collect()
    }

    pub fn eval(&self, points: &[f64]) -> BasisTable {
        BasisTable {
            values: points.iter().map(|&x| self.values_at(x)).collect(),
            derivatives: points.iter().map(|&x| self.derivatives_at(x)).collect(),
        }
    }

    /// Interpolates nodal coefficients of this basis at `points`.
    pub fn interpolate(&self, coefficients: &[f64], x: f64) -> f64 {
        self.values_at(x).iter().zip(coefficients).map(|(a, b)| a * b).sum()
    }
}

/// Squared discrete norm `sum v(xi)^2 w_xi` over the tensor GLL nodes of the
/// reference square; `values` is ordered with the x index fastest.
pub fn discrete_gll_norm_sq(values: &[f64], rule: &GllRule) -> f64 {
    let m = rule.len();
    assert_eq!(values.len(), m * m, "expected (p+1)^2 nodal values");
    let mut s = 0.0;
    for j in 0..m {
        for i in 0..m {
            let v = values[j * m + i];
            s += v * v * rule.weights[i] * rule.weights[j];
        }
    }
    s
}

/// One-dimensional reference matrices of the nodal basis, integrated exactly
/// with a `(p + 1)`-point Gauss rule.
#[derive(Debug, Clone)]
pub struct ReferenceMatrices1D {
    /// `mass[i][j] = int phi_i phi_j`
    pub mass: Vec<Vec<f64>>,
    /// `stiffness[i][j] = int phi_i' phi_j'`
    pub stiffness: Vec<Vec<f64>>,
}

impl ReferenceMatrices1D {
    pub fn new(basis: &LagrangeBasis1D) -> Result<Self> {
        let m = basis.degree() + 1;
        let gauss = GaussRule::new(m)?;
        let table = basis.eval(&gauss.nodes);
        let mut mass = vec![vec![0.0; m]; m];
        let mut stiffness = vec![vec![0.0; m]; m];
        for (q, &w) in gauss.weights.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    mass[i][j] += w * table.values[q][i] * table.values[q][j];
                    stiffness[i][j] += w * table.derivatives[q][i] * table.derivatives[q][j];
                }
            }
        }
        Ok(ReferenceMatrices1D { mass, stiffness })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gll_closed_forms() {
        let r = GllRule::new(2).unwrap();
        assert_eq!(r.nodes, vec![-1.0, 0.0, 1.0]);
        for (w, e) in r.weights.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert_abs_diff_eq!(*w, e, epsilon = 1e-15);
        }
        let r = GllRule::new(3).unwrap();
        let s = 1.0 / 5f64.sqrt();
        for (x, e) in r.nodes.iter().zip([-1.0, -s, s, 1.0]) {
            assert_abs_diff_eq!(*x, e, epsilon = 1e-15);
        }
        for (w, e) in r.weights.iter().zip([1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0]) {
            assert_abs_diff_eq!(*w, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn gauss_closed_forms() {
        let r = GaussRule::new(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_abs_diff_eq!(r.weights[0], 2.0, epsilon = 1e-15);
        let r = GaussRule::new(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -s, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], s, epsilon = 1e-15);
        assert_abs_diff_eq!(r.integrate(|x| x * x), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn rules_up_to_degree_64() {
        for p in 1..=64 {
            let r = GllRule::new(p).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let g = GaussRule::new(p).unwrap();
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert_abs_diff_eq!(g.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
        assert!(GllRule::new(0).is_err());
        assert!(GaussRule::new(0).is_err());
    }

    #[test]
    fn gll_exactness_degree_2p_minus_1() {
        for p in 1..=12 {
            let r = GllRule::new(p).unwrap();
            for k in 0..=(2 * p - 1) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() <= 1e-13 * exact.abs().max(1.0), "p={p} k={k}");
            }
            // degree 2p is not integrated exactly
            if p <= 6 {
                let k = 2 * p;
                let exact = 2.0 / (k as f64 + 1.0);
                assert!((r.integrate(|x| x.powi(k as i32)) - exact).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn cardinality_and_partition_of_unity() {
        for p in 2..=10 {
            let b = LagrangeBasis1D::new(GllRule::new(p).unwrap());
            let t = b.eval(&b.rule.nodes.clone());
            for (k, row) in t.values.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    assert_eq!(v, if i == k { 1.0 } else { 0.0 });
                }
            }
            let pts: Vec<f64> = (0..37).map(|k| -1.0 + 2.0 * k as f64 / 36.0 + 1e-3 * (k as f64).sin()).collect();
            let t = b.eval(&pts);
            for q in 0..pts.len() {
                assert_abs_diff_eq!(t.values[q].iter().sum::<f64>(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(t.derivatives[q].iter().sum::<f64>(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn reproduces_monomials_at_gauss_points() {
        for p in 2..=10 {
            let b = LagrangeBasis1D::new(GllRule::new(p).unwrap());
            let coeffs: Vec<f64> = b.nodes().iter().map(|x| x.powi(p as i32)).collect();
            let g = GaussRule::new(p + 1).unwrap();
            let t = b.eval(&g.nodes);
            for (q, &x) in g.nodes.iter().enumerate() {
                let v: f64 = t.values[q].iter().zip(&coeffs).map(|(a, c)| a * c).sum();
                let d: f64 = t.derivatives[q].iter().zip(&coeffs).map(|(a, c)| a * c).sum();
                assert_abs_diff_eq!(v, x.powi(p as i32), epsilon = 1e-12);
                assert_abs_diff_eq!(d, p as f64 * x.powi(p as i32 - 1), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn discrete_norm_examples() {
        let r = GllRule::new(4).unwrap();
        let m = r.len();
        assert_abs_diff_eq!(discrete_gll_norm_sq(&vec![1.0; m * m], &r), 4.0, epsilon = 1e-14);
        let mut v = vec![0.0; m * m];
        v[2 * m + 1] = 1.0;
        assert_abs_diff_eq!(discrete_gll_norm_sq(&v, &r), r.weights[1] * r.weights[2], epsilon = 1e-15);
    }

    #[test]
    fn reference_matrices() {
        let b = LagrangeBasis1D::new(GllRule::new(3).unwrap());
        let m = ReferenceMatrices1D::new(&b).unwrap();
        let total: f64 = m.mass.iter().flatten().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
        // constants lie in the kernel of the stiffness matrix
        for row in &m.stiffness {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
        }
    }
}
