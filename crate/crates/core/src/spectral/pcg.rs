//! Preconditioned conjugate gradients with Ritz-value estimates taken from
//! the CG coefficients.

use crate::error::{Error, Result};
use crate::operator::{axpy, dot, norm2, LinearOperator};

use super::tridiagonal::tridiagonal_extremes;

#[derive(Debug, Clone, Copy)]
pub struct PcgOptions {
    /// Relative residual reduction `||r_k|| / ||r_0||`.
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Keep every search direction (for orthogonality diagnostics).
    pub keep_directions: bool,
}

impl Default for PcgOptions {
    fn default() -> Self {
        PcgOptions { rel_tol: 1e-8, max_iter: 20_000, keep_directions: false }
    }
}

impl PcgOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        PcgOptions { rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||r_k|| / ||r_0||` for `k = 1..=iterations`.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Extreme Ritz values of the preconditioned operator.
    pub eig_min: f64,
    pub eig_max: f64,
    pub condition_number: f64,
    pub directions: Vec<Vec<f64>>,
}

/// Solves `A x = b` from a zero initial guess with preconditioner `B`.
pub fn pcg(
    a: &dyn LinearOperator,
    b: &dyn LinearOperator,
    rhs: &[f64],
    opts: &PcgOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.dim();
    if rhs.len() != n || b.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: operator {n}, preconditioner {}, rhs {}",
            b.dim(),
            rhs.len()
        )));
    }
    if !rhs.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("right-hand side is not finite".into()));
    }
    if !(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) {
        return Err(Error::InvalidArgument(format!("relative tolerance must lie in (0, 1), got {}", opts.rel_tol)));
    }
    let mut x = vec![0.0; n];
    let mut report = SolveReport { eig_min: 1.0, eig_max: 1.0, condition_number: 1.0, ..Default::default() };
    let mut r = rhs.to_vec();
    let r0 = norm2(&r);
    if r0 == 0.0 {
        report.converged = true;
        return Ok((x, report));
    }
    let mut z = b.apply_new(&r);
    let mut rz = dot(&r, &z);
    if !(rz > 0.0) {
        return Err(Error::NotSpd("preconditioner is not positive definite".into()));
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();

    for k in 1..=opts.max_iter {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::NotSpd(format!("non-positive curvature {pq:e} at iteration {k}")));
        }
        if opts.keep_directions {
            report.directions.push(p.clone());
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        alphas.push(alpha);
        let rel = norm2(&r) / r0;
        report.residual_history.push(rel);
        report.iterations = k;
        if rel <= opts.rel_tol {
            report.converged = true;
            break;
        }
        b.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        if !(rz_new > 0.0) {
            return Err(Error::NotSpd("preconditioner is not positive definite".into()));
        }
        let beta = rz_new / rz;
        rz = rz_new;
        betas.push(beta);
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }

    let (diag, off) = lanczos_from_cg(&alphas, &betas);
    let (lo, hi) = tridiagonal_extremes(&diag, &off);
    report.eig_min = lo;
    report.eig_max = hi;
    report.condition_number = hi / lo;
    Ok((x, report))
}

/// Tridiagonal Lanczos matrix equivalent to `k` CG steps.
pub fn lanczos_from_cg(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = alphas.len();
    let diag = (0..k)
        .map(|i| {
            let mut d = 1.0 / alphas[i];
            if i > 0 {
                d += betas[i - 1] / alphas[i - 1];
            }
            d
        })
        .collect();
    let off = (0..k.saturating_sub(1)).map(|i| betas[i].sqrt() / alphas[i]).collect();
    (diag, off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Diagonal, Identity};

    #[test]
    fn identity_converges_in_one_step() {
        let b = vec![1.0, 2.0, 3.0];
        let (x, rep) = pcg(&Identity(3), &Identity(3), &b, &PcgOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!((rep.condition_number - 1.0).abs() < 1e-14);
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system_and_ritz_values() {
        let d: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let b = vec![1.0; 10];
        let opts = PcgOptions { rel_tol: 1e-12, ..Default::default() };
        let (x, rep) = pcg(&Diagonal(d.clone()), &Identity(10), &b, &opts).unwrap();
        for (xi, di) in x.iter().zip(&d) {
            assert!((xi * di - 1.0).abs() < 1e-10);
        }
        assert_eq!(rep.iterations, 10);
        assert!((rep.eig_min - 1.0).abs() < 1e-8);
        assert!((rep.eig_max - 10.0).abs() < 1e-8);
        // exact Jacobi preconditioning
        let inv: Vec<f64> = d.iter().map(|v| 1.0 / v).collect();
        let (_, rep) = pcg(&Diagonal(d), &Diagonal(inv), &b, &opts).unwrap();
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn rejects_indefinite_and_bad_input() {
        let a = Diagonal(vec![1.0, -1.0]);
        assert!(matches!(pcg(&a, &Identity(2), &[1.0, 1.0], &PcgOptions::default()), Err(Error::NotSpd(_))));
        assert!(pcg(&Identity(2), &Identity(2), &[1.0], &PcgOptions::default()).is_err());
        assert!(pcg(&Identity(2), &Identity(2), &[1.0, 0.0], &PcgOptions::with_tol(0.0)).is_err());
    }

    #[test]
    fn zero_rhs_is_trivially_converged() {
        let (x, rep) = pcg(&Identity(2), &Identity(2), &[0.0, 0.0], &PcgOptions::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn stops_at_iteration_budget() {
        let d: Vec<f64> = (1..=50).map(|i| (i * i) as f64).collect();
        let opts = PcgOptions { max_iter: 5, ..Default::default() };
        let (_, rep) = pcg(&Diagonal(d), &Identity(50), &vec![1.0; 50], &opts).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 5);
        assert_eq!(rep.residual_history.len(), 5);
    }
}
