//! Lanczos estimates of the extreme eigenvalues of `B A` for SPD `A` and `B`.
//!
//! The recurrence runs in the `B^{-1}` inner product, keeping both the basis
//! vectors `q_k` and their images `B^{-1} q_k`, so `B^{-1}` is never applied.
//! Full reorthogonalization keeps the basis clean for the modest Krylov
//! dimensions needed here.

use std::cell::Cell;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::{axpy, dot, LinearOperator};

use super::pcg::{pcg, PcgOptions};

/// Which end of the spectrum must converge before the iteration stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Both,
    Largest,
    Smallest,
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Relative Ritz residual at which an extreme value counts as converged.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub target: Target,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { tol: 1e-4, max_iter: 400, seed: 42, target: Target::Both }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigEstimate {
    pub min: f64,
    pub max: f64,
    pub iterations: usize,
    /// Relative Ritz residuals of the two extreme values.
    pub residual_min: f64,
    pub residual_max: f64,
    pub converged: bool,
}

impl EigEstimate {
    pub fn condition_number(&self) -> f64 {
        self.max / self.min
    }
}

/// Extreme eigenvalues of `b * a` (of `a` alone when `b` is `None`).
pub fn extreme_eigs(a: &dyn LinearOperator, b: Option<&dyn LinearOperator>, opts: &LanczosOptions) -> Result<EigEstimate> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidArgument("empty operator".into()));
    }
    if let Some(b) = b {
        if b.dim() != n {
            return Err(Error::InvalidArgument(format!("operator sizes differ: {n} and {}", b.dim())));
        }
    }
    let apply_b = |x: &[f64]| match b {
        Some(b) => b.apply_new(x),
        None => x.to_vec(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut t: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut w = apply_b(&t);
    let mut beta = dot(&w, &t);
    if !(beta > 0.0) {
        return Err(Error::NotSpd("preconditioner is not positive definite".into()));
    }
    beta = beta.sqrt();

    let max_iter = opts.max_iter.min(n);
    let mut qs: Vec<Vec<f64>> = Vec::new();
    let mut ps: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut est = EigEstimate {
        min: f64::NAN,
        max: f64::NAN,
        iterations: 0,
        residual_min: f64::INFINITY,
        residual_max: f64::INFINITY,
        converged: false,
    };

    for k in 0..max_iter {
        let q: Vec<f64> = w.iter().map(|v| v / beta).collect();
        let p: Vec<f64> = t.iter().map(|v| v / beta).collect();
        let mut next = a.apply_new(&q);
        let alpha = dot(&q, &next);
        axpy(-alpha, &p, &mut next);
        if let Some(prev) = ps.last() {
            axpy(-beta, prev, &mut next);
        }
        qs.push(q);
        ps.push(p);
        alphas.push(alpha);
        // full reorthogonalization in the B^{-1} inner product, twice
        for _ in 0..2 {
            for (qj, pj) in qs.iter().zip(&ps) {
                let c = dot(qj, &next);
                axpy(-c, pj, &mut next);
            }
        }
        w = apply_b(&next);
        let b2 = dot(&w, &next);
        let next_beta = if b2 > 0.0 { b2.sqrt() } else { 0.0 };
        t = next;

        let m = k + 1;
        let check = m <= 40 || m % 5 == 0 || m == max_iter;
        let scale = alphas.iter().map(|a| a.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let exhausted = next_beta <= 1e-13 * scale;
        if check || exhausted {
            let tri = DMatrix::from_fn(m, m, |i, j| {
                if i == j {
                    alphas[i]
                } else if i + 1 == j {
                    betas[i]
                } else if j + 1 == i {
                    betas[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(tri);
            let (mut imin, mut imax) = (0, 0);
            for i in 0..m {
                if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                    imin = i;
                }
                if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                    imax = i;
                }
            }
            let (lmin, lmax) = (eig.eigenvalues[imin], eig.eigenvalues[imax]);
            let res = |i: usize, l: f64| (next_beta * eig.eigenvectors[(m - 1, i)]).abs() / l.abs().max(f64::MIN_POSITIVE);
            est = EigEstimate {
                min: lmin,
                max: lmax,
                iterations: m,
                residual_min: res(imin, lmin),
                residual_max: res(imax, lmax),
                converged: false,
            };
            let (lo_ok, hi_ok) = (est.residual_min <= opts.tol, est.residual_max <= opts.tol);
            est.converged = exhausted
                || match opts.target {
                    Target::Both => lo_ok && hi_ok,
                    Target::Largest => hi_ok,
                    Target::Smallest => lo_ok,
                };
            if est.converged {
                break;
            }
        }
        betas.push(next_beta);
        beta = next_beta;
    }
    if !(est.min > 0.0) && est.converged && opts.target != Target::Largest {
        return Err(Error::NotSpd(format!("non-positive eigenvalue estimate {:e}", est.min)));
    }
    Ok(est)
}

/// `A^{-1}` applied approximately by PCG with a fixed preconditioner.
pub struct InverseOperator<'a> {
    a: &'a dyn LinearOperator,
    prec: &'a dyn LinearOperator,
    opts: PcgOptions,
    failures: Cell<usize>,
}

impl<'a> InverseOperator<'a> {
    pub fn new(a: &'a dyn LinearOperator, prec: &'a dyn LinearOperator, rel_tol: f64) -> Self {
        InverseOperator { a, prec, opts: PcgOptions::with_tol(rel_tol), failures: Cell::new(0) }
    }

    /// Number of inner solves that did not reach the tolerance.
    pub fn failures(&self) -> usize {
        self.failures.get()
    }
}

impl LinearOperator for InverseOperator<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        match pcg(self.a, self.prec, x, &self.opts) {
            Ok((sol, rep)) => {
                if !rep.converged {
                    self.failures.set(self.failures.get() + 1);
                }
                y.copy_from_slice(&sol);
            }
            Err(_) => {
                self.failures.set(self.failures.get() + 1);
                y.fill(f64::NAN);
            }
        }
    }
}

/// Extreme eigenvalues of `A` itself: the top of the spectrum directly, the
/// bottom as the reciprocal of the top of `A^{-1}`, whose inverse is applied
/// by PCG with `prec`.
pub fn extreme_eigs_inverse(
    a: &dyn LinearOperator,
    prec: &dyn LinearOperator,
    inner_tol: f64,
    opts: &LanczosOptions,
) -> Result<EigEstimate> {
    let opts = LanczosOptions { target: Target::Largest, ..*opts };
    let top = extreme_eigs(a, None, &opts)?;
    let inv = InverseOperator::new(a, prec, inner_tol);
    let bottom = extreme_eigs(&inv, None, &opts)?;
    if inv.failures() > 0 || !bottom.max.is_finite() {
        return Err(Error::NumericFailure(format!("{} inner solves failed while estimating lambda_min", inv.failures())));
    }
    Ok(EigEstimate {
        min: 1.0 / bottom.max,
        max: top.max,
        iterations: top.iterations + bottom.iterations,
        residual_min: bottom.residual_max,
        residual_max: top.residual_max,
        converged: top.converged && bottom.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Diagonal, Identity};

    #[test]
    fn diagonal_one_to_ten() {
        let d = Diagonal((1..=10).map(|i| i as f64).collect());
        let e = extreme_eigs(&d, None, &LanczosOptions::default()).unwrap();
        assert!((e.min - 1.0).abs() < 1e-10 && (e.max - 10.0).abs() < 1e-10);
        assert!(e.converged);
    }

    #[test]
    fn generalized_pencil() {
        // B A with B = diag(1/d) and A = diag(d * s) has spectrum s
        let n = 200;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let s: Vec<f64> = (0..n).map(|i| 0.5 + 3.0 * i as f64 / (n - 1) as f64).collect();
        let a = Diagonal(d.iter().zip(&s).map(|(x, y)| x * y).collect());
        let b = Diagonal(d.iter().map(|x| 1.0 / x).collect());
        let opts = LanczosOptions { tol: 1e-8, ..Default::default() };
        let e = extreme_eigs(&a, Some(&b), &opts).unwrap();
        assert!((e.min - 0.5).abs() < 1e-6, "{e:?}");
        assert!((e.max - 3.5).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn inverse_route_recovers_smallest() {
        let a = Diagonal((1..=300).map(|i| (i * i) as f64).collect());
        let e = extreme_eigs_inverse(&a, &Identity(300), 1e-12, &LanczosOptions::default()).unwrap();
        assert!((e.min - 1.0).abs() < 1e-6);
        assert!((e.max - 90000.0).abs() / 90000.0 < 1e-4);
    }
}
