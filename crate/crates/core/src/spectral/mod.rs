//! Krylov solvers and spectral estimates: CG/PCG iteration counts, condition
//! numbers of `A` and of the preconditioned operator, and the constants of
//! the Jacobi and Schwarz legs of the preconditioner.

mod lanczos;
mod pcg;
mod tridiagonal;

use serde::{Deserialize, Serialize};

pub use lanczos::{extreme_eigs, extreme_eigs_inverse, EigEstimate, InverseOperator, LanczosOptions, Target};
pub use pcg::{lanczos_from_cg, pcg, PcgOptions, SolveReport};
pub use tridiagonal::{tridiagonal_eigenvalue, tridiagonal_extremes};

use crate::assembly::AssembledSystem;
use crate::error::{Error, Result};
use crate::precond::{Preconditioner, Subspace};
use crate::space::DofMap;

/// Constants of the two legs of the preconditioner.
///
/// Jacobi: `c1 v^T A v <= v^T D v` on `V_B`, and `v^T D v <= c2 v^T A v` on
/// `ker(Q_h)` (or on all of `V_B`). Schwarz: `c1 = 1 / lambda_max(B_C A_C)`
/// and `c2 = 1 / lambda_min(B_C A_C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub c1_jacobi: f64,
    pub c2_jacobi_ker_q: f64,
    pub c2_jacobi_full_vb: f64,
    pub c1_schwarz: f64,
    pub c2_schwarz: f64,
    pub tol: f64,
    pub converged: bool,
}

fn pencil(prec: &Preconditioner, system: &AssembledSystem, dofmap: &DofMap, which: Subspace, opts: &LanczosOptions) -> Result<EigEstimate> {
    let pair = prec.subspace_operator(system, dofmap, which)?;
    extreme_eigs(&pair.a, Some(pair.inverse.as_ref()), opts)
}

pub fn estimate_constants(
    system: &AssembledSystem,
    prec: &Preconditioner,
    dofmap: &DofMap,
    opts: &LanczosOptions,
) -> Result<ConstantsReport> {
    let vb = pencil(prec, system, dofmap, Subspace::Boundary, opts)?;
    let kq = pencil(prec, system, dofmap, Subspace::KernelQ, opts)?;
    let vc = pencil(prec, system, dofmap, Subspace::Conforming, opts)?;
    Ok(ConstantsReport {
        c1_jacobi: 1.0 / vb.max,
        c2_jacobi_ker_q: 1.0 / kq.min,
        c2_jacobi_full_vb: 1.0 / vb.min,
        c1_schwarz: 1.0 / vc.max,
        c2_schwarz: 1.0 / vc.min,
        tol: opts.tol,
        converged: vb.converged && kq.converged && vc.converged,
    })
}

/// Condition numbers of `A` and of `T_DG = B A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub a: EigEstimate,
    pub preconditioned: EigEstimate,
}

impl ConditionReport {
    pub fn k_a(&self) -> f64 {
        self.a.condition_number()
    }

    pub fn k_tdg(&self) -> f64 {
        self.preconditioned.condition_number()
    }
}

/// Tolerance of the inner solves applying `A^{-1}`.
pub const INNER_TOL: f64 = 1e-12;

pub fn estimate_condition(system: &AssembledSystem, prec: &Preconditioner, opts: &LanczosOptions) -> Result<ConditionReport> {
    if prec.mode() != crate::precond::Mode::Full {
        return Err(Error::InvalidArgument("condition estimates need the full preconditioner".into()));
    }
    let a = extreme_eigs_inverse(&system.a, prec, INNER_TOL, opts)?;
    let preconditioned = extreme_eigs(&system.a, Some(prec), opts)?;
    Ok(ConditionReport { a, preconditioned })
}
