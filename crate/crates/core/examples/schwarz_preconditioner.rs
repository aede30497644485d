//! Anatomy of `T_DG`: sizes of the Jacobi and Schwarz legs. Each leg alone
//! is singular on the DG space, so only the sum is a usable preconditioner.
//!
//! ```text
//! cargo run --release --example schwarz_preconditioner -- 3
//! ```

use hpdg::spectral::{pcg, PcgOptions};
use hpdg::{assemble, DgConfig, DofMap, Mesh, Mode, Preconditioner};

fn main() -> hpdg::Result<()> {
    let p: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mesh = Mesh::new(16, (-1.0, 1.0))?;
    let dofmap = DofMap::new(&mesh, p)?;
    let sys = assemble(&mesh, &dofmap, &DgConfig::sipg(10.0), &|_, _| 1.0)?;
    let prec = Preconditioner::build(&sys, &mesh, &dofmap)?;
    println!("DG dofs            {}", sys.dim());
    println!("boundary-node dofs {}", prec.jacobi.dofs().len());
    println!("conforming dofs    {}", prec.schwarz.conforming_map().dim());
    println!("coarse dofs        {}", prec.schwarz.coarse_dim());
    println!(
        "vertex patches     {} of size {}",
        prec.schwarz.num_patches(),
        prec.schwarz.patch_dofs(0).len()
    );
    let opts = PcgOptions { max_iter: 5000, ..PcgOptions::with_tol(1e-8) };
    for mode in [Mode::Full, Mode::JacobiOnly, Mode::SchwarzOnly] {
        let prec = Preconditioner::build(&sys, &mesh, &dofmap)?.with_mode(mode);
        match pcg(&sys.a, &prec, &sys.rhs, &opts) {
            Ok((_, report)) => println!("{mode:?}: {} iterations, converged {}", report.iterations, report.converged),
            Err(e) => println!("{mode:?}: {e}"),
        }
    }
    Ok(())
}
