//! Solves the table problem (`f = 1`) with CG and with PCG under `T_DG`, and
//! prints the residual histories.
//!
//! ```text
//! cargo run --release --example solve_pcg -- sipg 3
//! ```

use hpdg::operator::Identity;
use hpdg::spectral::{pcg, PcgOptions};
use hpdg::{assemble, DgConfig, DofMap, Mesh, Method, Preconditioner};

fn main() -> hpdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let method: Method = args.next().map(|s| s.parse()).transpose()?.unwrap_or(Method::Sipg);
    let p: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let config = match method {
        Method::Sipg => DgConfig::sipg(10.0),
        Method::Ldg => DgConfig::ldg(10.0, [1.0, 1.0]),
    };
    let mesh = Mesh::new(16, (-1.0, 1.0))?;
    let dofmap = DofMap::new(&mesh, p)?;
    let sys = assemble(&mesh, &dofmap, &config, &|_, _| 1.0)?;
    let prec = Preconditioner::build(&sys, &mesh, &dofmap)?;
    let opts = PcgOptions::with_tol(1e-8);

    let (_, cg) = pcg(&sys.a, &Identity(sys.dim()), &sys.rhs, &opts)?;
    let (x, pc) = pcg(&sys.a, &prec, &sys.rhs, &opts)?;
    println!("{method} p={p}: {} dofs", sys.dim());
    println!("  CG  {:>5} iterations, Ritz condition estimate {:.4e}", cg.iterations, cg.condition_number);
    println!("  PCG {:>5} iterations, Ritz condition estimate {:.4}", pc.iterations, pc.condition_number);
    for (k, r) in pc.residual_history.iter().enumerate().step_by(4) {
        println!("    pcg {:>3}  |r|/|r0| = {r:.3e}", k + 1);
    }
    let umax = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("  max nodal value of u_h: {umax:.6}");
    Ok(())
}
