//! Constants of the Jacobi and Schwarz legs of `T_DG` as functions of `p`.
//!
//! ```text
//! cargo run --release --example constants_table -- ldg
//! ```

use hpdg::experiment::{build_case, ExperimentSpec};
use hpdg::spectral::{estimate_constants, LanczosOptions};
use hpdg::Method;

fn main() -> hpdg::Result<()> {
    let method: Method = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(Method::Sipg);
    let spec = ExperimentSpec { method, ..Default::default() };
    println!(" p   c1_J     c2_J(kerQ)  c2_J(V_B)   c1_C     c2_C");
    for p in 2..=6 {
        let case = build_case(&spec, p, 10.0)?;
        let c = estimate_constants(&case.system, &case.preconditioner, &case.dofmap, &LanczosOptions::default())?;
        println!(
            " {p}   {:.4}   {:.4}      {:<8.4}    {:.4}   {:.4}",
            c.c1_jacobi, c.c2_jacobi_ker_q, c.c2_jacobi_full_vb, c.c1_schwarz, c.c2_schwarz
        );
    }
    Ok(())
}
