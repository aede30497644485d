//! Sweeps the penalty parameter at `p = 2`: `K(A)` grows like `alpha` while
//! the preconditioned condition number stays bounded.
//!
//! ```text
//! cargo run --release --example alpha_robustness -- ldg
//! ```

use hpdg::experiment::{run, ExperimentSpec, Task};
use hpdg::Method;

fn main() -> hpdg::Result<()> {
    let method: Method = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(Method::Sipg);
    let spec = ExperimentSpec {
        method,
        degrees: vec![2],
        alphas: vec![2.0, 5.0, 10.0, 1e2, 1e3, 1e4],
        tasks: vec![Task::ConditionNumbers, Task::Iterations],
        ..Default::default()
    };
    let out = run(&spec)?;
    println!("{:>8} {:>12} {:>8} {:>8} {:>6}", "alpha", "K(A)", "K(T_DG)", "CG", "PCG");
    for r in &out.rows {
        println!(
            "{:>8} {:>12.4e} {:>8.3} {:>8} {:>6}",
            r.alpha,
            r.k_a.unwrap_or(f64::NAN),
            r.k_tdg.unwrap_or(f64::NAN),
            r.cg_iters.unwrap_or(0),
            r.pcg_iters.unwrap_or(0)
        );
    }
    Ok(())
}
