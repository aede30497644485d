//! Condition numbers of `A` and of the preconditioned operator, with CG and
//! PCG iteration counts, for `p = 2..6`.
//!
//! ```text
//! cargo run --release --example condition_numbers -- sipg
//! ```

use hpdg::experiment::{render, run, ExperimentSpec, Format, Task};
use hpdg::Method;

fn main() -> hpdg::Result<()> {
    let method: Method = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(Method::Sipg);
    let spec = ExperimentSpec {
        method,
        tasks: vec![Task::ConditionNumbers, Task::Iterations],
        ..Default::default()
    };
    let out = run(&spec)?;
    print!("{}", render(&out.rows, Format::Csv)?);
    for f in &out.failures {
        eprintln!("p={} alpha={}: {}", f.p, f.alpha, f.message);
    }
    Ok(())
}
