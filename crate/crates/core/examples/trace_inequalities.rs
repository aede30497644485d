//! Element trace and inverse trace constants on `Q^p`, scaled by `p^2/h`.
//!
//! ```text
//! cargo run --example trace_inequalities
//! ```

use hpdg::diagnostics::trace_constants;

fn main() -> hpdg::Result<()> {
    println!(" p   trace    inverse trace");
    for p in 1..=10 {
        let c = trace_constants(p)?;
        println!("{p:>2}   {:.4}   {:.4}", c.trace, c.inverse_trace);
    }
    Ok(())
}
