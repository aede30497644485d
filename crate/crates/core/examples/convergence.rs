//! Manufactured-solution convergence in the broken H1 and L2 norms for
//! `u = sin(pi x) sin(pi y)`.
//!
//! ```text
//! cargo run --release --example convergence
//! ```

use hpdg::experiment::convergence_study;
use hpdg::DgConfig;

fn main() -> hpdg::Result<()> {
    for config in [DgConfig::sipg(10.0), DgConfig::ldg(10.0, [1.0, 1.0])] {
        for p in [2, 3] {
            let table = convergence_study(&config, p, &[4, 8, 16])?;
            println!("{}", table.render());
        }
    }
    Ok(())
}
