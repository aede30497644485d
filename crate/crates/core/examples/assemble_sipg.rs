//! Assembles SIPG and LDG matrices and cross-checks them against the
//! lifting-based assembly.
//!
//! ```text
//! cargo run --release --example assemble_sipg -- 8 3
//! ```

use hpdg::assembly::assemble_via_liftings;
use hpdg::{assemble, DgConfig, DofMap, Mesh};

fn main() -> hpdg::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().ok());
    let n = args.next().flatten().unwrap_or(8);
    let p = args.next().flatten().unwrap_or(3);
    let mesh = Mesh::new(n, (-1.0, 1.0))?;
    let dofmap = DofMap::new(&mesh, p)?;
    for config in [DgConfig::sipg(10.0), DgConfig::ldg(10.0, [1.0, 1.0])] {
        let sys = assemble(&mesh, &dofmap, &config, &|_, _| 1.0)?;
        let lifted = assemble_via_liftings(&mesh, &dofmap, &config)?;
        let diff = sys.a.add_scaled(1.0, &lifted, -1.0).max_abs() / sys.a.max_abs();
        println!(
            "{:<4} dofs {:>6}  nnz {:>8}  sigma {:>8.1}  symmetry defect {:.1e}  |A - A_lift|/|A| {:.1e}",
            config.method,
            sys.dim(),
            sys.a.nnz(),
            sys.penalty,
            sys.a.symmetry_defect(),
            diff
        );
    }
    Ok(())
}
