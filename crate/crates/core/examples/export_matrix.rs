//! Writes `A` and the right-hand side in Matrix Market format and reads the
//! matrix back.
//!
//! ```text
//! cargo run --example export_matrix -- /tmp/sipg.mtx
//! ```

use std::path::PathBuf;

use hpdg::sparse::CsrMatrix;
use hpdg::{assemble, DgConfig, DofMap, Mesh};

fn main() -> hpdg::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hpdg_a.mtx"));
    let rhs_path = path.with_file_name(format!("{}_rhs.mtx", path.file_stem().unwrap().to_string_lossy()));
    let mesh = Mesh::new(4, (-1.0, 1.0))?;
    let dofmap = DofMap::new(&mesh, 2)?;
    let sys = assemble(&mesh, &dofmap, &DgConfig::sipg(10.0), &|_, _| 1.0)?;
    sys.export(&path, &rhs_path)?;
    let back = CsrMatrix::read_matrix_market(&path)?;
    let diff = back.add_scaled(1.0, &sys.a, -1.0).max_abs();
    println!("wrote {} ({} x {}, nnz {})", path.display(), back.nrows(), back.ncols(), back.nnz());
    println!("wrote {}", rhs_path.display());
    println!("round-trip max difference {diff:.1e}");
    Ok(())
}
