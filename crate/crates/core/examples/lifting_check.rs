//! Face liftings: checks the defining relation of `r_F` on random data and
//! prints the support of the liftings of a few faces.
//!
//! ```text
//! cargo run --example lifting_check -- 3
//! ```

use hpdg::assembly::{local_lifting, ElementOperators};
use hpdg::diagnostics::random_vectors;
use hpdg::{DofMap, Mesh};
use nalgebra::DVector;

fn main() -> hpdg::Result<()> {
    let p: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let mesh = Mesh::new(3, (-1.0, 1.0))?;
    let dofmap = DofMap::new(&mesh, p)?;
    let ops = ElementOperators::new(dofmap.basis(), mesh.h())?;
    let m = p + 1;
    let mut worst: f64 = 0.0;
    for (face, data) in mesh.faces().iter().zip(random_vectors(m + m * m, mesh.faces().len(), 1)) {
        let (g, eta) = data.split_at(m);
        let (g, eta) = (DVector::from_column_slice(g), DVector::from_column_slice(eta));
        let lift = local_lifting(&mesh, &dofmap, &ops, face.id)?;
        for block in &lift.blocks {
            // int_kappa r_F(g) eta + int_F g {eta} = 0
            let tr = DVector::from_iterator(m, ops.trace_indices(block.side).iter().map(|&a| eta[a]));
            let weight = if face.is_boundary() { 1.0 } else { 0.5 };
            let residual = (&ops.mass * (&block.r * &g)).dot(&eta) + weight * (ops.face_mass() * &g).dot(&tr);
            worst = worst.max(residual.abs());
        }
        if face.id < 4 {
            let support: Vec<usize> = lift.blocks.iter().map(|b| b.element).collect();
            println!("face {:>2} ({:?}, boundary: {}) lifts onto elements {support:?}", face.id, face.axis, face.is_boundary());
        }
    }
    println!("largest defect of the lifting identity over {} faces: {worst:.2e}", mesh.faces().len());
    Ok(())
}
