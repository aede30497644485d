//! The splitting `v = (v - Q_h v) + Q_h v` into the boundary-node space and the
//! conforming space: idempotence of `Q_h`, the element approximation ratio and
//! the stability ratio of the splitting, for random `v`.
//!
//! ```text
//! cargo run --release --example oswald_splitting
//! ```

use hpdg::diagnostics::{random_vectors, sample_extremes, stability_ratio, Norms};
use hpdg::{assemble, DgConfig, DofMap, Mesh};

fn main() -> hpdg::Result<()> {
    println!(" n  p  |Q(Qv)-Qv|  max|(I-Q)v at interior|  Oswald ratio  stability ratio");
    for n in [8, 16] {
        let mesh = Mesh::new(n, (-1.0, 1.0))?;
        for p in 2..=5 {
            let dofmap = DofMap::new(&mesh, p)?;
            let sys = assemble(&mesh, &dofmap, &DgConfig::sipg(10.0), &|_, _| 1.0)?;
            let norms = Norms::new(&mesh, &dofmap)?;
            let samples = random_vectors(dofmap.total_dofs(), 20, 7);

            let v = &samples[0];
            let q = dofmap.oswald(v);
            let qq = dofmap.oswald(&q);
            let idem = q.iter().zip(&qq).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let interior = (0..v.len())
                .filter(|&d| dofmap.is_element_interior(d))
                .map(|d| (v[d] - q[d]).abs())
                .fold(0.0, f64::max);

            let oswald = sample_extremes(&samples, |v| norms.oswald_ratio(v));
            let stab = sample_extremes(&samples, |v| stability_ratio(&sys, &dofmap, v));
            println!("{n:>2} {p:>2}  {idem:.1e}    {interior:.1e}                  {:.4}        {:.4}", oswald.max, stab.max);
        }
    }
    Ok(())
}
