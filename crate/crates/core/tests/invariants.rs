//! Randomized invariants of the operators and the preconditioner.

use hpdg::diagnostics::random_vectors;
use hpdg::operator::LinearOperator;
use hpdg::space::ConformingMap;
use hpdg::sparse::CsrMatrix;
use hpdg::{assemble, DgConfig, DofMap, Mesh, Mode, Preconditioner};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn setup(n: usize, p: usize, cfg: DgConfig) -> (Mesh, DofMap, hpdg::AssembledSystem, Preconditioner) {
    let mesh = Mesh::new(n, (-1.0, 1.0)).unwrap();
    let dofmap = DofMap::new(&mesh, p).unwrap();
    let sys = assemble(&mesh, &dofmap, &cfg, &|x, y| x * y + 1.0).unwrap();
    let prec = Preconditioner::build(&sys, &mesh, &dofmap).unwrap();
    (mesh, dofmap, sys, prec)
}

fn config(ldg: bool, alpha: f64) -> DgConfig {
    if ldg {
        DgConfig::ldg(alpha, [1.0, 1.0])
    } else {
        DgConfig::sipg(alpha)
    }
}

fn vectors(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0f64..1.0, len), prop::collection::vec(-1.0f64..1.0, len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn preconditioner_is_symmetric_positive_and_additive(
        n in 2usize..5, p in 2usize..4, ldg in any::<bool>(), alpha in 1.0f64..100.0, seed in 0u64..1000,
    ) {
        let (_, dofmap, sys, prec) = setup(n, p, config(ldg, alpha));
        let dim = dofmap.total_dofs();
        let mut uv = random_vectors(dim, 2, seed);
        let (v, u) = (uv.pop().unwrap(), uv.pop().unwrap());
        let bu = prec.apply_new(&u);
        let bv = prec.apply_new(&v);
        let scale = 1.0 + dot(&u, &bu).abs() + dot(&v, &bv).abs();
        prop_assert!((dot(&u, &bv) - dot(&v, &bu)).abs() <= 1e-12 * scale);
        prop_assert!(dot(&u, &bu) > 0.0);
        let parts: Vec<f64> = prec.apply_jacobi(&u).iter().zip(prec.apply_schwarz(&u)).map(|(a, b)| a + b).collect();
        prop_assert!(parts.iter().zip(&bu).all(|(a, b)| (a - b).abs() <= 1e-13 * (1.0 + b.abs())));
        prop_assert!(sys.a.symmetry_defect() <= 1e-12 * sys.a.max_abs());
    }

    #[test]
    fn oswald_is_a_projection_onto_the_conforming_space((v, w) in vectors(4 * 16)) {
        let mesh = Mesh::new(2, (-1.0, 1.0)).unwrap();
        let dofmap = DofMap::new(&mesh, 3).unwrap();
        let cmap = ConformingMap::new(&dofmap);
        let q = dofmap.oswald(&v);
        let qq = dofmap.oswald(&q);
        prop_assert!(q.iter().zip(&qq).all(|(a, b)| (a - b).abs() <= 1e-13));
        // Q_h v = E (gathered average) and the map is linear
        let avg: Vec<f64> = dofmap.oswald(&v);
        let lin: Vec<f64> = dofmap.oswald(&v.iter().zip(&w).map(|(a, b)| 2.0 * a - b).collect::<Vec<_>>());
        let qw = dofmap.oswald(&w);
        prop_assert!(lin.iter().zip(avg.iter().zip(&qw)).all(|(l, (a, b))| (l - (2.0 * a - b)).abs() <= 1e-13));
        let mut e = vec![0.0; dofmap.total_dofs()];
        let x: Vec<f64> = (0..cmap.dim()).map(|i| v[i % v.len()]).collect();
        cmap.embedding().mul_vec(&x, &mut e);
        let qe = dofmap.oswald(&e);
        prop_assert!(qe.iter().zip(&e).all(|(a, b)| (a - b).abs() <= 1e-13));
    }

    #[test]
    fn csr_products_match_dense((x, y) in vectors(12), entries in prop::collection::vec((0usize..12, 0usize..12, -2.0f64..2.0), 1..60)) {
        let mut b = hpdg::sparse::CsrBuilder::new(12, 12);
        for &(i, j, v) in &entries {
            b.add(i, j, v);
        }
        let m: CsrMatrix = b.build(false);
        let d = m.to_dense();
        let mut out = vec![0.0; 12];
        m.mul_vec(&x, &mut out);
        let expected = &d * nalgebra::DVector::from_vec(x.clone());
        prop_assert!(out.iter().zip(expected.iter()).all(|(a, b)| (a - b).abs() <= 1e-12));
        m.mul_transpose_vec(&y, &mut out);
        let expected = d.transpose() * nalgebra::DVector::from_vec(y.clone());
        prop_assert!(out.iter().zip(expected.iter()).all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}

#[test]
fn jacobi_and_schwarz_modes_split_the_full_preconditioner() {
    let (_, dofmap, _, prec) = setup(3, 2, DgConfig::sipg(10.0));
    let r: Vec<f64> = (0..dofmap.total_dofs()).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
    let full = prec.apply_new(&r);
    let jac = prec.apply_jacobi(&r);
    let prec = prec.with_mode(Mode::SchwarzOnly);
    let sch = prec.apply_new(&r);
    for i in 0..r.len() {
        assert!((full[i] - jac[i] - sch[i]).abs() <= 1e-12 * (1.0 + full[i].abs()));
    }
}

#[test]
fn k_a_grows_with_p() {
    use hpdg::spectral::{estimate_condition, LanczosOptions};
    let mut last = 0.0;
    for p in 2..=5 {
        let (_, _, sys, prec) = setup(4, p, DgConfig::sipg(10.0));
        let k = estimate_condition(&sys, &prec, &LanczosOptions::default()).unwrap();
        assert!(k.k_a() > last);
        assert!(k.k_tdg() < 40.0);
        last = k.k_a();
    }
}
