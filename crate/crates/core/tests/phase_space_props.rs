mod common;

use common::*;
use proptest::prelude::*;
use susyphoton::phase_space::*;
use susyphoton::scalar_mcs::build_mcs;
use susyphoton::{FockVector, GridSpec, McsSpec, SusySpec, TruncationPolicy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scalar_grids((m, j) in subspace(), z in complex_in(3.0)) {
        let spec = McsSpec::new(m, j, z).unwrap();
        let g = wigner_scalar_mcs(spec, GridSpec::default()).unwrap();
        prop_assert!(g.normalization_residual() <= 1e-6, "norm {}", g.normalization_residual());
        prop_assert!(g.imag_residue <= 1e-12, "imag {}", g.imag_residue);
        let bound = 1.0 / std::f64::consts::PI + 1e-9;
        prop_assert!(g.max_value() <= bound && g.min_value() >= -bound);

        let psi = build_mcs(spec, &TruncationPolicy::default()).unwrap().vector;
        let marg = g.marginal_q();
        let n = g.spec.nq;
        for k in 0..9 {
            let i = (k * (n - 1)) / 8;
            let want = position_wavefunction(&psi, g.spec.q(i)).norm_sqr();
            prop_assert!((marg[i] - want).abs() <= 1e-5, "slice {i}: {} vs {want}", marg[i]);
        }
    }

    #[test]
    fn susy_grids((m, j) in subspace(), z in complex_in(3.0), k2 in -2.0f64..2.0) {
        prop_assume!(z.norm() > 1e-2);
        let g = wigner_susy(&SusySpec::unit(m, j, z, k2).unwrap(), GridSpec::default()).unwrap();
        prop_assert!(g.normalization_residual() <= 1e-6, "norm {}", g.normalization_residual());
        prop_assert!(g.imag_residue <= 1e-12);
    }
}

#[test]
fn kernels_match_quadrature_on_random_pairs() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strat = (complex_in(3.0), complex_in(3.0));
    let dim = 72;
    let lattice: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    for _ in 0..20 {
        let (a, b) = strat.new_tree(&mut runner).unwrap().current();
        let k = GaussianPairKernel::new(a, b);
        let (va, vb) = (FockVector::coherent(a, dim), FockVector::coherent(b, dim));
        let (ra, rb) = (va.create().0, vb.create().0);
        for &q in &lattice {
            for &p in &lattice {
                let checks = [
                    (w_pair(&k, q, p), cross_wigner_quadrature(&va, &vb, q, p).unwrap()),
                    (w_pair_cross(&k, q, p, CrossVariant::I), cross_wigner_quadrature(&ra, &vb, q, p).unwrap()),
                    (w_pair_cross(&k, q, p, CrossVariant::II), cross_wigner_quadrature(&va, &rb, q, p).unwrap()),
                    (w_pair_deriv(&k, q, p), cross_wigner_quadrature(&ra, &rb, q, p).unwrap()),
                ];
                for (i, (x, y)) in checks.iter().enumerate() {
                    assert!((x - y).norm() < 1e-8, "kernel {i} a={a} b={b} q={q} p={p}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn grid_is_schedule_independent() {
    let spec = McsSpec::new(3, 1, c(1.3, 0.4)).unwrap();
    let g = GridSpec::square(6.0, 65);
    let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| wigner_scalar_mcs(spec, g).unwrap());
    let b = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| wigner_scalar_mcs(spec, g).unwrap());
    assert_eq!(a.values, b.values);
}
