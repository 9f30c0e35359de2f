mod common;

use common::*;
use proptest::prelude::*;
use susyphoton::fock::inner;
use susyphoton::scalar_mcs::*;
use susyphoton::{McsSpec, TruncationPolicy};

fn built(m: usize, j: usize, z: susyphoton::Complex64) -> susyphoton::McsState {
    build_mcs(McsSpec::new(m, j, z).unwrap(), &TruncationPolicy::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenstate_property((m, j) in subspace(), z in complex_in(4.0)) {
        let st = built(m, j, z);
        let lhs = st.vector.power_annihilate(m);
        let rhs = st.vector.scale(z.powu(m as u32));
        prop_assert!((&lhs - &rhs).norm() <= 1e-9);
    }

    #[test]
    fn subspaces_are_orthogonal(m in 2usize..=3, z1 in complex_in(3.0), z2 in complex_in(3.0), j in 0usize..3, dj in 1usize..3) {
        let j = j % m;
        let j2 = (j + dj) % m;
        prop_assume!(j != j2);
        let dim = 80;
        let a = build_mcs_dim(McsSpec::new(m, j, z1).unwrap(), dim, &TruncationPolicy::default()).unwrap();
        let b = build_mcs_dim(McsSpec::new(m, j2, z2).unwrap(), dim, &TruncationPolicy::default()).unwrap();
        prop_assert_eq!(inner(&a.vector, &b.vector).unwrap().norm(), 0.0);
    }

    #[test]
    fn reassembly((m, j) in subspace(), z in complex_in(3.0)) {
        prop_assume!(z.norm() > 1e-3);
        let st = built(m, j, z);
        let parts = scs_decomposition(st.spec).unwrap();
        let back = reassemble(&parts, st.vector.dim());
        prop_assert!(back.max_abs_diff(&st.vector) <= 1e-10);
    }

    #[test]
    fn hur_lower_bound((m, j) in subspace(), z in complex_in(4.0)) {
        prop_assert!(hur(McsSpec::new(m, j, z).unwrap()) >= 0.5 - 1e-12);
    }

    #[test]
    fn mandel_sign_pattern(x in 1e-3f64..25.0, t in 0.0..std::f64::consts::TAU) {
        let z = susyphoton::Complex64::from_polar(x.sqrt(), t);
        let qp = mandel_q(McsSpec::new(2, 0, z).unwrap()).unwrap();
        let qm = mandel_q(McsSpec::new(2, 1, z).unwrap()).unwrap();
        prop_assert!(qp > 0.0 && qm < 0.0, "Q+={qp} Q-={qm}");
        prop_assert!((qp - 2.0 * x / (2.0 * x).sinh()).abs() < 1e-9);
    }

    #[test]
    fn simple_coherent_minimality(z in complex_in(3.0)) {
        prop_assert!((hur(McsSpec::new(1, 0, z).unwrap()) - 0.5).abs() < 1e-10);
    }
}

#[test]
fn closed_forms_match_oracle_on_standard_sweep() {
    let pol = TruncationPolicy::default();
    for z in standard_sweep() {
        for m in 1..=3usize {
            for j in 0..m {
                let spec = McsSpec::new(m, j, z).unwrap();
                for dim in [pol.dim(z.norm(), m), pol.doubled(z.norm(), m)] {
                    let st = build_mcs_dim(spec, dim, &pol).unwrap();
                    let raw = raw_mcs(m, j, z, dim);
                    let n_oracle = 1.0 / raw.norm();
                    let n_closed = normalization(m, j, z.norm());
                    assert!(rel(n_closed, n_oracle) < 1e-9, "N m={m} j={j} z={z}");
                    if let Some(nc) = normalization_closed(m, j, z.norm()) {
                        assert!(rel(nc, n_oracle) < 1e-9, "closed N m={m} j={j} z={z}");
                    }
                    for k in [0u8, 1] {
                        let (a, b) = s_moments(spec, k);
                        let (ao, bo) = s_moments_oracle(&st.vector, k).unwrap();
                        assert!(rel(a, ao) < 1e-9 && rel(b, bo) < 1e-9, "moments m={m} j={j} z={z} k={k}");
                    }
                    assert!(rel(hur(spec), hur_oracle(&st.vector).unwrap()) < 1e-9);
                    if let Ok(q) = mandel_q(spec) {
                        let qo = mandel_q_oracle(&st.vector).unwrap();
                        assert!(rel(q, qo) < 1e-9, "Q m={m} j={j} z={z}");
                        if let Some(qc) = mandel_q_closed(spec) {
                            assert!(rel(qc, qo) < 1e-9, "closed Q m={m} j={j} z={z}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn mandel_asymptotics() {
    let z = susyphoton::Complex64::new(5f64.sqrt(), 0.0);
    for j in 0..2 {
        assert!(mandel_q(McsSpec::new(2, j, z).unwrap()).unwrap().abs() < 1e-3);
    }
}
