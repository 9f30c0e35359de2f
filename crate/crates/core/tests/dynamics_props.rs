mod common;

use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;
use susyphoton::dynamics::*;
use susyphoton::scalar_mcs::{build_mcs, geometric_phase_scalar};
use susyphoton::susy::{build_supercoherent, build_supercoherent_alt};
use susyphoton::{McsSpec, SusySpec, TruncationPolicy};

fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_is_unitary(v in fock_vector(30), t in -20.0f64..20.0) {
        let n0 = v.norm_sqr();
        prop_assert!((evolve_scalar(&v, t).norm_sqr() - n0).abs() <= 1e-14 * n0);
    }

    #[test]
    fn evolution_composes(v in fock_vector(30), t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, omega in 0.2f64..3.0) {
        let a = evolve_scalar(&v, t1 + t2);
        let b = evolve_scalar(&evolve_scalar(&v, t1), t2);
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        let s = susyphoton::SpinorState::new(v.clone(), v.scale(c(0.3, -0.2))).unwrap();
        let a = evolve_susy(&s, t1 + t2, omega);
        let b = evolve_susy(&evolve_susy(&s, t1, omega), t2, omega);
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn supercoherent_loops((m, j) in subspace(), z in complex_in(3.0), k2 in -4.0f64..4.0, omega in 0.5f64..2.0) {
        let spec = SusySpec::unit(m, j, z, k2).unwrap().with_omega(omega);
        let s = build_supercoherent(&spec, &TruncationPolicy::default()).unwrap();
        let r = loop_check(&s, m, omega).unwrap();
        prop_assert!(r.fidelity >= 1.0 - 1e-10);
        prop_assert!(r.phase > -2.0 * PI && r.phase <= 0.0);
        prop_assert!(phase_distance(r.phase, -2.0 * PI * j as f64 / m as f64) < 1e-10, "phi {}", r.phase);
        for (x1, x2, sub) in [(c(0.4, 0.1), c(0.0, 0.0), j), (c(0.0, 0.0), c(-0.2, 0.9), j + 1)] {
            let alt = build_supercoherent_alt(&spec, x1, x2, &TruncationPolicy::default()).unwrap();
            let r = loop_check(&alt, m, omega).unwrap();
            prop_assert!(r.fidelity >= 1.0 - 1e-10);
            prop_assert!(phase_distance(r.phase, -2.0 * PI * sub as f64 / m as f64) < 1e-10);
        }
    }

    #[test]
    fn mixed_alt_family_is_not_cyclic(m in 2usize..=3, j in 0usize..3, z in complex_in(3.0)) {
        let j = j % m;
        prop_assume!(z.norm() > 0.1);
        let spec = SusySpec::unit(m, j, z, 0.5).unwrap();
        let alt = build_supercoherent_alt(&spec, c(1.0, 0.0), c(1.0, 0.0), &TruncationPolicy::default()).unwrap();
        prop_assert!(loop_check(&alt, m, 1.0).is_err());
    }

    #[test]
    fn mcs_loops((m, j) in subspace(), z in complex_in(3.0)) {
        let spec = McsSpec::new(m, j, z).unwrap();
        let st = build_mcs(spec, &TruncationPolicy::default()).unwrap();
        let r = loop_check(&st.vector, m, 1.0).unwrap();
        prop_assert!(r.fidelity >= 1.0 - 1e-10);
        prop_assert!(phase_distance(r.phase, -2.0 * PI * j as f64 / m as f64) < 1e-10);
        prop_assert!((r.geometric_phase - geometric_phase_scalar(spec)).abs() < 1e-8);
    }
}

#[test]
fn closed_beta_matches_oracle_on_standard_sweep() {
    let pol = TruncationPolicy::default();
    for z in standard_sweep() {
        for m in 1..=3 {
            for j in 0..m {
                geometric_phase_mcs(McsSpec::new(m, j, z).unwrap(), &pol).unwrap();
                for k2 in [-2.0, 0.0, 1.0] {
                    geometric_phase_susy(&SusySpec::unit(m, j, z, k2).unwrap(), &pol).unwrap();
                }
            }
        }
    }
}

#[test]
fn trapezoid_oracle() {
    let spec = SusySpec::unit(2, 0, c(1.0, 0.0), 1.0).unwrap();
    let s = build_supercoherent(&spec, &TruncationPolicy::default()).unwrap();
    let t = geometric_phase_trapezoid(&s, 2, 1.0, 10_000).unwrap();
    assert!((t - geometric_phase_susy_closed(&spec).unwrap()).abs() < 1e-8);
}

#[test]
fn k2_zero_is_minimal_on_lattice() {
    let zs: Vec<_> = (-6..=6)
        .flat_map(|a| (-6..=6).map(move |b| c(a as f64 * 0.5, b as f64 * 0.5)))
        .filter(|z| z.norm() <= 3.0)
        .collect();
    for m in 1..=3 {
        for j in 0..m {
            let base = SusySpec::unit(m, j, c(1.0, 0.0), 0.0).unwrap();
            let rows = geometric_phase_sweep(&base, &zs, &[-4.0, 0.0, 2.0], &TruncationPolicy::default());
            assert!(rows.iter().all(|r| r.outcome.is_ok()));
            let bad = k2_zero_violations(&rows, 1e-9);
            assert!(bad.is_empty(), "m={m} j={j}: {bad:?}");
        }
    }
}

#[test]
fn m1_surface_is_two_pi_r2_plus_offset() {
    let pol = TruncationPolicy::default();
    let mut last = -1.0;
    for r in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let b = geometric_phase_susy(&SusySpec::unit(1, 0, c(r, 0.0), 0.0).unwrap(), &pol).unwrap();
        assert!((b - 2.0 * PI * r * r - PI).abs() < 1e-9);
        assert!(b > last);
        last = b;
    }
}
