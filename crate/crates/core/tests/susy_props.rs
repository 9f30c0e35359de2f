mod common;

use common::*;
use proptest::prelude::*;
use susyphoton::susy::*;
use susyphoton::{Complex64, FockVector, SpinorState, SusySpec, TruncationPolicy};

fn sweep_z() -> Vec<Complex64> {
    [0.5, 1.0, 2.0, 3.0].iter().flat_map(|&r| [c(r, 0.0), c(0.0, r)]).collect()
}

fn on_support(s: &SpinorState, m: usize, j: usize, shift: usize) -> bool {
    let ok = |v: &FockVector, off: usize| v.coeffs().iter().enumerate().all(|(n, x)| x.norm() == 0.0 || (n + off) % m == j);
    ok(&s.upper, 0) && ok(&s.lower, shift)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn degenerate_doublets(n in 1usize..20, omega in 0.1f64..3.0) {
        let dim = 24;
        for s in [SpinorState::psi_plus(dim, n), SpinorState::psi_minus(dim, n).unwrap()] {
            let e = s.inner(&susy_hamiltonian_apply(&s, omega)).unwrap();
            prop_assert!((e.re - n as f64 * omega).abs() < 1e-12 && e.im.abs() < 1e-12);
        }
    }

    #[test]
    fn sao_power_keeps_subspace((m, j) in subspace(), n in 0usize..10, k2 in -3.0f64..3.0, lower in any::<bool>()) {
        let dim = 40;
        let idx = m * n + j;
        let s = if lower {
            SpinorState::new(FockVector::zeros(dim), FockVector::basis(dim, (idx + m - 1) % m + m * n)).unwrap()
        } else {
            SpinorState::psi_plus(dim, idx)
        };
        prop_assert!(on_support(&s, m, j, 1));
        prop_assert!(on_support(&sao_power_apply(k2, m, &s), m, j, 1));
    }

    #[test]
    fn hur_at_least_half((m, j) in subspace(), z in complex_in(3.0), k2 in -4.0f64..4.0) {
        prop_assume!(z.norm() > 1e-2);
        let spec = SusySpec::unit(m, j, z, k2).unwrap();
        prop_assert!(hur_susy(&spec).unwrap() >= 0.5 - 1e-10);
    }

    #[test]
    fn m1_k2_zero_reduces_to_coherent_pair(z in complex_in(3.0), a in complex_in(2.0), cc in complex_in(2.0)) {
        prop_assume!(a.norm() + cc.norm() > 1e-2);
        let spec = SusySpec::new(1, 0, z, 0.0, a, cc).unwrap();
        let s = build_supercoherent(&spec, &TruncationPolicy::default()).unwrap();
        let dim = s.dim();
        let coh = FockVector::coherent(z, dim);
        let want = SpinorState::new(coh.scale(a), coh.scale(cc)).unwrap().normalized();
        let phase = want.inner(&s).unwrap();
        prop_assert!((phase.norm() - 1.0).abs() < 1e-10);
        prop_assert!(s.max_abs_diff(&want.scale(phase)) < 1e-10);
    }
}

#[test]
fn eigen_residual_sweep_both_families() {
    let pol = TruncationPolicy::default();
    for m in 1..=3 {
        for j in 0..m {
            for z in sweep_z() {
                for k2 in [-2.0, 0.0, 1.0] {
                    let spec = SusySpec::unit(m, j, z, k2).unwrap();
                    let s = build_supercoherent(&spec, &pol).unwrap();
                    let r = eigen_residual(&s, k2, m, z);
                    assert!(r <= 1e-10, "main m={m} j={j} z={z} k2={k2}: {r}");
                    for (x1, x2) in [(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0)), (c(0.6, 0.2), c(-0.3, 0.8))] {
                        let s = build_supercoherent_alt(&spec, x1, x2, &pol).unwrap();
                        let r = eigen_residual(&s, k2, m, z);
                        assert!(r <= 1e-10, "alt m={m} j={j} z={z} k2={k2}: {r}");
                    }
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_oracle_at_two_cutoffs() {
    let pol = TruncationPolicy::default();
    for z in standard_sweep() {
        for m in 1..=3usize {
            for j in 0..m {
                for k2 in [-2.0, 0.0, 1.0] {
                    let spec = SusySpec::unit(m, j, z, k2).unwrap();
                    let nc = susy_normalization_closed(&spec).unwrap();
                    let vq = s_variance_susy_closed(&spec, 0).unwrap();
                    let vp = s_variance_susy_closed(&spec, 1).unwrap();
                    let q = mandel_q_susy_closed(&spec).unwrap();
                    let e = mean_energy_susy(&spec).unwrap();
                    for dim in [pol.dim(z.norm(), m), pol.doubled(z.norm(), m)] {
                        let o = susy_oracle(&spec, dim);
                        let tag = format!("m={m} j={j} z={z} k2={k2} N={dim}");
                        assert!(rel(nc, o.norm_const) < 1e-9, "norm {tag}");
                        assert!(rel(vq, o.var_q) < 1e-9, "var q {tag}");
                        assert!(rel(vp, o.var_p) < 1e-9, "var p {tag}");
                        assert!(rel(q, o.mandel.unwrap()) < 1e-9, "Q {tag}");
                        assert!(rel(e, o.energy) < 1e-9, "energy {tag}");
                    }
                }
            }
        }
    }
}
