//! Invariant suites behind `susyphoton verify` and the acceptance target.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use susyphoton::dynamics::{geometric_phase_susy_closed, geometric_phase_sweep, geometric_phase_trapezoid, k2_zero_violations, loop_check};
use susyphoton::fock::check_pha;
use susyphoton::phase_space::{
    cross_wigner_quadrature, negativity, w_pair, w_pair_cross, w_pair_deriv, wigner_scalar_mcs, wigner_susy, CrossVariant,
    GaussianPairKernel, GridSpec,
};
use susyphoton::scalar_mcs::*;
use susyphoton::susy::*;
use susyphoton::{Complex64, FockVector, McsSpec, SpinorState, SusySpec, TruncationPolicy};

use crate::commands::{find_roots, ROOT_TOL};
use crate::config::{Fault, Level, DEFAULT_K2_RANGE};

/// Reference Poissonian crossings `Q(k2) = 0` at `|z| = 1, 2, 3` for each `(m, j)`, real `z`, unit amplitudes.
pub const REFERENCE_ROOTS: [(usize, usize, [f64; 3]); 6] = [
    (1, 0, [1.6, 0.97561, 0.66298]),
    (2, 0, [1.598698, 1.604011, 1.43425]),
    (2, 1, [2.586, 0.951075, 0.48326]),
    (3, 0, [-0.351633, 0.6805165, 1.386432]),
    (3, 1, [-2.94005, 0.111063, 0.48317]),
    (3, 2, [-2.116, -0.419157, -0.206622]),
];

pub fn negativity_name(m: usize, j: usize, r: f64, k2: f64) -> String {
    format!("negativity m={m} j={j} |z|={r} k2={k2}")
}

/// Checks that cannot pass. For `m = 1` the spinor Wigner function is a displaced Gaussian times a
/// quadratic whose minimum is `|c~|^2 (1 - k2^2)`, so it is non-negative whenever `|k2| <= 1`.
pub fn known_unattainable() -> Vec<String> {
    vec![negativity_name(1, 0, 2.0, 0.97561), negativity_name(1, 0, 3.0, 0.66298)]
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    AtMost { value: f64 },
    AtLeast { value: f64 },
    Below { value: f64 },
    Within { lo: f64, hi: f64 },
}

impl Bound {
    fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost { value } => x <= value,
            Bound::AtLeast { value } => x >= value,
            Bound::Below { value } => x < value,
            Bound::Within { lo, hi } => x >= lo && x <= hi,
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub passed: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub known_unattainable: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, bound: Bound, detail: impl Into<String>) -> Self {
        let name = name.into();
        Check {
            passed: bound.holds(measured),
            known_unattainable: known_unattainable().contains(&name),
            name,
            measured,
            bound,
            detail: detail.into(),
        }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self::new(name, measured, Bound::AtMost { value: tol }, "")
    }
}

/// Largest value seen over a sweep; NaN and errors poison it.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
    errors: Vec<String>,
}

impl Worst {
    fn see(&mut self, v: f64, ctx: impl FnOnce() -> String) {
        if v.is_nan() {
            self.errors.push(format!("{}: NaN", ctx()));
        } else if v > self.value || self.at.is_empty() {
            self.value = v;
            self.at = ctx();
        }
    }

    fn see_res(&mut self, r: susyphoton::Result<f64>, ctx: impl FnOnce() -> String) {
        match r {
            Ok(v) => self.see(v, ctx),
            Err(e) => self.errors.push(format!("{}: {e}", ctx())),
        }
    }

    fn check(self, name: &str, tol: f64) -> Check {
        let measured = if self.errors.is_empty() { self.value } else { f64::NAN };
        let mut detail = if self.at.is_empty() { String::new() } else { format!("worst at {}", self.at) };
        if !self.errors.is_empty() {
            detail = format!("{} error(s), first: {}", self.errors.len(), self.errors[0]);
        }
        Check::new(name, measured, Bound::AtMost { value: tol }, detail)
    }
}

/// `|a - b| / |b|`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `|a - b| / max(1, |b|)` for quantities that may vanish.
fn rel1(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Serialize, Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed_s: f64,
    pub budget_s: f64,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Every failed check is a documented unattainable one.
    pub fn only_known_failures(&self) -> bool {
        self.failures().all(|c| c.known_unattainable)
    }
}

pub const TITLES: [&str; 10] = [
    "HUR limit j+1/2 at |z|=1e-4",
    "SCS minimality",
    "SUSY m=1 HUR ceiling at k2=50",
    "Mandel Poissonian crossings in k2",
    "Mandel asymptotics",
    "eigen-residual sweep",
    "closed-form/oracle equivalence",
    "Wigner engine",
    "cyclicity and phases",
    "PHA structure",
];

pub const BUDGETS_S: [f64; 10] = [1.0, 1.0, 30.0, 60.0, 1.0, 10.0, 120.0, 180.0, 60.0, 5.0];

fn standard_sweep(level: Level) -> Vec<Complex64> {
    let dirs = [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, FRAC_PI_4)];
    let radii: &[f64] = match level {
        Level::Full => &[0.25, 0.5, 1.0, 2.0, 3.0],
        Level::Quick => &[0.5, 2.0],
    };
    radii.iter().flat_map(|&r| dirs.iter().map(move |d| d * r)).collect()
}

fn subspaces() -> Vec<(usize, usize)> {
    (1..=3).flat_map(|m| (0..m).map(move |j| (m, j))).collect()
}

pub fn criterion(id: u8, level: Level, fault: Option<Fault>) -> CriterionReport {
    assert!((1..=10).contains(&id), "criteria are numbered 1..=10");
    let start = Instant::now();
    let mut checks = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(level),
        4 => c4(),
        5 => c5(),
        6 => c6(level, fault),
        7 => c7(level),
        8 => c8(level),
        9 => c9(level),
        _ => c10(),
    };
    let elapsed = start.elapsed().as_secs_f64();
    let budget = BUDGETS_S[id as usize - 1];
    checks.push(Check::at_most("runtime_s", elapsed, budget));
    CriterionReport {
        id,
        title: TITLES[id as usize - 1],
        passed: checks.iter().all(|c| c.passed),
        elapsed_s: elapsed,
        budget_s: budget,
        checks,
    }
}

fn c1() -> Vec<Check> {
    let mut w = Worst::default();
    for (m, j) in subspaces() {
        for dir in [c(1.0, 0.0), c(0.0, 1.0)] {
            let z = dir * 1e-4;
            let v = McsSpec::new(m, j, z).map(|s| (hur(s) - (j as f64 + 0.5)).abs());
            w.see_res(v, || format!("m={m} j={j} z={z}"));
        }
    }
    vec![w.check("|hur - (j+1/2)|", 1e-6)]
}

fn random_points(n: usize, rmax: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r: f64 = rmax * rng.gen::<f64>().sqrt();
            let t: f64 = 2.0 * PI * rng.gen::<f64>();
            Complex64::from_polar(r, t)
        })
        .collect()
}

fn c2() -> Vec<Check> {
    let pol = TruncationPolicy::default();
    let (mut sc, mut so, mut uc, mut uo) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for z in random_points(20, 3.0, 2) {
        let spec = McsSpec::new(1, 0, z).unwrap();
        sc.see((hur(spec) - 0.5).abs(), || format!("z={z}"));
        so.see_res(build_mcs(spec, &pol).and_then(|s| hur_oracle(&s.vector)).map(|h| (h - 0.5).abs()), || format!("z={z}"));
        let spec = SusySpec::unit(1, 0, z, 0.0).unwrap();
        uc.see_res(hur_susy(&spec).map(|h| (h - 0.5).abs()), || format!("z={z}"));
        let oracle = build_supercoherent(&spec, &pol).map(|s| {
            ((s_variance_susy_oracle(&s, 0) * s_variance_susy_oracle(&s, 1)).sqrt() - 0.5).abs()
        });
        uo.see_res(oracle, || format!("z={z}"));
    }
    vec![
        sc.check("scalar m=1 |hur - 1/2|", 1e-10),
        so.check("scalar m=1 oracle |hur - 1/2|", 1e-10),
        uc.check("susy m=1 k2=0 |hur - 1/2|", 1e-10),
        uo.check("susy m=1 k2=0 oracle |hur - 1/2|", 1e-10),
    ]
}

fn c3(level: Level) -> Vec<Check> {
    let step: f64 = if level == Level::Full { 0.05 } else { 0.25 };
    let xs: Vec<f64> = (0..=(6.0 / step + 1e-9).floor() as usize).map(|i| -3.0 + i as f64 * step).collect();
    let pts: Vec<Complex64> = xs.iter().flat_map(|&x| xs.iter().map(move |&y| c(x, y))).collect();
    let vals: Vec<(Complex64, susyphoton::Result<f64>)> =
        pts.par_iter().map(|&z| (z, SusySpec::unit(1, 0, z, 50.0).and_then(|s| hur_susy(&s)))).collect();
    let mut best = (f64::NEG_INFINITY, c(0.0, 0.0));
    let mut errors = 0;
    for (z, v) in vals {
        match v {
            Ok(h) if h > best.0 => best = (h, z),
            Ok(_) => {}
            Err(_) => errors += 1,
        }
    }
    let measured = if errors == 0 { best.0 } else { f64::NAN };
    vec![Check::new(
        "max sigma_q sigma_p over z-grid",
        measured,
        Bound::Within { lo: 1.4, hi: 1.6 },
        format!("at z={}, {} grid points, {errors} errors", best.1, pts.len()),
    )]
}

fn c4() -> Vec<Check> {
    let mut out = Vec::new();
    for (m, j, caps) in REFERENCE_ROOTS {
        for (i, cap) in caps.into_iter().enumerate() {
            let r = (i + 1) as f64;
            let q = |k2: f64| SusySpec::unit(m, j, c(r, 0.0), k2).and_then(|s| mandel_q_susy(&s)).unwrap_or(f64::NAN);
            let roots = find_roots(q, DEFAULT_K2_RANGE, ROOT_TOL);
            let name = format!("mandel root m={m} j={j} |z|={r} k2={cap}");
            match roots.iter().min_by(|a, b| (*a - cap).abs().total_cmp(&(*b - cap).abs())) {
                Some(&root) => out.push(Check::new(
                    name,
                    (root - cap).abs(),
                    Bound::AtMost { value: 1e-3 },
                    format!("root {root:.9}, Q(reference) = {:.3e}", q(cap)),
                )),
                None => out.push(Check::new(name, f64::NAN, Bound::AtMost { value: 1e-3 }, "no sign change in [-5, 5]")),
            }
        }
    }
    out
}

fn c5() -> Vec<Check> {
    let pol = TruncationPolicy::default();
    let (mut w, mut o) = (Worst::default(), Worst::default());
    for j in 0..2 {
        for dir in [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, FRAC_PI_4)] {
            let spec = McsSpec::new(2, j, dir * 5f64.sqrt()).unwrap();
            w.see_res(mandel_q(spec).map(f64::abs), || format!("j={j} z={}", spec.z));
            o.see_res(build_mcs(spec, &pol).and_then(|s| mandel_q_oracle(&s.vector)).map(f64::abs), || format!("j={j}"));
        }
    }
    let mut a = w.check("|Q| at |z|^2=5, m=2", 1e-3);
    a.bound = Bound::Below { value: 1e-3 };
    a.passed = a.bound.holds(a.measured);
    let mut b = o.check("oracle |Q| at |z|^2=5, m=2", 1e-3);
    b.bound = Bound::Below { value: 1e-3 };
    b.passed = b.bound.holds(b.measured);
    vec![a, b]
}

/// Chi pairs for the alternative family: both pure members and one mixture.
const ALT_CHI: [(f64, f64, f64, f64); 3] = [(1.0, 0.0, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0), (0.6, 0.2, -0.3, 0.8)];

fn c6(level: Level, fault: Option<Fault>) -> Vec<Check> {
    let pol = TruncationPolicy::default();
    let radii: &[f64] = if level == Level::Full { &[0.5, 1.0, 2.0, 3.0] } else { &[0.5, 2.0] };
    let zs: Vec<Complex64> = radii.iter().flat_map(|&r| [c(r, 0.0), c(0.0, r)]).collect();
    let flip = if fault == Some(Fault::SaoSign) { -1.0 } else { 1.0 };
    let (mut main, mut alt, mut mcs) = (Worst::default(), Worst::default(), Worst::default());
    for (m, j) in subspaces() {
        for &z in &zs {
            let ctx = |k2: f64| move || format!("m={m} j={j} z={z} k2={k2}");
            let st = build_mcs(McsSpec::new(m, j, z).unwrap(), &pol);
            mcs.see_res(st.map(|s| (&s.vector.power_annihilate(m) - &s.vector.scale(z.powu(m as u32))).norm()), ctx(0.0));
            for k2 in [-2.0, 0.0, 1.0] {
                let spec = SusySpec::unit(m, j, z, k2).unwrap();
                main.see_res(build_supercoherent(&spec, &pol).map(|s| eigen_residual(&s, flip * k2, m, z)), ctx(k2));
                for (a, b, x, y) in ALT_CHI {
                    let s = build_supercoherent_alt(&spec, c(a, b), c(x, y), &pol);
                    alt.see_res(s.map(|s| eigen_residual(&s, flip * k2, m, z)), ctx(k2));
                }
            }
        }
    }
    vec![
        main.check("eigen residual, supercoherent family", 1e-10),
        alt.check("eigen residual, alternative family", 1e-10),
        mcs.check("eigen residual, scalar MCS", 1e-9),
    ]
}

fn c7(level: Level) -> Vec<Check> {
    let pol = TruncationPolicy::default();
    let names = [
        "scalar normalization",
        "scalar normalization closed form",
        "scalar moments",
        "scalar hur",
        "scalar mandel",
        "susy normalization",
        "susy variances",
        "susy mandel",
        "susy mean energy",
    ];
    let mut w: Vec<Worst> = names.iter().map(|_| Worst::default()).collect();
    for z in standard_sweep(level) {
        for (m, j) in subspaces() {
            let spec = McsSpec::new(m, j, z).unwrap();
            let n_closed = normalization_closed(m, j, z.norm());
            let n_main = normalization(m, j, z.norm());
            let ks: Vec<(f64, f64)> = [0u8, 1].iter().map(|&k| s_moments(spec, k)).collect();
            let q_main = mandel_q(spec);
            let susy: Vec<_> = [-2.0, 0.0, 1.0]
                .iter()
                .map(|&k2| {
                    let s = SusySpec::unit(m, j, z, k2).unwrap();
                    let closed = (|| {
                        Ok::<_, susyphoton::Error>((
                            susy_normalization_closed(&s)?,
                            s_variance_susy_closed(&s, 0)?,
                            s_variance_susy_closed(&s, 1)?,
                            mandel_q_susy_closed(&s)?,
                            mean_energy_susy(&s)?,
                        ))
                    })();
                    (k2, s, closed)
                })
                .collect();
            for dim in [pol.dim(z.norm(), m), pol.doubled(z.norm(), m)] {
                let ctx = || format!("m={m} j={j} z={z} N={dim}");
                let raw_norm = 1.0 / raw_mcs(m, j, z, dim).norm();
                w[0].see(rel(n_main, raw_norm), ctx);
                if let Some(nc) = n_closed {
                    w[1].see(rel(nc, raw_norm), ctx);
                }
                let st = match build_mcs_dim(spec, dim, &pol) {
                    Ok(s) => s,
                    Err(e) => {
                        w[2].errors.push(format!("{}: {e}", ctx()));
                        continue;
                    }
                };
                for (k, &(mean, second)) in ks.iter().enumerate() {
                    w[2].see_res(
                        s_moments_oracle(&st.vector, k as u8).map(|(mo, so)| rel1(mean, mo).max(rel(second, so))),
                        ctx,
                    );
                }
                w[3].see_res(hur_oracle(&st.vector).map(|h| rel(hur(spec), h)), ctx);
                if let Ok(q) = &q_main {
                    w[4].see_res(mandel_q_oracle(&st.vector).map(|qo| rel1(*q, qo)), ctx);
                }
                for (k2, s, closed) in &susy {
                    let ctx = || format!("m={m} j={j} z={z} k2={k2} N={dim}");
                    let (nc, vq, vp, q, e) = match closed {
                        Ok(v) => *v,
                        Err(e) => {
                            w[5].errors.push(format!("{}: {e}", ctx()));
                            continue;
                        }
                    };
                    let o = susy_oracle(s, dim);
                    w[5].see(rel(nc, o.norm_const), ctx);
                    w[6].see(rel(vq, o.var_q).max(rel(vp, o.var_p)), ctx);
                    match o.mandel {
                        Some(qo) => w[7].see(rel1(q, qo), ctx),
                        None => w[7].errors.push(format!("{}: oracle Q undefined", ctx())),
                    }
                    w[8].see(rel(e, o.energy), ctx);
                }
            }
        }
    }
    w.into_iter().zip(names).map(|(w, n)| w.check(n, 1e-8)).collect()
}

fn c8(level: Level) -> Vec<Check> {
    let mut out = Vec::new();
    let (pairs, n) = match level {
        Level::Full => (20, 257),
        Level::Quick => (5, 129),
    };
    let grid = GridSpec::square(8.0, n);

    let lattice: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    let pts = random_points(2 * pairs, 3.0, 8);
    let mut kw = Worst::default();
    for pair in pts.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let k = GaussianPairKernel::new(a, b);
        let dim = 72;
        let (va, vb) = (FockVector::coherent(a, dim), FockVector::coherent(b, dim));
        let (ra, rb) = (va.create().0, vb.create().0);
        for &q in &lattice {
            for &p in &lattice {
                let ctx = || format!("alpha={a} beta={b} q={q} p={p}");
                let cases = [
                    (w_pair(&k, q, p), &va, &vb),
                    (w_pair_cross(&k, q, p, CrossVariant::I), &ra, &vb),
                    (w_pair_cross(&k, q, p, CrossVariant::II), &va, &rb),
                    (w_pair_deriv(&k, q, p), &ra, &rb),
                ];
                for (closed, u, v) in cases {
                    kw.see_res(cross_wigner_quadrature(u, v, q, p).map(|o| (closed - o).norm()), ctx);
                }
            }
        }
    }
    out.push(kw.check("kernels vs quadrature", 1e-8));

    enum Want {
        Negative,
        NonNegative,
    }
    let mut jobs: Vec<(String, Want, Box<dyn Fn() -> susyphoton::Result<susyphoton::WignerGrid> + Send + Sync>)> = Vec::new();
    for j in 0..2 {
        let name = format!("{} cat |z|=2.5", if j == 0 { "even" } else { "odd" });
        jobs.push((name, Want::Negative, Box::new(move || wigner_scalar_mcs(McsSpec::new(2, j, c(2.5, 0.0))?, grid))));
    }
    let radii: &[usize] = if level == Level::Full { &[0, 1, 2] } else { &[0] };
    for (m, j, caps) in REFERENCE_ROOTS {
        for &i in radii {
            let (r, k2) = ((i + 1) as f64, caps[i]);
            jobs.push((
                negativity_name(m, j, r, k2),
                Want::Negative,
                Box::new(move || wigner_susy(&SusySpec::unit(m, j, c(r, 0.0), k2)?, grid)),
            ));
        }
    }
    let m1: &[(f64, f64, f64, f64)] = &[(0.5, 0.0, 1.0, 1.0), (1.0, 1.0, 1.0, 1.0), (2.0, 0.0, 1.0, -0.5), (0.0, 3.0, 0.3, 1.0)];
    for &(x, y, a, cc) in m1 {
        jobs.push((
            format!("non-negativity m=1 k2=0 z={} a={a} c={cc}", c(x, y)),
            Want::NonNegative,
            Box::new(move || wigner_susy(&SusySpec::new(1, 0, c(x, y), 0.0, c(a, 0.0), c(cc, 0.0))?, grid)),
        ));
    }
    let results: Vec<_> = jobs.par_iter().map(|(_, _, f)| f()).collect();
    let mut norm = Worst::default();
    for ((name, want, _), g) in jobs.iter().zip(results) {
        match g {
            Ok(g) => {
                norm.see(g.normalization_residual(), || name.clone());
                let (min, vol) = negativity(&g);
                out.push(match want {
                    Want::Negative => Check::new(name.clone(), min, Bound::Below { value: -1e-3 }, format!("negative volume {vol:.3e}")),
                    Want::NonNegative => Check::new(name.clone(), min, Bound::AtLeast { value: -1e-9 }, ""),
                });
            }
            Err(e) => {
                norm.errors.push(format!("{name}: {e}"));
                out.push(Check::new(name.clone(), f64::NAN, Bound::Below { value: -1e-3 }, e.to_string()));
            }
        }
    }
    out.insert(1, norm.check(&format!("grid normalization residual ({n}x{n})"), 1e-6));
    out
}

fn phase_gap(phi: f64, want: f64) -> f64 {
    let d = (phi - want).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn c9(level: Level) -> Vec<Check> {
    let pol = TruncationPolicy::default();
    let (mut fid, mut phi, mut beta) = (Worst::default(), Worst::default(), Worst::default());
    for z in standard_sweep(level) {
        for (m, j) in subspaces() {
            let ctx = |k2: f64| move || format!("m={m} j={j} z={z} k2={k2}");
            let spec = McsSpec::new(m, j, z).unwrap();
            match build_mcs(spec, &pol).and_then(|s| loop_check(&s.vector, m, 1.0)) {
                Ok(r) => {
                    fid.see(1.0 - r.fidelity, ctx(f64::NAN));
                    phi.see(phase_gap(r.phase, -2.0 * PI * j as f64 / m as f64), ctx(f64::NAN));
                    beta.see(rel1(r.geometric_phase, geometric_phase_scalar(spec)), ctx(f64::NAN));
                }
                Err(e) => fid.errors.push(format!("{}: {e}", ctx(f64::NAN)())),
            }
            for k2 in [-2.0, 0.0, 1.0] {
                let spec = SusySpec::unit(m, j, z, k2).unwrap();
                let mut states: Vec<(susyphoton::Result<SpinorState>, usize)> = vec![(build_supercoherent(&spec, &pol), j)];
                states.push((build_supercoherent_alt(&spec, c(1.0, 0.0), c(0.0, 0.0), &pol), j));
                states.push((build_supercoherent_alt(&spec, c(0.0, 0.0), c(1.0, 0.0), &pol), j + 1));
                for (idx, (s, sub)) in states.into_iter().enumerate() {
                    match s.and_then(|s| loop_check(&s, m, 1.0)) {
                        Ok(r) => {
                            fid.see(1.0 - r.fidelity, ctx(k2));
                            phi.see(phase_gap(r.phase, -2.0 * PI * sub as f64 / m as f64), ctx(k2));
                            if idx == 0 {
                                beta.see_res(geometric_phase_susy_closed(&spec).map(|b| rel1(r.geometric_phase, b)), ctx(k2));
                            }
                        }
                        Err(e) => fid.errors.push(format!("{}: {e}", ctx(k2)())),
                    }
                }
            }
        }
    }
    let spec = SusySpec::unit(2, 0, c(1.0, 0.0), 1.0).unwrap();
    let trap = build_supercoherent(&spec, &pol)
        .and_then(|s| geometric_phase_trapezoid(&s, 2, 1.0, 10_000))
        .and_then(|t| Ok((t - geometric_phase_susy_closed(&spec)?).abs()));
    let trap = match trap {
        Ok(v) => Check::at_most("beta trapezoid oracle m=2 j=0 z=1 k2=1", v, 1e-8),
        Err(e) => Check::new("beta trapezoid oracle m=2 j=0 z=1 k2=1", f64::NAN, Bound::AtMost { value: 1e-8 }, e.to_string()),
    };

    let step: f64 = if level == Level::Full { 0.5 } else { 1.0 };
    let n = (3.0 / step) as i32;
    let zs: Vec<Complex64> = (-n..=n)
        .flat_map(|a| (-n..=n).map(move |b| c(a as f64 * step, b as f64 * step)))
        .filter(|z| z.norm() <= 3.0 + 1e-12)
        .collect();
    let mut min_w = Worst::default();
    for (m, j) in subspaces() {
        let base = SusySpec::unit(m, j, c(1.0, 0.0), 0.0).unwrap();
        let rows = geometric_phase_sweep(&base, &zs, &[-4.0, 0.0, 2.0], &pol);
        for r in &rows {
            if let Err(e) = &r.outcome {
                min_w.errors.push(format!("m={m} j={j} z={} k2={}: {e}", r.z, r.k2));
            }
        }
        let bad = k2_zero_violations(&rows, 0.0);
        min_w.see(bad.iter().map(|v| v.2 - v.3).fold(0.0, f64::max), || format!("m={m} j={j}"));
    }
    vec![
        fid.check("1 - loop fidelity", 1e-10),
        phi.check("|phi - (-2 pi j/m)| mod 2 pi", 1e-10),
        beta.check("beta closed form vs tau <H>", 1e-8),
        trap,
        min_w.check("max beta(k2=0) - beta(k2) on lattice", 1e-9),
    ]
}

fn c10() -> Vec<Check> {
    let mut pha = Worst::default();
    for m in 1..=3 {
        for dim in [16 * m, 64] {
            pha.see_res(check_pha::<f64>(m, dim), || format!("m={m} N={dim}"));
        }
    }
    let pol = TruncationPolicy::default();
    let mut orth = Worst::default();
    for m in 2..=3 {
        for j in 0..m {
            for j2 in 0..m {
                if j == j2 {
                    continue;
                }
                let (a, b) = (McsSpec::new(m, j, c(1.0, 0.0)).unwrap(), McsSpec::new(m, j2, c(2.0, 1.0)).unwrap());
                let v = build_mcs_dim(a, 64, &pol)
                    .and_then(|x| Ok((x, build_mcs_dim(b, 64, &pol)?)))
                    .and_then(|(x, y)| susyphoton::fock::inner(&x.vector, &y.vector))
                    .map(|s| s.norm());
                orth.see_res(v, || format!("m={m} j={j} j'={j2}"));
            }
        }
    }
    let dim = 48;
    let leak = |v: &FockVector, m: usize, j: usize, off: usize| -> f64 {
        v.coeffs().iter().enumerate().filter(|(n, _)| (n + off) % m != j).map(|(_, x)| x.norm()).fold(0.0, f64::max)
    };
    let mut inv = Worst::default();
    for (m, j) in subspaces() {
        for n in 0..8 {
            let idx = m * n + j;
            let ctx = || format!("m={m} j={j} n={n}");
            inv.see(leak(&FockVector::basis(dim, idx).power_annihilate(m), m, j, 0), ctx);
            for k2 in [-2.0, 1.0] {
                let mut spinors = vec![SpinorState::psi_plus(dim, idx)];
                if idx >= 1 {
                    spinors.push(SpinorState::new(FockVector::zeros(dim), FockVector::basis(dim, idx - 1)).unwrap());
                }
                for s in spinors {
                    let out = sao_power_apply(k2, m, &s);
                    inv.see(leak(&out.upper, m, j, 0).max(leak(&out.lower, m, j, 1)), ctx);
                }
            }
        }
    }
    vec![
        pha.check("check_pha residual", 1e-9),
        orth.check("|<z1;m,j|z2;m,j'>| for j != j'", 0.0),
        inv.check("A^m leakage out of H_j", 0.0),
    ]
}

#[derive(Serialize, Clone, Debug)]
pub struct VerifyReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub level: Level,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
    pub passed: bool,
    pub elapsed_s: f64,
    pub failures: Vec<Failure>,
    pub criteria: Vec<CriterionReport>,
}

#[derive(Serialize, Clone, Debug)]
pub struct Failure {
    pub criterion: u8,
    pub check: String,
    pub measured: f64,
    pub bound: Bound,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub known_unattainable: bool,
}

pub fn run(level: Level, fault: Option<Fault>) -> VerifyReport {
    let start = Instant::now();
    let criteria: Vec<CriterionReport> = (1..=10).map(|id| criterion(id, level, fault)).collect();
    let failures: Vec<Failure> = criteria
        .iter()
        .flat_map(|c| {
            c.failures().map(move |f| Failure {
                criterion: c.id,
                check: f.name.clone(),
                measured: f.measured,
                bound: f.bound,
                known_unattainable: f.known_unattainable,
            })
        })
        .collect();
    VerifyReport {
        tool: "susyphoton",
        version: env!("CARGO_PKG_VERSION"),
        level,
        fault,
        passed: failures.is_empty(),
        elapsed_s: start.elapsed().as_secs_f64(),
        failures,
        criteria,
    }
}
