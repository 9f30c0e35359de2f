//! Spinor states of the supersymmetric oscillator `H = omega diag(a^dagger a, a a^dagger)`
//! and the multiphoton supercoherent states, eigenstates of
//! `A^m = ((a^m, m k2 a^{m-1}), (0, a^m))`.

use num_complex::Complex;

use crate::algebra::{McsAlgebra, McsKet, OpPoly, SubspaceNorms};
use crate::error::{Error, Result};
use crate::fock::{inner, FockVector, TruncationPolicy};
use crate::real::{cnt, cpowi, creal, lit, Real};
use crate::scalar_mcs::raw_mcs;

/// `upper` pairs with the fermionic `|1>`, `lower` with `|0>`; the lower Fock index `k`
/// carries energy `(k + 1) omega`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorState<T: Real> {
    pub upper: FockVector<T>,
    pub lower: FockVector<T>,
}

impl<T: Real> SpinorState<T> {
    pub fn new(upper: FockVector<T>, lower: FockVector<T>) -> Result<Self> {
        if upper.dim() != lower.dim() {
            return Err(Error::DimensionMismatch(upper.dim(), lower.dim()));
        }
        Ok(Self { upper, lower })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { upper: FockVector::zeros(dim), lower: FockVector::zeros(dim) }
    }

    /// `|Psi_n^+> = (|n>, 0)`.
    pub fn psi_plus(dim: usize, n: usize) -> Self {
        Self { upper: FockVector::basis(dim, n), lower: FockVector::zeros(dim) }
    }

    /// `|Psi_n^-> = (0, |n-1>)`, `n >= 1`.
    pub fn psi_minus(dim: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSubspace { m: 1, j: 0 });
        }
        Ok(Self { upper: FockVector::zeros(dim), lower: FockVector::basis(dim, n - 1) })
    }

    pub fn dim(&self) -> usize {
        self.upper.dim()
    }

    pub fn norm_sqr(&self) -> T {
        self.upper.norm_sqr() + self.lower.norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == T::zero() {
            return self.clone();
        }
        self.scale(creal(T::one() / n))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { upper: self.upper.scale(c), lower: self.lower.scale(c) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { upper: &self.upper + &other.upper, lower: &self.lower + &other.lower }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { upper: &self.upper - &other.upper, lower: &self.lower - &other.lower }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        Ok(inner(&self.upper, &other.upper)? + inner(&self.lower, &other.lower)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.upper.max_abs_diff(&other.upper).max(self.lower.max_abs_diff(&other.lower))
    }

    pub fn map(&self, f: impl Fn(&FockVector<T>) -> FockVector<T>) -> Self {
        Self { upper: f(&self.upper), lower: f(&self.lower) }
    }

    /// `<psi| O (x) 1 |psi>` (unnormalized).
    pub fn expect(&self, op: &OpPoly<T>) -> Complex<T> {
        let u = inner(&self.upper, &op.apply(&self.upper)).expect("equal dims");
        let l = inner(&self.lower, &op.apply(&self.lower)).expect("equal dims");
        u + l
    }
}

/// Parameters of the general first-order annihilator `((k1 a, k2), (k3 a^2, k4 a))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaoParams<T: Real> {
    pub k1: Complex<T>,
    pub k2: Complex<T>,
    pub k3: Complex<T>,
    pub k4: Complex<T>,
}

impl<T: Real> SaoParams<T> {
    pub fn new(k1: Complex<T>, k2: Complex<T>, k3: Complex<T>, k4: Complex<T>) -> Self {
        Self { k1, k2, k3, k4 }
    }

    /// `(1, k2, 0, 1)`, the family whose `m`-th power is used throughout.
    pub fn canonical(k2: T) -> Self {
        Self::new(creal(T::one()), creal(k2), creal(T::zero()), creal(T::one()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusySpec<T: Real> {
    pub m: usize,
    pub j: usize,
    pub z: Complex<T>,
    pub k2: T,
    pub a_j: Complex<T>,
    pub c_mj: Complex<T>,
    pub omega: T,
}

impl<T: Real> SusySpec<T> {
    pub fn new(m: usize, j: usize, z: Complex<T>, k2: T, a_j: Complex<T>, c_mj: Complex<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder);
        }
        if j >= m {
            return Err(Error::InvalidSubspace { m, j });
        }
        if a_j.norm() == T::zero() && c_mj.norm() == T::zero() {
            return Err(Error::ZeroAmplitudes);
        }
        Ok(Self { m, j, z, k2, a_j, c_mj, omega: T::one() })
    }

    /// Unit amplitudes `a_j = c_{m_j} = 1`.
    pub fn unit(m: usize, j: usize, z: Complex<T>, k2: T) -> Result<Self> {
        Self::new(m, j, z, k2, creal(T::one()), creal(T::one()))
    }

    pub fn with_omega(mut self, omega: T) -> Self {
        self.omega = omega;
        self
    }

    /// `m_j = m` for `j = 0`, else `j`.
    pub fn m_j(&self) -> usize {
        if self.j == 0 { self.m } else { self.j }
    }

    /// `s_j = (j + 1) mod m`.
    pub fn s_j(&self) -> usize {
        (self.j + 1) % self.m
    }

    pub fn alpha(&self) -> Complex<T> {
        cpowi(self.z, self.m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TildeAmps<T: Real> {
    pub a_tilde: Complex<T>,
    pub c_tilde: Complex<T>,
}

/// `H psi` with `H = omega diag(N, N + 1)`.
pub fn susy_hamiltonian_apply<T: Real>(s: &SpinorState<T>, omega: T) -> SpinorState<T> {
    SpinorState {
        upper: s.upper.map_indexed(|n, c| c * (omega * cnt::<T>(n))),
        lower: s.lower.map_indexed(|n, c| c * (omega * cnt::<T>(n + 1))),
    }
}

/// General first-order annihilator.
pub fn sao_apply<T: Real>(p: &SaoParams<T>, s: &SpinorState<T>) -> SpinorState<T> {
    let au = s.upper.annihilate();
    SpinorState {
        upper: &au.scale(p.k1) + &s.lower.scale(p.k2),
        lower: &au.annihilate().scale(p.k3) + &s.lower.annihilate().scale(p.k4),
    }
}

/// `A^m`: upper gets `a^m u + m k2 a^{m-1} l`, lower gets `a^m l`.
pub fn sao_power_apply<T: Real>(k2: T, m: usize, s: &SpinorState<T>) -> SpinorState<T> {
    let low_m1 = s.lower.power_annihilate(m.saturating_sub(1));
    let mix = if m == 0 { FockVector::zeros(s.dim()) } else { low_m1.scale(creal(cnt::<T>(m) * k2)) };
    SpinorState {
        upper: &s.upper.power_annihilate(m) + &mix,
        lower: if m == 0 { s.lower.clone() } else { low_m1.annihilate() },
    }
}

/// `|| A^m psi - z^m psi ||`.
pub fn eigen_residual<T: Real>(s: &SpinorState<T>, k2: T, m: usize, z: Complex<T>) -> T {
    let lhs = sao_power_apply(k2, m, s);
    lhs.sub(&s.scale(cpowi(z, m))).norm()
}

fn ladder_step<T: Real>(m: usize, n: usize, offset: usize) -> T {
    let mut den = T::one();
    for k in 1..=m {
        den *= cnt::<T>(m * (n - 1) + offset + k);
    }
    den.sqrt()
}

/// Unnormalized spinor straight from the coefficient recursion with `alpha = z^m`.
pub fn recursion_spinor<T: Real>(spec: &SusySpec<T>, dim: usize) -> SpinorState<T> {
    let (m, j, mj) = (spec.m, spec.j, spec.m_j());
    let alpha = spec.alpha();
    let dim = dim.max(1);
    let mut up = vec![creal(T::zero()); dim];
    let mut lo = vec![creal(T::zero()); dim];

    let mut l = spec.c_mj;
    let mut n = 0usize;
    while m * n + mj - 1 < dim {
        if n > 0 {
            l = l * alpha / ladder_step::<T>(m, n, mj - 1);
        }
        lo[m * n + mj - 1] = l;
        n += 1;
    }

    let mut u = spec.a_j;
    let mut v = if j == 0 { creal(T::zero()) } else { creal(T::one() / cnt::<T>(j).sqrt()) };
    let mut n = 0usize;
    while m * n + j < dim {
        if n > 0 {
            u = u * alpha / ladder_step::<T>(m, n, j);
            if j == 0 && n == 1 {
                v = creal(T::one() / cnt::<T>(m).sqrt());
            } else {
                v = v * alpha / ladder_step::<T>(m, n, j);
            }
        }
        let mix = v * spec.c_mj * (cnt::<T>(m * n) * spec.k2);
        up[m * n + j] = u - mix;
        n += 1;
    }
    SpinorState { upper: FockVector::from_vec(up), lower: FockVector::from_vec(lo) }
}

/// Normalized supercoherent state at the policy's default cutoff.
pub fn build_supercoherent<T: Real>(spec: &SusySpec<T>, policy: &TruncationPolicy<T>) -> Result<SpinorState<T>> {
    build_supercoherent_dim(spec, policy.dim(spec.z.norm(), spec.m), policy)
}

pub fn build_supercoherent_dim<T: Real>(
    spec: &SusySpec<T>,
    dim: usize,
    policy: &TruncationPolicy<T>,
) -> Result<SpinorState<T>> {
    SusySpec::new(spec.m, spec.j, spec.z, spec.k2, spec.a_j, spec.c_mj)?;
    let s = recursion_spinor(spec, dim).normalized();
    check_spinor_tail(&s, spec.m + 1, policy)?;
    Ok(s)
}

fn check_spinor_tail<T: Real>(s: &SpinorState<T>, guard: usize, policy: &TruncationPolicy<T>) -> Result<()> {
    let mass = (s.upper.tail_mass(guard) + s.lower.tail_mass(guard)) / s.norm_sqr().max(T::min_positive_value());
    if mass > policy.tail_tol {
        return Err(Error::TailMass {
            mass: mass.to_f64().unwrap_or(f64::NAN),
            tol: policy.tail_tol.to_f64().unwrap_or(f64::NAN),
            dim: s.dim(),
        });
    }
    Ok(())
}

/// `chi1 (|z;j>, 0) + chi2 (k2 z* |z;s_j> - k2 a^dagger |z;j>, |z;j>)/sqrt2`, normalized,
/// built from the unnormalized multiphoton series.
pub fn build_supercoherent_alt<T: Real>(
    spec: &SusySpec<T>,
    chi1: Complex<T>,
    chi2: Complex<T>,
    policy: &TruncationPolicy<T>,
) -> Result<SpinorState<T>> {
    if chi1.norm() == T::zero() && chi2.norm() == T::zero() {
        return Err(Error::ZeroAmplitudes);
    }
    let (m, j, z, k2) = (spec.m, spec.j, spec.z, spec.k2);
    let dim = policy.dim(z.norm(), m);
    let raw_j = raw_mcs(m, j, z, dim);
    let raw_s = raw_mcs(m, spec.s_j(), z, dim);
    let f = SpinorState { upper: raw_j.clone(), lower: FockVector::zeros(dim) };
    let half = creal(T::one() / lit::<T>(2.0).sqrt());
    let s = SpinorState {
        upper: &raw_s.scale(z.conj() * k2) - &raw_j.create().0.scale(creal(k2)),
        lower: raw_j,
    }
    .scale(half);
    let total = f.scale(chi1).add(&s.scale(chi2));
    if total.norm() == T::zero() {
        return Err(Error::ZeroAmplitudes);
    }
    let out = total.normalized();
    check_spinor_tail(&out, m + 1, policy)?;
    Ok(out)
}

/// `d/dz |z;m,j>`, which equals `a^dagger |z; m, m_j - 1>`; both forms are evaluated and
/// must agree to `1e-11` relative.
pub fn derivative_state<T: Real>(m: usize, j: usize, z: Complex<T>, dim: usize) -> Result<FockVector<T>> {
    if m == 0 {
        return Err(Error::InvalidOrder);
    }
    if j >= m {
        return Err(Error::InvalidSubspace { m, j });
    }
    let dim = dim.max(2);
    let mut series = vec![creal(T::zero()); dim];
    let mut phi = creal(T::one());
    for n in 1..dim {
        if n > 1 {
            phi = phi * z / cnt::<T>(n - 1).sqrt();
        }
        if n % m == j {
            series[n] = phi * cnt::<T>(n).sqrt();
        }
    }
    let series = FockVector::from_vec(series);
    let mj = if j == 0 { m } else { j };
    let (raised, _) = raw_mcs(m, mj - 1, z, dim).create();
    let diff = series.max_abs_diff(&raised);
    let scale = T::one().max(series.norm());
    if diff > lit::<T>(1e-11) * scale {
        return Err(Error::Inconsistent { what: "derivative forms", diff: diff.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(series)
}

/// `c~ = sqrt((m_j-1)!) z^{-(m_j-1)} c`, `a~ = sqrt(j!) z^{-j} a_j + j k2 z^{-1} c~`.
pub fn tilde_amplitudes<T: Real>(spec: &SusySpec<T>) -> Result<TildeAmps<T>> {
    let z = spec.z;
    if z.norm() == T::zero() {
        return Err(Error::SingularAtOrigin);
    }
    let mj = spec.m_j();
    let sf = |n: usize| (2..=n).fold(T::one(), |acc, k| acc * cnt::<T>(k)).sqrt();
    let zinv = z.inv();
    let c_tilde = spec.c_mj * cpowi(zinv, mj - 1) * sf(mj - 1);
    let a_tilde = spec.a_j * cpowi(zinv, spec.j) * sf(spec.j) + c_tilde * zinv * (cnt::<T>(spec.j) * spec.k2);
    Ok(TildeAmps { a_tilde, c_tilde })
}

/// `a~ (|z;j>, 0) + c~ (-k2 a^dagger |z;m_j-1>, |z;m_j-1>)` in Fock form, normalized.
pub fn spinor_from_tilde<T: Real>(spec: &SusySpec<T>, dim: usize) -> Result<SpinorState<T>> {
    let t = tilde_amplitudes(spec)?;
    let mj = spec.m_j();
    let raw_j = raw_mcs(spec.m, spec.j, spec.z, dim);
    let raw_c = raw_mcs(spec.m, mj - 1, spec.z, dim);
    let upper = &raw_j.scale(t.a_tilde) - &raw_c.create().0.scale(t.c_tilde * spec.k2);
    let lower = raw_c.scale(t.c_tilde);
    Ok(SpinorState { upper, lower }.normalized())
}

/// Tilde decomposition as coherent-ket combinations for the algebraic engine.
pub fn tilde_kets<T: Real>(spec: &SusySpec<T>, t: &TildeAmps<T>) -> (McsKet<T>, McsKet<T>) {
    let mj1 = spec.m_j() - 1;
    let up = McsKet::new().with(t.a_tilde, 0, spec.j).with(-t.c_tilde * spec.k2, 1, mj1);
    let lo = McsKet::new().with(t.c_tilde, 0, mj1);
    (up, lo)
}

struct Engine<T: Real> {
    alg: McsAlgebra<T>,
    up: McsKet<T>,
    lo: McsKet<T>,
    norm2: T,
}

impl<T: Real> Engine<T> {
    fn new(spec: &SusySpec<T>) -> Result<Self> {
        let t = tilde_amplitudes(spec)?;
        let alg = McsAlgebra::new(spec.m, spec.z);
        let (up, lo) = tilde_kets(spec, &t);
        let one = OpPoly::one();
        let norm2 = (alg.expect(&up, &one, &up) + alg.expect(&lo, &one, &lo)).re;
        Ok(Self { alg, up, lo, norm2 })
    }

    fn mean(&self, op: &OpPoly<T>) -> Complex<T> {
        (self.alg.expect(&self.up, op, &self.up) + self.alg.expect(&self.lo, op, &self.lo)) / self.norm2
    }
}

// Closed forms in terms of the tilde amplitudes.

struct Closed<T: Real> {
    r: T,
    z: Complex<T>,
    at2: T,
    ct2: T,
    k2: T,
    x: Complex<T>,
}

impl<T: Real> Closed<T> {
    fn new(spec: &SusySpec<T>) -> Result<Self> {
        let t = tilde_amplitudes(spec)?;
        Ok(Self {
            r: spec.z.norm_sqr(),
            z: spec.z,
            at2: t.a_tilde.norm_sqr(),
            ct2: t.c_tilde.norm_sqr(),
            k2: spec.k2,
            x: t.a_tilde.conj() * t.c_tilde,
        })
    }

    /// `Re(a~* c~ z*)`.
    fn xz(&self) -> T {
        (self.x * self.z.conj()).re
    }
}

fn two<T: Real>() -> T {
    lit(2.0)
}

/// `m = 2` hyperbolic pair: `(T, C)` is `(tanh, cosh)` for `j = 0`, `(coth, sinh)` for `j = 1`.
fn m2_tc<T: Real>(j: usize, r: T) -> (T, T) {
    if j == 0 { (r.tanh(), r.cosh()) } else { (T::one() / r.tanh(), r.sinh()) }
}

/// The spinor normalization constant `N` (normalized state = `N` times the recursion spinor).
pub fn susy_normalization<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    if spec.z.norm() == T::zero() || spec.m > 3 {
        return susy_normalization_direct(spec, TruncationPolicy::default().dim(spec.z.norm(), spec.m));
    }
    susy_normalization_closed(spec)
}

/// Closed forms for `m <= 3`.
pub fn susy_normalization_closed<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    let c = Closed::new(spec)?;
    let (r, k2) = (c.r, c.k2);
    let inv2 = match spec.m {
        1 => r.exp() * (c.at2 + c.ct2 + c.ct2 * k2 * k2 * (r + T::one()) - two::<T>() * k2 * c.xz()),
        2 => {
            let (t, cc) = m2_tc(spec.j, r);
            cc * (c.at2 + c.ct2 * t + c.ct2 * k2 * k2 * (r + t) - two::<T>() * k2 * t * c.xz())
        }
        3 => {
            let n = SubspaceNorms::auto(3, spec.z.norm());
            let (j, mj) = (spec.j as isize, spec.m_j() as isize);
            c.at2 * n.s(j) + c.ct2 * n.s(mj - 1) + c.ct2 * k2 * k2 * (r * n.s(mj - 2) + n.s(mj - 1))
                - two::<T>() * k2 * n.s(mj - 1) * c.xz()
        }
        _ => return susy_normalization_algebraic(spec),
    };
    Ok(T::one() / inv2.sqrt())
}

/// General `m` through the normal-ordering engine.
pub fn susy_normalization_algebraic<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    Ok(T::one() / Engine::new(spec)?.norm2.sqrt())
}

/// `1 / || recursion spinor ||` in dimension `dim`.
pub fn susy_normalization_direct<T: Real>(spec: &SusySpec<T>, dim: usize) -> Result<T> {
    Ok(T::one() / recursion_spinor(spec, dim).norm())
}

/// Quadrature variance `(sigma_s)^2` (`k = 0` position, `k = 1` momentum).
pub fn s_variance_susy<T: Real>(spec: &SusySpec<T>, k: u8) -> Result<T> {
    if spec.z.norm() == T::zero() {
        let s = build_supercoherent(spec, &TruncationPolicy::default())?;
        return Ok(s_variance_susy_oracle(&s, k));
    }
    s_variance_susy_closed(spec, k)
}

/// Closed forms (`m <= 3`); general `m` falls back to the engine.
pub fn s_variance_susy_closed<T: Real>(spec: &SusySpec<T>, k: u8) -> Result<T> {
    let c = Closed::new(spec)?;
    let (r, k2, z) = (c.r, c.k2, c.z);
    let sg = if k == 0 { T::one() } else { -T::one() };
    let d = (z * z).re;
    let one = T::one();
    let t2 = two::<T>();
    match spec.m {
        1 => {
            let a = c.at2 + c.ct2;
            let ne = one / (a + c.ct2 * k2 * k2 * (r + one) - t2 * k2 * c.xz());
            let zc = z.conj();
            let xa = c.x.conj();
            let lin = t2 * r + one + t2 * sg * d;
            let cross = (xa * (z * (t2 * r + lit(3.0)) + (zc * (r + t2) + z * z * z) * sg)).re;
            let t1 = ne / t2 * (a * lin + c.ct2 * k2 * k2 * lin * (r + lit(3.0)) - t2 * k2 * cross);
            let zs = z + zc * sg;
            let br = zs * (a + c.ct2 * k2 * k2 * (r + t2))
                - (c.x * (creal(r + one) + zc * zc * sg) + xa * (z * z + creal((r + one) * sg))) * k2;
            let br2 = (br * br).re;
            let sign2 = if k == 0 { -one } else { one };
            Ok(t1 + sign2 * ne * ne / t2 * br2)
        }
        2 => {
            let (t, _) = m2_tc(spec.j, r);
            let nc = one / (c.at2 + c.ct2 * t + c.ct2 * k2 * k2 * (r + t) - t2 * k2 * t * c.xz());
            let zc = z.conj();
            let body = c.at2 * (t2 * r * t + one + t2 * sg * d)
                + c.ct2 * (t2 * r + t + t2 * sg * t * d)
                + c.ct2 * k2 * k2 * (t2 * r * r * t + lit::<T>(7.0) * r + lit::<T>(3.0) * t + t2 * sg * (r + lit::<T>(3.0) * t) * d)
                - t2 * k2
                    * ((t2 * r + lit::<T>(3.0) * t) * (c.x * zc).re
                        + sg * ((r * t + t2) * (c.x * z).re + t * (c.x * zc * zc * zc).re));
            Ok(nc / t2 * body)
        }
        3 => {
            let n = SubspaceNorms::auto(3, spec.z.norm());
            let (j, mj, sj) = (spec.j as isize, spec.m_j() as isize, spec.s_j() as isize);
            let nj2 = one
                / (c.at2 * n.s(j) + c.ct2 * n.s(mj - 1) + c.ct2 * k2 * k2 * (r * n.s(mj - 2) + n.s(mj - 1))
                    - t2 * k2 * n.s(mj - 1) * c.xz());
            let body = c.at2 * (t2 * r * n.s(mj - 1) + n.s(j))
                + c.ct2 * (t2 * r * n.s(sj) + n.s(mj - 1))
                + c.ct2 * k2 * k2 * (t2 * r * r * n.s(j) + lit::<T>(7.0) * r * n.s(sj) + lit::<T>(3.0) * n.s(mj - 1))
                - t2 * k2 * (t2 * r * n.s(sj) + lit::<T>(3.0) * n.s(mj - 1)) * c.xz();
            Ok(nj2 / t2 * body)
        }
        _ => s_variance_susy_algebraic(spec, k),
    }
}

/// Variance through the normal-ordering engine (any `m`, `z != 0`).
pub fn s_variance_susy_algebraic<T: Real>(spec: &SusySpec<T>, k: u8) -> Result<T> {
    let e = Engine::new(spec)?;
    let s = OpPoly::quadrature(k);
    let mean = e.mean(&s).re;
    Ok(e.mean(&s.mul(&s)).re - mean * mean)
}

/// Variance on an explicit spinor (bosonic quadrature on both components).
pub fn s_variance_susy_oracle<T: Real>(s: &SpinorState<T>, k: u8) -> T {
    let n2 = s.norm_sqr();
    let q = OpPoly::quadrature(k);
    let mean = s.expect(&q).re / n2;
    s.expect(&q.mul(&q)).re / n2 - mean * mean
}

/// `(sigma_q, sigma_p)`.
pub fn sigmas_susy<T: Real>(spec: &SusySpec<T>) -> Result<(T, T)> {
    if spec.z.norm() == T::zero() {
        let s = build_supercoherent(spec, &TruncationPolicy::default())?;
        return Ok((
            s_variance_susy_oracle(&s, 0).max(T::zero()).sqrt(),
            s_variance_susy_oracle(&s, 1).max(T::zero()).sqrt(),
        ));
    }
    Ok((
        s_variance_susy_closed(spec, 0)?.max(T::zero()).sqrt(),
        s_variance_susy_closed(spec, 1)?.max(T::zero()).sqrt(),
    ))
}

/// `sigma_q sigma_p`.
pub fn hur_susy<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    let (q, p) = sigmas_susy(spec)?;
    Ok(q * p)
}

/// Mandel `Q` with `N (x) 1` acting on both components.
pub fn mandel_q_susy<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    if spec.z.norm() == T::zero() {
        let s = build_supercoherent(spec, &TruncationPolicy::default())?;
        return mandel_q_susy_oracle(&s);
    }
    mandel_q_susy_closed(spec)
}

pub fn mandel_q_susy_closed<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    let c = Closed::new(spec)?;
    let (r, k2) = (c.r, c.k2);
    let one = T::one();
    let t2 = two::<T>();
    let x = c.xz();
    let (d1, d2, pre) = match spec.m {
        1 => {
            let a = c.at2 + c.ct2;
            let ne = one / (a + c.ct2 * k2 * k2 * (r + one) - t2 * k2 * x);
            let d1 = a * r + c.ct2 * k2 * k2 * ((r + one) * (r + one) + r) - t2 * k2 * (r + one) * x;
            let d2 = a * r + c.ct2 * k2 * k2 * ((r + t2) * (r + t2) + r) - t2 * k2 * (r + t2) * x;
            (d1, d2, ne)
        }
        2 => {
            let (t, _) = m2_tc(spec.j, r);
            let nc = one / (c.at2 + c.ct2 * t + c.ct2 * k2 * k2 * (r + t) - t2 * k2 * t * x);
            let d1 = (c.at2 * t + c.ct2) * r + c.ct2 * k2 * k2 * ((r * r + one) * t + lit::<T>(3.0) * r)
                - t2 * k2 * (r + t) * x;
            let d2 = (c.at2 + c.ct2 * t) * r + c.ct2 * k2 * k2 * (r * r + lit::<T>(5.0) * r * t + lit::<T>(4.0))
                - t2 * k2 * (r * t + t2) * x;
            (d1, d2, nc)
        }
        3 => {
            let n = SubspaceNorms::auto(3, spec.z.norm());
            let (j, mj, sj) = (spec.j as isize, spec.m_j() as isize, spec.s_j() as isize);
            let nj2 = one
                / (c.at2 * n.s(j) + c.ct2 * n.s(mj - 1) + c.ct2 * k2 * k2 * (r * n.s(mj - 2) + n.s(mj - 1))
                    - t2 * k2 * n.s(mj - 1) * x);
            let d1 = (c.at2 * n.s(mj - 1) + c.ct2 * n.s(sj)) * r
                + c.ct2 * k2 * k2 * (r * r * n.s(j) + lit::<T>(3.0) * r * n.s(sj) + n.s(mj - 1))
                - t2 * k2 * (r * n.s(sj) + n.s(mj - 1)) * x;
            let d2 = (c.at2 * n.s(sj) + c.ct2 * n.s(j)) * r
                + c.ct2 * k2 * k2 * (r * r * n.s(mj - 1) + lit::<T>(5.0) * r * n.s(j) + lit::<T>(4.0) * n.s(sj))
                - t2 * k2 * (r * n.s(j) + t2 * n.s(sj)) * x;
            (d1, d2, nj2)
        }
        _ => return mandel_q_susy_algebraic(spec),
    };
    if d1 * pre <= lit(1e-300) {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    Ok(r * d2 / d1 - pre * d1)
}

pub fn mandel_q_susy_algebraic<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    let e = Engine::new(spec)?;
    let n1 = e.mean(&OpPoly::number()).re;
    if n1 <= lit(1e-300) {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    let n2 = e.mean(&OpPoly::monomial(2, 2, creal(T::one()))).re;
    Ok((n2 - n1 * n1) / n1)
}

pub fn mandel_q_susy_oracle<T: Real>(s: &SpinorState<T>) -> Result<T> {
    let n2s = s.norm_sqr();
    let n1 = s.expect(&OpPoly::number()).re / n2s;
    if n1 <= lit(1e-300) {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    let n2 = s.expect(&OpPoly::monomial(2, 2, creal(T::one()))).re / n2s;
    Ok((n2 - n1 * n1) / n1)
}

/// `<H>/omega` from the tilde decomposition:
/// `|a~|^2 <N>_j + |c~|^2 <N+1>_{m_j-1} + |c~|^2 k2^2 <N>_{z'} - 2 k2 Re(a~ c~* <z'|N|z;j>)`.
pub fn mean_energy_susy<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    if spec.z.norm() == T::zero() {
        let s = build_supercoherent(spec, &TruncationPolicy::default())?;
        return Ok(mean_energy_susy_oracle(&s, T::one()));
    }
    let t = tilde_amplitudes(spec)?;
    let alg = McsAlgebra::new(spec.m, spec.z);
    let mj1 = spec.m_j() - 1;
    let one = creal(T::one());
    let kj = McsKet::new().with(one, 0, spec.j);
    let kc = McsKet::new().with(one, 0, mj1);
    let kd = McsKet::new().with(one, 1, mj1);
    let n = OpPoly::number();
    let n1 = n.add(&OpPoly::one());
    let num = alg.expect(&kj, &n, &kj).re * t.a_tilde.norm_sqr()
        + alg.expect(&kc, &n1, &kc).re * t.c_tilde.norm_sqr()
        + alg.expect(&kd, &n, &kd).re * t.c_tilde.norm_sqr() * spec.k2 * spec.k2
        - two::<T>() * spec.k2 * (t.a_tilde * t.c_tilde.conj() * alg.expect(&kd, &n, &kj)).re;
    let e = Engine::new(spec)?;
    Ok(num / e.norm2)
}

/// `<H>` on an explicit spinor (normalized internally).
pub fn mean_energy_susy_oracle<T: Real>(s: &SpinorState<T>, omega: T) -> T {
    let h = susy_hamiltonian_apply(s, omega);
    s.inner(&h).expect("equal dims").re / s.norm_sqr()
}

/// Every observable of one supercoherent state evaluated on a truncated spinor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SusyOracle<T: Real> {
    pub dim: usize,
    pub norm_const: T,
    pub var_q: T,
    pub var_p: T,
    pub mandel: Option<T>,
    pub energy: T,
    pub eigen_residual: T,
}

pub fn susy_oracle<T: Real>(spec: &SusySpec<T>, dim: usize) -> SusyOracle<T> {
    let raw = recursion_spinor(spec, dim);
    let s = raw.normalized();
    SusyOracle {
        dim,
        norm_const: T::one() / raw.norm(),
        var_q: s_variance_susy_oracle(&s, 0),
        var_p: s_variance_susy_oracle(&s, 1),
        mandel: mandel_q_susy_oracle(&s).ok(),
        energy: mean_energy_susy_oracle(&s, T::one()),
        eigen_residual: eigen_residual(&s, spec.k2, spec.m, spec.z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::rel_err;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pol() -> TruncationPolicy<f64> {
        TruncationPolicy::default()
    }

    #[test]
    fn hamiltonian_examples() {
        let h = susy_hamiltonian_apply(&SpinorState::<f64>::psi_plus(8, 0), 1.0);
        assert_eq!(h.norm(), 0.0);
        let s = SpinorState::<f64>::psi_minus(8, 2).unwrap();
        let h = susy_hamiltonian_apply(&s, 1.0);
        assert!(h.max_abs_diff(&s.scale(c(2.0, 0.0))) < 1e-15);
        for n in 1..6 {
            let p = SpinorState::<f64>::psi_plus(8, n);
            let m = SpinorState::<f64>::psi_minus(8, n).unwrap();
            let ep = p.inner(&susy_hamiltonian_apply(&p, 1.3)).unwrap().re;
            let em = m.inner(&susy_hamiltonian_apply(&m, 1.3)).unwrap().re;
            assert_relative_eq!(ep, 1.3 * n as f64, max_relative = 1e-14);
            assert_relative_eq!(em, 1.3 * n as f64, max_relative = 1e-14);
        }
    }

    #[test]
    fn sao_examples() {
        let s = SpinorState::<f64>::new(FockVector::coherent(c(0.4, 0.1), 20), FockVector::basis(20, 3)).unwrap();
        let diag = sao_apply(&SaoParams::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)), &s);
        assert!(diag.upper.max_abs_diff(&s.upper.annihilate()) < 1e-15);
        let only = sao_apply(&SaoParams::canonical(1.0), &SpinorState::new(FockVector::zeros(4), FockVector::basis(4, 0)).unwrap());
        assert!(only.upper.max_abs_diff(&FockVector::basis(4, 0)) < 1e-15);
        for m in 1..=4 {
            let mut comp = s.clone();
            for _ in 0..m {
                comp = sao_apply(&SaoParams::canonical(0.7), &comp);
            }
            assert!(comp.max_abs_diff(&sao_power_apply(0.7, m, &s)) < 1e-12);
        }
        let m = 3;
        let out = sao_power_apply(0.5, m, &SpinorState::<f64>::psi_minus(10, m).unwrap());
        assert_relative_eq!(out.upper.coeffs()[0].re, 3.0 * 0.5 * 2f64.sqrt(), max_relative = 1e-14);
        assert_eq!(out.lower.norm(), 0.0);
    }

    #[test]
    fn m1_unit_amplitudes_at_k2_zero() {
        let z = c(0.9, -0.3);
        let s = build_supercoherent(&SusySpec::unit(1, 0, z, 0.0).unwrap(), &pol()).unwrap();
        let g = FockVector::coherent(z, s.dim()).scale(c(0.5f64.sqrt(), 0.0));
        assert!(s.upper.max_abs_diff(&g) < 1e-10);
        assert!(s.lower.max_abs_diff(&g) < 1e-10);
    }

    #[test]
    fn origin_reduces_to_vacuum_spinor() {
        let spec = SusySpec::new(2, 0, c(0.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = build_supercoherent(&spec, &pol()).unwrap();
        assert!(s.max_abs_diff(&SpinorState::psi_plus(s.dim(), 0)) < 1e-15);
    }

    #[test]
    fn eigen_residual_example() {
        let spec = SusySpec::unit(2, 1, c(2.0, 0.0), 1.0).unwrap();
        let s = build_supercoherent(&spec, &pol()).unwrap();
        assert!(eigen_residual(&s, 1.0, 2, spec.z) < 1e-10);
    }

    #[test]
    fn alt_family() {
        let spec = SusySpec::unit(3, 0, c(1.0, 0.0), 1.0).unwrap();
        let s = build_supercoherent_alt(&spec, c(1.0, 0.0), c(1.0, 0.0), &pol()).unwrap();
        assert!(eigen_residual(&s, 1.0, 3, spec.z) < 1e-10);
        let f = build_supercoherent_alt(&spec, c(1.0, 0.0), c(0.0, 0.0), &pol()).unwrap();
        assert_eq!(f.lower.norm(), 0.0);
        assert_eq!(SusySpec::<f64>::unit(2, 1, c(1.0, 0.0), 0.0).unwrap().s_j(), 0);
        assert!(matches!(
            build_supercoherent_alt(&spec, c(0.0, 0.0), c(0.0, 0.0), &pol()),
            Err(Error::ZeroAmplitudes)
        ));
    }

    #[test]
    fn derivative_examples() {
        let d = derivative_state::<f64>(1, 0, c(0.0, 0.0), 8).unwrap();
        assert!(d.max_abs_diff(&FockVector::basis(8, 1)) < 1e-15);
        let d = derivative_state::<f64>(2, 0, c(0.8, 0.2), 30).unwrap();
        assert!(d.coeffs().iter().skip(1).step_by(2).all(|x| x.norm() == 0.0));
        assert!(derivative_state::<f64>(3, 2, c(1.0, 1.0), 60).is_ok());
    }

    #[test]
    fn tilde_examples() {
        let t = tilde_amplitudes(&SusySpec::new(2, 0, c(0.7, 0.2), 1.5, c(0.3, 0.1), c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(t.a_tilde, c(0.3, 0.1));
        let z = c(0.6, -0.8);
        let spec = SusySpec::new(3, 2, z, 0.4, c(1.1, 0.0), c(0.5, 0.5)).unwrap();
        let t = tilde_amplitudes(&spec).unwrap();
        let want_c = spec.c_mj * z.powi(-1);
        let want_a = 2f64.sqrt() * z.powi(-2) * spec.a_j + 2.0 * 0.4 * z.powi(-1) * want_c;
        assert!((t.c_tilde - want_c).norm() < 1e-14);
        assert!((t.a_tilde - want_a).norm() < 1e-14);
        let t = tilde_amplitudes(&SusySpec::unit(2, 1, c(1.0, 0.0), 0.0).unwrap()).unwrap();
        assert!((t.a_tilde - c(1.0, 0.0)).norm() < 1e-15 && (t.c_tilde - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            tilde_amplitudes(&SusySpec::unit(2, 1, c(0.0, 0.0), 0.0).unwrap()),
            Err(Error::SingularAtOrigin)
        ));
    }

    #[test]
    fn tilde_reconstruction() {
        for m in 1..=3 {
            for j in 0..m {
                let spec = SusySpec::new(m, j, c(1.2, 0.7), -0.6, c(0.4, 0.9), c(1.0, -0.3)).unwrap();
                let dim = pol().dim(spec.z.norm(), m);
                let a = build_supercoherent_dim(&spec, dim, &pol()).unwrap();
                let b = spinor_from_tilde(&spec, dim).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10, "m={m} j={j}");
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let n = susy_normalization(&SusySpec::new(1, 0, c(0.0, 0.0), 0.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap()).unwrap();
        assert_relative_eq!(n, 1.0, max_relative = 1e-14);
        let n = susy_normalization(&SusySpec::unit(1, 0, c(1.0, 0.0), 1.0).unwrap()).unwrap();
        assert_relative_eq!(n, (-0.5f64).exp() / 2f64.sqrt(), max_relative = 1e-14);
        let spec = SusySpec::unit(2, 0, c(1.0, 0.0), 0.0).unwrap();
        let direct = susy_normalization_direct(&spec, 60).unwrap();
        assert!(rel_err(susy_normalization(&spec).unwrap(), direct) < 1e-10);
    }

    #[test]
    fn m1_k2_zero_minimum_uncertainty() {
        let h = hur_susy(&SusySpec::unit(1, 0, c(1.7, -0.4), 0.0).unwrap()).unwrap();
        assert!((h - 0.5).abs() < 1e-10);
    }

    #[test]
    fn closed_vs_engine_vs_oracle() {
        for m in 1..=4 {
            for j in 0..m {
                for &k2 in &[-2.0, 0.0, 1.0] {
                    let spec = SusySpec::new(m, j, c(0.9, 0.6), k2, c(1.0, 0.5), c(0.3, -1.0)).unwrap();
                    let o = susy_oracle(&spec, 90);
                    for k in 0..2u8 {
                        let want = if k == 0 { o.var_q } else { o.var_p };
                        assert!(rel_err(s_variance_susy_closed(&spec, k).unwrap(), want) < 1e-9);
                        assert!(rel_err(s_variance_susy_algebraic(&spec, k).unwrap(), want) < 1e-9);
                    }
                    let q = o.mandel.unwrap();
                    assert!(rel_err(mandel_q_susy_closed(&spec).unwrap(), q) < 1e-9);
                    assert!(rel_err(mandel_q_susy_algebraic(&spec).unwrap(), q) < 1e-9);
                    assert!(rel_err(susy_normalization_closed(&spec).unwrap(), o.norm_const) < 1e-10);
                    assert!(rel_err(mean_energy_susy(&spec).unwrap(), o.energy) < 1e-10);
                }
            }
        }
    }
}
