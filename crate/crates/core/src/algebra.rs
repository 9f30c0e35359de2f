//! Subspace sums `S_j(r) = sum_n r^{2(mn+j)}/(mn+j)!` and a normal-ordering engine
//! for expectation values between (raised) multiphoton coherent kets.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::fock::FockVector;
use crate::real::{binom, cnt, cpowi, creal, lit, Real};

/// Below this `|z|^2` the m = 3 closed forms lose digits to cancellation.
pub const CLOSED_FORM_MIN_R2: f64 = 0.5;

/// The `m` subspace sums at fixed `r = |z|`, stored in the reduced form
/// `t_i = S_i i! / r^{2i}`, which stays finite as `r -> 0`.
#[derive(Clone, Debug)]
pub struct SubspaceNorms<T: Real> {
    m: usize,
    x: T,
    t: Vec<T>,
}

impl<T: Real> SubspaceNorms<T> {
    /// Term-recurrence series, stopped once a term drops below `1e-18` of the sum.
    pub fn series(m: usize, r: T) -> Self {
        let m = m.max(1);
        let x = r * r;
        let xm = x.powi(m as i32);
        let stop = lit::<T>(1e-18);
        let t = (0..m)
            .map(|i| {
                let mut sum = T::one();
                let mut term = T::one();
                let mut n = 1usize;
                loop {
                    let mut den = T::one();
                    for k in 1..=m {
                        den *= cnt::<T>(m * (n - 1) + i + k);
                    }
                    term = term * xm / den;
                    sum += term;
                    if term <= stop * sum || term == T::zero() || n > 100_000 {
                        break;
                    }
                    n += 1;
                }
                sum
            })
            .collect();
        Self { m, x, t }
    }

    /// Closed forms for `m <= 3`; `None` otherwise or at `r = 0`.
    pub fn closed(m: usize, r: T) -> Option<Self> {
        let x = r * r;
        if x <= T::zero() {
            return None;
        }
        let s: Vec<T> = match m {
            1 => vec![x.exp()],
            2 => vec![x.cosh(), x.sinh()],
            3 => {
                let third = T::one() / lit::<T>(3.0);
                let ex = x.exp();
                let damp = lit::<T>(2.0) * (-x / lit::<T>(2.0)).exp();
                let ph = lit::<T>(3.0).sqrt() * x / lit::<T>(2.0);
                let sixth = T::PI() / lit::<T>(6.0);
                vec![
                    third * (ex + damp * ph.cos()),
                    third * (ex - damp * (sixth - ph).sin()),
                    third * (ex - damp * (sixth + ph).sin()),
                ]
            }
            _ => return None,
        };
        let t = s
            .iter()
            .enumerate()
            .map(|(i, si)| *si * fact::<T>(i) / x.powi(i as i32))
            .collect();
        Some(Self { m, x, t })
    }

    /// Closed form where it is well conditioned, series elsewhere.
    pub fn auto(m: usize, r: T) -> Self {
        if m <= 3 && r * r >= lit(CLOSED_FORM_MIN_R2) {
            if let Some(c) = Self::closed(m, r) {
                return c;
            }
        }
        Self::series(m, r)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `|z|^2`.
    pub fn x(&self) -> T {
        self.x
    }

    /// `S_{i mod m}`.
    pub fn s(&self, i: isize) -> T {
        let i = wrap(i, self.m);
        self.t[i] * self.x.powi(i as i32) / fact::<T>(i)
    }

    /// `S_a / S_b` with indices taken mod `m`.
    pub fn ratio(&self, a: isize, b: isize) -> T {
        let a = wrap(a, self.m);
        let b = wrap(b, self.m);
        let scale = if a >= b {
            self.x.powi((a - b) as i32)
        } else {
            T::one() / self.x.powi((b - a) as i32)
        };
        scale * fact::<T>(b) / fact::<T>(a) * self.t[a] / self.t[b]
    }

    /// `|z|^2 S_{b-1} / S_b`, the mean photon number in subspace `b`.
    pub fn shift_ratio(&self, b: isize) -> T {
        let b = wrap(b, self.m);
        if b >= 1 {
            cnt::<T>(b) * self.t[b - 1] / self.t[b]
        } else {
            self.x.powi(self.m as i32) / fact::<T>(self.m - 1) * self.t[self.m - 1] / self.t[0]
        }
    }

    /// `S_j^{-1/2}`.
    pub fn norm_const(&self, j: usize) -> T {
        T::one() / self.s(j as isize).sqrt()
    }
}

pub(crate) fn wrap(i: isize, m: usize) -> usize {
    i.rem_euclid(m as isize) as usize
}

fn fact<T: Real>(n: usize) -> T {
    (2..=n).fold(T::one(), |acc, k| acc * cnt::<T>(k))
}

/// Normal-ordered operator `sum c_{ij} (a^dagger)^i a^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpPoly<T: Real> {
    terms: BTreeMap<(usize, usize), Complex<T>>,
}

impl<T: Real> OpPoly<T> {
    pub fn monomial(i: usize, j: usize, c: Complex<T>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((i, j), c);
        Self { terms }
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, creal(T::one()))
    }

    pub fn a() -> Self {
        Self::monomial(0, 1, creal(T::one()))
    }

    pub fn adag() -> Self {
        Self::monomial(1, 0, creal(T::one()))
    }

    pub fn number() -> Self {
        Self::monomial(1, 1, creal(T::one()))
    }

    /// Quadrature `(a + (-1)^k a^dagger) / (sqrt2 i^k)`; `k = 0` position, `k = 1` momentum.
    pub fn quadrature(k: u8) -> Self {
        let s = T::one() / lit::<T>(2.0).sqrt();
        if k == 0 {
            Self::a().add(&Self::adag()).scale(creal(s))
        } else {
            Self::a().add(&Self::adag().scale(creal(-T::one()))).scale(Complex::new(T::zero(), -s))
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Complex<T>)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, *v * c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.terms.clone();
        for (k, v) in &other.terms {
            *out.entry(*k).or_insert_with(|| creal(T::zero())) += *v;
        }
        Self { terms: out }
    }

    /// Product, normal ordered with `a^s (a^dagger)^r = sum_k C(s,k) C(r,k) k! (a^dagger)^{r-k} a^{s-k}`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<(usize, usize), Complex<T>> = BTreeMap::new();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let mut kf = T::one();
                for k in 0..=j1.min(i2) {
                    if k > 0 {
                        kf *= cnt::<T>(k);
                    }
                    let w = binom::<T>(j1, k) * binom::<T>(i2, k) * kf;
                    *out.entry((i1 + i2 - k, j1 + j2 - k)).or_insert_with(|| creal(T::zero())) +=
                        *c1 * *c2 * w;
                }
            }
        }
        Self { terms: out }
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Acts on a truncated vector (creation overflow is dropped).
    pub fn apply(&self, v: &FockVector<T>) -> FockVector<T> {
        let mut out = FockVector::zeros(v.dim());
        for (&(i, l), c) in &self.terms {
            let (w, _) = v.power_annihilate(l).power_create(i);
            out = &out + &w.scale(*c);
        }
        out
    }
}

/// Linear combination `sum c (a^dagger)^raise |z; m, sub>` of unnormalized
/// multiphoton coherent kets `|z;m,j> = sum_n z^{mn+j}/sqrt((mn+j)!) |mn+j>`.
#[derive(Clone, Debug, Default)]
pub struct McsKet<T: Real> {
    pub terms: Vec<(Complex<T>, usize, usize)>,
}

impl<T: Real> McsKet<T> {
    pub fn new() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn with(mut self, coef: Complex<T>, raise: usize, sub: usize) -> Self {
        self.terms.push((coef, raise, sub));
        self
    }
}

/// Evaluates matrix elements between [`McsKet`]s through
/// `<z;p|(a^dagger)^i a^l|z;q> = conj(z)^i z^l delta_{p-i = q-l mod m} S_{p-i}`.
#[derive(Clone, Debug)]
pub struct McsAlgebra<T: Real> {
    pub z: Complex<T>,
    pub norms: SubspaceNorms<T>,
}

impl<T: Real> McsAlgebra<T> {
    pub fn new(m: usize, z: Complex<T>) -> Self {
        Self { z, norms: SubspaceNorms::auto(m, z.norm()) }
    }

    pub fn with_norms(z: Complex<T>, norms: SubspaceNorms<T>) -> Self {
        Self { z, norms }
    }

    fn base(&self, p: usize, i: usize, l: usize, q: usize) -> Complex<T> {
        let m = self.norms.m() as isize;
        let lhs = (p as isize - i as isize).rem_euclid(m);
        let rhs = (q as isize - l as isize).rem_euclid(m);
        if lhs != rhs {
            return creal(T::zero());
        }
        cpowi(self.z.conj(), i) * cpowi(self.z, l) * self.norms.s(lhs)
    }

    /// `<bra| op |ket>`.
    pub fn expect(&self, bra: &McsKet<T>, op: &OpPoly<T>, ket: &McsKet<T>) -> Complex<T> {
        let mut total = creal(T::zero());
        for &(cb, rb, pb) in &bra.terms {
            for &(ck, rk, pk) in &ket.terms {
                let full = OpPoly::monomial(0, rb, creal(T::one()))
                    .mul(op)
                    .mul(&OpPoly::monomial(rk, 0, creal(T::one())));
                let mut acc = creal(T::zero());
                for (&(i, l), c) in full.terms() {
                    acc += *c * self.base(pb, i, l, pk);
                }
                total += cb.conj() * ck * acc;
            }
        }
        total
    }
}
