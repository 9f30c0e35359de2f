//! Truncated number-basis vectors and ladder operators.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{cnt, creal, lit, Real};

/// Complex amplitudes over `|0>, ..., |N-1>`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<T: Real> {
    coeffs: Vec<Complex<T>>,
}

/// How many number states to keep for a given amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy<T: Real> {
    pub base: usize,
    pub tail_tol: T,
}

impl<T: Real> Default for TruncationPolicy<T> {
    fn default() -> Self {
        Self { base: 16, tail_tol: lit(1e-12) }
    }
}

impl<T: Real> TruncationPolicy<T> {
    pub fn new(base: usize, tail_tol: T) -> Self {
        Self { base, tail_tol }
    }

    /// `ceil(|z|^2 + 10 sqrt(|z|^2 + 1)) + base + m`.
    pub fn dim(&self, abs_z: T, m: usize) -> usize {
        let r2 = abs_z * abs_z;
        let core = (r2 + lit::<T>(10.0) * (r2 + T::one()).sqrt()).ceil();
        core.to_usize().unwrap_or(0) + self.base + m
    }

    /// Same policy with the cutoff doubled, for convergence checks.
    pub fn doubled(&self, abs_z: T, m: usize) -> usize {
        2 * self.dim(abs_z, m)
    }

    /// Errors when `v` carries more than `tail_tol` in its top `guard` entries.
    pub fn check_tail(&self, v: &FockVector<T>, guard: usize) -> Result<()> {
        let mass = v.tail_mass(guard) / v.norm_sqr().max(T::min_positive_value());
        if mass > self.tail_tol {
            return Err(Error::TailMass {
                mass: mass.to_f64().unwrap_or(f64::NAN),
                tol: self.tail_tol.to_f64().unwrap_or(f64::NAN),
                dim: v.dim(),
            });
        }
        Ok(())
    }
}

impl<T: Real> FockVector<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidGrid("empty Fock vector".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite amplitude".into()));
        }
        Ok(Self { coeffs })
    }

    pub(crate) fn from_vec(coeffs: Vec<Complex<T>>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec(vec![Complex::new(T::zero(), T::zero()); dim.max(1)])
    }

    /// Number state `|k>` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![Complex::new(T::zero(), T::zero()); dim.max(1)];
        if k < v.len() {
            v[k] = creal(T::one());
        }
        Self::from_vec(v)
    }

    /// Normalized Glauber state `exp(-|a|^2/2) sum a^n/sqrt(n!) |n>`.
    pub fn coherent(alpha: Complex<T>, dim: usize) -> Self {
        let mut v = Vec::with_capacity(dim.max(1));
        let mut t = creal((-lit::<T>(0.5) * alpha.norm_sqr()).exp());
        for n in 0..dim.max(1) {
            if n > 0 {
                t = t * alpha / cnt::<T>(n).sqrt();
            }
            v.push(t);
        }
        Self::from_vec(v)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
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

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| *c * s).collect())
    }

    /// Mass carried by the top `guard` entries.
    pub fn tail_mass(&self, guard: usize) -> T {
        let start = self.dim().saturating_sub(guard.max(1));
        self.coeffs[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// Zero-pads or cuts to `dim` entries.
    pub fn resized(&self, dim: usize) -> Self {
        let mut v = self.coeffs.clone();
        v.resize(dim.max(1), Complex::new(T::zero(), T::zero()));
        Self::from_vec(v)
    }

    pub fn map_indexed(&self, f: impl Fn(usize, Complex<T>) -> Complex<T>) -> Self {
        Self::from_vec(self.coeffs.iter().enumerate().map(|(n, c)| f(n, *c)).collect())
    }

    /// Largest componentwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n = self.dim().max(other.dim());
        (0..n)
            .map(|k| (self.get(k) - other.get(k)).norm())
            .fold(T::zero(), T::max)
    }

    pub fn get(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// `a`: `c'_n = sqrt(n+1) c_{n+1}`.
    pub fn annihilate(&self) -> Self {
        let n = self.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for k in 0..n - 1 {
            out[k] = self.coeffs[k + 1] * cnt::<T>(k + 1).sqrt();
        }
        Self::from_vec(out)
    }

    /// `a^dagger`; the amplitude pushed past `|N-1>` is dropped and its mass returned.
    pub fn create(&self) -> (Self, T) {
        let n = self.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for k in 1..n {
            out[k] = self.coeffs[k - 1] * cnt::<T>(k).sqrt();
        }
        let loss = (self.coeffs[n - 1] * cnt::<T>(n).sqrt()).norm_sqr();
        (Self::from_vec(out), loss)
    }

    /// `a^m`.
    pub fn power_annihilate(&self, m: usize) -> Self {
        let mut v = self.clone();
        for _ in 0..m {
            v = v.annihilate();
        }
        v
    }

    /// `(a^dagger)^m` with accumulated loss.
    pub fn power_create(&self, m: usize) -> (Self, T) {
        let mut v = self.clone();
        let mut loss = T::zero();
        for _ in 0..m {
            let (w, l) = v.create();
            v = w;
            loss += l;
        }
        (v, loss)
    }

    /// `a^dagger a`.
    pub fn number(&self) -> Self {
        self.map_indexed(|n, c| c * cnt::<T>(n))
    }
}

impl<T: Real> Add for &FockVector<T> {
    type Output = FockVector<T>;
    fn add(self, rhs: Self) -> FockVector<T> {
        let n = self.dim().max(rhs.dim());
        FockVector::from_vec((0..n).map(|k| self.get(k) + rhs.get(k)).collect())
    }
}

impl<T: Real> Sub for &FockVector<T> {
    type Output = FockVector<T>;
    fn sub(self, rhs: Self) -> FockVector<T> {
        let n = self.dim().max(rhs.dim());
        FockVector::from_vec((0..n).map(|k| self.get(k) - rhs.get(k)).collect())
    }
}

impl<T: Real> Neg for &FockVector<T> {
    type Output = FockVector<T>;
    fn neg(self) -> FockVector<T> {
        self.scale(creal(-T::one()))
    }
}

impl<T: Real> Mul<Complex<T>> for &FockVector<T> {
    type Output = FockVector<T>;
    fn mul(self, rhs: Complex<T>) -> FockVector<T> {
        self.scale(rhs)
    }
}

/// `sum conj(u_n) v_n`.
pub fn inner<T: Real>(u: &FockVector<T>, v: &FockVector<T>) -> Result<Complex<T>> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a.conj() * b).sum())
}

/// `<(a^dagger)^p a^q>` computed as `<a^p v, a^q v>`.
pub fn moment<T: Real>(v: &FockVector<T>, p: usize, q: usize) -> Result<Complex<T>> {
    let ns = v.norm_sqr();
    if (ns - T::one()).abs() > lit(1e-10) {
        return Err(Error::NotNormalized(ns.to_f64().unwrap_or(f64::NAN)));
    }
    inner(&v.power_annihilate(p), &v.power_annihilate(q))
}

/// `N_m(E) = prod_{j<m} (E - (j + 1/2))`.
pub fn pha_polynomial<T: Real>(m: usize, e: T) -> T {
    (0..m).fold(T::one(), |acc, j| acc * (e - cnt::<T>(j) - lit(0.5)))
}

/// Largest deviation of `[a^m, (a^dagger)^m]` from `N_m(H+m) - N_m(H)` on `|n>`, `n <= N-1-2m`.
pub fn check_pha<T: Real>(m: usize, dim: usize) -> Result<T> {
    if m == 0 {
        return Err(Error::InvalidOrder);
    }
    if dim <= 2 * m {
        return Err(Error::TruncationTooSmall { dim, m });
    }
    let mut worst = T::zero();
    for n in 0..=(dim - 1 - 2 * m) {
        let v = FockVector::<T>::basis(dim, n);
        let (up, _) = v.power_create(m);
        let lhs_a = up.power_annihilate(m);
        let (lhs_b, _) = v.power_annihilate(m).power_create(m);
        let lhs = &lhs_a - &lhs_b;
        let h = cnt::<T>(n) + lit(0.5);
        let rhs = pha_polynomial(m, h + cnt::<T>(m)) - pha_polynomial(m, h);
        let expect = v.scale(creal(rhs));
        worst = worst.max(lhs.max_abs_diff(&expect));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type V = FockVector<f64>;

    #[test]
    fn ladder_basics() {
        let one = V::basis(2, 1);
        assert_eq!(one.annihilate(), V::basis(2, 0));
        assert_eq!(V::basis(4, 0).annihilate().norm(), 0.0);
        let (c, loss) = V::basis(4, 0).create();
        assert_eq!(c, V::basis(4, 1));
        assert_eq!(loss, 0.0);
        let (top, loss) = V::basis(7, 6).create();
        assert_eq!(top.norm(), 0.0);
        assert_relative_eq!(loss, 7.0, max_relative = 1e-15);
        let (two, _) = V::basis(5, 0).power_create(2);
        assert_relative_eq!(two.coeffs()[2].re, 2f64.sqrt(), max_relative = 1e-15);
        let w = V::basis(5, 3).power_annihilate(2);
        assert_relative_eq!(w.coeffs()[1].re, 6f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn coherent_is_eigenvector() {
        let alpha = Complex::new(1.0, 0.0);
        let v = V::coherent(alpha, 64);
        let av = v.annihilate();
        for n in 0..63 {
            assert!((av.coeffs()[n] - alpha * v.coeffs()[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_overlap_matches_closed_form() {
        let a = Complex::new(1.0, 0.0);
        let b = Complex::new(0.0, 1.0);
        let got = inner(&V::coherent(a, 64), &V::coherent(b, 64)).unwrap();
        let want = (a.conj() * b - Complex::new(0.5 * (a.norm_sqr() + b.norm_sqr()), 0.0)).exp();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn moments() {
        assert_relative_eq!(moment(&V::basis(8, 3), 1, 1).unwrap().re, 3.0, max_relative = 1e-14);
        assert_relative_eq!(moment(&V::basis(8, 2), 2, 2).unwrap().re, 2.0, max_relative = 1e-14);
        let scs = V::coherent(Complex::new(2.0, 0.0), 80);
        assert!((moment(&scs, 1, 1).unwrap().re - 4.0).abs() < 1e-10);
        assert!(moment(&V::basis(4, 1).scale(Complex::new(2.0, 0.0)), 1, 1).is_err());
    }

    #[test]
    fn inner_dim_mismatch() {
        assert!(matches!(inner(&V::basis(3, 0), &V::basis(4, 0)), Err(Error::DimensionMismatch(3, 4))));
    }

    #[test]
    fn pha_residuals() {
        assert!(check_pha::<f64>(1, 10).unwrap() < 1e-13);
        assert!(check_pha::<f64>(2, 32).unwrap() <= 1e-9);
        assert!(check_pha::<f64>(3, 48).unwrap() <= 1e-9);
        assert!(matches!(check_pha::<f64>(3, 6), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn truncation_default() {
        let p = TruncationPolicy::<f64>::default();
        assert_eq!(p.dim(0.0, 1), 10 + 16 + 1);
        assert_eq!(p.dim(3.0, 2), (9.0f64 + 10.0 * 10f64.sqrt()).ceil() as usize + 18);
    }

    #[test]
    fn tail_check() {
        let p = TruncationPolicy::<f64>::default();
        assert!(p.check_tail(&V::coherent(Complex::new(3.0, 0.0), 60), 3).is_ok());
        assert!(p.check_tail(&V::coherent(Complex::new(3.0, 0.0), 12), 3).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let v = FockVector::<f32>::coherent(Complex::new(0.5, 0.0), 24);
        assert!((v.norm() - 1.0).abs() < 1e-6);
    }
}
