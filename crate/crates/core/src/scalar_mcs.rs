//! Multiphoton coherent states `|z; m, j>`: eigenstates of `a^m` with eigenvalue `z^m`
//! supported on `{|mn + j>}`.

use num_complex::Complex;

use crate::algebra::SubspaceNorms;
use crate::error::{Error, Result};
use crate::fock::{moment, FockVector, TruncationPolicy};
use crate::real::{cis, cnt, cpowi, creal, lit, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McsSpec<T: Real> {
    pub m: usize,
    pub j: usize,
    pub z: Complex<T>,
}

impl<T: Real> McsSpec<T> {
    pub fn new(m: usize, j: usize, z: Complex<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder);
        }
        if j >= m {
            return Err(Error::InvalidSubspace { m, j });
        }
        Ok(Self { m, j, z })
    }

    /// Eigenvalue of `a^m`.
    pub fn alpha(&self) -> Complex<T> {
        cpowi(self.z, self.m)
    }
}

#[derive(Clone, Debug)]
pub struct McsState<T: Real> {
    pub spec: McsSpec<T>,
    pub vector: FockVector<T>,
    /// `S_j(|z|)^{-1/2}`, the factor multiplying the raw series.
    pub norm_const: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScsComponent<T: Real> {
    pub label: Complex<T>,
    pub weight: Complex<T>,
}

/// `sum_n z^{mn+j}/sqrt((mn+j)!) |mn+j>` without normalization.
pub fn raw_mcs<T: Real>(m: usize, j: usize, z: Complex<T>, dim: usize) -> FockVector<T> {
    let mut v = vec![creal(T::zero()); dim.max(1)];
    let mut phi = creal(T::one());
    for (n, slot) in v.iter_mut().enumerate() {
        if n > 0 {
            phi = phi * z / cnt::<T>(n).sqrt();
        }
        if n % m == j {
            *slot = phi;
        }
    }
    FockVector::from_vec(v)
}

/// Support pattern `sqrt(j!/(mn+j)!) alpha^n`, regular at `z = 0`.
fn reduced_mcs<T: Real>(m: usize, j: usize, alpha: Complex<T>, dim: usize) -> FockVector<T> {
    let mut v = vec![creal(T::zero()); dim.max(1)];
    let mut u = creal(T::one());
    let mut n = 0usize;
    while m * n + j < v.len() {
        if n > 0 {
            let mut den = T::one();
            for k in 1..=m {
                den *= cnt::<T>(m * (n - 1) + j + k);
            }
            u = u * alpha / den.sqrt();
        }
        v[m * n + j] = u;
        n += 1;
    }
    FockVector::from_vec(v)
}

fn unit_phase<T: Real>(z: Complex<T>, j: usize) -> Complex<T> {
    if z.norm() == T::zero() {
        creal(T::one())
    } else {
        cpowi(z / z.norm(), j)
    }
}

/// Normalized `|z; m, j>` with the default truncation of `policy`.
pub fn build_mcs<T: Real>(spec: McsSpec<T>, policy: &TruncationPolicy<T>) -> Result<McsState<T>> {
    let dim = policy.dim(spec.z.norm(), spec.m);
    build_mcs_dim(spec, dim, policy)
}

/// Normalized `|z; m, j>` in an explicit dimension.
pub fn build_mcs_dim<T: Real>(
    spec: McsSpec<T>,
    dim: usize,
    policy: &TruncationPolicy<T>,
) -> Result<McsState<T>> {
    let McsSpec { m, j, z } = McsSpec::new(spec.m, spec.j, spec.z)?;
    let raw = reduced_mcs(m, j, spec.alpha(), dim).scale(unit_phase(z, j));
    let vector = raw.normalized();
    policy.check_tail(&vector, m)?;
    Ok(McsState { spec, vector, norm_const: normalization(m, j, z.norm()) })
}

/// `S_j(r)^{-1/2}`; closed forms for `m <= 3` away from the origin, series otherwise.
pub fn normalization<T: Real>(m: usize, j: usize, r: T) -> T {
    SubspaceNorms::auto(m, r).norm_const(j)
}

pub fn normalization_series<T: Real>(m: usize, j: usize, r: T) -> T {
    SubspaceNorms::series(m, r).norm_const(j)
}

/// Closed form only (`m <= 3`, `r > 0`).
pub fn normalization_closed<T: Real>(m: usize, j: usize, r: T) -> Option<T> {
    SubspaceNorms::closed(m, r).map(|n| n.norm_const(j))
}

fn root_of_unity<T: Real>(m: usize, k: isize) -> Complex<T> {
    cis((T::PI() + T::PI()) * lit::<T>(k as f64) / cnt::<T>(m))
}

/// `|z;m,j> = sum_n w_n |z omega^n>` with `omega = exp(2 pi i/m)` and
/// `w_n = N exp(|z|^2/2) omega^{-nj} / m`.
pub fn scs_decomposition<T: Real>(spec: McsSpec<T>) -> Result<Vec<ScsComponent<T>>> {
    let McsSpec { m, j, z } = McsSpec::new(spec.m, spec.j, spec.z)?;
    if z.norm() == T::zero() && j > 0 {
        return Err(Error::DegenerateOrigin);
    }
    let r2 = z.norm_sqr();
    let pre = normalization(m, j, z.norm()) * (r2 / lit(2.0)).exp() / cnt::<T>(m);
    Ok((0..m)
        .map(|n| ScsComponent {
            label: z * root_of_unity::<T>(m, n as isize),
            weight: root_of_unity::<T>(m, -((n * j) as isize)) * pre,
        })
        .collect())
}

/// `sum w |label>` as a Fock vector.
pub fn reassemble<T: Real>(parts: &[ScsComponent<T>], dim: usize) -> FockVector<T> {
    parts.iter().fold(FockVector::zeros(dim), |acc, c| {
        &acc + &FockVector::coherent(c.label, dim).scale(c.weight)
    })
}

fn delta_applies(m: usize) -> bool {
    m <= 2
}

/// `(<s>, <s^2>)` for the quadrature `s` (`k = 0` position, `k = 1` momentum).
pub fn s_moments<T: Real>(spec: McsSpec<T>, k: u8) -> (T, T) {
    let McsSpec { m, j, z } = spec;
    let sqrt2 = lit::<T>(2.0).sqrt();
    let mean = if m == 1 {
        if k == 0 { sqrt2 * z.re } else { sqrt2 * z.im }
    } else {
        T::zero()
    };
    let norms = SubspaceNorms::auto(m, z.norm());
    let sign = if k == 0 { T::one() } else { -T::one() };
    let delta = if delta_applies(m) { (z * z).re } else { T::zero() };
    let second = norms.shift_ratio(j as isize) + lit(0.5) + sign * delta;
    (mean, second)
}

/// `(<s>, <s^2>)` from number-basis moments of a normalized vector.
pub fn s_moments_oracle<T: Real>(v: &FockVector<T>, k: u8) -> Result<(T, T)> {
    let a = moment(v, 0, 1)?;
    let a2 = moment(v, 0, 2)?;
    let n = moment(v, 1, 1)?.re;
    let sqrt2 = lit::<T>(2.0).sqrt();
    Ok(if k == 0 {
        (sqrt2 * a.re, a2.re + n + lit(0.5))
    } else {
        (sqrt2 * a.im, -a2.re + n + lit(0.5))
    })
}

/// `sigma_q sigma_p`.
pub fn hur<T: Real>(spec: McsSpec<T>) -> T {
    let (mq, q2) = s_moments(spec, 0);
    let (mp, p2) = s_moments(spec, 1);
    ((q2 - mq * mq) * (p2 - mp * mp)).max(T::zero()).sqrt()
}

/// `(sigma_q, sigma_p)`.
pub fn sigmas<T: Real>(spec: McsSpec<T>) -> (T, T) {
    let (mq, q2) = s_moments(spec, 0);
    let (mp, p2) = s_moments(spec, 1);
    ((q2 - mq * mq).max(T::zero()).sqrt(), (p2 - mp * mp).max(T::zero()).sqrt())
}

/// `sigma_q sigma_p` from the number-basis oracle.
pub fn hur_oracle<T: Real>(v: &FockVector<T>) -> Result<T> {
    let (mq, q2) = s_moments_oracle(v, 0)?;
    let (mp, p2) = s_moments_oracle(v, 1)?;
    Ok(((q2 - mq * mq) * (p2 - mp * mp)).max(T::zero()).sqrt())
}

/// Mandel `Q = |z|^2 S_{j-2}/S_{j-1} - |z|^2 S_{j-1}/S_j`, valid for every `m`.
/// For `m <= 2` the cancellation-free closed form is returned instead.
pub fn mandel_q<T: Real>(spec: McsSpec<T>) -> Result<T> {
    let McsSpec { m, j, z } = spec;
    if j == 0 && z.norm() == T::zero() {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    if m <= 2 {
        if let Some(q) = mandel_q_closed(spec) {
            return Ok(q);
        }
    }
    let norms = SubspaceNorms::auto(m, z.norm());
    Ok(norms.shift_ratio(j as isize - 1) - norms.shift_ratio(j as isize))
}

/// Hyperbolic (`m = 2`) and trigonometric-exponential (`m = 3`) closed forms.
pub fn mandel_q_closed<T: Real>(spec: McsSpec<T>) -> Option<T> {
    let McsSpec { m, j, z } = spec;
    let x = z.norm_sqr();
    if x == T::zero() {
        return None;
    }
    match m {
        1 => Some(T::zero()),
        2 => {
            let q = (x + x) / (x + x).sinh();
            Some(if j == 0 { q } else { -q })
        }
        3 => {
            let n = SubspaceNorms::closed(3, z.norm())?;
            let ji = j as isize;
            Some(x * (n.s(ji - 2) / n.s(ji - 1) - n.s(ji - 1) / n.s(ji)))
        }
        _ => None,
    }
}

/// `(<a^dagger^2 a^2> - <a^dagger a>^2) / <a^dagger a>` on a normalized vector.
pub fn mandel_q_oracle<T: Real>(v: &FockVector<T>) -> Result<T> {
    let n = moment(v, 1, 1)?.re;
    if n <= lit(1e-300) {
        return Err(Error::ZeroMeanPhotonNumber);
    }
    let n2 = moment(v, 2, 2)?.re;
    Ok((n2 - n * n) / n)
}

/// `beta_j = -(2 pi/m)(j + 1/2) + (2 pi/m)(<N> + 1/2)`.
pub fn geometric_phase_scalar<T: Real>(spec: McsSpec<T>) -> T {
    let McsSpec { m, j, z } = spec;
    let n = SubspaceNorms::auto(m, z.norm()).shift_ratio(j as isize);
    let w = (T::PI() + T::PI()) / cnt::<T>(m);
    -w * (cnt::<T>(j) + lit(0.5)) + w * (n + lit(0.5))
}
