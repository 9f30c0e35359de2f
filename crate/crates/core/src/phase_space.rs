//! Wigner functions (`hbar = 1`): Gaussian pair kernels, coherent-state expansions,
//! row-parallel grid evaluation and a Gauss-Hermite quadrature oracle.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{FockVector, TruncationPolicy};
use crate::real::{cis, cnt, creal, lit, Real};
use crate::scalar_mcs::{build_mcs, scs_decomposition, McsSpec};
use crate::susy::{build_supercoherent, susy_normalization, tilde_amplitudes, SpinorState, SusySpec};

/// Labels of the bra (`alpha`) and ket (`beta`) coherent states of `|beta><alpha|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPairKernel<T: Real> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossVariant {
    /// `a^dagger` on the bra.
    I,
    /// `a^dagger` on the ket.
    II,
}

impl<T: Real> GaussianPairKernel<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Self {
        Self { alpha, beta }
    }
}

/// `W_{alpha,beta}(q,p)`.
pub fn w_pair<T: Real>(k: &GaussianPairKernel<T>, q: T, p: T) -> Complex<T> {
    let s2 = lit::<T>(2.0).sqrt();
    let ac = k.alpha.conj();
    let b = k.beta;
    let dq = creal(q) - (b + ac) / s2;
    let dp = creal(p) - (b - ac) / Complex::new(T::zero(), s2);
    let e = -(dq * dq) - dp * dp + ac * b - creal((k.alpha.norm_sqr() + b.norm_sqr()) / lit(2.0));
    e.exp() / T::PI()
}

/// Kernel with `a^dagger` applied to both sides: `[2(q+ip-beta/sqrt2)(q-ip-alpha*/sqrt2) - 1] W`.
pub fn w_pair_deriv<T: Real>(k: &GaussianPairKernel<T>, q: T, p: T) -> Complex<T> {
    let s2 = lit::<T>(2.0).sqrt();
    let u = Complex::new(q, p) - k.beta / s2;
    let v = Complex::new(q, -p) - k.alpha.conj() / s2;
    (u * v * lit::<T>(2.0) - creal(T::one())) * w_pair(k, q, p)
}

/// `W^I = (sqrt2 (q + ip) - beta) W`, `W^II = (sqrt2 (q - ip) - alpha*) W`.
pub fn w_pair_cross<T: Real>(k: &GaussianPairKernel<T>, q: T, p: T, variant: CrossVariant) -> Complex<T> {
    let s2 = lit::<T>(2.0).sqrt();
    let f = match variant {
        CrossVariant::I => Complex::new(q, p) * s2 - k.beta,
        CrossVariant::II => Complex::new(q, -p) * s2 - k.alpha.conj(),
    };
    f * w_pair(k, q, p)
}

/// One term `(plain + raised a^dagger) |label>` of a coherent expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionTerm<T: Real> {
    pub label: Complex<T>,
    pub plain: Complex<T>,
    pub raised: Complex<T>,
}

/// State written as a finite sum of (raised) normalized Glauber states.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoherentExpansion<T: Real> {
    pub terms: Vec<ExpansionTerm<T>>,
}

impl<T: Real> CoherentExpansion<T> {
    /// Complex-valued double sum over kernel pairs.
    pub fn wigner_complex(&self, q: T, p: T) -> Complex<T> {
        let zero = T::zero();
        let mut acc = creal(zero);
        for a in &self.terms {
            for b in &self.terms {
                let k = GaussianPairKernel::new(a.label, b.label);
                let w = w_pair(&k, q, p);
                acc += a.plain.conj() * b.plain * w;
                let has_ra = a.raised.norm() != zero;
                let has_rb = b.raised.norm() != zero;
                if has_ra {
                    acc += a.raised.conj() * b.plain * w_pair_cross(&k, q, p, CrossVariant::I);
                }
                if has_rb {
                    acc += a.plain.conj() * b.raised * w_pair_cross(&k, q, p, CrossVariant::II);
                }
                if has_ra && has_rb {
                    acc += a.raised.conj() * b.raised * w_pair_deriv(&k, q, p);
                }
            }
        }
        acc
    }

    /// Fock-space form, for cross-checks.
    pub fn to_fock(&self, dim: usize) -> FockVector<T> {
        self.terms.iter().fold(FockVector::zeros(dim), |acc, t| {
            let g = FockVector::coherent(t.label, dim);
            let r = g.create().0;
            &(&acc + &g.scale(t.plain)) + &r.scale(t.raised)
        })
    }
}

/// Expansion of a normalized multiphoton coherent state over its circle of Glauber states.
pub fn scalar_expansion<T: Real>(spec: McsSpec<T>) -> Result<CoherentExpansion<T>> {
    Ok(CoherentExpansion {
        terms: scs_decomposition(spec)?
            .into_iter()
            .map(|c| ExpansionTerm { label: c.label, plain: c.weight, raised: creal(T::zero()) })
            .collect(),
    })
}

/// Upper and lower component expansions of a normalized supercoherent state (`z != 0`).
pub fn susy_expansions<T: Real>(spec: &SusySpec<T>) -> Result<(CoherentExpansion<T>, CoherentExpansion<T>)> {
    let t = tilde_amplitudes(spec)?;
    let nrm = susy_normalization(spec)?;
    let (m, j, mj1) = (spec.m, spec.j, spec.m_j() - 1);
    let pre = nrm * (spec.z.norm_sqr() / lit(2.0)).exp() / cnt::<T>(m);
    let two_pi = T::PI() + T::PI();
    let root = |k: isize| cis(two_pi * lit::<T>(k as f64) / cnt::<T>(m));
    let mut up = Vec::with_capacity(m);
    let mut lo = Vec::with_capacity(m);
    for n in 0..m {
        let label = spec.z * root(n as isize);
        let wj = root(-((n * j) as isize)) * pre;
        let wc = root(-((n * mj1) as isize)) * pre;
        up.push(ExpansionTerm { label, plain: t.a_tilde * wj, raised: -t.c_tilde * wc * spec.k2 });
        lo.push(ExpansionTerm { label, plain: t.c_tilde * wc, raised: creal(T::zero()) });
    }
    Ok((CoherentExpansion { terms: up }, CoherentExpansion { terms: lo }))
}

/// Rectangular cell-centred lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T: Real> {
    pub q_min: T,
    pub q_max: T,
    pub p_min: T,
    pub p_max: T,
    pub nq: usize,
    pub np: usize,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self::square(lit(8.0), 257)
    }
}

impl<T: Real> GridSpec<T> {
    /// `[-half, half]^2` with `n x n` cells.
    pub fn square(half: T, n: usize) -> Self {
        Self { q_min: -half, q_max: half, p_min: -half, p_max: half, nq: n, np: n }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nq == 0 || self.np == 0 || !(self.q_max > self.q_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidGrid(format!("{self:?}")));
        }
        Ok(())
    }

    pub fn dq(&self) -> T {
        (self.q_max - self.q_min) / cnt::<T>(self.nq)
    }

    pub fn dp(&self) -> T {
        (self.p_max - self.p_min) / cnt::<T>(self.np)
    }

    pub fn q(&self, i: usize) -> T {
        self.q_min + (cnt::<T>(i) + lit(0.5)) * self.dq()
    }

    pub fn p(&self, i: usize) -> T {
        self.p_min + (cnt::<T>(i) + lit(0.5)) * self.dp()
    }

    pub fn qs(&self) -> Vec<T> {
        (0..self.nq).map(|i| self.q(i)).collect()
    }

    pub fn ps(&self) -> Vec<T> {
        (0..self.np).map(|i| self.p(i)).collect()
    }

    pub fn cell_area(&self) -> T {
        self.dq() * self.dp()
    }
}

/// Sampled Wigner function, row-major with `q` as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid<T: Real> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
    pub cell_area: T,
    /// `sum W dA`.
    pub integral: T,
    /// Largest `|Im W|` seen before the real cast.
    pub imag_residue: T,
}

impl<T: Real> WignerGrid<T> {
    pub fn at(&self, iq: usize, ip: usize) -> T {
        self.values[iq * self.spec.np + ip]
    }

    pub fn normalization_residual(&self) -> T {
        (self.integral - T::one()).abs()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// `sum_p W(q, p) dp` for every row.
    pub fn marginal_q(&self) -> Vec<T> {
        let dp = self.spec.dp();
        self.values.chunks(self.spec.np).map(|row| row.iter().copied().sum::<T>() * dp).collect()
    }

    /// Errors when the grid misses more than `limit` of the probability.
    pub fn require_normalized(self, limit: T) -> Result<Self> {
        let r = self.normalization_residual();
        if !(r <= limit) {
            return Err(Error::GridTooSmall {
                residual: r.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self)
    }
}

/// Evaluates a complex Wigner density on `spec`, one rayon task per row.
pub fn evaluate_grid<T: Real>(spec: GridSpec<T>, f: impl Fn(T, T) -> Complex<T> + Sync) -> Result<WignerGrid<T>> {
    evaluate_rows(spec, |q, ps| ps.iter().map(|&p| f(q, p)).collect())
}

fn evaluate_rows<T: Real>(
    spec: GridSpec<T>,
    row: impl Fn(T, &[T]) -> Vec<Complex<T>> + Sync,
) -> Result<WignerGrid<T>> {
    spec.validate()?;
    let ps = spec.ps();
    let rows: Vec<Vec<Complex<T>>> = (0..spec.nq).into_par_iter().map(|i| row(spec.q(i), &ps)).collect();
    let mut values = Vec::with_capacity(spec.nq * spec.np);
    let mut imag = T::zero();
    for r in rows {
        for c in r {
            imag = imag.max(c.im.abs());
            values.push(c.re);
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("non-finite Wigner value".into()));
    }
    let area = spec.cell_area();
    let integral = values.iter().copied().sum::<T>() * area;
    Ok(WignerGrid { spec, values, cell_area: area, integral, imag_residue: imag })
}

/// Normalization residual above which a grid is rejected.
pub fn grid_limit<T: Real>() -> T {
    lit(1e-3)
}

/// Wigner function of `|z; m, j>`.
pub fn wigner_scalar_mcs<T: Real>(spec: McsSpec<T>, grid: GridSpec<T>) -> Result<WignerGrid<T>> {
    let g = match scalar_expansion(spec) {
        Ok(exp) => evaluate_grid(grid, |q, p| exp.wigner_complex(q, p))?,
        Err(Error::DegenerateOrigin) => {
            let st = build_mcs(spec, &TruncationPolicy::default())?;
            wigner_fock_grid(&[&st.vector], grid)?
        }
        Err(e) => return Err(e),
    };
    g.require_normalized(grid_limit())
}

/// Wigner function of a supercoherent spinor: upper plus lower component.
pub fn wigner_susy<T: Real>(spec: &SusySpec<T>, grid: GridSpec<T>) -> Result<WignerGrid<T>> {
    let g = if spec.z.norm() == T::zero() {
        let s = build_supercoherent(spec, &TruncationPolicy::default())?;
        wigner_spinor_oracle_grid(&s, grid)?
    } else {
        let (up, lo) = susy_expansions(spec)?;
        evaluate_grid(grid, |q, p| up.wigner_complex(q, p) + lo.wigner_complex(q, p))?
    };
    g.require_normalized(grid_limit())
}

/// Quadrature-oracle grid of a spinor.
pub fn wigner_spinor_oracle_grid<T: Real>(s: &SpinorState<T>, grid: GridSpec<T>) -> Result<WignerGrid<T>> {
    wigner_fock_grid(&[&s.upper, &s.lower], grid)
}

/// Quadrature-oracle grid of `sum_k W[v_k]`.
pub fn wigner_fock_grid<T: Real>(parts: &[&FockVector<T>], grid: GridSpec<T>) -> Result<WignerGrid<T>> {
    let dim = parts.iter().map(|v| v.dim()).max().unwrap_or(1);
    let pmax = grid.p_min.abs().max(grid.p_max.abs());
    let rule = HermiteRule::for_state(dim, pmax)?;
    evaluate_rows(grid, |q, ps| {
        let mut acc = vec![creal(T::zero()); ps.len()];
        for v in parts {
            for (a, w) in acc.iter_mut().zip(rule.cross_row(v, v, q, ps)) {
                *a += w;
            }
        }
        acc
    })
}

/// `(min, sum over negative cells of |W| dA)`.
pub fn negativity<T: Real>(grid: &WignerGrid<T>) -> (T, T) {
    let vol = grid.values.iter().filter(|v| **v < T::zero()).map(|v| -*v).sum::<T>() * grid.cell_area;
    (grid.min_value(), vol)
}

/// Normalized Hermite functions `phi_0 .. phi_{n-1}` at `x`.
pub fn hermite_functions<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let two = lit::<T>(2.0);
    out.push(T::PI().powf(lit(-0.25)) * (-x * x / two).exp());
    if n > 1 {
        out.push(two.sqrt() * x * out[0]);
    }
    for k in 2..n {
        let kf = cnt::<T>(k);
        let v = (two / kf).sqrt() * x * out[k - 1] - ((kf - T::one()) / kf).sqrt() * out[k - 2];
        out.push(v);
    }
    out
}

/// `<x|psi>` for a number-basis vector.
pub fn position_wavefunction<T: Real>(v: &FockVector<T>, x: T) -> Complex<T> {
    let phi = hermite_functions(v.dim(), x);
    v.coeffs().iter().zip(&phi).map(|(c, f)| *c * *f).sum()
}

/// Largest Fock dimension the quadrature oracle accepts.
pub const MAX_QUADRATURE_DIM: usize = 128;

/// Gauss-Hermite rule with weights rescaled by `exp(y^2)`, i.e.
/// `int g(y) dy ~ sum w_i g(y_i)` for Gaussian-decaying `g`.
#[derive(Clone, Debug)]
pub struct HermiteRule<T: Real> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> HermiteRule<T> {
    /// Node count `2N + 36 + 3 p^2` (at most 640).
    pub fn for_state(dim: usize, pmax: T) -> Result<Self> {
        if dim > MAX_QUADRATURE_DIM {
            return Err(Error::QuadratureLimit(dim));
        }
        let extra = (lit::<T>(3.0) * pmax * pmax).ceil().to_usize().unwrap_or(640);
        Ok(Self::new((2 * dim + 36 + extra).min(640)))
    }

    /// Newton iteration from the classical asymptotic starting guesses.
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let nf = cnt::<T>(n);
        let pim4 = T::PI().powf(lit(-0.25));
        let two = lit::<T>(2.0);
        let mut x = vec![T::zero(); n];
        let mut w = vec![T::zero(); n];
        let half = n.div_ceil(2);
        let mut z = T::zero();
        for i in 0..half {
            z = match i {
                0 => (two * nf + T::one()).sqrt() - lit::<T>(1.85575) * (two * nf + T::one()).powf(lit(-1.0 / 6.0)),
                1 => z - lit::<T>(1.14) * nf.powf(lit(0.426)) / z,
                2 => lit::<T>(1.86) * z - lit::<T>(0.86) * x[0],
                3 => lit::<T>(1.91) * z - lit::<T>(0.91) * x[1],
                _ => two * z - x[i - 2],
            };
            let mut p2 = T::zero();
            for _ in 0..100 {
                let mut p1 = pim4;
                p2 = T::zero();
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = cnt::<T>(j);
                    p1 = z * (two / jf).sqrt() * p2 - ((jf - T::one()) / jf).sqrt() * p3;
                }
                let pp = (two * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= lit::<T>(4.0) * T::epsilon() * T::one().max(z.abs()) {
                    break;
                }
            }
            // phi_{n-1}(z) = p_{n-1}(z) exp(-z^2/2)
            let phi = p2 * (-z * z / two).exp();
            let wt = T::one() / (nf * phi * phi);
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = wt;
            w[n - 1 - i] = wt;
        }
        Self { nodes: x, weights: w }
    }

    /// `(1/pi) int conj(u(q+y)) v(q-y) exp(2ipy) dy` for every `p` in `ps`.
    pub fn cross_row(&self, u: &FockVector<T>, v: &FockVector<T>, q: T, ps: &[T]) -> Vec<Complex<T>> {
        let prod: Vec<Complex<T>> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| position_wavefunction(u, q + y).conj() * position_wavefunction(v, q - y) * w)
            .collect();
        let two = lit::<T>(2.0);
        ps.iter()
            .map(|&p| {
                let s: Complex<T> = prod.iter().zip(&self.nodes).map(|(c, &y)| *c * cis(two * p * y)).sum();
                s / T::PI()
            })
            .collect()
    }
}

/// Cross-Wigner density of `|v><u|` by quadrature.
pub fn cross_wigner_quadrature<T: Real>(u: &FockVector<T>, v: &FockVector<T>, q: T, p: T) -> Result<Complex<T>> {
    let rule = HermiteRule::for_state(u.dim().max(v.dim()), p.abs())?;
    Ok(rule.cross_row(u, v, q, &[p])[0])
}

/// `W_psi(q, p)` by Gauss-Hermite quadrature of the defining integral.
pub fn wigner_quadrature_oracle<T: Real>(v: &FockVector<T>, q: T, p: T) -> Result<T> {
    Ok(cross_wigner_quadrature(v, v, q, p)?.re)
}
