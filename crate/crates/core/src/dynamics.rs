//! Free evolution, evolution loops and geometric phases.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{inner, FockVector, TruncationPolicy};
use crate::real::{cis, cnt, lit, Real};
use crate::scalar_mcs::{build_mcs, geometric_phase_scalar, McsSpec};
use crate::susy::{build_supercoherent, mean_energy_susy, susy_hamiltonian_apply, SpinorState, SusySpec};

/// State that can be propagated under its oscillator Hamiltonian.
pub trait CyclicState<T: Real>: Sized {
    fn evolve(&self, t: T, omega: T) -> Self;
    /// `<self|other>`.
    fn overlap(&self, other: &Self) -> Complex<T>;
    fn norm_sqr(&self) -> T;
    /// `<H> / <psi|psi>`.
    fn energy(&self, omega: T) -> T;
    /// Ground-level offset of the spectrum in units of `omega`.
    fn zero_point() -> T;
}

/// `c_n -> exp(-i (n + 1/2) t) c_n`.
pub fn evolve_scalar<T: Real>(v: &FockVector<T>, t: T) -> FockVector<T> {
    v.map_indexed(|n, c| c * cis(-(cnt::<T>(n) + lit(0.5)) * t))
}

/// Upper index `n` gains `exp(-i omega n t)`, lower index `k` gains `exp(-i omega (k+1) t)`.
pub fn evolve_susy<T: Real>(s: &SpinorState<T>, t: T, omega: T) -> SpinorState<T> {
    SpinorState {
        upper: s.upper.map_indexed(|n, c| c * cis(-omega * cnt::<T>(n) * t)),
        lower: s.lower.map_indexed(|k, c| c * cis(-omega * cnt::<T>(k + 1) * t)),
    }
}

impl<T: Real> CyclicState<T> for FockVector<T> {
    fn evolve(&self, t: T, omega: T) -> Self {
        evolve_scalar(self, omega * t)
    }

    fn overlap(&self, other: &Self) -> Complex<T> {
        inner(self, other).expect("equal dims")
    }

    fn norm_sqr(&self) -> T {
        FockVector::norm_sqr(self)
    }

    fn energy(&self, omega: T) -> T {
        let n: T = self.coeffs().iter().enumerate().map(|(k, c)| c.norm_sqr() * (cnt::<T>(k) + lit(0.5))).sum();
        omega * n / FockVector::norm_sqr(self)
    }

    fn zero_point() -> T {
        lit(0.5)
    }
}

impl<T: Real> CyclicState<T> for SpinorState<T> {
    fn evolve(&self, t: T, omega: T) -> Self {
        evolve_susy(self, t, omega)
    }

    fn overlap(&self, other: &Self) -> Complex<T> {
        self.inner(other).expect("equal dims")
    }

    fn norm_sqr(&self) -> T {
        SpinorState::norm_sqr(self)
    }

    fn energy(&self, omega: T) -> T {
        self.inner(&susy_hamiltonian_apply(self, omega)).expect("equal dims").re / SpinorState::norm_sqr(self)
    }

    fn zero_point() -> T {
        T::zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopReport<T: Real> {
    /// `tau = 2 pi / (omega m)`.
    pub period: T,
    /// Part of the total phase beyond the zero-point contribution, in `(-2 pi, 0]`.
    pub phase: T,
    /// `-omega tau E_0` from the zero-point energy (zero for the SUSY spectrum).
    pub spectral_offset: T,
    /// `arg <psi(0)|psi(tau)>` in `(-2 pi, 0]`.
    pub total_phase: T,
    pub fidelity: T,
    /// `total_phase + tau <H>`.
    pub geometric_phase: T,
}

const SNAP: f64 = 1e-12;

/// Principal value in `(-2 pi, 0]`, snapping values within `1e-12` of a multiple of `2 pi` to 0.
pub fn principal_phase<T: Real>(x: T) -> T {
    let tau = T::PI() + T::PI();
    let mut y = x % tau;
    if y < T::zero() {
        y += tau;
    }
    if y <= lit(SNAP) || tau - y <= lit(SNAP) {
        T::zero()
    } else {
        y - tau
    }
}

/// Evolves by one period `tau = 2 pi / (omega m)` and extracts the loop phases.
pub fn loop_check<T: Real, S: CyclicState<T>>(state: &S, m: usize, omega: T) -> Result<LoopReport<T>> {
    let two_pi = T::PI() + T::PI();
    let tau = two_pi / (omega * cnt::<T>(m));
    let later = state.evolve(tau, omega);
    let ov = state.overlap(&later) / state.norm_sqr();
    let fidelity = ov.norm();
    if !(fidelity >= T::one() - lit(1e-6)) {
        return Err(Error::NotCyclic(fidelity.to_f64().unwrap_or(f64::NAN)));
    }
    let total = principal_phase(ov.arg());
    let offset = -omega * tau * S::zero_point();
    let phase = principal_phase(total - offset);
    Ok(LoopReport {
        period: tau,
        phase,
        spectral_offset: offset,
        total_phase: total,
        fidelity,
        geometric_phase: total + tau * state.energy(omega),
    })
}

/// `beta = phi + tau <H>`.
pub fn geometric_phase<T: Real, S: CyclicState<T>>(state: &S, m: usize, omega: T) -> Result<T> {
    Ok(loop_check(state, m, omega)?.geometric_phase)
}

/// `beta` with `int_0^tau <psi(t)|H|psi(t)> dt` done by the trapezoid rule on `steps` panels.
pub fn geometric_phase_trapezoid<T: Real, S: CyclicState<T>>(state: &S, m: usize, omega: T, steps: usize) -> Result<T> {
    let rep = loop_check(state, m, omega)?;
    let steps = steps.max(1);
    let h = rep.period / cnt::<T>(steps);
    let mut acc = T::zero();
    for k in 0..=steps {
        let e = state.evolve(h * cnt::<T>(k), omega).energy(omega);
        let w = if k == 0 || k == steps { lit(0.5) } else { T::one() };
        acc += w * e;
    }
    Ok(rep.total_phase + acc * h)
}

/// `-2 pi j/m + (2 pi/m) <H>/omega` with the energy from the tilde decomposition.
pub fn geometric_phase_susy_closed<T: Real>(spec: &SusySpec<T>) -> Result<T> {
    let w = (T::PI() + T::PI()) / cnt::<T>(spec.m);
    Ok(-w * cnt::<T>(spec.j) + w * mean_energy_susy(spec)?)
}

const CROSS_TOL: f64 = 1e-8;

fn cross_check<T: Real>(what: &'static str, numeric: T, closed: T) -> Result<T> {
    let diff = (numeric - closed).abs();
    if diff > lit::<T>(CROSS_TOL) * closed.abs().max(T::one()) {
        return Err(Error::Inconsistent { what, diff: diff.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(numeric)
}

/// Loop report of the built MCS; `beta` is checked against the closed form for `m <= 3`.
pub fn loop_report_mcs<T: Real>(spec: McsSpec<T>, policy: &TruncationPolicy<T>) -> Result<LoopReport<T>> {
    let st = build_mcs(spec, policy)?;
    let rep = loop_check(&st.vector, spec.m, T::one())?;
    if spec.m <= 3 {
        cross_check("scalar geometric phase", rep.geometric_phase, geometric_phase_scalar(spec))?;
    }
    Ok(rep)
}

/// Loop report of the built supercoherent state; `beta` is checked against the closed form for `m <= 3`.
pub fn loop_report_susy<T: Real>(spec: &SusySpec<T>, policy: &TruncationPolicy<T>) -> Result<LoopReport<T>> {
    let st = build_supercoherent(spec, policy)?;
    let rep = loop_check(&st, spec.m, spec.omega)?;
    if spec.m <= 3 {
        cross_check("susy geometric phase", rep.geometric_phase, geometric_phase_susy_closed(spec)?)?;
    }
    Ok(rep)
}

pub fn geometric_phase_mcs<T: Real>(spec: McsSpec<T>, policy: &TruncationPolicy<T>) -> Result<T> {
    Ok(loop_report_mcs(spec, policy)?.geometric_phase)
}

pub fn geometric_phase_susy<T: Real>(spec: &SusySpec<T>, policy: &TruncationPolicy<T>) -> Result<T> {
    Ok(loop_report_susy(spec, policy)?.geometric_phase)
}

/// One row of a `(z, k2)` phase table.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow<T: Real> {
    pub z: Complex<T>,
    pub k2: T,
    pub outcome: std::result::Result<LoopReport<T>, Error>,
}

/// Loop reports for supercoherent states over `zs x k2s`, ordered `z`-major.
pub fn geometric_phase_sweep<T: Real>(
    base: &SusySpec<T>,
    zs: &[Complex<T>],
    k2s: &[T],
    policy: &TruncationPolicy<T>,
) -> Vec<PhaseRow<T>> {
    let pts: Vec<(Complex<T>, T)> = zs.iter().flat_map(|&z| k2s.iter().map(move |&k| (z, k))).collect();
    pts.par_iter()
        .map(|&(z, k2)| {
            let spec = SusySpec { z, k2, ..*base };
            let outcome = loop_report_susy(&spec, policy);
            PhaseRow { z, k2, outcome }
        })
        .collect()
}

/// Rows where some `k2 != 0` beats the `k2 = 0` phase at the same `z` by more than `slack`.
pub fn k2_zero_violations<T: Real>(rows: &[PhaseRow<T>], slack: T) -> Vec<(Complex<T>, T, T, T)> {
    let mut out = Vec::new();
    for r in rows {
        let Ok(rep) = &r.outcome else { continue };
        if r.k2 == T::zero() {
            continue;
        }
        let base = rows.iter().find(|b| b.z == r.z && b.k2 == T::zero());
        if let Some(PhaseRow { outcome: Ok(b), .. }) = base {
            if b.geometric_phase > rep.geometric_phase + slack {
                out.push((r.z, r.k2, b.geometric_phase, rep.geometric_phase));
            }
        }
    }
    out
}
