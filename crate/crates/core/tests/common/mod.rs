#![allow(dead_code)]

use proptest::prelude::*;
use susyphoton::{Complex64, FockVector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(a, t)| Complex64::from_polar(a, t))
}

pub fn fock_vector(dim: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_map(|v| FockVector::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

/// `(m, j)` with `m in 1..=3`.
pub fn subspace() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|m| (Just(m), 0..m))
}

/// `{0.25, 0.5, 1, 2, 3} x {1, i, e^{i pi/4}}`.
pub fn standard_sweep() -> Vec<Complex64> {
    let dirs = [c(1.0, 0.0), c(0.0, 1.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)];
    [0.25, 0.5, 1.0, 2.0, 3.0].iter().flat_map(|&r| dirs.iter().map(move |d| d * r)).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
