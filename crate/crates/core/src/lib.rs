//! Multiphoton coherent states of the harmonic oscillator and multiphoton
//! supercoherent states of its supersymmetric partner, with a truncated
//! number-basis oracle for every closed form.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod phase_space;
pub mod real;
pub mod scalar_mcs;
pub mod susy;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use real::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type FockVector = fock::FockVector<f64>;
pub type TruncationPolicy = fock::TruncationPolicy<f64>;
pub type McsSpec = scalar_mcs::McsSpec<f64>;
pub type McsState = scalar_mcs::McsState<f64>;
pub type SpinorState = susy::SpinorState<f64>;
pub type SusySpec = susy::SusySpec<f64>;
pub type WignerGrid = phase_space::WignerGrid<f64>;
pub type GridSpec = phase_space::GridSpec<f64>;
pub type LoopReport = dynamics::LoopReport<f64>;
