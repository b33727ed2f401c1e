//! Ring-resonator transfer amplitudes, loss bookkeeping and two-photon
//! interference for single-bus and add/drop geometries.
//!
//! Every model is generic over [`Scalar`] (`f32` or `f64`); the `*F64` aliases
//! below are what most callers want.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod add_drop;
pub mod attenuation;
pub mod error;
pub mod hom;
pub mod linalg;
pub mod numerics;
pub mod params;
pub mod scalar;
pub mod single_bus;

pub use error::{Result, RingError};
pub use linalg::{Mat2, Mat3};
pub use params::{
    alpha_from_loss, geometric_sum, geometric_sum_truncated, geometric_tail_bound, truncation_order, ComplexAmplitude,
    CouplerParams, RingParams, RoundTripPhase,
};
pub use scalar::Scalar;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type CouplerParamsF64 = CouplerParams<f64>;
pub type CouplerParamsF32 = CouplerParams<f32>;
pub type RingParamsF64 = RingParams<f64>;
pub type RingParamsF32 = RingParams<f32>;
pub type AddDropParamsF64 = add_drop::AddDropParams<f64>;
pub type AddDropParamsF32 = add_drop::AddDropParams<f32>;
pub type TransferMatrixF64 = add_drop::TransferMatrix2<f64>;
pub type LangevinRatesF64 = single_bus::LangevinRates<f64>;
pub type SingleBusResponseF64 = single_bus::SingleBusResponse<f64>;
pub type TwoPhotonOutputStateF64 = hom::TwoPhotonOutputState<f64>;
pub type SectorDensityF64 = hom::SectorDensity<f64>;
