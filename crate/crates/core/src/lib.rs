//! Exact storage-rate tradeoff bounds for cache-aided networks.
//!
//! The crate covers two delivery models, a central server multicasting to
//! `K` caching users and device-to-device (D2D) delivery where every device
//! transmits only functions of its own cache, each with users requesting
//! `L` distinct files per interval. It provides
//!
//! * achievable rates of the repeated coded-multicast schemes and the
//!   information-theoretic lower bounds parameterized by `(s, ell)`
//!   ([`bounds`]),
//! * bit-exact simulators of the placement/delivery/decoding schemes
//!   ([`schemes`]),
//! * gap sweeps, regime classification, curve data and worked examples
//!   ([`analysis`]).
//!
//! The bound math is generic over a [`Scalar`] so the same code runs on exact
//! rationals (the default everywhere) or on `f64` for quick plotting.

pub mod analysis;
pub mod bounds;
pub mod combin;
mod error;
pub mod gf256;
pub mod model;
pub mod rational;
pub mod scalar;
pub mod schemes;

pub use error::{Error, Result};
pub use model::{DeliveryMode, DemandMatrix, SystemConfig};
pub use scalar::Scalar;

/// Arbitrary-precision reduced fraction used for every exact quantity.
pub type Rational = num_rational::BigRational;

/// Problem instance with an exact cache size.
pub type ExactConfig = SystemConfig<Rational>;
/// Problem instance with a floating-point cache size.
pub type FloatConfig = SystemConfig<f64>;
pub type FloatConfig32 = SystemConfig<f32>;

/// Lower-bound evaluation carried out in exact arithmetic.
pub type ExactBound = bounds::BoundResult<Rational>;
pub type FloatBound = bounds::BoundResult<f64>;

pub type ExactEnvelopePoint = bounds::EnvelopePoint<Rational>;
