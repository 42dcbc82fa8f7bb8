//! Channel models for atmospheric turbulence on terahertz UAV ultra-massive MIMO links.
//!
//! The crate is split along the physical effects it models:
//!
//! - [`atmosphere`]: refractive-index structure constant profiles, the Kolmogorov
//!   spectrum and the Rytov variance.
//! - [`propagation`]: non-turbulent line-of-sight gain (spreading, molecular
//!   absorption, Mie scattering).
//! - [`coherence`]: normalized covariance between SISO sub-channels, loss of
//!   spatial coherence, array gain and ergodic capacity.
//! - [`fading`]: Gamma-Gamma fading, its limiting laws and turbulence attenuation.
//!
//! [`special`] and [`quadrature`] hold the numerical building blocks shared by all of them.

pub mod atmosphere;
pub mod coherence;
pub mod constants;
mod error;
pub mod fading;
pub mod propagation;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
