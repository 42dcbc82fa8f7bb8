//! Non-turbulent line-of-sight gain: spherical spreading, molecular absorption
//! and Mie scattering.
//!
//! [`los_path_gain`] is an amplitude gain. The corresponding power loss in dB is
//! −20 log10 of it, which equals the free-space loss plus 4.343 (k_abs + k_sca) L.

use std::f64::consts::PI;

use crate::constants::{NEPER_TO_DB, SPEED_OF_LIGHT};
use crate::{Error, Result};

pub mod absorption;
pub mod mie;
pub mod scattering;

pub use absorption::{absorption_coefficient, AbsorptionTable, DEFAULT_SCALE_HEIGHT};
pub use mie::{
    extinction_cross_section, extinction_cross_section_with_order, extinction_efficiency,
    mie_coefficients, truncation_order, MieCoefficients, MieMedium,
};
pub use scattering::{
    per_metre_to_db_per_km, scattering_coefficient, scattering_extinction, size_integral,
    ParticleSizeDistribution, ScatteringQuadrature, SizeLayer,
};

/// Carrier, distance and budget quantities of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub frequency_hz: f64,
    pub distance_m: f64,
    pub altitude_m: f64,
    pub tx_power_w: f64,
    pub bandwidth_hz: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_psd: f64,
}

impl Default for LinkGeometry {
    /// 300 GHz over 1 km at ground level, 10 dBm, 1 GHz, −174 dBm/Hz.
    fn default() -> Self {
        Self {
            frequency_hz: 300e9,
            distance_m: 1e3,
            altitude_m: 0.0,
            tx_power_w: crate::constants::dbm_to_watts(10.0),
            bandwidth_hz: 1e9,
            noise_psd: crate::constants::dbm_to_watts(-174.0),
        }
    }
}

/// Amplitude gain c/(4πfL) · exp(−k_abs L/2 − k_sca L/2).
pub fn los_path_gain(geom: &LinkGeometry, k_abs: f64, k_sca: f64) -> Result<f64> {
    let (f, l) = (geom.frequency_hz, geom.distance_m);
    if !(f > 0.0) {
        return Err(Error::domain("frequency", f, "must be > 0"));
    }
    if !(l > 0.0) {
        return Err(Error::domain("distance", l, "must be > 0"));
    }
    if !(k_abs >= 0.0) {
        return Err(Error::domain("k_abs", k_abs, "must be >= 0"));
    }
    if !(k_sca >= 0.0) {
        return Err(Error::domain("k_sca", k_sca, "must be >= 0"));
    }
    Ok(SPEED_OF_LIGHT / (4.0 * PI * f * l) * (-0.5 * (k_abs + k_sca) * l).exp())
}

/// Power loss in dB for an amplitude gain.
pub fn amplitude_to_loss_db(amplitude: f64) -> f64 {
    -20.0 * amplitude.log10()
}

/// Free-space power loss 20 log10(4πfL/c) in dB.
pub fn free_space_loss_db(frequency_hz: f64, distance_m: f64) -> f64 {
    20.0 * (4.0 * PI * frequency_hz * distance_m / SPEED_OF_LIGHT).log10()
}

/// Total power loss in dB: free-space loss plus 4.343 (k_abs + k_sca) L.
pub fn path_loss_db(geom: &LinkGeometry, k_abs: f64, k_sca: f64) -> f64 {
    free_space_loss_db(geom.frequency_hz, geom.distance_m)
        + NEPER_TO_DB * (k_abs + k_sca) * geom.distance_m
}
