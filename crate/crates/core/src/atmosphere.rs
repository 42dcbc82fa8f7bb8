//! Turbulence strength: structure-constant profiles, the Kolmogorov spectrum and
//! the Rytov variance.
//!
//! All RISC values (refractive index structure constant, C_n²) are in m^(-2/3).

use std::f64::consts::PI;

use crate::constants::wavenumber;
use crate::quadrature::{integrate, integrate_pieces, QuadConfig};
use crate::{Error, Result};

/// Spectral amplitude of the Kolmogorov refractive-index spectrum.
pub const KOLMOGOROV_COEFFICIENT: f64 = 0.033;

/// Default inner scale of turbulence, m.
pub const DEFAULT_INNER_SCALE: f64 = 1e-3;
/// Default outer scale of turbulence, m.
pub const DEFAULT_OUTER_SCALE: f64 = 100.0;

/// Rytov variance below which turbulence is classified as weak.
pub const WEAK_REGIME_LIMIT: f64 = 0.1;
/// Rytov variance above which turbulence is classified as saturated.
pub const SATURATED_REGIME_LIMIT: f64 = 10.0;

/// Hufnagel–Valley parameters, optionally overridden by a path-constant C_n².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceProfile {
    terrestrial_a: f64,
    wind_speed: f64,
    constant_cn2: Option<f64>,
}

impl TurbulenceProfile {
    /// Hufnagel–Valley profile with ground-level structure constant `terrestrial_a`
    /// and mean wind speed `wind_speed` in m/s.
    pub fn hufnagel_valley(terrestrial_a: f64, wind_speed: f64) -> Result<Self> {
        if !(terrestrial_a >= 0.0) || !terrestrial_a.is_finite() {
            return Err(Error::domain("terrestrial_a", terrestrial_a, "must be >= 0"));
        }
        if !(wind_speed >= 0.0) || !wind_speed.is_finite() {
            return Err(Error::domain("wind_speed", wind_speed, "must be >= 0"));
        }
        Ok(Self {
            terrestrial_a,
            wind_speed,
            constant_cn2: None,
        })
    }

    /// Altitude-independent structure constant.
    pub fn constant(cn2: f64) -> Result<Self> {
        if !(cn2 > 0.0) || !cn2.is_finite() {
            return Err(Error::domain("cn2", cn2, "constant structure constant must be > 0"));
        }
        Ok(Self {
            terrestrial_a: 0.0,
            wind_speed: 0.0,
            constant_cn2: Some(cn2),
        })
    }

    pub fn terrestrial_a(&self) -> f64 {
        self.terrestrial_a
    }

    pub fn wind_speed(&self) -> f64 {
        self.wind_speed
    }

    pub fn constant_cn2(&self) -> Option<f64> {
        self.constant_cn2
    }
}

/// Infrared (≈0.5 µm) structure constant at altitude `h` meters.
pub fn risc_infrared(h: f64, profile: &TurbulenceProfile) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::domain("altitude", h, "must be >= 0"));
    }
    if let Some(cn2) = profile.constant_cn2 {
        return Ok(cn2);
    }
    let wind = profile.wind_speed / 27.0;
    let upper = 0.00594 * wind * wind * (1e-5 * h).powi(10) * (-h / 1000.0).exp();
    let middle = 2.7e-16 * (-h / 1500.0).exp();
    let ground = profile.terrestrial_a * (-h / 100.0).exp();
    Ok(upper + middle + ground)
}

/// Surface meteorology entering the refractive index of air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirState {
    /// Temperature, K.
    pub temperature_k: f64,
    /// Total atmospheric pressure, mbar.
    pub pressure_mbar: f64,
    /// Water-vapour partial pressure, mbar.
    pub vapor_pressure_mbar: f64,
}

impl Default for AirState {
    fn default() -> Self {
        Self {
            temperature_k: 288.15,
            pressure_mbar: 1013.25,
            vapor_pressure_mbar: 0.0,
        }
    }
}

impl AirState {
    fn validate(&self) -> Result<()> {
        if !(self.temperature_k > 0.0) {
            return Err(Error::domain("temperature_k", self.temperature_k, "must be > 0"));
        }
        if !(self.pressure_mbar > 0.0) {
            return Err(Error::domain("pressure_mbar", self.pressure_mbar, "must be > 0"));
        }
        if !(self.vapor_pressure_mbar >= 0.0) {
            return Err(Error::domain(
                "vapor_pressure_mbar",
                self.vapor_pressure_mbar,
                "must be >= 0",
            ));
        }
        Ok(())
    }

    /// ∂n/∂T of the terahertz refractivity 77.6e-6 (Pa/T + 4810 Pv/T²).
    pub fn dn_dt_thz(&self) -> f64 {
        let t = self.temperature_k;
        -77.6e-6 * (self.pressure_mbar / (t * t) + 9620.0 * self.vapor_pressure_mbar / (t * t * t))
    }

    /// ∂n/∂T of the optical refractivity 79e-6 Pa/T.
    pub fn dn_dt_infrared(&self) -> f64 {
        let t = self.temperature_k;
        -79e-6 * self.pressure_mbar / (t * t)
    }

    /// Ratio C_n²(THz) / C_n²(infrared). Temperature fluctuations are frequency
    /// independent, so the structure constants scale with (∂n/∂T)².
    pub fn thz_scale_factor(&self) -> Result<f64> {
        self.validate()?;
        let r = self.dn_dt_thz() / self.dn_dt_infrared();
        Ok(r * r)
    }
}

/// How the infrared profile is carried over to the terahertz band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThzTransform {
    /// Scale by the squared ratio of refractivity temperature derivatives.
    #[default]
    DerivativeRatio,
    /// Use the infrared value unchanged.
    Identity,
}

/// Terahertz-band structure constant at altitude `h`.
pub fn risc_thz(h: f64, profile: &TurbulenceProfile, air: &AirState) -> Result<f64> {
    risc_thz_with(h, profile, air, ThzTransform::DerivativeRatio)
}

pub fn risc_thz_with(
    h: f64,
    profile: &TurbulenceProfile,
    air: &AirState,
    transform: ThzTransform,
) -> Result<f64> {
    let base = risc_infrared(h, profile)?;
    match transform {
        ThzTransform::DerivativeRatio => Ok(base * air.thz_scale_factor()?),
        ThzTransform::Identity => {
            air.validate()?;
            Ok(base)
        }
    }
}

/// Kolmogorov inertial-range spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KolmogorovSpectrum {
    cn2: f64,
    inner_scale: f64,
    outer_scale: f64,
}

impl KolmogorovSpectrum {
    pub fn new(cn2: f64) -> Result<Self> {
        Self::with_scales(cn2, DEFAULT_INNER_SCALE, DEFAULT_OUTER_SCALE)
    }

    pub fn with_scales(cn2: f64, inner_scale: f64, outer_scale: f64) -> Result<Self> {
        if !(cn2 > 0.0) {
            return Err(Error::domain("cn2", cn2, "must be > 0"));
        }
        if !(inner_scale > 0.0 && inner_scale < outer_scale) {
            return Err(Error::domain(
                "inner_scale",
                inner_scale,
                "need 0 < inner scale < outer scale",
            ));
        }
        Ok(Self {
            cn2,
            inner_scale,
            outer_scale,
        })
    }

    pub fn cn2(&self) -> f64 {
        self.cn2
    }

    pub fn inner_scale(&self) -> f64 {
        self.inner_scale
    }

    pub fn outer_scale(&self) -> f64 {
        self.outer_scale
    }

    /// Spectral density Φ_n(κ) in m³.
    pub fn density(&self, kappa: f64) -> Result<f64> {
        kolmogorov_phi(kappa, self.cn2)
    }

    /// Whether a separation lies inside the inertial range (l0, L0).
    pub fn in_inertial_range(&self, r: f64) -> bool {
        r > self.inner_scale && r < self.outer_scale
    }
}

/// Φ_n(κ) = 0.033 C_n² κ^(−11/3).
pub fn kolmogorov_phi(kappa: f64, cn2: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::domain("kappa", kappa, "spectrum has a pole at kappa <= 0"));
    }
    Ok(KOLMOGOROV_COEFFICIENT * cn2 * kappa.powf(-11.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurbulenceRegime {
    Weak,
    Strong,
    Saturated,
}

/// Configurable thresholds for [`TurbulenceRegime`] classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub weak_below: f64,
    pub saturated_above: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            weak_below: WEAK_REGIME_LIMIT,
            saturated_above: SATURATED_REGIME_LIMIT,
        }
    }
}

impl RegimeThresholds {
    pub fn classify(&self, sigma_r2: f64) -> TurbulenceRegime {
        if sigma_r2 < self.weak_below {
            TurbulenceRegime::Weak
        } else if sigma_r2 <= self.saturated_above {
            TurbulenceRegime::Strong
        } else {
            TurbulenceRegime::Saturated
        }
    }
}

/// Rytov variance σ_R² = 0.5 C_n² k^(7/6) L^(11/6).
///
/// The prefactor is 0.5 rather than the 1.23 of the textbook plane-wave
/// expression; values computed here are therefore about 2.5× smaller than a
/// plane-wave Rytov variance for the same link.
pub fn rytov_variance(cn2: f64, frequency_hz: f64, distance_m: f64) -> Result<f64> {
    if !(cn2 >= 0.0) {
        return Err(Error::domain("cn2", cn2, "must be >= 0"));
    }
    if !(frequency_hz > 0.0) {
        return Err(Error::domain("frequency", frequency_hz, "must be > 0"));
    }
    if !(distance_m > 0.0) {
        return Err(Error::domain("distance", distance_m, "must be > 0"));
    }
    let k = wavenumber(frequency_hz);
    Ok(0.5 * cn2 * k.powf(7.0 / 6.0) * distance_m.powf(11.0 / 6.0))
}

/// Settings for the structure-function quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureQuadrature {
    pub quad: QuadConfig,
    /// Upper truncation of the oscillatory part, expressed as κr.
    pub kappa_r_max: f64,
}

impl Default for StructureQuadrature {
    fn default() -> Self {
        Self {
            quad: QuadConfig::with_rel_tol(1e-10),
            kappa_r_max: 1e3,
        }
    }
}

/// Refractive-index structure function D_n(r) = 8π ∫ κ² Φ_n(κ) (1 − sin κr / κr) dκ.
///
/// Integrated over the pure power-law spectrum on (0, ∞): a series handles the
/// κ → 0 end, Gauss–Kronrod panels of one half-period cover the oscillatory part
/// up to κr = `kappa_r_max`, and the tail beyond it is closed analytically.
pub fn structure_function(cn2: f64, r: f64, cfg: &StructureQuadrature) -> Result<f64> {
    if !(cn2 > 0.0) {
        return Err(Error::domain("cn2", cn2, "must be > 0"));
    }
    if !(r > 0.0) {
        return Err(Error::domain("r", r, "separation must be > 0"));
    }
    let phi1 = kolmogorov_phi(1.0, cn2)?;
    // κ²Φ_n(κ) = phi1 κ^(−5/3); work in z = κr.
    let weight = |z: f64| z.powf(-5.0 / 3.0);
    let one_minus_sinc = |z: f64| {
        if z < 1e-3 {
            let z2 = z * z;
            z2 / 6.0 - z2 * z2 / 120.0
        } else {
            1.0 - z.sin() / z
        }
    };
    // (0, z0]: z^(−5/3)(z²/6 − z⁴/120) integrated exactly.
    let z0 = 1e-3f64;
    let head = z0.powf(4.0 / 3.0) / (6.0 * (4.0 / 3.0)) - z0.powf(10.0 / 3.0) / (120.0 * (10.0 / 3.0));
    // [z0, 1] on a log scale, then half-period panels.
    let log_part = integrate(
        |u: f64| {
            let z = u.exp();
            weight(z) * one_minus_sinc(z) * z
        },
        z0.ln(),
        0.0,
        &cfg.quad,
    )?;
    let z_max = cfg.kappa_r_max.max(2.0);
    let mut breaks = vec![1.0];
    let mut z = PI;
    while z < z_max {
        breaks.push(z);
        z += PI;
    }
    breaks.push(z_max);
    let osc = integrate_pieces(|z| weight(z) * one_minus_sinc(z), &breaks, &cfg.quad)?;
    // Tail: ∫ z^(−5/3) dz minus ∫ z^(−8/3) sin z dz; the second is O(z_max^(−8/3)).
    let tail = 1.5 * z_max.powf(-2.0 / 3.0) - z_max.powf(-8.0 / 3.0) * z_max.cos();
    let dimensionless = head + log_part.value + osc.value + tail;
    Ok(8.0 * PI * phi1 * r.powf(2.0 / 3.0) * dimensionless)
}

/// One evaluation of the 2/3-law consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureFunctionSample {
    pub separation: f64,
    pub value: f64,
}

/// Relative deviation |D_n(r) / (C_n² r^(2/3)) − 1| between the structure function
/// integrated from the spectrum and the inertial-range power law.
pub fn structure_function_check(cn2: f64, r: f64, cfg: &StructureQuadrature) -> Result<f64> {
    let d = structure_function(cn2, r, cfg)?;
    Ok((d / (cn2 * r.powf(2.0 / 3.0)) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv() -> TurbulenceProfile {
        TurbulenceProfile::hufnagel_valley(1.7e-14, 21.0).unwrap()
    }

    #[test]
    fn ground_level_is_a_plus_background() {
        let v = risc_infrared(0.0, &hv()).unwrap();
        assert!(((v - 1.727e-14) / 1.727e-14).abs() < 1e-14);
    }

    #[test]
    fn vanishes_at_great_altitude() {
        assert!(risc_infrared(1e6, &hv()).unwrap() < 1e-300);
    }

    #[test]
    fn one_kilometre_matches_termwise_evaluation() {
        // Terms evaluated separately: 1.3219134586093832e-23, 1.3862262213879984e-16,
        // 7.717988059622426e-19.
        let want = 1.393_944_341_638_966_8e-16;
        let got = risc_infrared(1000.0, &hv()).unwrap();
        assert!(((got - want) / want).abs() < 1e-13);
    }

    #[test]
    fn negative_altitude_is_rejected() {
        assert!(matches!(risc_infrared(-1.0, &hv()), Err(Error::Domain { .. })));
    }

    #[test]
    fn dry_air_scale_is_pure_constant() {
        let want = (77.6f64 / 79.0).powi(2);
        for (t, pa) in [(288.0, 1013.0), (220.0, 300.0), (310.0, 1050.0)] {
            let air = AirState {
                temperature_k: t,
                pressure_mbar: pa,
                vapor_pressure_mbar: 0.0,
            };
            assert!((air.thz_scale_factor().unwrap() - want).abs() < 1e-14);
        }
        assert!((want - 0.964_871_014_260_535_2).abs() < 1e-15);
    }

    #[test]
    fn humid_scale_matches_symbolic_derivative() {
        // (∂n_THz/∂T / ∂n_IR/∂T)² differentiated symbolically, then substituted.
        let air = AirState {
            temperature_k: 288.0,
            pressure_mbar: 1013.0,
            vapor_pressure_mbar: 10.0,
        };
        assert!((air.thz_scale_factor().unwrap() - 1.706_096_030_353_846_6).abs() < 1e-13);
    }

    #[test]
    fn thz_rejects_bad_air() {
        let air = AirState {
            temperature_k: 0.0,
            ..AirState::default()
        };
        assert!(risc_thz(0.0, &hv(), &air).is_err());
        let air = AirState {
            pressure_mbar: -1.0,
            ..AirState::default()
        };
        assert!(risc_thz(0.0, &hv(), &air).is_err());
    }

    #[test]
    fn identity_transform_is_infrared() {
        let air = AirState::default();
        let a = risc_thz_with(500.0, &hv(), &air, ThzTransform::Identity).unwrap();
        assert_eq!(a, risc_infrared(500.0, &hv()).unwrap());
    }

    #[test]
    fn spectrum_values() {
        assert!((kolmogorov_phi(1.0, 1.0).unwrap() - 0.033).abs() < 1e-17);
        let v = kolmogorov_phi(10.0, 1e-14).unwrap();
        assert!(((v - 7.109_634_477_105_219e-20) / v).abs() < 1e-13);
        assert!(kolmogorov_phi(0.0, 1.0).is_err());
        assert!(kolmogorov_phi(-1.0, 1.0).is_err());
    }

    #[test]
    fn rytov_reference_point() {
        // 300 GHz, 100 km, 1e-11: direct evaluation gives 198.24...
        let v = rytov_variance(1e-11, 3e11, 1e5).unwrap();
        assert!((v - 198.242_680_443_907_9).abs() < 1e-9, "{v}");
        assert_eq!(RegimeThresholds::default().classify(v), TurbulenceRegime::Saturated);
    }

    #[test]
    fn rytov_zero_turbulence_is_weak() {
        let v = rytov_variance(0.0, 3e11, 1e3).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(RegimeThresholds::default().classify(v), TurbulenceRegime::Weak);
    }

    #[test]
    fn regime_boundaries() {
        let t = RegimeThresholds::default();
        assert_eq!(t.classify(0.099), TurbulenceRegime::Weak);
        assert_eq!(t.classify(0.1), TurbulenceRegime::Strong);
        assert_eq!(t.classify(10.0), TurbulenceRegime::Strong);
        assert_eq!(t.classify(10.01), TurbulenceRegime::Saturated);
    }

    #[test]
    fn structure_function_unit_separation() {
        let cfg = StructureQuadrature::default();
        assert!(structure_function_check(1e-14, 1.0, &cfg).unwrap() < 0.01);
    }

    #[test]
    fn structure_function_scaling() {
        let cfg = StructureQuadrature::default();
        let d1 = structure_function(1e-14, 0.05, &cfg).unwrap();
        let d8 = structure_function(1e-14, 0.4, &cfg).unwrap();
        assert!((d8 / d1 - 4.0).abs() < 1e-9);
        let d2 = structure_function(2e-14, 0.05, &cfg).unwrap();
        assert!((d2 / d1 - 2.0).abs() < 1e-12);
    }
}
