//! Scattering loss from an exponential particle-size distribution.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use super::mie::{extinction_cross_section, MieMedium};
use crate::constants::NEPER_TO_DB;
use crate::quadrature::{integrate, QuadConfig};
use crate::{Error, Result};

/// One altitude layer of the size distribution N(r) = N0 exp(−ρ0 r).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct SizeLayer {
    /// Lower edge of the layer in metres.
    #[serde(rename = "alt_m")]
    pub altitude: f64,
    /// Number density scale in 1/m⁴.
    #[serde(rename = "n0_per_m4")]
    pub n0: f64,
    /// Exponential slope in 1/m.
    #[serde(rename = "rho0_per_m")]
    pub rho0: f64,
}

/// Exponential particle-size distribution, piecewise constant in altitude.
///
/// A layer applies from its altitude up to the next layer; the last layer
/// extends upward without bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSizeDistribution {
    layers: Vec<SizeLayer>,
}

impl ParticleSizeDistribution {
    pub fn new(layers: Vec<SizeLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Invalid("particle-size table is empty".into()));
        }
        for w in layers.windows(2) {
            if !(w[1].altitude > w[0].altitude) {
                return Err(Error::Invalid(
                    "particle-size altitudes must be strictly increasing".into(),
                ));
            }
        }
        for l in &layers {
            if !(l.n0 >= 0.0) || !l.n0.is_finite() {
                return Err(Error::domain("n0", l.n0, "must be finite and >= 0"));
            }
            if !(l.rho0 > 0.0) || !l.rho0.is_finite() {
                return Err(Error::domain("rho0", l.rho0, "must be finite and > 0"));
            }
            if !l.altitude.is_finite() {
                return Err(Error::domain("altitude", l.altitude, "must be finite"));
            }
        }
        Ok(Self { layers })
    }

    /// A single layer covering every altitude from zero.
    pub fn uniform(n0: f64, rho0: f64) -> Result<Self> {
        Self::new(vec![SizeLayer {
            altitude: 0.0,
            n0,
            rho0,
        }])
    }

    /// Parses CSV with header `alt_m,n0_per_m4,rho0_per_m`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Invalid(format!("particle-size table: {e}")))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["alt_m", "n0_per_m4", "rho0_per_m"] {
            return Err(Error::Invalid(format!(
                "particle-size header must be `alt_m,n0_per_m4,rho0_per_m`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let layers = rdr
            .deserialize::<SizeLayer>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Invalid(format!("particle-size table: {e}")))?;
        Self::new(layers)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    /// Layer in force at altitude `h`.
    pub fn layer_at(&self, h: f64) -> Result<SizeLayer> {
        let first = self.layers[0].altitude;
        if !(h >= first) {
            return Err(Error::Range {
                name: "altitude",
                value: h,
                min: first,
                max: f64::INFINITY,
            });
        }
        let i = self.layers.partition_point(|l| l.altitude <= h);
        Ok(self.layers[i - 1])
    }
}

/// Settings for the size-distribution integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringQuadrature {
    pub quad: QuadConfig,
    /// The radius integral stops where exp(−ρ0 r) falls below this fraction of its peak.
    pub weight_floor: f64,
}

impl Default for ScatteringQuadrature {
    fn default() -> Self {
        Self {
            quad: QuadConfig::with_rel_tol(1e-8),
            weight_floor: 1e-12,
        }
    }
}

impl ScatteringQuadrature {
    /// Upper radius limit for slope `rho0`.
    pub fn radius_limit(&self, rho0: f64) -> f64 {
        -self.weight_floor.ln() / rho0
    }
}

/// ∫ σ(r) N0 exp(−ρ0 r) dr over [0, r_max] for an arbitrary cross-section `sigma`.
pub fn size_integral<F>(mut sigma: F, n0: f64, rho0: f64, cfg: &ScatteringQuadrature) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if n0 == 0.0 {
        return Ok(0.0);
    }
    let r_max = cfg.radius_limit(rho0);
    let mut failure = None;
    let res = integrate(
        |r| match sigma(r) {
            Ok(s) => s * n0 * (-rho0 * r).exp(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        r_max,
        &cfg.quad,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    res.map(|q| q.value)
}

/// Extinction coefficient in 1/m, ∫ σ_ext(f, r) N(h, r) dr.
pub fn scattering_extinction(
    f: f64,
    h: f64,
    dist: &ParticleSizeDistribution,
    medium: &MieMedium,
    cfg: &ScatteringQuadrature,
) -> Result<f64> {
    let layer = dist.layer_at(h)?;
    size_integral(
        |r| extinction_cross_section(f, r, medium),
        layer.n0,
        layer.rho0,
        cfg,
    )
}

/// Scattering loss in dB/km: 4.343 × 10³ × the extinction coefficient per metre.
pub fn scattering_coefficient(
    f: f64,
    h: f64,
    dist: &ParticleSizeDistribution,
    medium: &MieMedium,
) -> Result<f64> {
    let ext = scattering_extinction(f, h, dist, medium, &ScatteringQuadrature::default())?;
    Ok(per_metre_to_db_per_km(ext))
}

/// Converts a power extinction coefficient in 1/m to dB/km.
pub fn per_metre_to_db_per_km(k: f64) -> f64 {
    NEPER_TO_DB * 1e3 * k
}
