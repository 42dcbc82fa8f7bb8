//! Tabulated molecular (water-vapour) absorption.

use std::io::Read;
use std::path::Path;

use serde::Deserialize;

use crate::{Error, Result};

/// Default humidity scale height in metres.
pub const DEFAULT_SCALE_HEIGHT: f64 = 2000.0;

const DEFAULT_TABLE: &str = include_str!("../../data/absorption_default.csv");

#[derive(Debug, Deserialize)]
struct Row {
    freq_hz: f64,
    k_abs_per_m: f64,
}

/// Terrestrial water-vapour absorption coefficient versus frequency, with an
/// exponential humidity profile in altitude.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    freqs: Vec<f64>,
    coeffs: Vec<f64>,
    scale_height: f64,
}

impl AbsorptionTable {
    pub fn new(freqs: Vec<f64>, coeffs: Vec<f64>, scale_height: f64) -> Result<Self> {
        if freqs.len() != coeffs.len() {
            return Err(Error::Invalid(format!(
                "absorption table has {} frequencies but {} coefficients",
                freqs.len(),
                coeffs.len()
            )));
        }
        if freqs.is_empty() {
            return Err(Error::Invalid("absorption table is empty".into()));
        }
        for w in freqs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Invalid(format!(
                    "absorption frequencies must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&f) = freqs.iter().find(|f| !f.is_finite() || **f <= 0.0) {
            return Err(Error::Invalid(format!("absorption frequency {f} must be finite and > 0")));
        }
        if let Some(&k) = coeffs.iter().find(|k| !k.is_finite() || **k < 0.0) {
            return Err(Error::Invalid(format!("absorption coefficient {k} must be finite and >= 0")));
        }
        if !(scale_height > 0.0) || !scale_height.is_finite() {
            return Err(Error::domain("scale_height", scale_height, "must be finite and > 0"));
        }
        Ok(Self {
            freqs,
            coeffs,
            scale_height,
        })
    }

    /// Parses CSV with header `freq_hz,k_abs_per_m`; lines starting with `#` are ignored.
    pub fn from_csv_reader<R: Read>(reader: R, scale_height: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Invalid(format!("absorption table: {e}")))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["freq_hz", "k_abs_per_m"] {
            return Err(Error::Invalid(format!(
                "absorption table header must be `freq_hz,k_abs_per_m`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut freqs = Vec::new();
        let mut coeffs = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| Error::Invalid(format!("absorption table: {e}")))?;
            freqs.push(row.freq_hz);
            coeffs.push(row.k_abs_per_m);
        }
        Self::new(freqs, coeffs, scale_height)
    }

    pub fn from_csv_path(path: &Path, scale_height: f64) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, scale_height)
    }

    /// The small illustrative table shipped with the crate.
    pub fn illustrative_default() -> Self {
        Self::from_csv_reader(DEFAULT_TABLE.as_bytes(), DEFAULT_SCALE_HEIGHT)
            .expect("bundled absorption table is valid")
    }

    pub fn with_scale_height(mut self, scale_height: f64) -> Result<Self> {
        if !(scale_height > 0.0) || !scale_height.is_finite() {
            return Err(Error::domain("scale_height", scale_height, "must be finite and > 0"));
        }
        self.scale_height = scale_height;
        Ok(self)
    }

    pub fn scale_height(&self) -> f64 {
        self.scale_height
    }

    pub fn frequency_range(&self) -> (f64, f64) {
        (self.freqs[0], self.freqs[self.freqs.len() - 1])
    }

    /// Ground-level coefficient at `f`, linear in f on the log of the coefficient.
    ///
    /// When either neighbouring coefficient is zero the logarithm does not
    /// exist and the interpolation falls back to linear.
    pub fn terrestrial(&self, f: f64) -> Result<f64> {
        let (lo, hi) = self.frequency_range();
        if !(f >= lo && f <= hi) {
            return Err(Error::Range {
                name: "frequency",
                value: f,
                min: lo,
                max: hi,
            });
        }
        let i = self.freqs.partition_point(|&x| x <= f);
        if i == self.freqs.len() {
            return Ok(self.coeffs[i - 1]);
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        let (k0, k1) = (self.coeffs[i - 1], self.coeffs[i]);
        if f == f0 {
            return Ok(k0);
        }
        let t = (f - f0) / (f1 - f0);
        if k0 > 0.0 && k1 > 0.0 {
            Ok((k0.ln() + t * (k1.ln() - k0.ln())).exp())
        } else {
            Ok(k0 + t * (k1 - k0))
        }
    }

    /// Water-vapour ratio relative to ground, exp(−h / scale height).
    pub fn water_ratio(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::domain("altitude", h, "must be >= 0"));
        }
        Ok((-h / self.scale_height).exp())
    }
}

/// Absorption coefficient in 1/m at frequency `f` and altitude `h`.
pub fn absorption_coefficient(f: f64, h: f64, table: &AbsorptionTable) -> Result<f64> {
    Ok(table.terrestrial(f)? * table.water_ratio(h)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rows() -> AbsorptionTable {
        AbsorptionTable::new(vec![1e11, 2e11], vec![1e-4, 4e-4], 2000.0).unwrap()
    }

    #[test]
    fn ground_level_returns_table_value() {
        let t = two_rows();
        assert_eq!(absorption_coefficient(1e11, 0.0, &t).unwrap(), 1e-4);
        assert_eq!(absorption_coefficient(2e11, 0.0, &t).unwrap(), 4e-4);
    }

    #[test]
    fn scale_height_gives_one_over_e() {
        let t = two_rows();
        let v = absorption_coefficient(1e11, 2000.0, &t).unwrap();
        assert!((v - 1e-4 / std::f64::consts::E).abs() < 1e-19);
    }

    #[test]
    fn midpoint_is_geometric_mean() {
        let v = two_rows().terrestrial(1.5e11).unwrap();
        assert!((v - 2e-4).abs() < 1e-17);
    }

    #[test]
    fn zero_coefficient_falls_back_to_linear() {
        let t = AbsorptionTable::new(vec![1.0, 3.0], vec![0.0, 2.0], 1.0).unwrap();
        assert!((t.terrestrial(2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_names_interval() {
        let err = two_rows().terrestrial(5e11).unwrap_err();
        assert_eq!(
            err,
            Error::Range {
                name: "frequency",
                value: 5e11,
                min: 1e11,
                max: 2e11
            }
        );
        assert!(err.to_string().contains("[100000000000, 200000000000]"));
    }

    #[test]
    fn csv_parsing_and_validation() {
        let ok = "freq_hz,k_abs_per_m\n1e11,1e-4\n2e11,4e-4\n";
        let t = AbsorptionTable::from_csv_reader(ok.as_bytes(), 2000.0).unwrap();
        assert_eq!(t, two_rows());
        let bad_header = "f,k\n1,2\n";
        assert!(AbsorptionTable::from_csv_reader(bad_header.as_bytes(), 1.0).is_err());
        let unsorted = "freq_hz,k_abs_per_m\n2e11,1e-4\n1e11,4e-4\n";
        assert!(AbsorptionTable::from_csv_reader(unsorted.as_bytes(), 1.0).is_err());
        let negative = "freq_hz,k_abs_per_m\n1e11,-1\n";
        assert!(AbsorptionTable::from_csv_reader(negative.as_bytes(), 1.0).is_err());
    }

    #[test]
    fn bundled_table_covers_sub_terahertz() {
        let t = AbsorptionTable::illustrative_default();
        let (lo, hi) = t.frequency_range();
        assert!(lo <= 1e11 && hi >= 1e12);
        assert_eq!(t.scale_height(), DEFAULT_SCALE_HEIGHT);
    }
}
