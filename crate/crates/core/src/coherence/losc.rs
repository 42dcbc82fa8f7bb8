//! Loss of spatial coherence, turbulent array gain and the ergodic capacity bound.
//!
//! The quadruple sum Σ_{i,i'} Σ_{j,j'} ρ depends on the element pairs only
//! through their separations, so it is evaluated over the product of the two
//! displacement histograms.

use rayon::prelude::*;

use super::array::{displacement_histogram, PlanarArray};
use super::nc::{nc_closed_form, NCQuery};
use crate::special::NeumaierSum;
use crate::{Error, Result};

/// Σ_{i,i'} Σ_{j,j'} ρ_{iji'j'} over all ordered transmit and receive pairs.
///
/// Each transmit separation is summed over the receive histogram in a fixed
/// order with compensated summation, and the per-row totals are combined in
/// histogram order, so the result does not depend on the thread count.
pub fn coherence_sum(tx: &PlanarArray, rx: &PlanarArray, cn2: f64, k: f64, distance: f64) -> Result<f64> {
    NCQuery::new(0.0, 0.0, cn2, k, distance)?;
    let ht: Vec<(f64, u64)> = displacement_histogram(tx).entries().collect();
    let hr: Vec<(f64, u64)> = displacement_histogram(rx).entries().collect();
    let rows: Vec<f64> = ht
        .par_iter()
        .map(|&(d_t, m_t)| {
            let mut row = NeumaierSum::default();
            for &(d_r, m_r) in &hr {
                let q = NCQuery {
                    d_t,
                    d_r,
                    cn2,
                    k,
                    distance,
                };
                row.add(m_r as f64 * nc_closed_form(&q));
            }
            m_t as f64 * row.total()
        })
        .collect();
    Ok(rows.into_iter().collect::<NeumaierSum>().total())
}

/// Additional loss 10 log10(N_t² N_r² / Σρ) in dB; zero without turbulence.
pub fn losc_loss(tx: &PlanarArray, rx: &PlanarArray, cn2: f64, k: f64, distance: f64) -> Result<f64> {
    let s = coherence_sum(tx, rx, cn2, k, distance)?;
    let n = (tx.len() * rx.len()) as f64;
    Ok((10.0 * (n * n / s).log10()).max(0.0))
}

/// Turbulent array gain Σρ / (N_t N_r), at most N_t N_r.
pub fn array_gain_turbulent(tx: &PlanarArray, rx: &PlanarArray, cn2: f64, k: f64, distance: f64) -> Result<f64> {
    let s = coherence_sum(tx, rx, cn2, k, distance)?;
    Ok(s / (tx.len() * rx.len()) as f64)
}

/// Budget quantities entering the capacity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityInputs {
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_psd: f64,
    /// Line-of-sight amplitude gain.
    pub alpha_los: f64,
    /// Turbulence amplitude factor (1 for no attenuation).
    pub alpha_turb: f64,
    pub tx: PlanarArray,
    pub rx: PlanarArray,
}

impl CapacityInputs {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bandwidth", self.bandwidth_hz),
            ("noise_psd", self.noise_psd),
            ("alpha_los", self.alpha_los),
            ("alpha_turb", self.alpha_turb),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be finite and > 0"));
            }
        }
        if !(self.tx_power_w >= 0.0) || !self.tx_power_w.is_finite() {
            return Err(Error::domain("tx_power", self.tx_power_w, "must be finite and >= 0"));
        }
        Ok(())
    }

    /// P α_LoS² α_turb² / (N0 B), the per-element-pair SNR.
    pub fn base_snr(&self) -> f64 {
        self.tx_power_w * (self.alpha_los * self.alpha_turb).powi(2) / (self.noise_psd * self.bandwidth_hz)
    }
}

/// Upper bound B log2(1 + P α_LoS² α_turb² Σρ / (N0 B N_t N_r)) in bit/s, reached
/// with matched beamformers at both ends.
pub fn ergodic_capacity_bound(inputs: &CapacityInputs, cn2: f64, k: f64, distance: f64) -> Result<f64> {
    inputs.validate()?;
    let gain = array_gain_turbulent(&inputs.tx, &inputs.rx, cn2, k, distance)?;
    Ok(inputs.bandwidth_hz * (inputs.base_snr() * gain).ln_1p() / std::f64::consts::LN_2)
}

/// Capacity without turbulence, B log2(1 + P α_LoS² α_turb² N_t N_r / (N0 B)).
pub fn capacity_without_turbulence(inputs: &CapacityInputs) -> Result<f64> {
    inputs.validate()?;
    let n = (inputs.tx.len() * inputs.rx.len()) as f64;
    Ok(inputs.bandwidth_hz * (inputs.base_snr() * n).ln_1p() / std::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{wavelength, wavenumber};

    fn arrays(n: usize) -> (PlanarArray, PlanarArray) {
        let a = PlanarArray::square(n, wavelength(3e11) / 2.0).unwrap();
        (a, a)
    }

    #[test]
    fn no_turbulence_no_loss() {
        let (t, r) = arrays(8);
        let k = wavenumber(3e11);
        assert_eq!(losc_loss(&t, &r, 0.0, k, 1e3).unwrap(), 0.0);
        assert_eq!(array_gain_turbulent(&t, &r, 0.0, k, 1e3).unwrap(), 4096.0);
    }

    #[test]
    fn single_elements_no_loss() {
        let (t, r) = arrays(1);
        assert_eq!(losc_loss(&t, &r, 1e-9, wavenumber(3e11), 1e4).unwrap(), 0.0);
        assert_eq!(array_gain_turbulent(&t, &r, 1e-9, wavenumber(3e11), 1e4).unwrap(), 1.0);
    }

    #[test]
    fn zero_power_zero_capacity() {
        let (t, r) = arrays(2);
        let inputs = CapacityInputs {
            bandwidth_hz: 1e9,
            tx_power_w: 0.0,
            noise_psd: 1e-20,
            alpha_los: 1e-7,
            alpha_turb: 1.0,
            tx: t,
            rx: r,
        };
        assert_eq!(ergodic_capacity_bound(&inputs, 1e-9, wavenumber(3e11), 1e3).unwrap(), 0.0);
    }
}
