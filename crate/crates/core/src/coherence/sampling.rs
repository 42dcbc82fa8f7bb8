//! Random channel matrices H = H0 ⊙ Ψ.
//!
//! H0 = α_LoS a_r a_tᴴ is the rank-one line-of-sight channel and Ψ holds
//! unit-mean Gamma-Gamma amplitudes. The joint law of Ψ across entries is not
//! fixed by its second-order statistics; when correlation is requested each
//! Gamma factor is drawn through a Gaussian copula whose correlation matrix is
//! the closed-form covariance ρ between entries.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Gamma, Normal};

use super::array::{steering_vector, PlanarArray};
use super::nc::{nc_closed_form, NCQuery};
use crate::fading::{gamma_gamma_sample_with, GammaGammaParams};
use crate::{Error, Result};

/// Largest number of matrix entries (N_t N_r) for which the copula is built.
pub const MAX_COPULA_ENTRIES: usize = 1024;

/// Departure and arrival directions in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkAngles {
    pub theta_t: f64,
    pub phi_t: f64,
    pub theta_r: f64,
    pub phi_r: f64,
}

/// Link parameters that set the copula correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationModel {
    pub cn2: f64,
    pub k: f64,
    pub distance: f64,
}

/// Options for [`channel_matrix_sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSampleSpec {
    pub alpha_los: f64,
    pub k: f64,
    pub angles: LinkAngles,
    /// Gamma-Gamma amplitudes; `None` sets Ψ ≡ 1.
    pub fading: Option<GammaGammaParams>,
    /// Copula correlation; `None` draws entries independently.
    pub correlation: Option<CorrelationModel>,
}

/// The rank-one channel α_LoS a_r a_tᴴ (N_r × N_t).
pub fn los_channel(tx: &PlanarArray, rx: &PlanarArray, alpha_los: f64, k: f64, angles: &LinkAngles) -> DMatrix<Complex64> {
    let at = steering_vector(tx, angles.theta_t, angles.phi_t, k);
    let ar = steering_vector(rx, angles.theta_r, angles.phi_r, k);
    DMatrix::from_fn(rx.len(), tx.len(), |j, i| ar[j] * at[i].conj() * alpha_los)
}

/// Correlation between matrix entries (j, i) and (j', i'), ordered with the
/// transmit index fastest.
pub fn entry_correlation(tx: &PlanarArray, rx: &PlanarArray, model: &CorrelationModel) -> Result<DMatrix<f64>> {
    let (nt, nr) = (tx.len(), rx.len());
    let n = nt * nr;
    if n > MAX_COPULA_ENTRIES {
        return Err(Error::Invalid(format!(
            "copula needs N_t N_r <= {MAX_COPULA_ENTRIES}, got {n}"
        )));
    }
    NCQuery::new(0.0, 0.0, model.cn2, model.k, model.distance)?;
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let (i, j) = (a % nt, a / nt);
        let (i2, j2) = (b % nt, b / nt);
        let q = NCQuery {
            d_t: tx.separation(i, i2),
            d_r: rx.separation(j, j2),
            cn2: model.cn2,
            k: model.k,
            distance: model.distance,
        };
        nc_closed_form(&q)
    }))
}

/// Square-root factor F with F Fᵀ equal to the nearest correlation matrix
/// obtained by clipping negative eigenvalues and restoring a unit diagonal.
pub fn copula_factor(corr: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = corr.nrows();
    let eig = SymmetricEigen::new(corr.clone());
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Eigenvalues within roundoff of zero are treated as zero; their square
    // roots would otherwise inject O(√ε) noise into the factor.
    let floor = scale * n as f64 * f64::EPSILON * 16.0;
    let mut factor = eig.eigenvectors.clone();
    for (c, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = if lambda > floor { lambda.sqrt() } else { 0.0 };
        factor.column_mut(c).scale_mut(root);
    }
    for r in 0..n {
        let norm = factor.row(r).norm();
        if !(norm > 0.0) || !norm.is_finite() || norm * norm < 1e-12 * scale.max(1.0) {
            return Err(Error::Numerical(format!(
                "copula correlation matrix is not positive semidefinite after regularization (row {r})"
            )));
        }
        factor.row_mut(r).scale_mut(1.0 / norm);
    }
    Ok(factor)
}

fn correlated_gamma<R: rand::Rng + ?Sized>(
    factor: &DMatrix<f64>,
    shape: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = factor.nrows();
    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let z = factor * nalgebra::DVector::from_vec(g);
    let normal = Normal::standard();
    let gamma = Gamma::new(shape, shape)
        .map_err(|e| Error::Invalid(format!("Gamma shape {shape}: {e}")))?;
    Ok(z.iter()
        .map(|&v| {
            // Keep the quantile strictly inside (0, 1).
            let u = normal.cdf(v).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
            gamma.inverse_cdf(u)
        })
        .collect())
}

/// One draw of the N_r × N_t channel matrix; deterministic for a fixed seed.
pub fn channel_matrix_sample(
    tx: &PlanarArray,
    rx: &PlanarArray,
    spec: &ChannelSampleSpec,
    seed: u64,
) -> Result<DMatrix<Complex64>> {
    let mut h = los_channel(tx, rx, spec.alpha_los, spec.k, &spec.angles);
    let Some(params) = spec.fading else {
        return Ok(h);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = tx.len() * rx.len();
    let psi = match spec.correlation {
        None => gamma_gamma_sample_with(&params, n, &mut rng)?,
        Some(model) => {
            let factor = copula_factor(&entry_correlation(tx, rx, &model)?)?;
            let a = correlated_gamma(&factor, params.alpha_c, &mut rng)?;
            let b = correlated_gamma(&factor, params.beta_c, &mut rng)?;
            a.iter().zip(&b).map(|(x, y)| x * y).collect()
        }
    };
    let nt = tx.len();
    for (e, &p) in psi.iter().enumerate() {
        let (i, j) = (e % nt, e / nt);
        h[(j, i)] *= p;
    }
    Ok(h)
}
