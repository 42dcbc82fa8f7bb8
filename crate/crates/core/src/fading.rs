//! Turbulence-induced fading: Andrews' Gamma-Gamma parameters, the Gamma-Gamma
//! law and its limiting forms, and the empirical turbulence attenuation.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::constants::{wavelength, wavenumber};
use crate::special::{ln_bessel_k, ln_gamma};
use crate::{Error, Result};

pub use crate::special::bessel_k_nu;

/// Gamma-Gamma shape parameters with the link quantities that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGammaParams {
    /// Effective number of large-scale cells.
    pub alpha_c: f64,
    /// Effective number of small-scale cells.
    pub beta_c: f64,
    pub sigma_r2: f64,
    /// Squared aperture parameter D_ra².
    pub d_ra2: f64,
}

impl GammaGammaParams {
    /// Shape parameters given directly, without an originating link.
    pub fn from_shapes(alpha_c: f64, beta_c: f64) -> Result<Self> {
        if !(alpha_c > 0.0) || !alpha_c.is_finite() {
            return Err(Error::domain("alpha_c", alpha_c, "must be finite and > 0"));
        }
        if !(beta_c > 0.0) || !beta_c.is_finite() {
            return Err(Error::domain("beta_c", beta_c, "must be finite and > 0"));
        }
        Ok(Self {
            alpha_c,
            beta_c,
            sigma_r2: f64::NAN,
            d_ra2: 0.0,
        })
    }

    /// Var[Ψ] = 1/α + 1/β + 1/(αβ) for unit-mean Ψ.
    pub fn scintillation_index(&self) -> f64 {
        let (a, b) = (self.alpha_c, self.beta_c);
        1.0 / a + 1.0 / b + 1.0 / (a * b)
    }
}

/// Squared aperture parameter D_ra² = k l_ra² / (4L) with l_ra = λ/π,
/// which reduces to λ / (2πL).
pub fn aperture_param(frequency_hz: f64, distance_m: f64) -> Result<f64> {
    if !(frequency_hz > 0.0) {
        return Err(Error::domain("frequency", frequency_hz, "must be > 0"));
    }
    if !(distance_m > 0.0) {
        return Err(Error::domain("distance", distance_m, "must be > 0"));
    }
    let aperture = wavelength(frequency_hz) / PI;
    Ok(wavenumber(frequency_hz) * aperture * aperture / (4.0 * distance_m))
}

// Exponents of the two Andrews expressions; α = 1/(e^x − 1), β = 1/(e^y − 1).
fn andrews_exponents(sigma_r2: f64, d_ra2: f64) -> (f64, f64) {
    // σ_R^(12/5) with σ_R the square root of the Rytov variance.
    let s125 = sigma_r2.powf(1.2);
    let large = 0.49 * sigma_r2 / (1.0 + 0.18 * d_ra2 + 0.56 * s125).powf(7.0 / 6.0);
    let small = 0.51 * sigma_r2 * (1.0 + 0.69 * d_ra2 * s125).powf(-5.0 / 6.0)
        / (1.0 + 0.9 * d_ra2 + 0.62 * s125).powf(7.0 / 6.0);
    (large, small)
}

/// Andrews' effective cell counts for Rytov variance `sigma_r2` and aperture
/// parameter `d_ra2`.
pub fn andrews_params(sigma_r2: f64, d_ra2: f64) -> Result<GammaGammaParams> {
    if !(sigma_r2 > 0.0) || !sigma_r2.is_finite() {
        return Err(Error::domain("sigma_r2", sigma_r2, "must be finite and > 0"));
    }
    if !(d_ra2 >= 0.0) {
        return Err(Error::domain("d_ra2", d_ra2, "must be >= 0"));
    }
    let (x, y) = andrews_exponents(sigma_r2, d_ra2);
    Ok(GammaGammaParams {
        alpha_c: 1.0 / x.exp_m1(),
        beta_c: 1.0 / y.exp_m1(),
        sigma_r2,
        d_ra2,
    })
}

/// Which Bessel argument the Gamma-Gamma density uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GgArgument {
    /// K_{α−β}(2√(αβψ)), the density of a product of unit-mean Gamma variates.
    #[default]
    ProductOfGammas,
    /// K_{α−β}(√(2αβψ)); does not integrate to one. Kept for comparison.
    SquareRootOfTwo,
}

/// Gamma-Gamma probability density at `psi`.
pub fn gamma_gamma_pdf(psi: f64, p: &GammaGammaParams) -> Result<f64> {
    gamma_gamma_pdf_with(psi, p, GgArgument::ProductOfGammas)
}

pub fn gamma_gamma_pdf_with(psi: f64, p: &GammaGammaParams, arg: GgArgument) -> Result<f64> {
    if !(psi > 0.0) {
        return Err(Error::domain("psi", psi, "density defined for psi > 0"));
    }
    let (a, b) = (p.alpha_c, p.beta_c);
    let ab = a * b;
    let z = match arg {
        GgArgument::ProductOfGammas => 2.0 * (ab * psi).sqrt(),
        GgArgument::SquareRootOfTwo => (2.0 * ab * psi).sqrt(),
    };
    let half = 0.5 * (a + b);
    let ln = 2f64.ln() + half * ab.ln() - ln_gamma(a) - ln_gamma(b)
        + (half - 1.0) * psi.ln()
        + ln_bessel_k(a - b, z)?;
    Ok(ln.exp())
}

/// `n` draws of Ψ = Ψ_a Ψ_b with Ψ_a ~ Gamma(α, 1/α) and Ψ_b ~ Gamma(β, 1/β).
pub fn gamma_gamma_sample(p: &GammaGammaParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gamma_gamma_sample_with(p, n, &mut rng)
}

pub fn gamma_gamma_sample_with<R: rand::Rng + ?Sized>(
    p: &GammaGammaParams,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Invalid("sample count must be >= 1".into()));
    }
    let large = Gamma::new(p.alpha_c, 1.0 / p.alpha_c)
        .map_err(|e| Error::Invalid(format!("alpha_c = {}: {e}", p.alpha_c)))?;
    let small = Gamma::new(p.beta_c, 1.0 / p.beta_c)
        .map_err(|e| Error::Invalid(format!("beta_c = {}: {e}", p.beta_c)))?;
    Ok((0..n)
        .map(|_| large.sample(rng) * small.sample(rng))
        .collect())
}

/// Fading laws for the different turbulence regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingDistribution {
    GammaGamma(GammaGammaParams),
    /// Log-normal with log-variance σ_Ψ².
    LogNormal { sigma2: f64 },
    /// K distribution with large-scale cell count α_c.
    KDistribution { alpha_c: f64 },
    /// Exponential with mean `b`.
    Exponential { b: f64 },
}

impl FadingDistribution {
    fn validate(&self) -> Result<()> {
        let (name, v) = match *self {
            FadingDistribution::GammaGamma(p) => {
                GammaGammaParams::from_shapes(p.alpha_c, p.beta_c)?;
                return Ok(());
            }
            FadingDistribution::LogNormal { sigma2 } => ("sigma2", sigma2),
            FadingDistribution::KDistribution { alpha_c } => ("alpha_c", alpha_c),
            FadingDistribution::Exponential { b } => ("b", b),
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(name, v, "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Density of one of the limiting fading laws.
pub fn limiting_pdf(dist: &FadingDistribution, psi: f64) -> Result<f64> {
    if !(psi > 0.0) {
        return Err(Error::domain("psi", psi, "density defined for psi > 0"));
    }
    dist.validate()?;
    match *dist {
        FadingDistribution::GammaGamma(p) => gamma_gamma_pdf(psi, &p),
        FadingDistribution::LogNormal { sigma2 } => {
            let l = psi.ln();
            Ok((-l * l / (2.0 * sigma2)).exp() / ((2.0 * PI * sigma2).sqrt() * psi))
        }
        FadingDistribution::KDistribution { alpha_c } => {
            let ln = (2.0 * alpha_c).ln() - ln_gamma(alpha_c)
                + 0.5 * (alpha_c - 1.0) * (alpha_c * psi).ln()
                + ln_bessel_k(alpha_c - 1.0, 2.0 * (alpha_c * psi).sqrt())?;
            Ok(ln.exp())
        }
        FadingDistribution::Exponential { b } => Ok((-psi / b).exp() / b),
    }
}

/// Log-normal comparison parameter for a unit-mean law of variance `variance`:
/// σ² = ln(1 + variance).
pub fn lognormal_sigma2_for_variance(variance: f64) -> f64 {
    variance.ln_1p()
}

/// Turbulence attenuation from Andrews' empirical formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceAttenuation {
    /// 10·log10|1 − √σ_Ψ²|, negative when σ_Ψ² < 1.
    pub signed_db: f64,
    pub scintillation_index: f64,
}

impl TurbulenceAttenuation {
    /// Attenuation as a non-negative loss in dB.
    pub fn loss_db(&self) -> f64 {
        self.signed_db.abs()
    }

    /// Amplitude factor 10^(−loss/20).
    pub fn amplitude(&self) -> f64 {
        10f64.powf(-self.loss_db() / 20.0)
    }
}

/// Attenuation for a known scintillation index σ_Ψ².
pub fn attenuation_from_scintillation(
    scintillation_index: f64,
    sigma_r2: f64,
) -> Result<TurbulenceAttenuation> {
    if !(scintillation_index >= 0.0) {
        return Err(Error::domain(
            "scintillation_index",
            scintillation_index,
            "must be >= 0",
        ));
    }
    let gap = (1.0 - scintillation_index.sqrt()).abs();
    if gap == 0.0 {
        return Err(Error::SingularAttenuation { sigma_r2 });
    }
    Ok(TurbulenceAttenuation {
        signed_db: 10.0 * gap.log10(),
        scintillation_index,
    })
}

/// Turbulence attenuation through the Gamma-Gamma scintillation index.
pub fn turbulence_attenuation(sigma_r2: f64, d_ra2: f64) -> Result<TurbulenceAttenuation> {
    if !(sigma_r2 >= 0.0) {
        return Err(Error::domain("sigma_r2", sigma_r2, "must be >= 0"));
    }
    if sigma_r2 == 0.0 {
        return Ok(TurbulenceAttenuation {
            signed_db: 0.0,
            scintillation_index: 0.0,
        });
    }
    let p = andrews_params(sigma_r2, d_ra2)?;
    attenuation_from_scintillation(p.scintillation_index(), sigma_r2)
}

/// Same quantity with the Andrews exponents substituted directly:
/// σ_Ψ² = e^x + e^y − 2 + (e^x − 1)(e^y − 1).
pub fn turbulence_attenuation_expanded(sigma_r2: f64, d_ra2: f64) -> Result<TurbulenceAttenuation> {
    if !(sigma_r2 >= 0.0) {
        return Err(Error::domain("sigma_r2", sigma_r2, "must be >= 0"));
    }
    if !(d_ra2 >= 0.0) {
        return Err(Error::domain("d_ra2", d_ra2, "must be >= 0"));
    }
    let (x, y) = andrews_exponents(sigma_r2, d_ra2);
    let (ex, ey) = (x.exp_m1(), y.exp_m1());
    attenuation_from_scintillation(ex + ey + ex * ey, sigma_r2)
}

/// Non-negative turbulence attenuation in dB.
pub fn turbulence_attenuation_db(sigma_r2: f64, d_ra2: f64) -> Result<f64> {
    Ok(turbulence_attenuation(sigma_r2, d_ra2)?.loss_db())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aperture_param_simplifies() {
        let d = aperture_param(crate::constants::SPEED_OF_LIGHT / 1e-3, 1e3).unwrap();
        let want = 1e-3 / (2.0 * PI * 1e3);
        assert!(((d - want) / want).abs() < 1e-12);
        assert!((want - 1.59e-7).abs() < 1e-9);
        let half = aperture_param(3e11, 2e3).unwrap();
        assert!((half / aperture_param(3e11, 1e3).unwrap() - 0.5).abs() < 1e-14);
        // 1 THz over 10 km.
        let v = aperture_param(1e12, 1e4).unwrap();
        assert!(((v - 4.771_345_159_236_942_4e-9) / v).abs() < 1e-12);
    }

    #[test]
    fn andrews_reproduces_reported_alpha() {
        let d2 = aperture_param(3e11, 1e3).unwrap();
        for (s, want) in [(0.1, 20.76), (1.0, 2.95), (10.0, 2.48)] {
            let p = andrews_params(s, d2).unwrap();
            assert!(((p.alpha_c - want) / want).abs() < 0.01, "σ²={s}: α={}", p.alpha_c);
        }
    }

    #[test]
    fn andrews_rejects_zero_variance() {
        assert!(andrews_params(0.0, 0.0).is_err());
    }

    #[test]
    fn k_distribution_equals_gamma_gamma_with_unit_beta() {
        let p = GammaGammaParams::from_shapes(2.48, 1.0).unwrap();
        let k = FadingDistribution::KDistribution { alpha_c: 2.48 };
        for psi in [0.01, 0.3, 1.0, 4.0, 10.0] {
            let a = gamma_gamma_pdf(psi, &p).unwrap();
            let b = limiting_pdf(&k, psi).unwrap();
            assert!(((a - b) / a).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_density_at_origin() {
        let d = FadingDistribution::Exponential { b: 1.0 };
        assert!((limiting_pdf(&d, 1e-12).unwrap() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn pdf_rejects_non_positive_psi() {
        let p = GammaGammaParams::from_shapes(2.0, 3.0).unwrap();
        assert!(gamma_gamma_pdf(0.0, &p).is_err());
        assert!(limiting_pdf(&FadingDistribution::Exponential { b: 1.0 }, -1.0).is_err());
    }

    #[test]
    fn attenuation_vanishes_without_turbulence() {
        assert!(turbulence_attenuation_db(1e-12, 0.0).unwrap() < 1e-5);
        assert_eq!(turbulence_attenuation_db(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn quarter_scintillation_gives_three_db() {
        // Bisection on σ_R² for σ_Ψ² = 0.25, below the first peak of σ_Ψ².
        let (mut lo, mut hi) = (1e-6, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if andrews_params(mid, 0.0).unwrap().scintillation_index() < 0.25 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let db = turbulence_attenuation_db(lo, 0.0).unwrap();
        assert!((db - 10.0 * 2f64.log10()).abs() < 1e-9, "{db}");
    }

    #[test]
    fn singular_point_is_an_error() {
        let err = attenuation_from_scintillation(1.0, 1.7).unwrap_err();
        assert_eq!(err, Error::SingularAttenuation { sigma_r2: 1.7 });
    }

    #[test]
    fn expanded_form_agrees() {
        for s in [1e-4, 0.01, 0.3, 0.9, 30.0, 500.0] {
            let a = turbulence_attenuation(s, 1e-7).unwrap().signed_db;
            let b = turbulence_attenuation_expanded(s, 1e-7).unwrap().signed_db;
            assert!((a - b).abs() < 1e-12, "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let p = GammaGammaParams::from_shapes(2.95, 2.46).unwrap();
        assert_eq!(
            gamma_gamma_sample(&p, 16, 7).unwrap(),
            gamma_gamma_sample(&p, 16, 7).unwrap()
        );
        assert!(gamma_gamma_sample(&p, 0, 7).is_err());
    }

    #[test]
    fn sampler_concentrates_for_huge_shapes() {
        let p = GammaGammaParams::from_shapes(1e6, 1e6).unwrap();
        let s = gamma_gamma_sample(&p, 10_000, 3).unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s.len() - 1) as f64;
        assert!(var < 1e-5);
    }
}
