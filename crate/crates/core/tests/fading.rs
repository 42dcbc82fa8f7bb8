use thz_turb_core::fading::*;
use thz_turb_core::quadrature::{integrate_pieces, integrate_to_infinity, QuadConfig};

const PAIRS: [(f64, f64); 3] = [(20.76, 19.75), (2.95, 2.46), (2.48, 0.98)];

fn moment(pdf: impl Fn(f64) -> f64, power: i32) -> f64 {
    let cfg = QuadConfig::with_rel_tol(1e-11);
    // Split at the bulk of the mass; the density may have an integrable
    // singularity at the origin when min(α, β) < 1.
    let head = integrate_pieces(|x| x.powi(power) * pdf(x), &[0.0, 0.25, 1.0, 4.0], &cfg).unwrap();
    let tail = integrate_to_infinity(|x| x.powi(power) * pdf(x), 4.0, &cfg).unwrap();
    head.value + tail.value
}

#[test]
fn gamma_gamma_normalised_with_unit_mean() {
    for (a, b) in PAIRS {
        let p = GammaGammaParams::from_shapes(a, b).unwrap();
        let pdf = |x: f64| gamma_gamma_pdf(x, &p).unwrap();
        assert!((moment(pdf, 0) - 1.0).abs() < 1e-6, "({a}, {b})");
        assert!((moment(pdf, 1) - 1.0).abs() < 1e-6, "({a}, {b})");
        let second = moment(pdf, 2);
        assert!((second - (1.0 + p.scintillation_index())).abs() < 1e-6);
    }
}

#[test]
fn printed_argument_variant_is_not_normalised() {
    let p = GammaGammaParams::from_shapes(2.95, 2.46).unwrap();
    let pdf = |x: f64| gamma_gamma_pdf_with(x, &p, GgArgument::SquareRootOfTwo).unwrap();
    assert!((moment(pdf, 0) - 1.0).abs() > 1e-2);
}

#[test]
fn limiting_laws_are_normalised() {
    let laws = [
        FadingDistribution::LogNormal {
            sigma2: lognormal_sigma2_for_variance(0.1),
        },
        FadingDistribution::KDistribution { alpha_c: 2.48 },
        FadingDistribution::Exponential { b: 1.0 },
        FadingDistribution::GammaGamma(GammaGammaParams::from_shapes(2.95, 2.46).unwrap()),
    ];
    for d in laws {
        let total = moment(|x| limiting_pdf(&d, x).unwrap(), 0);
        assert!((total - 1.0).abs() < 1e-6, "{d:?}: {total}");
    }
}

#[test]
fn k_distribution_close_to_saturated_gamma_gamma() {
    let a = andrews_params(10.0, aperture_param(3e11, 1e3).unwrap()).unwrap();
    let k = FadingDistribution::KDistribution { alpha_c: a.alpha_c };
    let gg = GammaGammaParams::from_shapes(a.alpha_c, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=200 {
        let psi = 0.01 * (1000f64).powf(i as f64 / 200.0);
        let diff = (limiting_pdf(&k, psi).unwrap() - gamma_gamma_pdf(psi, &gg).unwrap()).abs();
        worst = worst.max(diff);
    }
    assert!(worst < 0.05);
}

#[test]
fn sampler_moments_at_monte_carlo_rate() {
    let p = GammaGammaParams::from_shapes(2.95, 2.46).unwrap();
    let n = 100_000;
    let s = gamma_gamma_sample(&p, n, 2024).unwrap();
    let mean = s.iter().sum::<f64>() / n as f64;
    let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let m4 = s.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
    let se_mean = (var / n as f64).sqrt();
    let se_var = ((m4 - var * var) / n as f64).sqrt();
    assert!((mean - 1.0).abs() < 3.0 * se_mean);
    assert!((var - p.scintillation_index()).abs() < 3.0 * se_var);
}

#[test]
fn andrews_shapes_decrease_into_strong_regime() {
    let mut prev = (f64::INFINITY, f64::INFINITY);
    let mut s = 1e-3;
    while s <= 2.5 {
        let p = andrews_params(s, 0.0).unwrap();
        assert!(p.alpha_c < prev.0 && p.beta_c < prev.1, "σ²={s}");
        prev = (p.alpha_c, p.beta_c);
        s *= 1.2;
    }
    // Past the minimum near σ² ≈ 3 both shapes grow again, and with zero
    // aperture the small-scale count stays above the large-scale one.
    let at3 = andrews_params(3.0, 0.0).unwrap();
    let at10 = andrews_params(10.0, 0.0).unwrap();
    assert!(at10.alpha_c > at3.alpha_c && at10.beta_c > at3.beta_c);
    for s in [1.0, 2.0, 5.0, 10.0, 50.0] {
        let p = andrews_params(s, 0.0).unwrap();
        assert!(p.beta_c > p.alpha_c, "σ²={s}");
    }
}

#[test]
fn beta_follows_printed_formula() {
    let d2 = aperture_param(3e11, 1e3).unwrap();
    for s in [0.1f64, 1.0, 10.0] {
        let s125 = s.powf(1.2);
        let y = 0.51 * s * (1.0 + 0.69 * d2 * s125).powf(-5.0 / 6.0)
            / (1.0 + 0.9 * d2 + 0.62 * s125).powf(7.0 / 6.0);
        let want = 1.0 / (y.exp() - 1.0);
        let got = andrews_params(s, d2).unwrap().beta_c;
        assert!(((got - want) / want).abs() < 1e-12);
    }
}

#[test]
fn attenuation_increases_below_singularity() {
    let mut prev = -1.0;
    let mut s = 1e-4;
    while s < 0.5 {
        let v = turbulence_attenuation_db(s, 1e-7).unwrap();
        assert!(v > prev);
        prev = v;
        s *= 1.3;
    }
}

#[test]
fn attenuation_at_short_link_is_sub_decibel() {
    // 300 GHz, 1 km, C_n² = 1e-13, aperture λ/π: direct evaluation.
    let s = thz_turb_core::atmosphere::rytov_variance(1e-13, 3e11, 1e3).unwrap();
    let d2 = aperture_param(3e11, 1e3).unwrap();
    let v = turbulence_attenuation_db(s, d2).unwrap();
    assert!(v > 0.0 && v < 1.0, "{v}");
}

#[test]
fn bessel_k_recurrence_consistency() {
    for &x in &[0.05, 0.7, 1.9, 2.1, 8.0, 40.0] {
        for &nu in &[0.2, 1.3, 3.7, 10.5] {
            let lhs = bessel_k_nu(nu + 1.0, x).unwrap();
            let rhs = bessel_k_nu(nu - 1.0, x).unwrap() + 2.0 * nu / x * bessel_k_nu(nu, x).unwrap();
            assert!(((lhs - rhs) / lhs).abs() < 1e-9, "ν={nu}, x={x}");
        }
    }
}
