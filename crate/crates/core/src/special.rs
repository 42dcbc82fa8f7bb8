//! Special functions: Bessel J₀, fractional-order modified Bessel K_ν, log-gamma,
//! and compensated summation.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::{Error, Result};

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 8.0 {
        j0_series(x)
    } else if x < 25.0 {
        j0_miller(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        let m = m as f64;
        term *= q / (m * m);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

// Downward recurrence normalized with J0 + 2ΣJ_2k = 1.
fn j0_miller(x: f64) -> f64 {
    let start = (x as usize + 40) & !1;
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        let jm1 = n as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{n-1}
        if (n - 1) % 2 == 0 && n - 1 > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    j / (norm + j)
}

fn j0_asymptotic(x: f64) -> f64 {
    // Hankel expansion: J0 = sqrt(2/(πx)) (P cos χ − Q sin χ), χ = x − π/4.
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > last || mag < 1e-18 {
            break;
        }
        last = mag;
        let sign = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

// Taylor coefficients of 1/Γ(1+z) about z = 0.
const RGAMMA1P: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
];

/// Temme's auxiliary gamma functions for |mu| ≤ 1/2:
/// (gam1, gam2, 1/Γ(1+mu), 1/Γ(1−mu)).
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut pow = 1.0;
    for pair in RGAMMA1P.chunks(2) {
        gam2 += pair[0] * pow;
        if let Some(&odd) = pair.get(1) {
            gam1 -= odd * pow;
        }
        pow *= mu2;
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

const K_EPS: f64 = 1e-16;
const K_MAXIT: usize = 100_000;

/// Exponentially scaled (e^x·K_mu(x), e^x·K_{mu+1}(x)) for |mu| ≤ 1/2.
fn k_pair_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mu2 = mu * mu;
    if x < 2.0 {
        // Temme's series.
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < K_EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < K_EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..K_MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * K_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!("K series did not converge at x = {x}")));
        }
        let scale = x.exp();
        Ok((sum * scale, sum1 * (2.0 / x) * scale))
    } else {
        // Steed's continued fraction.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut converged = false;
        for i in 2..K_MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < K_EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "K continued fraction did not converge at x = {x}"
            )));
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        Ok((kmu, kmu * (mu + x + 0.5 - h) / x))
    }
}

/// Natural logarithm of the modified Bessel function of the second kind K_ν(x).
///
/// Works for any real order (K_{−ν} = K_ν) and stays finite where K_ν itself
/// would overflow or underflow.
pub fn ln_bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("x", x, "K_nu requires 0 < x < inf"));
    }
    if !nu.is_finite() {
        return Err(Error::domain("nu", nu, "order must be finite"));
    }
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut kmu, mut k1) = k_pair_scaled(mu, x)?;
    let mut log_scale = 0.0;
    let two_over_x = 2.0 / x;
    for i in 1..=(n as u64) {
        let next = (mu + i as f64) * two_over_x * k1 + kmu;
        kmu = k1;
        k1 = next;
        if k1 > 1e250 {
            kmu /= k1;
            log_scale += k1.ln();
            k1 = 1.0;
        }
    }
    Ok(kmu.ln() + log_scale - x)
}

/// Modified Bessel function of the second kind K_ν(x) for real ν and x > 0.
pub fn bessel_k_nu(nu: f64, x: f64) -> Result<f64> {
    Ok(ln_bessel_k(nu, x)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn j0_reference_values() {
        // Abramowitz & Stegun table values.
        assert!((bessel_j0(0.0) - 1.0).abs() < 1e-16);
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j0(5.0) + 0.177_596_771_314_338_3).abs() < 1e-14);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((bessel_j0(20.0) - 0.167_024_664_340_583_1).abs() < 1e-14);
        assert!((bessel_j0(50.0) - 0.055_812_327_669_251_86).abs() < 1e-14);
    }

    #[test]
    fn j0_continuous_across_method_switches() {
        assert!((j0_series(8.0) - j0_miller(8.0)).abs() < 1e-14);
        assert!((j0_miller(25.0) - j0_asymptotic(25.0)).abs() < 1e-14);
    }

    #[test]
    fn k_half_order_closed_form() {
        let v = bessel_k_nu(0.5, 1.0).unwrap();
        let exact = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert!(rel(v, exact) < 1e-14);
        assert!(rel(v, 0.461_068_504_447_894_56) < 1e-14);
    }

    #[test]
    fn k_symmetric_in_order() {
        assert_eq!(bessel_k_nu(-0.3, 2.0).unwrap(), bessel_k_nu(0.3, 2.0).unwrap());
    }

    #[test]
    fn k_reference_values() {
        // 30-digit reference values.
        let cases = [
            (1.27, 0.8, 1.103_705_179_405_391_9),
            (0.3, 2.0, 0.116_036_974_348_119_26),
            (2.3, 15.0, 1.164_559_540_833_355_2e-7),
            (0.77, 0.01, 35.428_065_342_309_994),
            (12.4, 3.0, 287_732.097_366_718_36),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k_nu(nu, x).unwrap();
            assert!(rel(got, want) < 1e-12, "K_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn k_rejects_non_positive_argument() {
        assert!(matches!(bessel_k_nu(1.0, 0.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_k_nu(1.0, -2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn ln_k_survives_overflow_and_underflow() {
        // K_0(2e6) underflows f64, K_300(0.1) overflows it.
        let a = ln_bessel_k(0.0, 2e6).unwrap();
        let approx = 0.5 * (PI / 4e6).ln() - 2e6;
        assert!((a - approx).abs() < 1e-6);
        let b = ln_bessel_k(300.0, 0.1).unwrap();
        // Leading term: Γ(ν)/2 (2/x)^ν
        let lead = ln_gamma(300.0) - 2f64.ln() + 300.0 * (20f64).ln();
        assert!((b - lead).abs() < 1e-2, "{b} vs {lead}");
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s: NeumaierSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
    }
}
