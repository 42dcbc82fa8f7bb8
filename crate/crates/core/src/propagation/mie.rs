//! Mie scattering by homogeneous spheres.
//!
//! Coefficients follow the Bohren–Huffman conventions: the relative refractive
//! index is written m = n + iκ with κ ≥ 0 for absorbing media. The logarithmic
//! derivative D_n(mx) is obtained by downward recurrence, the Riccati–Bessel
//! function χ_n(x) by upward recurrence and ψ_n(x) by normalised downward recurrence.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::wavenumber;
use crate::{Error, Result};

/// Extra orders above the start of the downward recurrence.
const DOWNWARD_PAD: usize = 15;

/// Truncation order ceil(x + 4x^(1/3) + 2).
pub fn truncation_order(x: f64) -> usize {
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize
}

/// Partial-wave coefficients a_n, b_n for n = 1..=`orders`.
#[derive(Debug, Clone, PartialEq)]
pub struct MieCoefficients {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl MieCoefficients {
    /// Extinction efficiency Q_ext = (2/x²) Σ (2n+1) Re(a_n + b_n).
    pub fn extinction_efficiency(&self, x: f64) -> f64 {
        let sum: f64 = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| (2 * i + 3) as f64 * (a.re + b.re))
            .sum();
        2.0 * sum / (x * x)
    }
}

fn validate(x: f64, m: Complex64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("size parameter", x, "must be finite and > 0"));
    }
    if !(m.re > 0.0) || !m.re.is_finite() {
        return Err(Error::domain("refractive index (real part)", m.re, "must be finite and > 0"));
    }
    if !(m.im >= 0.0) || !m.im.is_finite() {
        return Err(Error::domain(
            "refractive index (imaginary part)",
            m.im,
            "must be finite and >= 0",
        ));
    }
    Ok(())
}

/// Mie coefficients up to order `orders` for size parameter `x` and relative index `m`.
pub fn mie_coefficients(x: f64, m: Complex64, orders: usize) -> Result<MieCoefficients> {
    validate(x, m)?;
    if orders == 0 {
        return Err(Error::Invalid("Mie truncation order must be >= 1".into()));
    }
    if m == Complex64::new(1.0, 0.0) {
        let zero = vec![Complex64::new(0.0, 0.0); orders];
        return Ok(MieCoefficients {
            a: zero.clone(),
            b: zero,
        });
    }
    let mx = m * x;
    // Starting only 15 orders above |mx| leaves D_n unconverged for large real
    // mx, so the truncation rule is applied to |mx| as well.
    let start = orders.max(truncation_order(mx.norm())) + DOWNWARD_PAD;
    let mut d = vec![Complex64::new(0.0, 0.0); start + 1];
    for n in (1..=start).rev() {
        let nf = Complex64::new(n as f64, 0.0) / mx;
        d[n - 1] = nf - 1.0 / (d[n] + nf);
    }

    let psi = riccati_psi(x, orders);
    let mut a = Vec::with_capacity(orders);
    let mut b = Vec::with_capacity(orders);
    let (mut chi0, mut chi1) = (-x.sin(), x.cos());
    for n in 1..=orders {
        let nf = n as f64;
        let chi = (2.0 * nf - 1.0) / x * chi1 - chi0;
        let xi = Complex64::new(psi[n], -chi);
        let xi1 = Complex64::new(psi[n - 1], -chi1);
        let ta = d[n] / m + nf / x;
        let tb = d[n] * m + nf / x;
        let an = (ta * psi[n] - psi[n - 1]) / (ta * xi - xi1);
        let bn = (tb * psi[n] - psi[n - 1]) / (tb * xi - xi1);
        if !(an.re.is_finite() && an.im.is_finite() && bn.re.is_finite() && bn.im.is_finite()) {
            return Err(Error::Numerical(format!(
                "Mie recurrence overflowed at order {n} (x = {x}, m = {m})"
            )));
        }
        a.push(an);
        b.push(bn);
        chi0 = chi1;
        chi1 = chi;
    }
    Ok(MieCoefficients { a, b })
}

/// Riccati–Bessel ψ_n(x) = x j_n(x) for n = 0..=`orders`.
///
/// Upward recurrence loses ψ_n to cancellation once n exceeds x (and for all
/// n ≥ 1 when x is small), so the values come from Miller's downward
/// recurrence, normalised against ψ_0 = sin x and ψ_1 = sin x / x − cos x.
fn riccati_psi(x: f64, orders: usize) -> Vec<f64> {
    let start = orders.max(x.ceil() as usize) + DOWNWARD_PAD;
    let mut psi = vec![0.0; start + 2];
    psi[start] = 1.0;
    for n in (1..=start).rev() {
        psi[n - 1] = (2 * n + 1) as f64 / x * psi[n] - psi[n + 1];
        if psi[n - 1].abs() > 1e250 {
            for v in &mut psi[n - 1..] {
                *v *= 1e-250;
            }
        }
    }
    let s0 = x.sin();
    let scale = if x < 1.0 {
        s0 / psi[0]
    } else {
        let s1 = s0 / x - x.cos();
        let big = psi[0].abs().max(psi[1].abs());
        let (p0, p1) = (psi[0] / big, psi[1] / big);
        (p0 * s0 + p1 * s1) / (p0 * p0 + p1 * p1) / big
    };
    psi.truncate(orders + 1);
    for v in &mut psi {
        *v *= scale;
    }
    psi
}

/// Extinction efficiency with the default truncation order.
pub fn extinction_efficiency(x: f64, m: Complex64) -> Result<f64> {
    let c = mie_coefficients(x, m, truncation_order(x))?;
    Ok(c.extinction_efficiency(x))
}

/// Complex refractive index of the scattering material, possibly frequency dependent.
#[derive(Debug, Clone, PartialEq)]
pub enum MieMedium {
    Constant(Complex64),
    /// Rows (frequency Hz, index), strictly increasing in frequency; linear interpolation.
    Table(Vec<(f64, Complex64)>),
}

impl MieMedium {
    pub fn constant(m: Complex64) -> Result<Self> {
        check_index(m)?;
        Ok(MieMedium::Constant(m))
    }

    pub fn table(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("refractive-index table is empty".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Invalid(
                    "refractive-index frequencies must be strictly increasing".into(),
                ));
            }
        }
        for &(_, m) in &rows {
            check_index(m)?;
        }
        Ok(MieMedium::Table(rows))
    }

    /// Index at frequency `f`.
    pub fn index_at(&self, f: f64) -> Result<Complex64> {
        match self {
            MieMedium::Constant(m) => Ok(*m),
            MieMedium::Table(rows) => {
                let (lo, hi) = (rows[0].0, rows[rows.len() - 1].0);
                if !(f >= lo && f <= hi) {
                    return Err(Error::Range {
                        name: "frequency",
                        value: f,
                        min: lo,
                        max: hi,
                    });
                }
                let i = rows.partition_point(|r| r.0 <= f);
                if i == rows.len() {
                    return Ok(rows[i - 1].1);
                }
                let (f0, m0) = rows[i - 1];
                let (f1, m1) = rows[i];
                Ok(m0 + (m1 - m0) * ((f - f0) / (f1 - f0)))
            }
        }
    }
}

fn check_index(m: Complex64) -> Result<()> {
    if !(m.re >= 1.0) || !m.re.is_finite() {
        return Err(Error::domain("refractive index (real part)", m.re, "must be >= 1"));
    }
    if !(m.im >= 0.0) || !m.im.is_finite() {
        return Err(Error::domain("refractive index (imaginary part)", m.im, "must be >= 0"));
    }
    Ok(())
}

/// Extinction cross-section in m² of a sphere of radius `r` at frequency `f`.
pub fn extinction_cross_section(f: f64, r: f64, medium: &MieMedium) -> Result<f64> {
    let x = size_parameter(f, r)?;
    extinction_cross_section_with_order(f, r, medium, truncation_order(x))
}

/// As [`extinction_cross_section`] with an explicit truncation order.
pub fn extinction_cross_section_with_order(
    f: f64,
    r: f64,
    medium: &MieMedium,
    orders: usize,
) -> Result<f64> {
    let x = size_parameter(f, r)?;
    let m = medium.index_at(f)?;
    let c = mie_coefficients(x, m, orders)?;
    Ok(c.extinction_efficiency(x) * PI * r * r)
}

/// x = 2πr/λ.
pub fn size_parameter(f: f64, r: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::domain("frequency", f, "must be > 0"));
    }
    if !(r > 0.0) {
        return Err(Error::domain("radius", r, "must be > 0"));
    }
    Ok(wavenumber(f) * r)
}
