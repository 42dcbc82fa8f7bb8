//! Normalized covariance between the turbulence perturbations of two SISO
//! sub-channels.
//!
//! For a constant structure constant the covariance has the closed form
//!
//! ρ = exp(−0.546 C_n² k² L (d_t^(8/3) − d_r^(8/3)) / (d_t − d_r)),
//!
//! with the separate coefficient 1.457 when d_t = d_r. [`nc_numeric`] evaluates
//! the underlying double integral over path position and spatial frequency and
//! accepts a path-varying structure constant.

use std::f64::consts::PI;

use crate::atmosphere::KOLMOGOROV_COEFFICIENT;
use crate::quadrature::{integrate, integrate_pieces, QuadConfig};
use crate::special::bessel_j0;
use crate::{Error, Result};

/// Coefficient of the unequal-separation branch.
pub const NC_COEFFICIENT: f64 = 0.546;
/// Coefficient of the equal-separation branch.
pub const NC_EQUAL_COEFFICIENT: f64 = 1.457;
/// Separations are compared after rounding to this many metres.
pub const TIE_QUANTUM: f64 = 1e-12;

/// Separations and link parameters for one covariance evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NCQuery {
    /// Transmit-side element separation in metres.
    pub d_t: f64,
    /// Receive-side element separation in metres.
    pub d_r: f64,
    /// Structure constant in m^(−2/3); zero means no turbulence.
    pub cn2: f64,
    /// Wavenumber in rad/m.
    pub k: f64,
    /// Path length in metres.
    pub distance: f64,
}

impl NCQuery {
    pub fn new(d_t: f64, d_r: f64, cn2: f64, k: f64, distance: f64) -> Result<Self> {
        let q = Self {
            d_t,
            d_r,
            cn2,
            k,
            distance,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_t >= 0.0) || !self.d_t.is_finite() {
            return Err(Error::domain("d_t", self.d_t, "must be finite and >= 0"));
        }
        if !(self.d_r >= 0.0) || !self.d_r.is_finite() {
            return Err(Error::domain("d_r", self.d_r, "must be finite and >= 0"));
        }
        if !(self.cn2 >= 0.0) || !self.cn2.is_finite() {
            return Err(Error::domain("cn2", self.cn2, "must be finite and >= 0"));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::domain("k", self.k, "must be finite and > 0"));
        }
        if !(self.distance > 0.0) || !self.distance.is_finite() {
            return Err(Error::domain("distance", self.distance, "must be finite and > 0"));
        }
        Ok(())
    }

    /// C_n² k² L, the common prefactor of every exponent.
    pub fn strength(&self) -> f64 {
        self.cn2 * self.k * self.k * self.distance
    }
}

fn quantize(d: f64) -> i64 {
    (d / TIE_QUANTUM).round() as i64
}

/// Positive exponent −ln ρ of the closed form, as printed (difference-quotient form).
pub fn nc_closed_form_exponent(q: &NCQuery) -> f64 {
    if q.cn2 == 0.0 {
        return 0.0;
    }
    let (qt, qr) = (quantize(q.d_t), quantize(q.d_r));
    if qt == qr {
        if qt == 0 {
            return 0.0;
        }
        let d = 0.5 * (q.d_t + q.d_r);
        return NC_EQUAL_COEFFICIENT * q.strength() * d.powf(5.0 / 3.0);
    }
    let p = 8.0 / 3.0;
    NC_COEFFICIENT * q.strength() * (q.d_t.powf(p) - q.d_r.powf(p)) / (q.d_t - q.d_r)
}

/// ρ from the closed form; exactly 1 when both separations are zero or C_n² = 0.
pub fn nc_closed_form(q: &NCQuery) -> f64 {
    (-nc_closed_form_exponent(q)).exp()
}

/// Ratio of cube-root power sums Σ_{p=0}^{7} d_t^{p/3} d_r^{(7−p)/3} / Σ_{p=0}^{2} d_t^{p/3} d_r^{(2−p)/3}.
///
/// Algebraically equal to the difference quotient (d_t^{8/3} − d_r^{8/3}) / (d_t − d_r)
/// and free of cancellation near d_t = d_r.
pub fn separation_kernel_sum(d_t: f64, d_r: f64) -> f64 {
    let (a, b) = (d_t.cbrt(), d_r.cbrt());
    let mut num = 0.0;
    for p in 0..=7 {
        num += a.powi(p) * b.powi(7 - p);
    }
    let den = a * a + a * b + b * b;
    if den == 0.0 {
        return 0.0;
    }
    num / den
}

/// Exponent of the closed form written with the power-sum ratio (no tie branch).
pub fn nc_sum_form_exponent(q: &NCQuery) -> f64 {
    NC_COEFFICIENT * q.strength() * separation_kernel_sum(q.d_t, q.d_r)
}

pub fn nc_sum_form(q: &NCQuery) -> f64 {
    (-nc_sum_form_exponent(q)).exp()
}

/// Settings for [`nc_numeric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcQuadrature {
    /// Tolerances of the outer integral over path position.
    pub outer: QuadConfig,
    /// Tolerances of the inner integral over spatial frequency.
    pub inner: QuadConfig,
    /// Below κb = `series_limit` the factor 1 − J0 is replaced by its series.
    pub series_limit: f64,
    /// The oscillatory part is integrated up to κb = `oscillation_limit`.
    pub oscillation_limit: f64,
}

impl Default for NcQuadrature {
    fn default() -> Self {
        Self {
            outer: QuadConfig::with_rel_tol(1e-8),
            inner: QuadConfig::with_rel_tol(1e-9),
            series_limit: 1e-3,
            oscillation_limit: 1e3,
        }
    }
}

/// ∫₀^∞ κ^(−8/3) (1 − J0(κb)) dκ for b > 0, evaluated in physical κ.
///
/// The range is split at κ_s = `series_limit`/b (series head, integrated
/// exactly), at κ* = 1/`scale` (the end of the log-spaced segment), on
/// half-periods of J0 up to κb = `oscillation_limit`, and closed with the
/// analytic tail of the non-oscillatory part.
pub fn structure_integral(b: f64, scale: f64, cfg: &NcQuadrature) -> Result<f64> {
    if b == 0.0 {
        return Ok(0.0);
    }
    let kappa_s = cfg.series_limit / b;
    // κ^(−8/3) (κ²b²/4 − κ⁴b⁴/64), integrated from 0.
    let head = 0.75 * b * b * kappa_s.cbrt() - 3.0 / 448.0 * b.powi(4) * kappa_s.powf(7.0 / 3.0);
    let integrand = |kappa: f64| {
        let z = kappa * b;
        let one_minus = if z < cfg.series_limit {
            let z2 = z * z;
            z2 / 4.0 - z2 * z2 / 64.0
        } else {
            1.0 - bessel_j0(z)
        };
        kappa.powf(-8.0 / 3.0) * one_minus
    };

    let kappa_star = (1.0 / scale).max(kappa_s);
    let mut total = head;
    if kappa_star > kappa_s {
        let log_seg = integrate(
            |u: f64| {
                let kappa = u.exp();
                integrand(kappa) * kappa
            },
            kappa_s.ln(),
            kappa_star.ln(),
            &cfg.inner,
        )?;
        total += log_seg.value;
    }

    let kappa_max = cfg.oscillation_limit / b;
    let mut breaks = vec![kappa_star];
    let mut z = (kappa_star * b / PI).floor() * PI + PI;
    while z < cfg.oscillation_limit {
        breaks.push(z / b);
        z += PI;
    }
    breaks.push(kappa_max.max(kappa_star * 2.0));
    let osc = integrate_pieces(integrand, &breaks, &cfg.inner)?;
    total += osc.value;
    // ∫_{κmax}^∞ κ^(−8/3) dκ; the J0 part of the tail is O((κmax b)^(−19/6)) relative.
    let end = *breaks.last().unwrap_or(&kappa_max);
    total += 0.6 * end.powf(-5.0 / 3.0);
    Ok(total)
}

/// Structure constant along the path, as a function of the distance z from the transmitter.
pub type PathProfile<'a> = &'a (dyn Fn(f64) -> f64 + Sync);

/// Separation geometry for the Bessel argument of the numeric covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeparationGeometry {
    /// Scalar separations: at path fraction ξ from the receiver the argument is
    /// κ (ξ d_t + (1 − ξ) d_r).
    Scalar,
    /// Separation vectors: the argument is κ |ξ r_t + (1 − ξ) r_r|.
    Vector { r_t: [f64; 2], r_r: [f64; 2] },
}

/// ρ from the double integral exp(−4π²k²L ∫₀¹∫₀^∞ κ Φ_n(κ, L − Lξ)(1 − J0(κ b(ξ))) dκ dξ).
///
/// `profile` gives C_n² at distance z from the transmitter; `None` uses `q.cn2`
/// along the whole path. Position ξ = 1 is the transmitter.
pub fn nc_numeric(
    q: &NCQuery,
    profile: Option<PathProfile<'_>>,
    geometry: SeparationGeometry,
    cfg: &NcQuadrature,
) -> Result<f64> {
    Ok((-nc_numeric_exponent(q, profile, geometry, cfg)?).exp())
}

/// Positive exponent −ln ρ of [`nc_numeric`].
pub fn nc_numeric_exponent(
    q: &NCQuery,
    profile: Option<PathProfile<'_>>,
    geometry: SeparationGeometry,
    cfg: &NcQuadrature,
) -> Result<f64> {
    q.validate()?;
    let (d_t, d_r) = match geometry {
        SeparationGeometry::Scalar => (q.d_t, q.d_r),
        SeparationGeometry::Vector { r_t, r_r } => (r_t[0].hypot(r_t[1]), r_r[0].hypot(r_r[1])),
    };
    let lambda = 2.0 * PI / q.k;
    let scale = d_t.max(d_r).max(lambda);
    let separation = |xi: f64| match geometry {
        SeparationGeometry::Scalar => xi * d_t + (1.0 - xi) * d_r,
        SeparationGeometry::Vector { r_t, r_r } => {
            let x = xi * r_t[0] + (1.0 - xi) * r_r[0];
            let y = xi * r_t[1] + (1.0 - xi) * r_r[1];
            x.hypot(y)
        }
    };
    let cn2_at = |xi: f64| match profile {
        Some(p) => p(q.distance * (1.0 - xi)),
        None => q.cn2,
    };

    let mut breaks = vec![0.0];
    if let SeparationGeometry::Vector { r_t, r_r } = geometry {
        // The separation may pass through zero inside the path; split there.
        let (dx, dy) = (r_t[0] - r_r[0], r_t[1] - r_r[1]);
        let dd = dx * dx + dy * dy;
        if dd > 0.0 {
            let xi0 = -(r_r[0] * dx + r_r[1] * dy) / dd;
            if xi0 > 0.0 && xi0 < 1.0 {
                breaks.push(xi0);
            }
        }
    }
    breaks.push(1.0);

    let mut failure = None;
    let outer = integrate_pieces(
        |xi| {
            let c = cn2_at(xi);
            if c == 0.0 {
                return 0.0;
            }
            match structure_integral(separation(xi), scale, cfg) {
                Ok(v) => KOLMOGOROV_COEFFICIENT * c * v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        &cfg.outer,
    );
    if let Some(e) = failure {
        return Err(match e {
            Error::Numerical(msg) => Error::Numerical(format!("inner κ integral: {msg}")),
            other => other,
        });
    }
    let outer = outer.map_err(|e| match e {
        Error::Numerical(msg) => Error::Numerical(format!("outer ξ integral: {msg}")),
        other => other,
    })?;
    Ok(4.0 * PI * PI * q.k * q.k * q.distance * outer.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{wavelength, wavenumber};

    fn query(d_t: f64, d_r: f64, cn2: f64) -> NCQuery {
        NCQuery::new(d_t, d_r, cn2, wavenumber(3e11), 1e3).unwrap()
    }

    #[test]
    fn zero_separation_is_perfect_correlation() {
        assert_eq!(nc_closed_form(&query(0.0, 0.0, 1e-9)), 1.0);
        let cfg = NcQuadrature::default();
        let q = query(0.0, 0.0, 1e-9);
        assert_eq!(nc_numeric(&q, None, SeparationGeometry::Scalar, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn no_turbulence_is_perfect_correlation() {
        assert_eq!(nc_closed_form(&query(1e-3, 4e-3, 0.0)), 1.0);
    }

    #[test]
    fn equal_branch_uses_its_own_coefficient() {
        let q = query(2e-3, 2e-3, 1e-9);
        let want = NC_EQUAL_COEFFICIENT * q.strength() * 2e-3f64.powf(5.0 / 3.0);
        assert!((nc_closed_form_exponent(&q) - want).abs() < 1e-15 * want);
        // Within the tie quantum the equal branch still applies.
        let near = query(2e-3, 2e-3 + 1e-13, 1e-9);
        assert!((nc_closed_form_exponent(&near) / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sum_form_limit_is_eight_thirds() {
        let d = 1.7e-3;
        let k = separation_kernel_sum(d, d);
        assert!((k / (8.0 / 3.0 * d.powf(5.0 / 3.0)) - 1.0).abs() < 1e-14);
        assert!((NC_COEFFICIENT * 8.0 / 3.0 - NC_EQUAL_COEFFICIENT).abs() / NC_EQUAL_COEFFICIENT < 1e-3);
    }

    #[test]
    fn structure_integral_has_five_thirds_scaling() {
        let cfg = NcQuadrature::default();
        let c1 = structure_integral(1.0, 1.0, &cfg).unwrap();
        // Γ-function value of ∫ z^(−8/3)(1 − J0(z)) dz.
        assert!((c1 - 1.118_334_400).abs() < 1e-6, "{c1}");
        let b = 3.3e-3;
        let cb = structure_integral(b, wavelength(3e11), &cfg).unwrap();
        assert!((cb / (c1 * b.powf(5.0 / 3.0)) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn numeric_matches_closed_form_half_wavelength() {
        let lam = wavelength(3e11);
        let q = query(0.0, lam / 2.0, 1e-9);
        let cfg = NcQuadrature::default();
        let num = nc_numeric_exponent(&q, None, SeparationGeometry::Scalar, &cfg).unwrap();
        let cf = nc_closed_form_exponent(&q);
        assert!(((num - cf) / cf).abs() < 1e-3, "{num} vs {cf}");
    }

    #[test]
    fn collinear_vectors_reduce_to_scalars() {
        let q = query(1e-3, 3e-3, 1e-10);
        let cfg = NcQuadrature::default();
        let s = nc_numeric_exponent(&q, None, SeparationGeometry::Scalar, &cfg).unwrap();
        let v = nc_numeric_exponent(
            &q,
            None,
            SeparationGeometry::Vector {
                r_t: [0.6e-3, 0.8e-3],
                r_r: [1.8e-3, 2.4e-3],
            },
            &cfg,
        )
        .unwrap();
        assert!((s / v - 1.0).abs() < 1e-8);
        // Anti-parallel vectors cross zero mid-path and decorrelate less.
        let anti = nc_numeric_exponent(
            &q,
            None,
            SeparationGeometry::Vector {
                r_t: [1e-3, 0.0],
                r_r: [-3e-3, 0.0],
            },
            &cfg,
        )
        .unwrap();
        assert!(anti < s);
    }

    #[test]
    fn path_profile_at_equal_separation_averages() {
        // With d_t = d_r the Bessel argument does not depend on ξ, so the
        // exponent is linear in the path average of C_n².
        let d = 1e-3;
        let q = query(d, d, 2e-10);
        let cfg = NcQuadrature::default();
        let ramp = |z: f64| 1e-10 + 2e-10 * z / 1e3;
        let with_ramp = nc_numeric_exponent(&q, Some(&ramp), SeparationGeometry::Scalar, &cfg).unwrap();
        let flat = nc_numeric_exponent(&q, None, SeparationGeometry::Scalar, &cfg).unwrap();
        assert!((with_ramp / flat - 1.0).abs() < 1e-8);
    }

    #[test]
    fn profile_weighting_follows_transmitter_side() {
        // Turbulence only near the transmitter sees the transmit separation.
        let q = query(4e-3, 0.0, 1e-9);
        let cfg = NcQuadrature::default();
        let near_tx = |z: f64| if z < 100.0 { 1e-9 } else { 0.0 };
        let near_rx = |z: f64| if z > 900.0 { 1e-9 } else { 0.0 };
        let a = nc_numeric_exponent(&q, Some(&near_tx), SeparationGeometry::Scalar, &cfg).unwrap();
        let b = nc_numeric_exponent(&q, Some(&near_rx), SeparationGeometry::Scalar, &cfg).unwrap();
        assert!(a > 10.0 * b);
    }
}
