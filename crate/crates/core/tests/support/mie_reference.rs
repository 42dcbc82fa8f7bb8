//! Reference Mie evaluator written directly from spherical Bessel functions.
//!
//! j_n of complex argument comes from Miller's downward recurrence, y_n(x) from
//! upward recurrence, and the coefficients from the textbook ratio of
//! Riccati–Bessel derivatives. It shares no code with the crate's Mie module.

#![allow(dead_code)]

use num_complex::Complex64;

fn spherical_j(z: Complex64, n_max: usize) -> Vec<Complex64> {
    let start = 2 * (n_max + z.norm().ceil() as usize) + 60;
    let mut j = vec![Complex64::new(0.0, 0.0); start + 2];
    j[start] = Complex64::new(1e-30, 0.0);
    for n in (1..=start).rev() {
        j[n - 1] = j[n] * ((2 * n + 1) as f64) / z - j[n + 1];
        if j[n - 1].norm() > 1e100 {
            for v in &mut j[n - 1..] {
                *v *= 1e-100;
            }
        }
    }
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    let scale = if j0.norm() >= j1.norm() { j0 / j[0] } else { j1 / j[1] };
    j.truncate(n_max + 1);
    j.iter().map(|v| v * scale).collect()
}

fn spherical_y(x: f64, n_max: usize) -> Vec<f64> {
    let mut y = vec![-x.cos() / x, -x.cos() / (x * x) - x.sin() / x];
    for n in 1..n_max {
        let next = (2 * n + 1) as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }
    y.truncate(n_max + 1);
    y
}

/// (a_n, b_n) for n = 1..=n_max, with m = n + iκ.
pub fn coefficients(x: f64, m: Complex64, n_max: usize) -> Vec<(Complex64, Complex64)> {
    let xc = Complex64::new(x, 0.0);
    let mx = m * x;
    let jx = spherical_j(xc, n_max);
    let jm = spherical_j(mx, n_max);
    let yx = spherical_y(x, n_max);
    let i = Complex64::new(0.0, 1.0);
    (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let h = |k: usize| jx[k] + i * yx[k];
            // [z f_n(z)]' = z f_{n−1}(z) − n f_n(z)
            let dpsi_x = xc * jx[n - 1] - nf * jx[n];
            let dxi_x = xc * h(n - 1) - nf * h(n);
            let dpsi_m = mx * jm[n - 1] - nf * jm[n];
            let m2 = m * m;
            let a = (m2 * jm[n] * dpsi_x - jx[n] * dpsi_m) / (m2 * jm[n] * dxi_x - h(n) * dpsi_m);
            let b = (jm[n] * dpsi_x - jx[n] * dpsi_m) / (jm[n] * dxi_x - h(n) * dpsi_m);
            (a, b)
        })
        .collect()
}

/// Extinction efficiency with truncation at ceil(x + 4x^(1/3) + 2).
pub fn extinction_efficiency(x: f64, m: Complex64) -> f64 {
    let n_max = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize;
    let sum: f64 = coefficients(x, m, n_max)
        .iter()
        .enumerate()
        .map(|(k, (a, b))| (2 * k + 3) as f64 * (a.re + b.re))
        .sum();
    2.0 * sum / (x * x)
}
