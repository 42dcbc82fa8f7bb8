use num_complex::Complex64;
use thz_turb_core::constants::{wavelength, wavenumber};
use thz_turb_core::propagation::{
    extinction_cross_section, extinction_cross_section_with_order, extinction_efficiency,
    mie_coefficients, truncation_order, MieMedium,
};

mod support {
    pub mod mie_reference;
}
use support::mie_reference;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const CASES: [(f64, f64, f64); 6] = [
    (1.0, 1.5, 0.0),
    (10.0, 1.33, 0.01),
    (50.0, 1.5, 0.0),
    (100.0, 1.5, 0.0),
    (5.0, 2.5, 1.3),
    (17.0, 2.5, 1.3),
];

#[test]
fn efficiencies_match_reference_evaluator() {
    for (x, re, im) in CASES {
        let m = c(re, im);
        let got = extinction_efficiency(x, m).unwrap();
        let want = mie_reference::extinction_efficiency(x, m);
        assert!(((got - want) / want).abs() < 1e-8, "x={x} m={m}: {got} vs {want}");
    }
}

#[test]
fn coefficients_match_reference_evaluator() {
    for (x, re, im) in CASES {
        let m = c(re, im);
        let n = truncation_order(x);
        let ours = mie_coefficients(x, m, n).unwrap();
        let theirs = mie_reference::coefficients(x, m, n);
        for (k, (a, b)) in theirs.iter().enumerate() {
            // Absolute comparison: high orders are tiny and carry no weight.
            assert!((ours.a[k] - a).norm() < 1e-8, "a_{} at x={x}", k + 1);
            assert!((ours.b[k] - b).norm() < 1e-8, "b_{} at x={x}", k + 1);
        }
    }
}

#[test]
fn truncation_order_is_sufficient() {
    let med = MieMedium::constant(c(1.5, 0.0)).unwrap();
    let lam = wavelength(3e11);
    for x in [0.5, 1.0, 5.0, 10.0, 25.0, 50.0] {
        let r = x / wavenumber(3e11);
        let m = truncation_order(x);
        let base = extinction_cross_section_with_order(3e11, r, &med, m).unwrap();
        let more = extinction_cross_section_with_order(3e11, r, &med, m + 10).unwrap();
        assert!(((base - more) / more).abs() < 1e-6, "x={x} (r = {} λ)", r / lam);
    }
}

#[test]
fn doubling_radius_tracks_reference() {
    let m = c(2.5, 1.3);
    let med = MieMedium::constant(m).unwrap();
    let f = 3e11;
    for r in [2e-4, 4e-4, 8e-4] {
        let x = wavenumber(f) * r;
        let got = extinction_cross_section(f, r, &med).unwrap();
        let want = mie_reference::extinction_efficiency(x, m) * std::f64::consts::PI * r * r;
        assert!(((got - want) / want).abs() < 1e-8);
    }
}

#[test]
fn large_sphere_efficiency_near_extinction_paradox() {
    let q = extinction_efficiency(100.0, c(1.5, 0.0)).unwrap();
    assert!(q > 1.5 && q < 2.5);
}
