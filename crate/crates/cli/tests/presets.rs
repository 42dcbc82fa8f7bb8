use thz_turb::emit::render_csv;
use thz_turb::presets::{preset, PRESETS};
use thz_turb::{run_scenario, Cell, SweepTable};

fn run(name: &str) -> SweepTable {
    run_scenario(&preset(name).unwrap().unwrap()).unwrap()
}

fn values(t: &SweepTable, col: &str) -> Vec<f64> {
    t.column(col).unwrap().into_iter().map(|c| c.value().unwrap()).collect()
}

#[test]
fn presets_match_golden_files() {
    for (name, _) in PRESETS {
        let path = format!("{}/tests/golden/{name}.csv", env!("CARGO_MANIFEST_DIR"));
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
        let fresh = render_csv(&run(name));
        if fresh != golden {
            let first = fresh
                .lines()
                .zip(golden.lines())
                .position(|(a, b)| a != b)
                .unwrap_or(fresh.lines().count().min(golden.lines().count()));
            panic!("{name} differs from {path} at line {}", first + 1);
        }
    }
}

#[test]
fn fig4_covers_the_altitude_grid_per_curve() {
    let t = run("fig4");
    assert_eq!(t.rows.len(), 9 * 201);
    let h = values(&t, "altitude_m");
    assert_eq!((h[0], h[200]), (0.0, 20000.0));
    let cn2 = values(&t, "cn2_infrared");
    for curve in cn2.chunks(201) {
        // Ground-level value dominates the upper atmosphere.
        assert!(curve[0] > curve[200]);
        assert!(curve.iter().all(|v| *v > 0.0));
    }
    // Near the ground the A term controls the level; aloft the wind term does.
    let at = |a: usize, v: usize, i: usize| cn2[(3 * a + v) * 201 + i];
    assert!(at(2, 0, 0) > 50.0 * at(0, 0, 0));
    assert!((at(2, 0, 100) / at(0, 0, 100) - 1.0).abs() < 1e-6);
    assert!(at(0, 2, 100) > 5.0 * at(0, 0, 100));
}

#[test]
fn fig6a_losc_grows_with_distance_and_cn2() {
    let t = run("fig6a");
    assert_eq!(t.rows.len(), 3 * 21);
    let losc = values(&t, "losc_db");
    for curve in losc.chunks(21) {
        assert!(curve.windows(2).all(|w| w[1] > w[0]));
    }
    for i in 0..21 {
        assert!(losc[i] < losc[21 + i] && losc[21 + i] < losc[42 + i]);
    }
}

#[test]
fn fig6b_and_fig6c_trends() {
    let b = values(&run("fig6b"), "losc_db");
    let c = values(&run("fig6c"), "losc_db");
    for i in 0..21 {
        assert!(b[i] < b[21 + i] && b[21 + i] < b[42 + i], "spacing trend at {i}");
        assert!(c[i] < c[21 + i] && c[21 + i] < c[42 + i], "size trend at {i}");
    }
}

#[test]
fn fig7_numeric_column_tracks_the_closed_form() {
    let t = run("fig7");
    let closed = values(&t, "rho_closed");
    let numeric = values(&t, "rho_numeric");
    for (c, n) in closed.iter().zip(&numeric) {
        assert!((c.ln() - n.ln()).abs() <= 1e-3 * n.ln().abs().max(1e-300), "{c} vs {n}");
    }
}

#[test]
fn fig9_has_no_singular_points_and_rises_with_frequency() {
    for name in ["fig9a", "fig9b"] {
        let t = run(name);
        let att = t.column("attenuation_db").unwrap();
        assert!(att.iter().all(|c| matches!(c, Cell::Value(_))));
        let v: Vec<f64> = att.iter().map(|c| c.value().unwrap()).collect();
        for curve in v.chunks(91) {
            assert!(curve.windows(2).all(|w| w[1] > w[0]), "{name}");
        }
    }
}
