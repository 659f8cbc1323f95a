use std::f64::consts::PI;

use longwave::montecarlo::{replication_seed, run_mc, wrap_phase, McRow, McScenario, Parameter, ScenarioModel};
use longwave::Error;
use proptest::prelude::*;

fn scenario(reps: usize, seed: u64) -> McScenario {
    let mut sc = McScenario::new(ScenarioModel::arfima2([0.2, 0.4], 0.8), 1024);
    sc.reps = reps;
    sc.seed = seed;
    sc.j0 = 3;
    sc
}

#[test]
fn same_seed_gives_identical_reports() {
    let a = run_mc(&scenario(8, 5)).unwrap();
    let b = run_mc(&scenario(8, 5)).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.failures, b.failures);
    let c = run_mc(&scenario(8, 6)).unwrap();
    assert_ne!(a.rows, c.rows);
}

#[test]
fn different_seeds_agree_statistically() {
    let reps = 30;
    let a = run_mc(&scenario(reps, 1)).unwrap();
    let b = run_mc(&scenario(reps, 2)).unwrap();
    for name in ["d1", "d2", "rho12", "phi12"] {
        let (x, y) = (a.row(name).unwrap(), b.row(name).unwrap());
        let band = 3.0 * x.std.max(y.std) / (reps as f64).sqrt();
        assert!((x.bias - y.bias).abs() < 2.0 * band, "{name}: {} vs {}", x.bias, y.bias);
    }
}

#[test]
fn rmse_identity_holds_for_every_row() {
    let report = run_mc(&scenario(10, 3)).unwrap();
    assert_eq!(report.rows.len(), 7);
    for row in &report.rows {
        assert!((row.rmse.powi(2) - row.bias.powi(2) - row.std.powi(2)).abs() < 1e-12, "{}", row.name);
    }
    assert_eq!(report.failure_rate(), report.failures as f64 / 10.0);
}

#[test]
fn single_replication_has_zero_spread() {
    let report = run_mc(&scenario(1, 9)).unwrap();
    for row in &report.rows {
        assert_eq!(row.std, 0.0);
        assert!((row.rmse - row.bias.abs()).abs() < 1e-15);
    }
}

#[test]
fn parameter_selection_limits_rows() {
    let mut sc = scenario(2, 0);
    sc.parameters = vec![Parameter::D];
    let names: Vec<String> = run_mc(&sc).unwrap().rows.into_iter().map(|r| r.name).collect();
    assert_eq!(names, ["d1", "d2"]);
}

#[test]
fn invalid_scenarios_are_rejected() {
    assert!(matches!(run_mc(&scenario(0, 0)), Err(Error::InvalidParameter(_))));
    let mut sc = scenario(2, 0);
    sc.n = 1000;
    assert!(matches!(run_mc(&sc), Err(Error::InvalidParameter(_))));
}

#[test]
fn csv_report_has_header_and_rows() {
    let report = run_mc(&scenario(2, 4)).unwrap();
    let mut buf = Vec::new();
    report.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "parameter,true,bias,std,rmse");
    assert_eq!(lines.len(), 1 + report.rows.len());
    assert!(lines[1].starts_with("d1,"));
}

#[test]
fn scenario_round_trips_through_json() {
    let sc = McScenario::new(
        ScenarioModel::Mfbm {
            d: vec![1.0, 1.2],
            sigma: vec![1.0, 1.0],
            r: vec![vec![1.0, 0.6], vec![0.6, 1.0]],
            eta: vec![vec![0.0, 0.9], vec![-0.9, 0.0]],
        },
        4096,
    );
    let dir = std::env::temp_dir().join(format!("longwave-mc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scenario.json");
    std::fs::write(&path, serde_json::to_string(&sc).unwrap()).unwrap();
    assert_eq!(McScenario::from_file(&path).unwrap(), sc);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn phase_errors_are_wrapped() {
    let row = McRow::from_errors("phi".into(), 3.0, &[wrap_phase(-3.1 - 3.0), wrap_phase(3.1 - 3.0)]);
    assert!(row.bias.abs() < 0.2 + 1e-12, "{}", row.bias);
}

proptest! {
    #[test]
    fn wrapped_phase_is_in_half_open_interval(x in -50.0..50.0f64) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        let k = ((x - w) / (2.0 * PI)).round();
        prop_assert!((x - w - 2.0 * PI * k).abs() < 1e-9);
    }

    #[test]
    fn replication_seeds_are_distinct(base in any::<u64>(), a in 0u64..10_000, b in 0u64..10_000) {
        prop_assume!(a != b);
        prop_assert_ne!(replication_seed(base, a), replication_seed(base, b));
    }

    #[test]
    fn row_moments_satisfy_rmse_identity(errors in prop::collection::vec(-5.0..5.0f64, 1..50)) {
        let row = McRow::from_errors("x".into(), 0.0, &errors);
        prop_assert!((row.rmse.powi(2) - row.bias.powi(2) - row.std.powi(2)).abs() < 1e-9);
        prop_assert!(row.std >= 0.0);
    }
}
