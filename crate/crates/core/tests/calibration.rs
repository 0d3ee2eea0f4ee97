use std::path::PathBuf;

use smacrawl::calibrate::{calibrate, calibrate_claws, CalibrationTargets};
use smacrawl::config::ConfigFile;
use smacrawl::engine::{run, Scenario};
use smacrawl::Error;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-12)
}

#[test]
fn bundled_targets_reproduce_bundled_constants() {
    let text = std::fs::read_to_string(bundled("targets.toml")).unwrap();
    let targets: CalibrationTargets = toml::from_str(&text).unwrap();
    // Start from deliberately wrong constants.
    let mut start = ConfigFile::load(&bundled("single_module.cfg"))
        .unwrap()
        .to_scenario();
    start.sma.c_th_j_per_c = 2.0;
    start.sma.h_th_w_per_c = 0.3;
    start.claws.bwd_resistance_single = 1.0;
    start.claws.bwd_resistance_dual = 1.0;

    let cal = calibrate(&start, &targets).unwrap();
    let want = Scenario::default();
    let t = cal.thermal.unwrap();
    assert!(
        close(t.c_th_j_per_c, want.sma.c_th_j_per_c, 1e-6),
        "C_th {}",
        t.c_th_j_per_c
    );
    assert!(
        close(t.h_th_w_per_c, want.sma.h_th_w_per_c, 1e-6),
        "h_th {}",
        t.h_th_w_per_c
    );
    assert!(t.residual_s.abs() < 1e-6);
    let single = cal.single.unwrap();
    let dual = cal.dual.unwrap();
    assert!(close(
        single.bwd_resistance,
        want.claws.bwd_resistance_single,
        1e-6
    ));
    assert!(close(
        dual.bwd_resistance,
        want.claws.bwd_resistance_dual,
        1e-6
    ));

    let mut fitted = start;
    cal.apply(&mut fitted);
    let (_, s) = run(&fitted).unwrap();
    assert_eq!(s.cycles, 12);
    assert!((s.mm_per_cycle.unwrap() - 50.0 / 12.0).abs() < 0.05 * 50.0 / 12.0);
}

#[test]
fn unreachable_travel_is_an_infeasible_target() {
    let sc = Scenario::default();
    assert!(matches!(
        calibrate_claws(&sc, 30.0, 12),
        Err(Error::InfeasibleTarget(_))
    ));
    let targets = CalibrationTargets {
        mm_per_cycle_dual: Some(-60.0),
        ..Default::default()
    };
    assert!(matches!(
        calibrate(&sc, &targets),
        Err(Error::InfeasibleTarget(_))
    ));
}

#[test]
fn backward_target_fits_backward_claws() {
    let fit = calibrate_claws(&Scenario::default(), -3.0, 12).unwrap();
    assert!(fit.bwd_resistance < 1.0);
    assert!((fit.mm_per_cycle + 3.0).abs() < 0.15);
}
