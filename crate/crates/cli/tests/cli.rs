use std::fs;
use std::process::{Command, Output};

use xva_cli::{OPTION_HEADER, SWAP_HEADER};

fn xva(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xva")).args(args).output().expect("binary runs")
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn example1_sweeps_thirteen_hazard_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex1.csv");
    let o = xva(&["example1", "--paths", "2000", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some(OPTION_HEADER));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 13);
    assert!((rows[12][0] - 0.03).abs() < 1e-15);
    for r in &rows {
        assert!((r[1] - 9.413403383852994).abs() < 1e-9);
        let sum: f64 = r[1..7].iter().sum();
        // Premium solver tolerance is 1e-8 S0.
        assert!((r[7] - sum).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn example2_sweeps_seven_hazard_rates() {
    let o = xva(&["example2"]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some(SWAP_HEADER));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 7);
    for w in rows.windows(2) {
        assert!(w[1][5] < w[0][5], "fair rate falls as the seller gets riskier");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["example1", "--paths", "1000", "--sweep", "0.01:0.01:0.02", "--csa"];
    let a = xva(&args);
    let b = xva(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = xva(&["example1", "--paths", "1000", "--sweep", "0.01:0.01:0.02", "--csa", "--seed", "7"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn threshold_below_minimum_transfer_is_a_finding() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, format!("{}H = 1\nX = 2\n", xva_cli::EXAMPLE1_CONFIG)).unwrap();
    let o = xva(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("H >= X"));
    let o = xva(&["price-option", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_curve_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("swap.conf");
    fs::write(&cfg, xva_cli::EXAMPLE2_CONFIG).unwrap();
    let out = dir.path().join("swap.csv");
    let missing = dir.path().join("nope.csv");
    let o = xva(&[
        "price-swap",
        "--config",
        cfg.to_str().unwrap(),
        "--discount-curve",
        missing.to_str().unwrap(),
        "--forward-curve",
        missing.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn riskless_parties_price_at_the_risk_free_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.conf");
    fs::write(
        &cfg,
        "S0 = 100\nK = 100\nT = 1\nr = 0.03\nq = 0\nsigma = 0.2\nlambda_S = 0\nlambda_M = 0\nlambda_B = 0\nlambda_C = 0\n",
    )
    .unwrap();
    let o = xva(&["price-option", "--config", cfg.to_str().unwrap(), "--paths", "500"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], rows[0][1]);
}

#[test]
fn bad_sweep_is_rejected() {
    let o = xva(&["example2", "--sweep", "0:-1:1"]);
    assert_eq!(o.status.code(), Some(2));
}
