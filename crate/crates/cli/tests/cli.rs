use std::path::Path;
use std::process::{Command, Output};

use mimo_recip::output::CSV_HEADER;

const BIN: &str = env!("CARGO_BIN_EXE_mimo-recip");

const MINIMAL: &str = r#"{
  "system": { "M": 32, "K": 4, "rho_db": 10, "tau2": 0.05 },
  "profile": {
    "amp_tx":   { "mean": 0, "variance": 0.5, "low": -1, "high": 1 },
    "amp_rx":   { "mean": 0, "variance": 0.5, "low": -1, "high": 1 },
    "phase_tx": { "mean": 0, "variance": 0.5, "low": -20, "high": 20 },
    "phase_rx": { "mean": 0, "variance": 0.5, "low": -20, "high": 20 }
  },
  "sweep": { "variable": "rho_db", "values": [10] },
  "trials": 2,
  "master_seed": 5
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MIMO_RECIP_WORKERS").output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(str::to_string).collect()
}

fn col(name: &str) -> usize {
    CSV_HEADER.iter().position(|h| *h == name).unwrap()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn minimal_sweep_writes_header_and_one_row_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let out = dir.path().join("out.csv");
    let o = run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&out), CSV_HEADER);
    let rows = read_csv(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][col("scheme")], "mrt");
    assert_eq!(rows[1][col("scheme")], "zf");
    assert_eq!(rows[0][col("master_seed")], "5");
    assert_eq!(rows[0][col("trials")], "2");
    assert_eq!(rows[0][col("tau2")], "0.05");
    let raw = std::fs::read_to_string(&out).unwrap();
    assert!(raw.ends_with("\r\n"));
    assert!(!dir.path().join("out.gp").exists());
}

#[test]
fn seed_override_changes_only_monte_carlo_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(run(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--seed", "99"]).status.success());
    let (ra, rb) = (read_csv(&a), read_csv(&b));
    for (x, y) in ra.iter().zip(&rb) {
        for name in ["sinr_analytic_db", "A_t", "A_r", "A_I", "B_I", "rho_db"] {
            assert_eq!(x[col(name)], y[col(name)], "{name}");
        }
        assert_ne!(x[col("sinr_mc_db")], y[col("sinr_mc_db")]);
        assert_eq!(y[col("master_seed")], "99");
    }
}

#[test]
fn plot_flag_writes_gnuplot_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let out = dir.path().join("s.csv");
    assert!(run(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--plot"]).status.success());
    let script = std::fs::read_to_string(dir.path().join("s.gp")).unwrap();
    assert!(script.contains("'s.csv'"));
    assert!(script.contains("set datafile separator ','"));
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = MINIMAL.replace("\"trials\": 2,", "\"trials\": 2,\n  \"bogus\": 1,");
    let cfg = write_config(dir.path(), &unknown);
    let o = run(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cfg.json:11:9:"), "{err}");
    assert!(err.contains("bogus"), "{err}");

    let negative = MINIMAL.replace(
        "\"amp_rx\":   { \"mean\": 0, \"variance\": 0.5",
        "\"amp_rx\":   { \"mean\": 0, \"variance\": -0.5",
    );
    let cfg = write_config(dir.path(), &negative);
    let o = run(&["sweep", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cfg.json:5:"), "{err}");
    assert!(err.contains("profile.amp_rx"), "{err}");

    let o = run(&["sweep", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["figure", "--id", "1"]).status.code(), Some(2));
    assert_eq!(run(&["figure", "--id", "12"]).status.code(), Some(2));
    assert_eq!(run(&["figure"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--level", "slow"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn workers_flag_takes_precedence_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let o = Command::new(BIN)
        .args(["sweep", "--config", &cfg, "--out", dir.path().join("w.csv").to_str().unwrap(), "--workers", "2"])
        .env("MIMO_RECIP_WORKERS", "not-a-number")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(BIN)
        .args(["sweep", "--config", &cfg, "--out", dir.path().join("w.csv").to_str().unwrap()])
        .env("MIMO_RECIP_WORKERS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

fn figure(id: &str, dir: &Path) {
    let o = run(&["figure", "--id", id, "--trials", "2", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn figure_6_analytic_sinr_increases_with_m() {
    let dir = tempfile::tempdir().unwrap();
    figure("6", dir.path());
    assert!(dir.path().join("fig6.gp").exists());
    for curve in ["error_free", "normal", "high"] {
        let rows = read_csv(&dir.path().join(format!("fig6_{curve}.csv")));
        for scheme in ["mrt", "zf"] {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r[col("scheme")] == scheme)
                .map(|r| (f(&r[col("sweep_value")]), f(&r[col("sinr_analytic_db")])))
                .collect();
            let ms: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let want: &[f64] = if scheme == "mrt" {
                &[10.0, 20.0, 50.0, 100.0, 200.0, 500.0]
            } else {
                &[50.0, 100.0, 200.0, 500.0]
            };
            assert_eq!(ms, want, "{curve} {scheme}");
            assert!(pts.windows(2).all(|w| w[1].1 > w[0].1), "{curve} {scheme}");
        }
    }
}

#[test]
fn figure_7_error_free_zf_is_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    figure("7", dir.path());
    let rows = read_csv(&dir.path().join("fig7_error_free.csv"));
    let zf: Vec<_> = rows.iter().filter(|r| r[col("scheme")] == "zf").collect();
    assert_eq!(zf.len(), 9);
    for r in zf {
        let rho_db = f(&r[col("sweep_value")]);
        let want = 10.0 * (10f64.powf(rho_db / 10.0) * 480.0 / 20.0).log10();
        assert!((f(&r[col("sinr_analytic_db")]) - want).abs() < 1e-9, "{rho_db}");
    }
}

#[test]
fn figure_9_ratio_columns_match_limits() {
    let dir = tempfile::tempdir().unwrap();
    figure("9", dir.path());
    let mut r = csv::Reader::from_path(dir.path().join("fig9_ratio.csv")).unwrap();
    let ratio: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(ratio.len(), 22);
    for (curve, tau2) in [("tau2_0", 0.0), ("tau2_0.01", 0.01)] {
        let rows = read_csv(&dir.path().join(format!("fig9_{curve}.csv")));
        for row in rows.iter().filter(|r| r[col("scheme")] == "zf") {
            let v = &row[col("sweep_value")];
            let rr = ratio
                .iter()
                .find(|x| &x[0] == v && f(&x[1]) == tau2)
                .expect("ratio row");
            let (a_t, a_i, b_i) = (f(&row[col("A_t")]), f(&row[col("A_I")]), f(&row[col("B_I")]));
            let x = if tau2 > 0.0 { b_i / a_t } else { a_i };
            let infinite = &rr[6] == "true";
            assert_eq!(infinite, x >= 1.0, "{curve} {v}");
            if !infinite {
                let want = 1.0 / (1.0 - x);
                assert!((f(&rr[4]) - want).abs() / want < 1e-9, "{curve} {v}");
            }
            assert_eq!(&rr[5], if tau2 > 0.0 { "C_I" } else { "C_tilde_I" });
        }
    }
}
