use std::path::Path;
use std::process::{Command, Output};

use rgstep::textfmt::parse_polynomial;

fn rgstep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgstep"))
        .args(args)
        .env("RG_THREADS", "2")
        .output()
        .expect("run rgstep")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn certify_majority_passes_at_the_infimum() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["certify", "--kernel", "majority", "--mu", "1.0", "--eps", "0", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("certificate.json"));
    assert_eq!(r["verdict"], "pass");
    let obj = r["objective"].as_f64().unwrap();
    assert!((obj - 0.25088335).abs() < 1e-6, "{obj}");
}

#[test]
fn certify_interval_reports_enclosures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["certify", "--mode", "interval", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("certificate.json"));
    let lo = r["objective"]["lo"].as_f64().unwrap();
    let hi = r["objective"]["hi"].as_f64().unwrap();
    assert!(lo <= 0.25088336 && hi >= 0.25088334 && hi < 1.0, "[{lo}, {hi}]");
}

#[test]
fn certify_decimation_has_zero_objective() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["certify", "--kernel", "decimation", "--eps", "0", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("certificate.json"));
    assert_eq!(r["objective"].as_f64(), Some(0.0));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(code(&rgstep(&["certify", "--mu", "-1"])), 2);
    assert_eq!(code(&rgstep(&["certify", "--alpha", "1"])), 2);
    assert_eq!(code(&rgstep(&["certify", "--kernel", "median"])), 2);
    assert_eq!(code(&rgstep(&["certify", "--bogus"])), 2);
    assert_eq!(code(&rgstep(&["lro"])), 2);
    assert_eq!(code(&rgstep(&["lro", "--threshold", "--eps", "0"])), 2);
}

#[test]
fn certify_threshold_reports_a_labeled_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["certify", "--threshold", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("certificate.json"));
    let t = &r["threshold"];
    let (eps, fail) = (t["eps"].as_f64().unwrap(), t["eps_fail"].as_f64().unwrap());
    assert!(eps > 0.0 && fail > eps && (fail - eps) <= 1e-6 * fail);
    assert!(t["note"].as_str().unwrap().contains("mu"));

    // just past the threshold the certificate fails
    let above = format!("{}", fail * 1.01);
    assert_eq!(code(&rgstep(&["certify", "--eps", &above])), 1);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "kernel=decimation\nmu=-3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&rgstep(&["certify", "--config", cfg])), 2);
    let out = dir.path().join("o");
    let o = rgstep(&["certify", "--config", cfg, "--mu", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r = json(&out.join("certificate.json"));
    assert_eq!(r["parameters"]["kernel"], "decimation");
    assert_eq!(r["parameters"]["mu"].as_f64(), Some(0.5));
}

#[test]
fn iterate_decimation_converges_in_one_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["iterate", "--kernel", "decimation", "--eps", "0", "--out", out]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&dir.path().join("convergence.csv")).len(), 1);
    let text = std::fs::read_to_string(dir.path().join("hprime.txt")).unwrap();
    let (h, f) = parse_polynomial::<f64>(&text).unwrap();
    let want = 0.5 * 80f64.cosh().ln();
    assert!((h.coefficient(&[], &[-1, 0]) - want).abs() < 1e-12);
    assert!(f.is_some());
}

#[test]
fn iterate_majority_first_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["iterate", "--kernel", "majority", "--gamma", "40", "--mu", "1", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&dir.path().join("convergence.csv"));
    let first: f64 = rows[0][1].parse().unwrap();
    assert!((first - 0.00428454).abs() < 5e-9, "{first}");
    assert_eq!(&rows[0][2], "");
    let r = json(&dir.path().join("iterate.json"));
    assert_eq!(r["converged"], true);
    assert_eq!(r["certificate"], "pass");
    // observed contraction stays below the certified rate
    assert!(r["worst_rate_after_burn_in"].as_f64().unwrap() < r["rate_bound"].as_f64().unwrap());
    let c = std::fs::read_to_string(dir.path().join("cstar.txt")).unwrap();
    let (cstar, none) = parse_polynomial::<f64>(&c).unwrap();
    assert!(none.is_none() && !cstar.is_zero());
}

#[test]
fn iterate_above_certified_range_exits_nonzero() {
    // far above the certified eps for these weights
    let o = rgstep(&["iterate", "--eps", "0.5", "--max-iter", "30"]);
    let c = code(&o);
    assert!(c == 1 || c == 3, "exit {c}");
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn lro_infrared_bound_at_m3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["lro", "--check", "ir", "--m", "3", "--out", out]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("ir.csv"));
    assert_eq!(rows.len(), 5);
    for r in &rows {
        assert_eq!(&r[6], "true");
        let (g, bound): (f64, f64) = (r[5].parse().unwrap(), r[4].parse().unwrap());
        assert!(g <= bound);
    }
}

#[test]
fn lro_intrep_and_gd() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&rgstep(&["lro", "--check", "intrep", "--m", "5", "--out", out])), 0);
    let rows = csv_rows(&dir.path().join("intrep.csv"));
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r[4].parse::<f64>().unwrap() < 1e-8));
    assert_eq!(code(&rgstep(&["lro", "--check", "gd", "--samples", "40", "--out", out])), 0);
    assert_eq!(csv_rows(&dir.path().join("gd.csv")).len(), 40);
    assert_eq!(csv_rows(&dir.path().join("second_order.csv")).len(), 4);
}

#[test]
fn lro_enumeration_cap_exits_two() {
    assert_eq!(code(&rgstep(&["lro", "--check", "ir", "--m", "11"])), 2);
}

#[test]
fn lro_regularizer_table_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["lro", "--regularizer", "--alpha", "1.5", "--m-max", "4096", "--out", out]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&dir.path().join("regularizer.csv"));
    assert_eq!(rows.len(), 9);
    let sums: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let comparisons: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(sums.iter().zip(&comparisons).all(|(s, c)| s <= c));
    assert!(sums.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn lro_threshold_is_labeled_sufficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = rgstep(&["lro", "--threshold", "--eps", "0.1", "--m", "8", "--out", out]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("lro_threshold.json"));
    assert_eq!(r["kind"], "sufficient bound");
    assert!(r["infrared_sum"].as_f64().unwrap() < 1.0);
}

#[test]
fn selfcheck_and_mutation() {
    assert_eq!(code(&rgstep(&["selfcheck"])), 0);
    let o = rgstep(&["selfcheck", "--mutate", "rho"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[FAIL] rho"));
}

#[test]
fn selfcheck_interval_mode() {
    let o = rgstep(&["selfcheck", "--mode", "interval"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("inside interval enclosures at 20/20"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = d.path().to_str().unwrap();
        assert_eq!(code(&rgstep(&["iterate", "--out", out])), 0);
        assert_eq!(code(&rgstep(&["certify", "--mode", "interval", "--out", out])), 0);
        assert_eq!(code(&rgstep(&["lro", "--check", "gd", "--out", out])), 0);
    }
    for name in ["convergence.csv", "hprime.txt", "cstar.txt", "iterate.json", "certificate.json", "gd.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn stdout_carries_artifacts_without_out() {
    let o = rgstep(&["lro", "--check", "ir"]);
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.starts_with("# ir.csv\nk,p,R,E,inv_2e,g,holds\n"), "{s}");
}
