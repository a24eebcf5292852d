use std::process::Command;

fn qslab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qslab")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn enumerate_prints_csv_and_exact_mean() {
    let (code, stdout, _) = qslab(&["enumerate", "--n", "3", "--seed", "5"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines[0].starts_with('#') && lines[0].contains("\"seed\":5"));
    assert_eq!(&lines[1..], ["n,comparisons,count", "3,2,2", "3,3,4", "3,exact_mean,8/3"]);
}

#[test]
fn formulas_at_zero_is_json() {
    let (code, stdout, _) = qslab(&["formulas", "--n", "0"]);
    assert_eq!(code, 0);
    let row: serde_json::Value = serde_json::from_str(stdout.lines().nth(1).unwrap()).unwrap();
    assert!((row["sigma_sq"].as_f64().unwrap() - 0.420_263_7).abs() < 1e-7);
    assert_eq!(row["mu"].as_f64().unwrap(), 0.0);
}

#[test]
fn usage_errors_exit_nonzero() {
    let (code, _, stderr) = qslab(&["enumerate", "--n", "12"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("1 <= n <= 10"));
    let (code, _, _) = qslab(&["clt", "--n", "100", "--trials", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = qslab(&["clt", "--n", "100", "--delta=-1"]);
    assert_eq!(code, 2);
}

#[test]
fn coupling_audit_writes_jsonl_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let args = |p: &std::path::Path| {
        vec![
            "coupling-audit".to_string(),
            "--n".into(),
            "200".into(),
            "--trials".into(),
            "30".into(),
            "--delta".into(),
            "1e-3".into(),
            "--seed".into(),
            "17".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &std::path::Path, workers: &str| {
        let mut v = args(p);
        v.extend(["--workers".to_string(), workers.to_string()]);
        let v: Vec<&str> = v.iter().map(String::as_str).collect();
        qslab(&v)
    };
    let (code, summary, _) = run(&a, "1");
    assert_eq!(code, 0);
    let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["config"]["seed"], 17);
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert_eq!(run(&b, "3").0, 0);

    let text_a = std::fs::read_to_string(&a).unwrap();
    let text_b = std::fs::read_to_string(&b).unwrap();
    let body = |t: &str| t.lines().skip(1).map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(body(&text_a), body(&text_b));
    let header: serde_json::Value = serde_json::from_str(text_a.lines().next().unwrap()).unwrap();
    assert_eq!(header["header"]["seed"], 17);
    assert_eq!(text_a.lines().count(), 31);
    let rec: serde_json::Value = serde_json::from_str(text_a.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rec["n"], 200);
    assert!(rec["residual_max"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn small_clt_run_reports_checks() {
    let (code, stdout, _) = qslab(&["clt", "--n", "50,200", "--trials", "300", "--seed", "2"]);
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "ks_strictly_decreasing_violations"));
    // Exit status mirrors the checks.
    let all = checks.iter().all(|c| c["pass"] == true);
    assert_eq!(code == 0, all);
    for c in checks {
        let v = c["value"].as_f64().unwrap();
        let lo = c["lower"].as_f64().unwrap_or(f64::NEG_INFINITY);
        let hi = c["upper"].as_f64().unwrap_or(f64::INFINITY);
        assert_eq!(c["pass"].as_bool().unwrap(), v >= lo && v <= hi);
    }
}

#[test]
fn csv_projection() {
    let (code, stdout, _) = qslab(&["formulas", "--n", "2,3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[1], "clt_scale,l3_prediction,mu,n,sigma,sigma_sq");
    assert_eq!(lines.len(), 4);
}
