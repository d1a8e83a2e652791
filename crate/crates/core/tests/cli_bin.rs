use std::process::Command;

fn knead(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_knead")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn entropy_json_record() {
    let (code, out, _) = knead(&["entropy", "3/7", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((v["entropy_lo"].as_f64().unwrap() - golden).abs() < 1e-11);
    assert_eq!(v["certificate"], "root");
}

#[test]
fn scan_csv_is_sorted_and_complete() {
    let (code, out, _) = knead(&["scan", "--from", "0", "--to", "1/2", "--depth", "5", "--jobs", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("theta_num,theta_den,h_lo,h_hi"));
    let rows: Vec<(f64, f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let theta = f[0].parse::<f64>().unwrap() / f[1].parse::<f64>().unwrap();
            (theta, f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 17);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(rows.iter().all(|r| r.1 <= r.2));
    assert!((rows[16].2 - std::f64::consts::LN_2).abs() < 1e-11);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_knead"))
        .args(["entropy", "1/2", "--json"])
        .env("KNEAD_PRECISION_BITS", "256")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_knead"))
        .args(["entropy", "1/2"])
        .env("KNEAD_PRECISION_BITS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_statuses() {
    assert_eq!(knead(&["member", "1/3"]).0, 0);
    assert_eq!(knead(&["member", "x"]).0, 2);
    assert_eq!(knead(&["scan", "--from", "1/2", "--to", "0"]).0, 2);
    assert_eq!(knead(&["scan", "--depth", "41"]).0, 4);
    let (code, _, err) = knead(&["holder", "11/30", "--jmin", "8", "--jmax", "9", "--samples", "1"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn dimension_and_feigenbaum_records() {
    let (code, out, _) = knead(&["dimension", "3/7"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let expect = ((1.0 + 5f64.sqrt()) / 2.0).log2();
    assert!((v["dimension_lo"].as_f64().unwrap() - expect).abs() < 1e-9);
    let (code, out, _) = knead(&["feigenbaum", "--nmax", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}
