//! Acceptance criterion 9 (byte-identical JSON across repeated runs) and the
//! command-line surface: exit codes, row counts, and report shapes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depthzero"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_9_deterministic_json() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["--format", "json", "classes", "2", "3"],
        vec!["--format", "json", "chartable", "2", "3"],
        vec!["--format", "json", "dl", "--N", "2", "--q", "3", "--blocks", "2:0"],
        vec!["--format", "json", "match", "--N", "2", "--q", "3", "--blocks", "2:1"],
        vec!["--format", "json", "match", "--N", "2", "--q", "3", "--blocks", "1:0,1:1"],
        vec!["--format", "json", "frobcheck", "--N", "2", "--q", "2", "--blocks", "2:1"],
        vec![
            "--format", "json", "theta0", "--N", "2", "--q", "2", "--blocks", "2:1",
            "--element", "0,1;1,1",
        ],
    ];
    for args in &cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "outputs differ for {args:?}");
        assert!(!a.stdout.is_empty());
        // the payload is one line of valid JSON
        let text = String::from_utf8(a.stdout.clone()).unwrap();
        serde_json::from_str::<serde_json::Value>(text.trim()).unwrap();
    }
    println!("criterion 9: PASS — byte-identical JSON across repeated runs for {} commands", cases.len());
}

#[test]
fn exit_codes() {
    // 0: verified
    let ok = run(&["--format", "json", "match", "--N", "2", "--q", "3", "--blocks", "2:1"]);
    assert_eq!(ok.status.code(), Some(0));
    // 2: precondition failure (non-regular exponent)
    let bad = run(&["match", "--N", "2", "--q", "3", "--blocks", "2:4"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not regular"));
    // 2: usage error from the parser
    let usage = run(&["match", "--N", "2"]);
    assert_eq!(usage.status.code(), Some(2));
    // 2: malformed blocks
    let blocks = run(&["match", "--N", "2", "--q", "3", "--blocks", "oops"]);
    assert_eq!(blocks.status.code(), Some(2));
}

#[test]
fn classes_row_counts() {
    for (n, q, rows) in [(2u32, 2u64, 3usize), (1, 5, 4), (2, 3, 8)] {
        let out = run(&["--format", "json", "classes", &n.to_string(), &q.to_string()]);
        assert!(out.status.success());
        let v: serde_json::Value =
            serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), rows, "classes {n} {q}");
    }
}

#[test]
fn chartable_shape_and_orthogonality_flag() {
    let out = run(&["--format", "json", "chartable", "3", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["orthogonality"], "pass");
    let degrees: Vec<i64> = v["degrees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.as_i64().unwrap())
        .collect();
    let sum: i64 = degrees.iter().map(|d| d * d).sum();
    assert_eq!(sum, 168);
    // 2 2 gives the three degrees 1, 1, 2
    let out = run(&["--format", "json", "chartable", "2", "2"]);
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["degrees"], serde_json::json!([1, 1, 2]));
}

#[test]
fn theta0_reports_carry_the_centre_warning() {
    let out = run(&[
        "--format", "json", "theta0", "--N", "2", "--q", "3", "--blocks", "2:1",
        "--element", "0,2;1,0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    assert_eq!(v["fixed_vertices"], 1);
    assert_eq!(v["fixed_edges"], 0);
    assert!(v["warning"].as_str().unwrap().contains("anisotropic"));
    // pretty output prints the banner
    let pretty = run(&[
        "theta0", "--N", "2", "--q", "3", "--blocks", "2:1", "--element", "0,2;1,0",
    ]);
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("warning:"));
}

#[test]
fn disk_cache_roundtrip() {
    let dir = std::env::temp_dir().join(format!("dz-cache-{}", std::process::id()));
    let args = |d: &str| {
        vec![
            "--format".to_string(),
            "json".to_string(),
            "--cache-dir".to_string(),
            d.to_string(),
            "chartable".to_string(),
            "2".to_string(),
            "5".to_string(),
        ]
    };
    let d = dir.to_string_lossy().to_string();
    let first = Command::new(env!("CARGO_BIN_EXE_depthzero"))
        .args(args(&d))
        .output()
        .unwrap();
    assert!(first.status.success());
    assert!(dir.join("chartable-v1-2-5.json").exists());
    let second = Command::new(env!("CARGO_BIN_EXE_depthzero"))
        .args(args(&d))
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
    // a corrupted cache entry is rejected, not silently trusted
    std::fs::write(dir.join("chartable-v1-2-5.json"), "{\"version\":1,\"n\":2,\"q\":5,\"exponent\":120,\"irreducibles\":[]}").unwrap();
    let third = Command::new(env!("CARGO_BIN_EXE_depthzero"))
        .args(args(&d))
        .output()
        .unwrap();
    assert_eq!(third.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn theta0_accepts_laurent_matrix_files() {
    // the same residue element given as a truncated Laurent matrix must
    // produce the same report as the inline form
    let dir = std::env::temp_dir();
    let path = dir.join(format!("dz-element-{}.json", std::process::id()));
    // [[0, 2], [1, 0]] over F_3, each entry known mod π^8
    let matrix = serde_json::json!([
        [
            {"val": 0, "coeffs": [], "prec": 8},
            {"val": 0, "coeffs": [2], "prec": 8}
        ],
        [
            {"val": 0, "coeffs": [1], "prec": 8},
            {"val": 0, "coeffs": [], "prec": 8}
        ]
    ]);
    std::fs::write(&path, serde_json::to_string(&matrix).unwrap()).unwrap();
    let from_file = run(&[
        "--format", "json", "theta0", "--N", "2", "--q", "3", "--blocks", "2:1",
        "--element-json", path.to_str().unwrap(),
    ]);
    assert!(
        from_file.status.success(),
        "{}",
        String::from_utf8_lossy(&from_file.stderr)
    );
    let inline = run(&[
        "--format", "json", "theta0", "--N", "2", "--q", "3", "--blocks", "2:1",
        "--element", "0,2;1,0",
    ]);
    assert_eq!(from_file.stdout, inline.stdout);
    // an element truncated below what the search needs fails cleanly
    let vague = serde_json::json!([
        [
            {"val": 0, "coeffs": [1], "prec": 1},
            {"val": 0, "coeffs": [], "prec": 1}
        ],
        [
            {"val": 0, "coeffs": [], "prec": 1},
            {"val": 0, "coeffs": [1], "prec": 1}
        ]
    ]);
    std::fs::write(&path, serde_json::to_string(&vague).unwrap()).unwrap();
    let out = run(&[
        "theta0", "--N", "2", "--q", "3", "--blocks", "2:1",
        "--element-json", path.to_str().unwrap(), "--radius", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
    let _ = std::fs::remove_file(&path);
}

#[test]
fn csv_flattens_class_labels() {
    let out = run(&["--format", "csv", "classes", "2", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,centralizer,size"));
    // labels are "f-coeffs:partition" strings
    assert!(text.contains("1,1:2,2,3"));
    assert!(text.contains("1,1,1:1,3,2"));
}
