use std::process::Command;

fn sl4coh(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sl4coh"))
        .args(args)
        .env_remove("SL4COH_CACHE_DIR")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn empty_range_is_an_empty_success() {
    for cmd in ["betti", "predict", "verify"] {
        let (code, _) = sl4coh(&[cmd, "--levels", "20..10"]);
        assert_eq!(code, 0, "{cmd}");
    }
}

#[test]
fn betti_table_and_sidecar() {
    let dir = std::env::temp_dir().join(format!("sl4coh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("betti.json");
    let (code, out) = sl4coh(&["betti", "--levels", "9,11,13", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().map(|l| l.split_whitespace().collect()).collect();
    for (n, r) in [("9", "3"), ("11", "2"), ("13", "1")] {
        assert!(rows.iter().any(|row| row.first() == Some(&n) && row.contains(&r)), "{out}");
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v.to_string().contains("\"rank\":2"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_exit_status() {
    let (ok, _) = sl4coh(&["verify", "--levels", "2..12", "--betti-only"]);
    assert_eq!(ok, 0);
    // a refused characteristic at a level with a reference value is a failure
    let (bad, _) = sl4coh(&["verify", "--levels", "11", "--ring", "zp:5", "--betti-only"]);
    assert_eq!(bad, 1);
}

#[test]
fn predict_lists_composites_separately() {
    let (code, out) = sl4coh(&["predict", "--levels", "50..54"]);
    assert_eq!(code, 0);
    assert!(out.contains("53") && out.contains("17"));
    assert!(out.contains("composite"));
}
