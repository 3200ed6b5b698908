use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

const E1: &str = r#"{"kind":"entire","base":{"terms":[{"alpha":[1,0],"poly":[[1,0]]}]},"validity":{"kind":"plane"}}"#;
const Z: &str = r#"{"terms":[{"alpha":[0,0],"poly":[[0,0],[1,0]]}]}"#;
const F3: &str = r#"{"terms":[{"alpha":[0.7,0.1],"poly":[[1,0]]},{"alpha":[-0.5,0.5],"poly":[[0,1],[1,0]]},{"alpha":[-0.2,-0.8],"poly":[[0.5,0.5]]}]}"#;

fn exptype(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exptype"))
        .args(args)
        .env_remove("EXPTYPE_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn result(out: &Output) -> Value {
    let doc: Value = serde_json::from_str(&stdout(out)).unwrap();
    assert!(doc["manifest"]["version"].is_string());
    doc["result"].clone()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("exptype-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn apply_shift_operator_to_z() {
    let r = result(&exptype(&["apply", "--phi", E1, "--f", Z]));
    let expect: Value = serde_json::from_str(r#"{"terms":[{"alpha":[0.0,0.0],"poly":[[1.0,0.0],[1.0,0.0]]}]}"#).unwrap();
    assert_eq!(r, expect);
}

#[test]
fn density_of_naturals_from_file() {
    let path = scratch("naturals.txt");
    let text: String = (1..=1000).map(|n| format!("{n}\n")).collect();
    std::fs::write(&path, text).unwrap();
    let r = result(&exptype(&["density", "--points", path.to_str().unwrap()]));
    assert_eq!(r["ldens_proxy"].as_f64(), Some(1.0));
    assert_eq!(r["exact_limit"].as_f64(), Some(1.0));
}

#[test]
fn csv_outputs_start_with_manifest_and_header() {
    let s = stdout(&exptype(&["eval", "--f", Z, "--at", "[[1,2],[0.5,0]]"]));
    let lines: Vec<&str> = s.lines().collect();
    assert!(lines[0].starts_with("# manifest: {"));
    let manifest: Value = serde_json::from_str(lines[0].trim_start_matches("# manifest: ")).unwrap();
    assert_eq!(manifest["command"], "eval");
    assert_eq!(lines[1], "z_re,z_im,value_re,value_im");
    assert_eq!(&lines[2..], ["1.0,2.0,1.0,2.0", "0.5,0.0,0.5,0.0"]);
}

#[test]
fn polya_reconstruction_matches_evaluation() {
    let s = stdout(&exptype(&["polya", "--f", F3, "--at", "[[0,0],[1,-1],[-1.5,0.5]]"]));
    for row in s.lines().skip(2) {
        let err: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err < 1e-8, "{row}");
    }
}

#[test]
fn cid_of_three_exponentials() {
    let r = result(&exptype(&["cid", "--f", F3]));
    assert!(r["hausdorff_to_exact"].as_f64().unwrap() <= 0.05);
    let exact = result(&exptype(&["cid", "--f", F3, "--method", "exact"]));
    assert!(exact["hausdorff_to_exact"].as_f64().unwrap() < 1e-2);
}

#[test]
fn levelset_of_identity_is_unit_circle() {
    let phi = r#"{"kind":"entire","base":{"terms":[{"alpha":[0,0],"poly":[[0,0],[1,0]]}]},"validity":{"kind":"plane"}}"#;
    let s = stdout(&exptype(&["levelset", "--phi", phi, "--resolution", "64"]));
    let tau: f64 = s.lines().find_map(|l| l.strip_prefix("# tau: ")).unwrap().parse().unwrap();
    assert!((tau - 1.0).abs() < 1e-6);
}

#[test]
fn orbit_reports_target_distances() {
    let s = stdout(&exptype(&["orbit", "--phi", E1, "--f", Z, "--n-max", "3", "--targets", &format!("[{Z}]")]));
    let header = s.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "n,max_exp2,dist_0");
    // z + n is at distance n from z.
    let row3 = s.lines().last().unwrap();
    let d: f64 = row3.split(',').nth(2).unwrap().parse().unwrap();
    assert!((d - 3.0).abs() < 1e-12, "{row3}");
}

#[test]
fn probe_on_eigen_seed() {
    let r = result(&exptype(&["probe", "--phi", E1, "--lambda", "0.3,0.2", "--n-max", "20"]));
    assert_eq!(r["mode"], "normalized");
    assert_eq!(r["sign_change_density"].as_f64(), Some(0.0));
}

#[test]
fn verify_single_criterion_passes() {
    let out = exptype(&["verify", "--suite", "1,12"]);
    let s = stdout(&out);
    assert!(s.starts_with("# manifest: "));
    assert_eq!(s.lines().filter(|l| l.contains("PASS")).count(), 2);
    assert!(s.contains("2/2 criteria passed"));
}

#[test]
fn malformed_input_exits_2() {
    let out = exptype(&["apply", "--phi", r#"{"kind":"entire"}"#, "--f", Z]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `base`"));
    let out = exptype(&["verify", "--suite", "99"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_2_with_module_code() {
    let out = exptype(&["borel", "--f", Z, "--at", "[[0,0]]"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("borel_polya.near_pole"));
}

#[test]
fn numeric_failure_exits_3() {
    // (2e₁)^n e₁₀ overflows a double long before n = 2000.
    let phi = r#"{"kind":"entire","base":{"terms":[{"alpha":[1,0],"poly":[[2,0]]}]},"validity":{"kind":"plane"}}"#;
    let f = r#"{"terms":[{"alpha":[10,0],"poly":[[1,0]]}]}"#;
    let out = exptype(&["apply", "--phi", phi, "--f", f, "--power", "2000"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn outputs_are_byte_identical() {
    let runs: [&[&str]; 3] = [
        &["indicator", "--f", F3, "--thetas", "64"],
        &["cid", "--f", F3],
        &["orbit", "--phi", E1, "--f", F3, "--n-max", "30"],
    ];
    for args in runs {
        let a = scratch("a.out");
        let b = scratch("b.out");
        let mut first = args.to_vec();
        first.extend(["--jobs", "1", "--out", a.to_str().unwrap()]);
        let mut second = args.to_vec();
        second.extend(["--jobs", "4", "--out", b.to_str().unwrap()]);
        assert!(exptype(&first).status.success());
        assert!(exptype(&second).status.success());
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn jobs_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_exptype"))
        .args(["eval", "--f", Z, "--at", "[[0,0]]"])
        .env("EXPTYPE_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--jobs"));
}
