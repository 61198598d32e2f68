use std::fs;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_growthlab");

const PF: &str = "group F3: free(3)\naut phi on F3:\n  a -> ab\n  b -> bc\n  c -> cab\n\
experiment pf: aut=phi elements={a, ab} n_max=12 metric=word\n\
experiment short: aut=phi elements={a} n_max=3\n";

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn growthlab(args: &[&str], env_cap: Option<&str>) -> std::process::Output {
    let mut c = Command::new(BIN);
    c.args(args).env_remove("GROWTHLAB_CAP");
    if let Some(v) = env_cap {
        c.env("GROWTHLAB_CAP", v);
    }
    c.output().unwrap()
}

#[test]
fn success_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "pf.gspec", PF);
    let out_path = dir.path().join("r.csv").display().to_string();
    let o = growthlab(&["run", &spec, "--experiment", "short", "--format", "csv", "--out", &out_path], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(&out_path).unwrap(),
        "element,n,word_length,conj_length\na,0,1,1\na,1,2,2\na,2,4,4\na,3,9,9\n"
    );
    let o = growthlab(&["run", &spec, "--experiment", "short"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["environment"]["cap"], "100000000");
    assert_eq!(v["environment"]["tau_radius"], "4");
}

#[test]
fn parse_error_exit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "bad.gspec", "group F2: free(2)\naut phi on F2:\n  a -> aq\n  b -> b\n");
    let o = growthlab(&["run", &spec], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":3:9:"), "{err}");
}

#[test]
fn precondition_exits() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "pf.gspec", PF);
    // two experiments and none chosen
    assert_eq!(growthlab(&["run", &spec], None).status.code(), Some(3));
    assert_eq!(growthlab(&["run", &spec, "--experiment", "nope"], None).status.code(), Some(3));
    assert_eq!(growthlab(&["run", &spec, "--experiment", "pf"], Some("many")).status.code(), Some(3));
}

#[test]
fn cap_exit_writes_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "pf.gspec", PF);
    let o = growthlab(&["run", &spec, "--experiment", "pf", "--cap", "50"], None);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "capped");
    let a = &v["elements"][0];
    assert_eq!(a["complete"], false);
    // 1, 2, 4, 9, 21, 49 fit under 50 letters; 114 does not
    assert_eq!(a["word_length"]["values"].as_array().unwrap().len(), 6);
    assert!(a["error"].as_str().unwrap().contains("cap"));
}

#[test]
fn cap_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(&dir, "pf.gspec", PF);
    let args = ["run", &spec, "--experiment", "pf"];
    assert_eq!(growthlab(&args, Some("50")).status.code(), Some(4));
    let mut with_flag = args.to_vec();
    with_flag.extend(["--cap", "100000"]);
    let o = growthlab(&with_flag, Some("50"));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["environment"]["cap"], "100000");
}
