use std::path::PathBuf;
use std::process::{Command, Output};

fn jetinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetinv")).args(args).output().expect("spawn jetinv")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jetinv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lists_every_suite() {
    let o = jetinv(&["suites"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["invariance", "counts", "syzygy", "lowrel", "eikonal", "compat", "forms", "tresse", "frames"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn verify_writes_a_passing_report() {
    let out = scratch("inv.json");
    let o = jetinv(&["verify", "invariance", "--n", "2", "--order", "3", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["failures"], 0);
    assert_eq!(v["config"]["trials"], 5);
}

#[test]
fn bad_config_exits_with_two() {
    let o = jetinv(&["syzygy", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));
    assert_eq!(jetinv(&["lowrel", "--tolerance", "1e-3"]).status.code(), Some(2));
}

#[test]
fn prolonged_jets_keep_their_invariants() {
    let jet = scratch("jet.json");
    let motion = scratch("motion.json");
    let moved = scratch("moved.json");
    std::fs::write(&jet, stdout(&jetinv(&["sample", "--n", "2", "--order", "3", "--seed", "3"]))).unwrap();
    std::fs::write(&motion, stdout(&jetinv(&["motion", "--n", "2", "--seed", "4"]))).unwrap();
    let o = jetinv(&["prolong", "--jet", jet.to_str().unwrap(), "--motion", motion.to_str().unwrap()]);
    assert!(o.status.success());
    std::fs::write(&moved, stdout(&o)).unwrap();
    for id in ["I0", "I1"] {
        let a = stdout(&jetinv(&["eval", "--jet", jet.to_str().unwrap(), "--invariant", id]));
        let b = stdout(&jetinv(&["eval", "--jet", moved.to_str().unwrap(), "--invariant", id]));
        assert_eq!(a, b, "{id}");
    }
    assert_eq!(jetinv(&["eval", "--jet", jet.to_str().unwrap(), "--invariant", "nope"]).status.code(), Some(2));
}

#[test]
fn compat_tool_reports_the_family() {
    let o = jetinv(&["compat", "--n", "3", "--alphas", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(serde_json::from_str::<serde_json::Value>(&stdout(&o)).is_ok());
}
