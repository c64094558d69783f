use jetinv_core::harness::{emit_report, run_suite, Kind, Report, Suite, SuiteConfig};
use jetinv_core::scalar::Q;
use jetinv_core::Error;
use serde_json::Value;

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("jetinv-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn invariance_example_has_no_failures() {
    let cfg = SuiteConfig::new(Suite::Invariance, 2).with_order(3).with_trials(50).with_seed(42);
    let r = run_suite(&cfg).unwrap();
    assert_eq!(r.failures, 0);
    assert_eq!(r.max_exact_residual.as_deref(), Some("0"));
}

#[test]
fn compat_example_passes() {
    let cfg = SuiteConfig::new(Suite::Compat, 3)
        .with_alphas(vec![Q::from_integer(0.into()), Q::from_integer(1.into())])
        .with_trials(5);
    let r = run_suite(&cfg).unwrap();
    assert!(r.passed());
    let ode = r.records.iter().find(|x| x.label == "(D+f)^4(1) = 0").unwrap();
    assert!(ode.pass);
}

#[test]
fn zero_trials_is_a_bad_config() {
    let cfg = SuiteConfig::new(Suite::Syzygy, 2).with_trials(0);
    match run_suite(&cfg) {
        Err(Error::BadConfig { field, .. }) => assert_eq!(field, "trials"),
        other => panic!("expected BadConfig, got {other:?}"),
    }
}

#[test]
fn records_are_ordered_and_partitioned() {
    for suite in [Suite::Eikonal, Suite::Frames] {
        let cfg = SuiteConfig::new(suite, 2).with_order(3).with_trials(6);
        let r = run_suite(&cfg).unwrap();
        assert!(r.records.windows(2).all(|w| w[0].case <= w[1].case));
        assert!(r.records.iter().any(|x| x.kind == Kind::Numeric));
        for x in &r.records {
            assert_eq!(x.kind == Kind::Exact, x.tolerance.is_none(), "{}", x.label);
        }
        assert_eq!(r.failures, r.records.iter().filter(|x| !x.pass).count());
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cfg = SuiteConfig::new(Suite::Frames, 3).with_trials(8).with_seed(5);
    let (a, b) = (scratch("a.json"), scratch("b.json"));
    emit_report(&run_suite(&cfg).unwrap(), &a).unwrap();
    emit_report(&run_suite(&cfg).unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let other = run_suite(&cfg.clone().with_seed(6)).unwrap();
    assert_ne!(other.to_canonical_string(), std::fs::read_to_string(&a).unwrap());
}

#[test]
fn emitted_report_round_trips() {
    let cfg = SuiteConfig::new(Suite::Syzygy, 2).with_trials(4);
    let r = run_suite(&cfg).unwrap();
    let path = scratch("syzygy.json");
    emit_report(&r, &path).unwrap();
    let first = std::fs::read(&path).unwrap();
    emit_report(&r, &path).unwrap();
    assert_eq!(first, std::fs::read(&path).unwrap());
    let parsed: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(parsed, r.to_json());
    assert_eq!(parsed["config"]["seed"], 42);
    let keys: Vec<&String> = parsed.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn empty_report_emits_valid_json() {
    let cfg = SuiteConfig::new(Suite::Tresse, 2);
    let path = scratch("empty.json");
    emit_report(&Report::new(&cfg, Vec::new()), &path).unwrap();
    let parsed: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed["records"], Value::Array(Vec::new()));
}

#[test]
fn io_errors_surface() {
    let cfg = SuiteConfig::new(Suite::Tresse, 2);
    let path = std::path::Path::new("/nonexistent-dir/for/report.json");
    let err = emit_report(&Report::new(&cfg, Vec::new()), path).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
}

#[test]
fn every_suite_runs_small() {
    for suite in Suite::ALL {
        let cfg = SuiteConfig::new(suite, 2).with_trials(2).with_order(match suite {
            Suite::Counts => 3,
            _ => suite.default_order(),
        });
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed(), "{suite}: {:?}", r.failure_lines());
        assert!(!r.records.is_empty());
    }
}
