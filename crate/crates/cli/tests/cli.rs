use norm1_cli::schema;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_norm1"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn norm1")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden").join(name);
    std::fs::read_to_string(path).expect("golden file")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("norm1-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn qz_kernels_markdown_matches_golden() {
    let out = run(&["qz-kernels", "--p", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), golden("qz_kernels_p3.md"));
}

#[test]
fn jg_kernels_markdown_matches_goldens() {
    for (stab, name) in [("1", "jg_kernels_p3_stab1.md"), ("a", "jg_kernels_p3_staba.md")] {
        let out = run(&["jg-kernels", "--p", "3", "--stabilizer", stab]);
        assert!(out.status.success());
        assert_eq!(stdout_of(&out), golden(name), "stabilizer {stab}");
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let a = run(&["qz-kernels", "--p", "3", "--format", "json"]);
    let b = run(&["qz-kernels", "--p", "3", "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_outputs_validate_against_shipped_schemas() {
    let cases: &[(&[&str], &str)] = &[
        (&["info", "--p", "3"], schema::INFO),
        (&["qz-kernels", "--p", "3"], schema::KERNEL_TABLE),
        (&["jg-kernels", "--p", "3", "--stabilizer", "a"], schema::KERNEL_TABLE),
        (
            &["cohomology", "--p", "3", "--subgroup", "Z", "--coeff", "Z", "--degree", "2"],
            schema::COHOMOLOGY,
        ),
        (
            &["sha", "--p", "3", "--stabilizer", "1", "--places", "K0"],
            schema::SHA_REPORT,
        ),
        (&["sweep", "--p", "3"], schema::SWEEP),
    ];
    for (args, sch) in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let value: serde_json::Value =
            serde_json::from_str(&stdout_of(&out)).expect("json output");
        schema::validate_str(sch, &value).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn selftest_json_matches_schema() {
    // shape check on the serialization path without rerunning the suite
    let fake = serde_json::json!({
        "level": "quick",
        "pass": true,
        "results": [{"name": "x", "pass": true, "seconds": 0.5, "detail": ""}],
    });
    schema::validate_str(schema::SELFTEST, &fake).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["jg-kernels", "--p", "3", "--stabilizer", "b"],
        vec!["jg-kernels", "--p", "3", "--engine", "fast"],
        vec!["cohomology", "--p", "3", "--subgroup", "Q7", "--coeff", "Z", "--degree", "2"],
        vec!["cohomology", "--p", "3", "--subgroup", "Z", "--coeff", "W", "--degree", "2"],
        vec!["cohomology", "--p", "3", "--subgroup", "Z", "--coeff", "Z", "--degree", "9"],
        vec!["info", "--p", "4"],
        vec!["qz-kernels", "--format", "yaml"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn budget_errors_exit_two_and_name_the_cap() {
    let out = bin()
        .args(["cohomology", "--p", "3", "--subgroup", "G", "--coeff", "J", "--degree", "3"])
        .env("NORM1_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("budget cap 10"), "stderr: {err}");
}

#[test]
fn generator_lists_reduce_to_classes() {
    let out = run(&[
        "sha", "--p", "3", "--stabilizer", "1", "--places", "gens:0,1,0/0,0,1;K0",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("ramified = [K3, K0]"), "{text}");
    assert!(text.contains("case 1-I"), "{text}");
}

#[test]
fn cache_hit_reproduces_output() {
    let dir = tmpdir("cache");
    let args = [
        "sha", "--p", "3", "--stabilizer", "a", "--places", "K0",
        "--cache", dir.to_str().unwrap(),
    ];
    let first = run(&args);
    assert!(first.status.success());
    let entries = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(entries, 1);
    let second = run(&args);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn dump_flags_write_debug_artifacts() {
    let dir = tmpdir("dumps");
    let out = bin()
        .args([
            "cohomology", "--p", "3", "--subgroup", "K0", "--coeff", "Z", "--degree", "2",
            "--dump-matrices", "--dump-lattices", "--dump-cocycles",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let matrices: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("norm1-matrices.json")).unwrap())
            .unwrap();
    for key in ["d_in", "d_out"] {
        let m = &matrices[key];
        assert!(m["rows"].is_u64() && m["cols"].is_u64() && m["entries"].is_array(), "{key}");
    }
    let lattice: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("norm1-lattice.json")).unwrap())
            .unwrap();
    assert!(lattice["rank"].is_u64());
    assert!(lattice["generators"].is_object());
    let cocycles: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("norm1-cocycles.json")).unwrap())
            .unwrap();
    assert_eq!(cocycles["degree"], 2);
    assert!(cocycles["table"].is_array());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unramified_gen_a_scenario_matches_published_verdict() {
    let out = run(&["sha", "--p", "3", "--stabilizer", "a", "--places", "", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["sha"]["invariants"], serde_json::json!([3]));
    assert_eq!(v["A"]["invariants"], serde_json::json!([]));
    assert_eq!(v["tamagawa"], 1);
    assert_eq!(v["case"], "2-II");
}
