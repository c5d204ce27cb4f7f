use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use serde_json::Value;
use tempfile::TempDir;

use toric_kring::fan::{to_char_pair, Fan, FanData};
use toric_kring_cli::corpus::{self, Expectation};
use toric_kring_cli::{run, Command, Format, JobSpec, EXIT_FAILED, EXIT_INPUT, EXIT_OK};

const BIN: &str = env!("CARGO_BIN_EXE_toric-kring");

fn corpus_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(name)
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn job(path: PathBuf, command: Command) -> JobSpec {
    JobSpec {
        input: path,
        kind: None,
        command,
        max_u_radius: 3,
        format: Format::Json,
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_p2_reports_rank_and_graded_ranks() {
    let p2 = corpus_file("p2.fan.json");
    let (code, out, _) = cli(&["verify", p2.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["rank"], 3);
    assert_eq!(v["report"]["euler_characteristic"], 3);
    assert_eq!(v["report"]["kring_graded"], serde_json::json!([1, 1, 1]));
    assert_eq!(
        v["report"]["cohomology_graded"],
        serde_json::json!([1, 1, 1])
    );
    assert_eq!(v["report"]["torsion"], serde_json::json!([]));
}

#[test]
fn halfplane_fails_validation_with_a_wall_witness() {
    let path = corpus_file("halfplane.fan.json");
    let (code, out, _) = cli(&["validate", path.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code, 1);
    assert!(out.contains("wall {0} lies in 1 maximal cone"), "{out}");
}

#[test]
fn square_kring_has_rank_four() {
    let path = corpus_file("square-quasitoric.cp.json");
    let (code, out, _) = cli(&["kring", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rank"], 4);
    assert_eq!(v["input_kind"], "charpair");
    assert!(
        v["presentation"]["basis_monomials"]
            .as_array()
            .unwrap()
            .len()
            > 4
    );
}

#[test]
fn every_positive_example_verifies_and_every_negative_is_rejected() {
    for e in corpus::EXAMPLES {
        let path = corpus_file(e.file);
        match e.expectation {
            Expectation::Verify {
                euler_characteristic,
            } => {
                let out = run(&job(path, Command::Verify));
                assert_eq!(out.status, EXIT_OK, "{}: {}", e.name, out.stdout);
                let v: Value = serde_json::from_str(&out.stdout).unwrap();
                assert_eq!(v["report"]["rank"], euler_characteristic);
            }
            Expectation::Reject { witness_class } => {
                let out = run(&job(path.clone(), Command::Validate));
                assert_eq!(out.status, EXIT_FAILED, "{}", e.name);
                let v: Value = serde_json::from_str(&out.stdout).unwrap();
                let report = v.get("fan").or_else(|| v.get("char_pair")).unwrap();
                let kinds: Vec<&str> = report["witnesses"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .filter_map(|w| w["kind"].as_str())
                    .collect();
                let fan_class = match witness_class {
                    "incomplete" => Some("wall"),
                    "singular" => Some("singular_cone"),
                    _ => None,
                };
                assert!(
                    kinds.contains(&fan_class.unwrap_or(witness_class)),
                    "{}: {kinds:?}",
                    e.name
                );
                // later stages refuse it too
                let out = run(&job(path, Command::Verify));
                assert_eq!(out.status, EXIT_FAILED);
                let v: Value = serde_json::from_str(&out.stdout).unwrap();
                assert_eq!(v["stage"], "validate");
            }
        }
    }
}

#[test]
fn every_subcommand_succeeds_on_a_smooth_fan() {
    let path = corpus_file("hirzebruch2.fan.json");
    for c in [
        Command::Validate,
        Command::Kring,
        Command::Cohomology,
        Command::GrCompare,
        Command::Basis,
        Command::Verify,
    ] {
        for format in [Format::Json, Format::Text] {
            let out = run(&JobSpec {
                format,
                ..job(path.clone(), c)
            });
            assert_eq!(out.status, EXIT_OK, "{c:?}: {}", out.stdout);
            assert!(!out.stdout.is_empty());
        }
    }
}

#[test]
fn json_output_is_deterministic_with_sorted_keys() {
    let path = corpus_file("bl2p2.fan.json");
    let a = cli(&["verify", path.to_str().unwrap()]).1;
    let b = cli(&["verify", path.to_str().unwrap()]).1;
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let top: Vec<&str> = a
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted_top = top.clone();
    sorted_top.sort();
    assert_eq!(top, sorted_top);
}

#[test]
fn verify_on_a_fan_equals_verify_on_its_char_pair() {
    let dir = TempDir::new().unwrap();
    for name in ["p3", "hirzebruch3", "bl3p2"] {
        let e = corpus::find(name).unwrap();
        let data: FanData = serde_json::from_str(e.source).unwrap();
        let cp = to_char_pair(&Fan::from_data(&data).unwrap()).unwrap();
        let cp_path = write(
            &dir,
            &format!("{name}.cp.json"),
            &serde_json::to_string(&cp.to_data()).unwrap(),
        );
        let via_fan: Value =
            serde_json::from_str(&run(&job(corpus_file(e.file), Command::Verify)).stdout).unwrap();
        let via_cp: Value =
            serde_json::from_str(&run(&job(cp_path.into(), Command::Verify)).stdout).unwrap();
        assert_eq!(via_fan["report"], via_cp["report"], "{name}");
    }
}

#[test]
fn schema_errors_exit_two_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (
            "a.fan.json",
            r#"{"dim":2,"rays":[[1,0],[0,1]],"max_cones":[[0,1]],"cones":[]}"#,
            "cones",
        ),
        ("b.fan.json", r#"{"dim":2,"max_cones":[[0,1]]}"#, "rays"),
        (
            "c.fan.json",
            r#"{"dim":2,"rays":[[1,0],[0,1]],"max_cones":[[0,5]]}"#,
            "max_cones[0]",
        ),
        (
            "d.fan.json",
            r#"{"dim":2,"rays":[[1,0],[0,1,1]],"max_cones":[[0,1]]}"#,
            "rays[1]",
        ),
        (
            "e.fan.json",
            r#"{"dim":2,"rays":[[1,0],["x",1]],"max_cones":[[0,1]]}"#,
            "rays[1][0]",
        ),
        (
            "f.cp.json",
            r#"{"dim":2,"facets":2,"maximal_faces":[[0,1]],"lambda":[[1,0]]}"#,
            "lambda",
        ),
        (
            "g.cp.json",
            r#"{"dim":2,"facets":3,"maximal_faces":[[0,1],[1,3]],"lambda":[[1,0],[0,1],[1,1]]}"#,
            "maximal_faces[1]",
        ),
        ("h.fan.json", r#"{"dim":2,"rays":"#, "malformed JSON"),
    ];
    for (name, text, needle) in cases {
        let path = write(&dir, name, text);
        let (code, _, err) = cli(&["validate", &path]);
        assert_eq!(code, 2, "{name}");
        assert!(err.contains(needle), "{name}: {err}");
    }
    let (code, _, err) = cli(&["verify", "/nonexistent/x.fan.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn kind_is_detected_from_keys_or_given_explicitly() {
    let dir = TempDir::new().unwrap();
    let fan = write(&dir, "plain.json", corpus::find("p1").unwrap().source);
    let (code, out, _) = cli(&["validate", &fan]);
    assert_eq!(code, 0);
    assert!(out.contains("\"input_kind\": \"fan\""));

    let cp = write(
        &dir,
        "other.json",
        corpus::find("square-quasitoric").unwrap().source,
    );
    let (code, out, _) = cli(&["validate", &cp, "--kind", "charpair"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"input_kind\": \"charpair\""));

    let odd = write(&dir, "odd.json", r#"{"dim":1}"#);
    let (code, _, err) = cli(&["validate", &odd]);
    assert_eq!(code, EXIT_INPUT as i32);
    assert!(err.contains("--kind"));
}

#[test]
fn usage_errors_exit_two() {
    let p1 = corpus_file("p1.fan.json");
    assert_eq!(
        cli(&["verify", p1.to_str().unwrap(), "--max-u-radius", "0"]).0,
        2
    );
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(
        cli(&["verify", p1.to_str().unwrap(), "--format", "xml"]).0,
        2
    );
}

#[test]
fn examples_lists_and_writes_the_corpus() {
    let (code, out, _) = cli(&["examples"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let entries = v.as_array().unwrap();
    assert!(entries.len() >= 14);
    assert_eq!(
        entries.iter().filter(|e| e["expect"] == "reject").count(),
        3
    );

    let dir = TempDir::new().unwrap();
    let target = dir.path().join("examples");
    let (code, _, _) = cli(&[
        "examples",
        "--write",
        target.to_str().unwrap(),
        "--format",
        "text",
    ]);
    assert_eq!(code, 0);
    for e in corpus::EXAMPLES {
        assert_eq!(fs::read_to_string(target.join(e.file)).unwrap(), e.source);
    }
    let (code, _, _) = cli(&["verify", target.join("p2.fan.json").to_str().unwrap()]);
    assert_eq!(code, 0);
}
