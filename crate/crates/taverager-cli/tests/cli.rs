//! End-to-end tests of the binary: exit codes, printed reports, trace files
//! and diagrams, and byte-determinism of the output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_taverager"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn fig1_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "fig1.json",
        r#"{
            "preset": { "family": "A2" },
            "window": { "lo": -1, "hi": 2 },
            "t_structures": [
                { "name": "ts1", "generators": ["M[dv=1,1]@d0"], "sigma_stable": true },
                { "name": "ts2", "generators": ["M[dv=0,1]@d0"], "sigma_stable": true },
                { "name": "ts3", "generators": ["M[dv=1,0]@d0"], "sigma_stable": true }
            ]
        }"#,
    )
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process was signaled")
}

#[test]
fn validate_reports_three_validated_structures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("Validated").count(), 3);
}

#[test]
fn validate_rejects_false_closure_claim() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{
            "preset": { "family": "A2" },
            "window": { "lo": -1, "hi": 2 },
            "t_structures": [
                { "name": "bad", "generators": ["M[dv=1,0]@d0"], "closed": true }
            ]
        }"#,
    );
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("witness"), "{}", stdout(&out));
}

#[test]
fn schema_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "nopreset.json", r#"{ "window": { "lo": 0, "hi": 1 } }"#);
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
}

#[test]
fn naive_truncation_certifies_non_termination() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out = bin()
        .args(["truncate", "--naive", "--config"])
        .arg(&cfg)
        .arg("M[dv=1,0]@d0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).contains("certified non-terminating"));
}

#[test]
fn refined_truncation_trace_has_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out = bin()
        .args(["truncate", "--config"])
        .arg(&cfg)
        .arg("M[dv=1,0]@d0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("0; phase=0; x="));
    assert!(text.contains("waste=M[dv=0,1]@d0"));
    assert!(text.contains("status: terminated at step 2"));
}

#[test]
fn tight_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out = bin()
        .args(["truncate", "--naive", "--budget", "2", "--config"])
        .arg(&cfg)
        .arg("M[dv=1,0]@d0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", stdout(&out));
    assert!(stdout(&out).contains("budget exhausted"));
}

#[test]
fn average_writes_traces_and_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["average", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("X^I = all; Validated"));
    let dot = std::fs::read_to_string(out_dir.join("average.dot")).unwrap();
    // Every window vertex is in the averaged aisle.
    assert_eq!(dot.matches("role=\"aisle\"").count(), 12);
    assert!(!dot.contains("role=\"coaisle\""));
    assert!(std::fs::read_to_string(out_dir.join("average.svg")).unwrap().contains("<svg"));
    let traces: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().path().extension().is_some_and(|x| x == "trace")
        })
        .collect();
    assert_eq!(traces.len(), 6);
}

#[test]
fn single_t_structure_average_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out = bin()
        .args(["average", "--order", "0", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("Validated"));
    assert!(!stdout(&out).contains("X^I = all"));
}

#[test]
fn average_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let run = || {
        let out_dir = tempfile::tempdir().unwrap();
        let out = bin()
            .args(["average", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir.path().join("d"))
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        let mut blob = stdout(&out);
        let mut names: Vec<_> = std::fs::read_dir(out_dir.path().join("d"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        for p in names {
            blob.push_str(&std::fs::read_to_string(p).unwrap());
        }
        blob
    };
    assert_eq!(run(), run());
}

#[test]
fn shifted_standard_pair_averages_to_the_larger_aisle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a3pair.json",
        r#"{
            "preset": { "family": "A3" },
            "window": { "lo": -1, "hi": 2 },
            "t_structures": [
                { "name": "std0", "generators": [
                    "M[dv=1,0,0]@d0", "M[dv=0,1,0]@d0", "M[dv=0,0,1]@d0",
                    "M[dv=1,1,0]@d0", "M[dv=0,1,1]@d0", "M[dv=1,1,1]@d0"
                ] },
                { "name": "std1", "generators": [
                    "M[dv=1,0,0]@d1", "M[dv=0,1,0]@d1", "M[dv=0,0,1]@d1",
                    "M[dv=1,1,0]@d1", "M[dv=0,1,1]@d1", "M[dv=1,1,1]@d1"
                ] }
            ]
        }"#,
    );
    let avg = bin().args(["average", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&avg), 0, "{}", stdout(&avg));
    // The union closure is the lower (bigger) standard aisle: degrees >= 0.
    assert!(stdout(&avg).contains("@d0"), "{}", stdout(&avg));
    assert!(!stdout(&avg).contains("@d-1"));
    let meet = bin().args(["intersect", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&meet), 0, "{}", stdout(&meet));
    // The intersection is the higher (smaller) one: degrees >= 1.
    assert!(stdout(&meet).contains("coaisle_agrees=true"));
    assert!(!stdout(&meet).contains("@d0,"), "{}", stdout(&meet));
}

#[test]
fn builtin_criterion_fails_and_config_criterion_holds() {
    let out = bin().args(["criterion", "--builtin", "X22-example"]).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("fails at component N@d1"));

    let bad = bin().args(["criterion", "--builtin", "nope"]).output().unwrap();
    assert_eq!(code(&bad), 1);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "traces.json",
        r#"{
            "preset": { "family": "Atilde(2,2)" },
            "window": { "lo": 0, "hi": 1 },
            "traces": [
                { "name": "t1", "components": [
                    { "component": "N", "degree": 0,
                      "pattern": [[1, 0], [2, 0]], "period": 2 }
                ] },
                { "name": "t2", "components": [
                    { "component": "N", "degree": 0,
                      "pattern": [[1, 0], [3, 1]], "period": 2 }
                ] }
            ]
        }"#,
    );
    let out = bin().args(["criterion", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("holds"));
}

#[test]
fn tube_verbs_match_the_calculus() {
    let out = bin().args(["tube", "--rho", "5", "ext", "s2", "s1"]).output().unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("e1 = T[s=1;l=2]"));
    assert!(text.contains("e2 = 0"));

    let out = bin()
        .args(["tube", "--rho", "7", "hammock", "T[s=1;l=2]"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 15);
    // The identity target Hom never vanishes.
    assert!(text.lines().any(|l| l.starts_with("l= 2") && l.contains('H')));

    let out = bin()
        .args(["tube", "--rho", "2", "bound", "--t", "T[s=1;l=4]", "--rprime", "", "--r", ""])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bound 4 verified"));
}

#[test]
fn act_averages_over_the_symmetry_group() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a3sym.json",
        r#"{
            "preset": { "family": "A3", "orientation": [[1,2],[3,2]] },
            "window": { "lo": -1, "hi": 1 },
            "t_structures": [
                { "name": "onesided", "generators": ["M[dv=1,0,0]@d0"] }
            ],
            "group": { "generators": [ { "maps": [[1,3],[2,2],[3,1]] } ] }
        }"#,
    );
    let out = bin().args(["act", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("group: valid, order 2"));
    assert!(text.contains("G-invariant"));
    assert!(text.contains("M[dv=0,0,1]@d0"));
}

#[test]
fn render_round_trips_roles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fig1_config(dir.path());
    let out_dir = dir.path().join("render");
    let out = bin()
        .args(["render", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["ts1", "ts2", "ts3"] {
        let dot = std::fs::read_to_string(out_dir.join(format!("{name}.dot"))).unwrap();
        // Every window vertex appears exactly once as a node.
        assert_eq!(dot.matches("role=").count(), 12);
        assert!(std::fs::read_to_string(out_dir.join(format!("{name}.svg")))
            .unwrap()
            .contains("</svg>"));
    }
}
