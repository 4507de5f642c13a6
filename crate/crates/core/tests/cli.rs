use std::path::Path;
use std::process::{Command, Output};

use faultspec::report::Report;

fn faultspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faultspec")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    faultspec(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["run", "sortedset", "correct"]), 0);
    assert_eq!(code(&["run", "sortedset", "isEmpty-1"]), 1);
    assert_eq!(code(&["run", "--impl", "mapchain:put-2"]), 1);
    assert_eq!(code(&["run", "mapchain", "get-1"]), 2);
    assert_eq!(code(&["run", "mapchain", "get-1", "--mode", "observers"]), 1);
    assert_eq!(code(&["run", "sortedset", "correct", "--scope", "SortedSet=3"]), 3);
    assert_eq!(code(&["run", "sortedset", "correct", "--budget", "3"]), 3);
    assert_eq!(code(&["run", "sortedset", "nope"]), 4);
    assert_eq!(code(&["run", "--impl", "sortedset"]), 4);
    assert_eq!(code(&["run", "--bogus"]), 4);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["list"]), 0);
}

#[test]
fn json_reports_are_reproducible_and_parse_back() {
    let args = ["run", "mapchain", "remove-1", "--mode", "observers", "--report", "json", "--seed", "7"];
    let a = faultspec(&args);
    let b = faultspec(&args);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text);
    assert_eq!(report.seed, 7);
    assert_eq!(report.diagnosis.verdict.guilty(), Some("isEmpty"));
    assert!(report.diagnosis.fss.contains("remove"));
}

#[test]
fn dump_model_writes_the_structure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    let out = faultspec(&["run", "sortedset", "correct", "--dump-model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["sorts"]["SortedSet"]["elements"].as_array().unwrap().len(), 4);
    assert!(doc.to_string().contains("insert(insert(empty()"));
}

fn copy_specs(from: &Path, to: &Path) {
    for entry in std::fs::read_dir(from).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|x| x == "spec" || x == "map") {
            std::fs::copy(&p, to.join(p.file_name().unwrap())).unwrap();
        }
    }
}

#[test]
fn specs_and_maps_from_disk() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/sortedset");
    let dir = tempfile::tempdir().unwrap();
    copy_specs(&fixtures, dir.path());
    let spec = dir.path().to_str().unwrap();
    let map = dir.path().join("SortedSet.map");
    let map = map.to_str().unwrap();

    assert_eq!(code(&["check", "--spec", spec]), 0);
    let out = faultspec(&["model", "--spec", spec, "--scope", "SortedSet=4", "--scope", "Orderable=2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("isIn"));
    let run = ["run", "sortedset", "largest-1", "--spec", spec, "--map", map, "--scope", "SortedSet=4", "--scope", "Orderable=2"];
    assert_eq!(code(&run), 1);

    let broken = dir.path().join("SortedSet.spec");
    let text = std::fs::read_to_string(&broken).unwrap().replace("isIn(empty(), E)", "isIn(empty(), Q)");
    std::fs::write(&broken, text).unwrap();
    let out = faultspec(&["check", "--spec", spec]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undeclared variable `Q`"));
    assert_eq!(code(&run), 4);
}
