use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use frontal_cli::{load, render_text, run, Command, Options, Report};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn frontal(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_frontal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit(args: &[&str]) -> i32 {
    frontal(args).status.code().expect("exit code")
}

fn report(command: Command, name: &str) -> Report {
    run(command, &load(&fixture(name)).unwrap(), &Options::default())
}

fn value<'a>(r: &'a Report, key: &str) -> &'a str {
    r.values
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| panic!("no value {key} in {:?}", r.values))
}

#[test]
fn exit_codes_follow_the_contract() {
    let f = |n: &str| fixture(n).to_string_lossy().into_owned();
    assert_eq!(exit(&["recognize", &f("ce.toml")]), 0);
    assert_eq!(exit(&["recognize", &f("unrecognized.toml")]), 2);
    assert_eq!(exit(&["recognize", &f("ce.toml"), "--order", "2"]), 3);
    assert_eq!(exit(&["recognize", &f("bad_scope.toml")]), 4);
    assert_eq!(exit(&["recognize", &f("does_not_exist.toml")]), 4);
    assert_eq!(exit(&["recognize", &f("corank2.toml")]), 5);
    assert_eq!(exit(&["recognize", &f("cone.toml")]), 5);
}

#[test]
fn scope_error_is_positioned() {
    let r = report(Command::Recognize, "bad_scope.toml");
    let e = r.error.unwrap();
    assert!(e.contains("line 2") && e.contains("t3"), "{e}");
}

#[test]
fn cuspidal_edge_file() {
    let r = report(Command::Recognize, "ce.toml");
    assert_eq!(r.verdict, "CuspidalEdge");
    assert!(r.certificate.unwrap().replays());
}

#[test]
fn cone_is_refused() {
    let r = report(Command::Recognize, "cone.toml");
    assert_eq!(r.verdict, "DegenerateJacobiIdeal");
    assert_eq!(r.exit_code, 5);
    assert!(r.class.is_none());
    let r = report(Command::Frontality, "cone.toml");
    assert_eq!(r.verdict, "DegenerateJacobiIdeal");
}

#[test]
fn mond_surface() {
    let r = report(Command::Recognize, "mond.toml");
    assert_eq!(r.verdict, "Mond");
    assert_eq!(value(&r, "lambda"), "6*u*t");
    let r = report(Command::Jacobian, "mond.toml");
    assert_eq!(value(&r, "D{1,2}"), "6*u*t");
    assert_eq!(value(&r, "D{1,3}"), "12*u*t^2");
    assert_eq!(value(&r, "D{2,3}"), "12*u*t^4");
    assert_eq!(value(&r, "unit"), "6");
    assert_eq!(value(&r, "lambda_reduced"), "u*t");
    assert_eq!(value(&r, "h{1,2}"), "1");
    assert_eq!(value(&r, "h{1,3}"), "2*t");
    assert_eq!(value(&r, "h{2,3}"), "2*t^3");
    assert_eq!(value(&r, "singular_locus"), "u*t = 0");
}

#[test]
fn swallowtail_orders() {
    let r = report(Command::Orders, "sw.toml");
    assert_eq!(value(&r, "ord_eta(lambda)"), "2");
    assert_eq!(value(&r, "ord_eta(f3)"), "4");
}

#[test]
fn open_swallowtail_opens_the_cusp() {
    let docs: Vec<_> = ["osw.toml", "cusp.toml"]
        .iter()
        .flat_map(|n| load(&fixture(n)).unwrap().documents)
        .collect();
    let r = frontal_cli::cmd_opening(&docs, None, &Options::default());
    assert_eq!(value(&r, "opening"), "true");
    assert_eq!(value(&r, "versal"), "true");
    assert!(value(&r, "versal_order").parse::<u32>().unwrap() >= 8);
    assert_eq!(value(&r, "j_module_equal"), "true");

    let docs: Vec<_> = ["sw.toml", "cusp.toml"]
        .iter()
        .flat_map(|n| load(&fixture(n)).unwrap().documents)
        .collect();
    let r = frontal_cli::cmd_opening(&docs, None, &Options::default());
    assert_eq!(value(&r, "opening"), "true");
    assert_eq!(value(&r, "versal"), "false");
}

#[test]
fn json_report_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, name) in [
        ("recognize", "sw.toml"),
        ("recognize", "cone.toml"),
        ("jacobian", "mond.toml"),
        ("orders", "sw.toml"),
    ] {
        let first = frontal(&[cmd, fixture(name).to_str().unwrap(), "--format", "json"]);
        let saved = dir.path().join(format!("{cmd}-{name}.json"));
        std::fs::write(&saved, &first.stdout).unwrap();
        let second = frontal(&[cmd, saved.to_str().unwrap(), "--format", "json"]);
        assert_eq!(first.stdout, second.stdout, "{cmd} {name}");
        assert_eq!(first.status.code(), second.status.code());
        let parsed: Report = serde_json::from_slice(&first.stdout).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap();
        assert_eq!(again.trim_end(), String::from_utf8_lossy(&first.stdout).trim_end());
    }
}

#[test]
fn opening_report_replays_with_both_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let (osw, cusp) = (fixture("osw.toml"), fixture("cusp.toml"));
    let first = frontal(&["opening", osw.to_str().unwrap(), cusp.to_str().unwrap(), "--format", "json"]);
    let saved = dir.path().join("opening.json");
    std::fs::write(&saved, &first.stdout).unwrap();
    let second = frontal(&["opening", saved.to_str().unwrap(), "--format", "json"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn text_and_json_carry_the_same_verdicts() {
    for name in ["ce.toml", "sw.toml", "mond.toml", "unrecognized.toml"] {
        let path = fixture(name);
        let text = String::from_utf8(frontal(&["recognize", path.to_str().unwrap()]).stdout).unwrap();
        let json = frontal(&["recognize", path.to_str().unwrap(), "--format", "json"]).stdout;
        let r: Report = serde_json::from_slice(&json).unwrap();
        assert_eq!(text, render_text(&r), "{name}");
        assert!(text.contains(&format!("verdict: {}\n", r.verdict)));
        for e in &r.certificate.as_ref().unwrap().entries {
            assert!(text.contains(&format!("[{}] {}: ", e.verdict, e.id)), "{name}: {}", e.id);
        }
    }
}

#[test]
fn json_document_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sw.json");
    std::fs::write(
        &p,
        r#"{"vars": ["x", "y"], "components": ["x", "y^3 + x·y", "3/4*y^4 + 1/2*x*y^2"]}"#,
    )
    .unwrap();
    let r = run(Command::Recognize, &load(&p).unwrap(), &Options::default());
    assert_eq!(r.verdict, "Swallowtail");
}

#[test]
fn batch_mode_reports_every_file() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["ce.toml", "sw.toml", "corank2.toml"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let out = frontal(&["recognize", "--batch", dir.path().to_str().unwrap(), "--format", "json"]);
    let reports: Vec<Report> = serde_json::from_slice(&out.stdout).unwrap();
    let verdicts: Vec<&str> = reports.iter().map(|r| r.verdict.as_str()).collect();
    assert_eq!(verdicts, ["CuspidalEdge", "Refused", "Swallowtail"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn selftest_passes() {
    let out = frontal(&["selftest", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
