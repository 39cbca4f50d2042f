use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvxproj")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn disk_distance_is_ln_3() {
    let o = run(&["dist", &data("disk.json"), "[0,0]", "[0.5,0]"]);
    assert_eq!(o.status.code(), Some(0));
    let d = json(&o)["distance"].as_f64().unwrap();
    assert!((d - 3f64.ln()).abs() < 1e-8, "{d}");
    assert!(stdout(&o).contains("1.09861229"));
}

#[test]
fn triangle_isometry_has_length_ln_8() {
    let o = run(&["classify", &data("triangle.json"), &data("diag_2_2_quarter.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("2.07944154"));
}

#[test]
fn catalog_check_passes() {
    let o = run(&["catalog", "check", "iii", "--budget", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let list = run(&["catalog", "list"]);
    assert_eq!(json(&list).as_array().unwrap().len(), 19);
}

#[test]
fn closed_form_verification_passes() {
    let o = run(&["verify", "prop76", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["passed"], serde_json::Value::Bool(true));
}

#[test]
fn limits_of_the_diagonal_group() {
    let o = run(&["limits", &data("triangle.json"), &data("diagonal_group.json"), "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!json(&o)["estimate"]["clusters"].as_array().unwrap().is_empty());
}

#[test]
fn orbit_csv_and_failed_check() {
    let o = run(&["orbit", &data("triangle.json"), &data("diagonal_group.json"), "[1,1]", "--len", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("word,in_domain"));
    // The point itself and its images under a, b, c and their inverses.
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().any(|l| l.starts_with("c^-1,true,2,2,")));

    let o = run(&["orbit", &data("disk.json"), "[[2,0,0],[0,1,0],[0,0,1]]", "[0.5,0]", "--len", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn horosphere_svg() {
    let o = run(&["horosphere", &data("parabola.json"), "[0,0,1]", "[0,1,0]", "[0.5,2]", "--svg", "--leaves", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("<svg") && text.contains("<circle"));
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(run(&["dist", "/nonexistent/domain.json", "[0,0]", "[0.5,0]"]).status.code(), Some(2));
    assert_eq!(run(&["dist", &data("disk.json"), "[0,0]", "[2,0]"]).status.code(), Some(2));
    assert_eq!(run(&["catalog", "check", "xx"]).status.code(), Some(2));
    assert_eq!(run(&["dist", &data("disk.json"), "[0,0]", "{"]).status.code(), Some(2));
}

#[test]
fn output_file_and_determinism() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let a = dir.join("limits_a.json");
    let b = dir.join("limits_b.json");
    for p in [&a, &b] {
        let o = run(&["--seed", "3", "-o", p.to_str().unwrap(), "limits", &data("triangle.json"), &data("diagonal_group.json"), "--budget", "500", "--hull", "50"]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
