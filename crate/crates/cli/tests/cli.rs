use std::path::PathBuf;
use std::process::{Command, Output};

fn aps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aps-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// `condition -> (verdict, at)` from a CSV report.
fn csv_rows(text: &str) -> Vec<(String, String, String)> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[1].to_string(), c[2].to_string(), c[3].to_string())
        })
        .collect()
}

#[test]
fn check_blatz_ko_passes() {
    let o = aps(&["check", "blatz-ko"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("APS-convex: yes"));
    assert!(s.contains("K1 constant b = 0"));
    assert!(s.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["k2", "pass"]));
}

#[test]
fn failing_condition_gives_exit_one() {
    // neo-Hooke violates K2
    assert_eq!(aps(&["check", "neo-hooke"]).status.code(), Some(1));
}

#[test]
fn usage_and_domain_errors_give_exit_two() {
    assert_eq!(aps(&["check", "no-such-model"]).status.code(), Some(2));
    assert_eq!(aps(&["check"]).status.code(), Some(2));
    assert_eq!(aps(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(aps(&["check", "blatz-ko", "--param", "mu"]).status.code(), Some(2));
    assert_eq!(aps(&["counterexample", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(aps(&["check", "blatz-ko", "--format", "vtk"]).status.code(), Some(2));
    assert_eq!(aps(&["solve2d", "pucci", "--strict", "--n", "9"]).status.code(), Some(2));
}

#[test]
fn dsl_neo_hooke_matches_catalog_on_the_shear_path() {
    let dsl = aps(&["check", "--dsl", "mu/2*(I1-3)", "--param", "mu=1", "--format", "csv"]);
    let cat = aps(&["check", "neo-hooke", "--format", "csv"]);
    let (a, b) = (csv_rows(&stdout(&dsl)), csv_rows(&stdout(&cat)));
    for name in ["aps1", "aps2", "aps3", "fosdick", "shear-monotonicity", "hstar-probe", "k1", "local-shear"] {
        let pick = |rows: &[(String, String, String)]| rows.iter().find(|r| r.0 == name).unwrap().1.clone();
        assert_eq!(pick(&a), pick(&b), "{name}");
    }
    assert!(stdout(&dsl).contains("k1-b,value,,0"));
}

#[test]
fn pucci_check_reports_witness_near_three() {
    let o = aps(&["check", "pucci", "--param", "alpha=0.95", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let rows = csv_rows(&stdout(&o));
    let aps2 = rows.iter().find(|r| r.0 == "aps2").unwrap();
    assert_eq!(aps2.1, "fail");
    let at: f64 = aps2.2.parse().unwrap();
    assert!((2.5..=3.5).contains(&at), "{at}");
}

#[test]
fn table1_matches_all_rows() {
    let o = aps(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("14/14 rows match"));
    let hencky = s.lines().find(|l| l.starts_with("Hencky")).unwrap();
    assert!(hencky.contains("no (R="));
    let svk = s.lines().find(|l| l.starts_with("SVK")).unwrap();
    assert!(svk.contains("n.a."));
    let csv = stdout(&aps(&["table1", "--format", "csv"]));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",ok")).count(), 14);
}

#[test]
fn counterexample_variants() {
    let o = aps(&["counterexample", "--alpha", "0.95"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("empirical-inequalities") && l.ends_with("pass")));
    assert!(s.lines().any(|l| l.starts_with("aps2") && l.contains("fail")));

    assert_eq!(aps(&["counterexample", "--alpha", "0.5"]).status.code(), Some(0));

    let s = stdout(&aps(&["counterexample", "--bisect"]));
    let t: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("alpha-threshold "))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((t - 8.0 / 9.0).abs() < 1e-4, "{t}");
}

#[test]
fn solve2d_affine_data_and_field_output() {
    let out = scratch("affine.csv");
    let o = aps(&[
        "solve2d", "mooney-rivlin", "--affine", "0.3,-0.2,0.1", "--n", "17", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("exact affine solution"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 17 * 17);
    let vtk = scratch("field.vtk");
    let o = aps(&["solve2d", "neo-hooke", "--n", "9", "--format", "vtk", "--out", vtk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&vtk).unwrap().contains("DIMENSIONS 9 9 1"));
}

#[test]
fn solve3d_discriminates_and_writes_files() {
    let bk = stdout(&aps(&["solve3d", "blatz-ko", "--n", "5"]));
    assert!(bk.contains("anti-plane: yes"), "{bk}");
    let vtk = scratch("mr.vtk");
    let slice = scratch("mr.csv");
    let o = aps(&[
        "solve3d", "mooney-rivlin", "--n", "5", "--out", vtk.to_str().unwrap(), "--slice", slice.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("anti-plane: no"));
    assert!(std::fs::read_to_string(&vtk).unwrap().contains("CELL_TYPES 64"));
    assert_eq!(std::fs::read_to_string(&slice).unwrap().lines().count(), 1 + 25);
}

#[test]
fn embedded_config_reproduces_the_report() {
    let first = scratch("first.csv");
    let second = scratch("second.csv");
    let o = aps(&[
        "check", "pucci", "--param", "alpha=0.9", "--grid-n", "120", "--seed", "7", "--format", "csv",
        "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let o = aps(&["check", "--config", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let strip = |p: &PathBuf| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("#% out ="))
            .map(String::from)
            .collect()
    };
    assert_eq!(strip(&first), strip(&second));
    // a report cannot drive a different subcommand
    assert_eq!(aps(&["table1", "--config", first.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn config_file_sections_and_flag_overrides() {
    let path = scratch("run.toml");
    std::fs::write(&path, "grid_n = 100\n[counterexample]\nalpha = 0.5\n").unwrap();
    let p = path.to_str().unwrap();
    let o = aps(&["counterexample", "--config", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("#% grid_n = 100"));
    assert_eq!(aps(&["counterexample", "--config", p, "--alpha", "0.95"]).status.code(), Some(1));
    std::fs::write(&path, "unknown_key = 1\n").unwrap();
    assert_eq!(aps(&["table1", "--config", p]).status.code(), Some(2));
}
