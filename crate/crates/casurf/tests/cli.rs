use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn casurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casurf")).args(args).output().unwrap()
}

fn def(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../definitions")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn report_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
        .to_string()
}

#[test]
fn verify_ambient_on_berger_sphere_reports_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let rep = path(&dir, "r.txt");
    let o = casurf(&["verify-ambient", "--kappa", "1", "--tau", "0.5", "--report", &rep]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(rep).unwrap();
    assert_eq!(report_value(&text, "check.constant_curvature.pass"), "true");
    assert_eq!(report_value(&text, "value.sectional_curvature"), "0.25");
    assert_eq!(report_value(&text, "provenance.seed"), "0");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify-ambient", "--kappa", "0", "--tau", "0.5", "--samples", "0"][..],
        &["verify-ambient", "--tau", "0.5"],
        &["check"],
        &[
            "integrate",
            "--kappa",
            "0",
            "--tau",
            "0.5",
            "--theta",
            "pi/4",
            "--grid",
            "1x5",
        ],
        &["frobnicate"],
    ] {
        assert_eq!(casurf(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn example_obj_has_two_thousand_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "e.obj");
    let o = casurf(&[
        "generate",
        "--def",
        &def("example.toml"),
        "--format",
        "obj",
        "--out",
        &out,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2000);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 99 * 19);
}

#[test]
fn speed_violation_is_an_invalid_spec() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.toml");
    let text = std::fs::read_to_string(def("example.toml"))
        .unwrap()
        .replace("0.7071067811865476", "0.8");
    std::fs::write(&bad, text).unwrap();
    let o = casurf(&["generate", "--def", &bad, "--out", &path(&dir, "x.csv")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid surface specification"));
}

#[test]
fn example_check_passes_with_k_minus_half() {
    let dir = tempfile::tempdir().unwrap();
    let rep = path(&dir, "r.txt");
    let o = casurf(&["check", "--def", &def("example.toml"), "--report", &rep]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(rep).unwrap();
    let k: f64 = report_value(&text, "value.gaussian_curvature").parse().unwrap();
    assert!((k + 0.5).abs() < 1e-6);
    assert_eq!(report_value(&text, "value.branch"), "generic");
}

#[test]
fn perturbed_surface_names_failing_checks() {
    let dir = tempfile::tempdir().unwrap();
    let rep = path(&dir, "r.txt");
    let o = casurf(&["check", "--def", &def("perturbed.toml"), "--report", &rep]);
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(rep).unwrap();
    assert_eq!(report_value(&text, "pass"), "false");
    for name in ["angle_constancy", "shape_pattern", "curvature_extrinsic"] {
        assert_eq!(report_value(&text, &format!("check.{name}.pass")), "false");
    }
    // The perturbed patch is still an immersion.
    assert_eq!(report_value(&text, "check.compatibility.pass"), "true");
}

#[test]
fn hopf_cylinder_reports_vertical_branch() {
    let o = casurf(&["check", "--def", &def("hopf_cylinder.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("branch = hopf_cylinder"), "{out}");
    assert!(!out.contains("shape_pattern"));
}

#[test]
fn csv_round_trip_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "s.csv");
    let gen = casurf(&[
        "generate",
        "--def",
        &def("example.toml"),
        "--grid",
        "40x40",
        "--domain",
        "0:1,-0.5:0.5",
        "--out",
        &csv,
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let o = casurf(&[
        "check", "--csv", &csv, "--kappa", "0", "--tau", "0.5", "--theta", "pi/4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    // Wrong ambient space: same points, different angle.
    let o = casurf(&["check", "--csv", &csv, "--kappa", "0", "--tau", "1", "--theta", "pi/4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn grid_file_family_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "s.csv");
    casurf(&["generate", "--def", &def("bcv_berger.toml"), "--out", &csv]);
    let toml = "family = \"grid_file\"\n[ambient]\nkappa = 1\ntau = 0.5\n[grid]\nu = [-0.4, 0.4]\nv = [-0.4, 0.4]\nnu = 41\nnv = 41\n[grid_file]\npath = \"s.csv\"\n";
    let d: PathBuf = dir.path().join("g.toml");
    std::fs::write(&d, toml).unwrap();
    let o = casurf(&["check", "--def", d.to_str().unwrap(), "--theta", "pi/3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn integrate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = path(&dir, "n.obj");
    let nil = casurf(&[
        "integrate",
        "--kappa",
        "0",
        "--tau",
        "0.5",
        "--theta",
        "pi/4",
        "--format",
        "obj",
        "--out",
        &mesh,
    ]);
    assert_eq!(nil.status.code(), Some(0), "{}", stdout(&nil));
    assert!(stdout(&nil).contains("reconstruction"));
    assert!(std::fs::metadata(&mesh).unwrap().len() > 0);

    let bcv = casurf(&["integrate", "--kappa", "1", "--tau", "0.5", "--theta", "pi/3"]);
    assert_eq!(bcv.status.code(), Some(0), "{}", stdout(&bcv));
    assert!(stdout(&bcv).contains("closed_form"));

    let bad = casurf(&["integrate", "--kappa", "-4", "--tau", "0.5", "--theta", "pi/2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not positive"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let (out, rep) = (path(&dir, &format!("o{k}.csv")), path(&dir, &format!("r{k}.txt")));
        let o = casurf(&[
            "integrate",
            "--kappa",
            "2",
            "--tau",
            "0.5",
            "--theta",
            "pi/3",
            "--varphi",
            "0,0.5",
            "--out",
            &out,
            "--report",
            &rep,
        ]);
        assert_eq!(o.status.code(), Some(0));
        files.push((std::fs::read(out).unwrap(), std::fs::read(rep).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}
