use std::path::Path;
use std::process::{Command, Output};

fn elastica(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elastica"))
        .args(args)
        .current_dir(dir)
        .env("ELASTICA_THREADS", "1")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes_follow_the_worst_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("good.txt"), "2 0 3\n1 2\n2 5\n3 5\n").unwrap();
    std::fs::write(d.join("bad.txt"), "2 0 2\n1 1\n2 10\n").unwrap();
    // σ₂ exceeds the first-index bound 3σ₁ by less than the slack
    std::fs::write(d.join("edge.txt"), "2 0 2\n1 1\n2 3.0000000001\n").unwrap();
    let run = |file: &str| elastica(d, &["bounds", "--set", &format!("input.spectrum=\"{file}\""), "--set", "verify.k_max=1"]);

    let good = run("good.txt");
    assert_eq!(code(&good), 0, "{}", stderr(&good));
    assert!(stdout(&good).contains("0 fail"));
    assert_eq!(code(&run("bad.txt")), 1);
    let edge = run("edge.txt");
    assert_eq!(code(&edge), 2, "{}", stdout(&edge));
    assert!(stdout(&edge).contains("marginal"));
}

#[test]
fn config_errors_exit_one_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.toml"), "[mesh]\ncells = 1\n").unwrap();
    let o = elastica(d, &["solve", "--config", "run.toml"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("mesh.cells"), "{}", stderr(&o));

    let o = elastica(d, &["verify", "--set", "solver.tolerance=1e-9"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("unknown key `solver.tolerance`"), "{}", stderr(&o));

    let o = elastica(d, &["bounds", "--set", "input.spectrum=\"missing.txt\""]);
    assert_eq!(code(&o), 1);

    let o = Command::new(env!("CARGO_BIN_EXE_elastica"))
        .args(["solve"])
        .env("ELASTICA_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn config_file_and_overrides_combine() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.toml"), "[mesh]\ncells = 40\n[solver]\nm = 4\n[output]\npath = \"out\"\n").unwrap();
    let o = elastica(d, &["solve", "--config", "run.toml", "--set", "mesh.cells=10", "--set", "domain.alpha=[0, 2]"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(d.join("out/spectrum_alpha_2.txt")).unwrap();
    assert!(text.starts_with("2 2 4\n"), "{text}");
    assert!(d.join("out/spectrum_alpha_0.txt").is_file());
}

#[test]
fn verify_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &str| {
        vec![
            "verify".to_string(),
            "--set".into(),
            "mesh.cells=10".into(),
            "--set".into(),
            "domain.alpha=[0, 0.5]".into(),
            "--set".into(),
            "solver.m=8".into(),
            "--set".into(),
            "verify.k_max=7".into(),
            "--set".into(),
            format!("output.path=\"{out}\""),
        ]
    };
    let a: Vec<String> = args("a");
    let b: Vec<String> = args("b");
    let oa = elastica(d, &a.iter().map(String::as_str).collect::<Vec<_>>());
    let ob = elastica(d, &b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&oa), code(&ob));
    let csv_a = std::fs::read(d.join("a/report.csv")).unwrap();
    let csv_b = std::fs::read(d.join("b/report.csv")).unwrap();
    assert!(!csv_a.is_empty());
    assert_eq!(csv_a, csv_b);
    assert!(d.join("a/report_alpha_0.5.json").is_file());
    assert!(d.join("a/report.txt").is_file());

    let o = elastica(d, &["report", "a/report_alpha_0.json", "a/report_alpha_0.5.json"]);
    assert_eq!(code(&o), code(&oa));
    assert!(stdout(&o).lines().next().unwrap().trim_start().starts_with("alpha"));
}

#[test]
fn hemisphere_cap_run_reports_equalities() {
    let dir = tempfile::tempdir().unwrap();
    let o = elastica(dir.path(), &["cap", "--set", "cap.radial_cells=64", "--set", "cap.mode_max=4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    for name in ["clamped_over_dirichlet", "buckling_first", "p_over_dirichlet", "q_first"] {
        assert!(out.contains(name), "{out}");
    }
    assert!(out.contains("5 pass"));
}
