use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pks"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn simulate_writes_one_drawing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pks(&["simulate", "--preset", "normal", "--a", "50", "--b", "50", "--seed", "7", "--out", out]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(files(dir.path()), ["drawing-7-0.pks"]);
    let doc = fs::read_to_string(dir.path().join("drawing-7-0.pks")).unwrap();
    assert!(doc.starts_with("pks-drawing 1\n"));
    assert!(doc.contains("\nseed 7 0\n"));
}

#[test]
fn replicas_get_distinct_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pks(&["simulate", "--preset", "hammersley", "--a", "10", "--b", "10", "--replicas", "5", "--out", out]);
    assert_eq!(code(&o), 0, "{o:?}");
    let names = files(dir.path());
    assert_eq!(names.len(), 5);
    let mut docs: Vec<String> = names.iter().map(|n| fs::read_to_string(dir.path().join(n)).unwrap()).collect();
    for (i, d) in docs.iter().enumerate() {
        assert!(d.contains(&format!("\nseed 0 {i}\n")));
    }
    docs.dedup();
    assert_eq!(docs.len(), 5);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (x, y) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&x, &y] {
        let o = pks(&[
            "simulate", "--preset", "geom-geom", "--replicas", "3", "--seed", "11",
            "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    for name in files(x.path()) {
        assert_eq!(fs::read(x.path().join(&name)).unwrap(), fs::read(y.path().join(&name)).unwrap());
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&pks(&["simulate"])), 2);
    assert_eq!(code(&pks(&["simulate", "--preset", "no-such-model"])), 2);
    assert_eq!(code(&pks(&["simulate", "--preset", "exp-geom"])), 2);
    assert_eq!(code(&pks(&["simulate", "--preset", "normal", "--arg", "zz=1"])), 2);
    assert_eq!(code(&pks(&["verify", "--preset", "normal", "--suite", "bogus"])), 2);
    assert_eq!(code(&pks(&["frobnicate"])), 2);
}

#[test]
fn render_both_modes_and_reject_corrupt_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&pks(&["simulate", "--preset", "negexp-exp", "--seed", "2", "--out", out])), 0);
    let drawing = dir.path().join("drawing-2-0.pks");
    for mode in ["lines", "potential"] {
        let svg = dir.path().join(format!("{mode}.svg"));
        let o = pks(&["render", drawing.to_str().unwrap(), "--mode", mode, "-o", svg.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{o:?}");
        let text = fs::read_to_string(&svg).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    }
    let corrupt = dir.path().join("corrupt.pks");
    let doc = fs::read_to_string(&drawing).unwrap();
    fs::write(&corrupt, doc.replacen("segments", "segmnts", 1)).unwrap();
    let o = pks(&["render", corrupt.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn verify_means_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = pks(&[
        "verify", "--preset", "normal", "--suite", "means", "--a", "20", "--b", "20",
        "--replicas", "100", "--seed", "3", "--out", out,
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict pass"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report-means.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(
        fs::read_to_string(dir.path().join("report-means.txt")).unwrap(),
        stdout(&o)
    );
}

#[test]
fn corrupted_dynamics_fail_verification() {
    let o = pks(&[
        "verify", "--preset", "normal", "--suite", "reversibility", "--a", "20", "--b", "20",
        "--replicas", "200", "--seed", "5", "--vertical-turn-factor", "2",
    ]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict fail"));
    let o = pks(&[
        "verify", "--preset", "normal", "--suite", "reversibility", "--a", "20", "--b", "20",
        "--replicas", "200", "--seed", "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn closed_form_suites_need_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "[measures]\nnu_v = normal(0,1)\nnu_h = normal(0,1)\n[functions]\np_v = 0.4\n").unwrap();
    let o = pks(&["verify", "--config", cfg.to_str().unwrap(), "--suite", "rates"]);
    assert_eq!(code(&o), 2);
    let o = pks(&["verify", "--preset", "poisson", "--suite", "rates"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = pks(&["verify", "--preset", "poisson", "--suite", "kernels", "--samples", "20000"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "[run]\npreset = bullet\na = 4\nb = 4\nseed = 1\nreplicas = 2\nout = {}\n[preset]\npv = 0.5\n",
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let o = pks(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert_eq!(files(&dir.path().join("out")), ["drawing-9-0.pks", "drawing-9-1.pks"]);
    fs::write(&cfg, "[run]\na = wide\n").unwrap();
    let o = pks(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn catalog_lists_presets_and_exclusions() {
    let o = pks(&["catalog"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for name in ["normal", "hammersley", "exponential-lpp"] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
    assert!(text.contains("out of scope"));
    let json: serde_json::Value = serde_json::from_str(&stdout(&pks(&["catalog", "--json"]))).unwrap();
    let rows = json.as_array().unwrap();
    assert!(rows.iter().any(|r| r["name"] == "exp-geom" && r["out_of_scope"].is_string()));
    assert!(rows.iter().any(|r| r["name"] == "normal" && r["out_of_scope"].is_null()));
}
