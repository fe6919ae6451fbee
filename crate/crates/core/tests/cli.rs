use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compact-fourier"))
        .args(args)
        .current_dir(dir)
        .env_remove("COMPACT_FOURIER_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const LADDER: &str = r#"{"name":"ladder","group":"torus:1","kind":"character_ladder","params":{"count":32}}"#;
const CONSTS: &str = r#"{"name":"consts","group":"su2","kind":"scaled_constants","params":{"r":2.0,"count":8}}"#;

#[test]
fn transform_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let ok = bin(
        &[
            "transform",
            "--group",
            "su2",
            "--resolution",
            "4",
            "--f",
            "entry:wigner:2:1:2",
        ],
        d.path(),
    );
    assert_eq!(code(&ok), 0);
    let doc: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["resolution"], 4);
    // pi_12 transforms to E_21 / 3
    let block = doc["coefficients"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["label"] == "wigner:2")
        .unwrap();
    assert!((block["re"][1][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);

    let low = bin(
        &[
            "transform",
            "--group",
            "su2",
            "--resolution",
            "4",
            "--f",
            "char:wigner:8",
        ],
        d.path(),
    );
    assert_eq!(code(&low), 3);
    let bad = bin(&["transform", "--group", "su2", "--f", "char:7"], d.path());
    assert_eq!(code(&bad), 2);
    let bad = bin(&["transform", "--group", "nonsense", "--f", "const:1"], d.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn sampled_file_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let from_spec = bin(
        &[
            "transform",
            "--group",
            "torus:1",
            "--resolution",
            "17",
            "--f",
            "heat:0.3",
        ],
        d.path(),
    );
    assert_eq!(code(&from_spec), 0);
    let rule = compact_fourier::haar_quadrature(&"torus:1".parse().unwrap(), 17).unwrap();
    let f = compact_fourier::SampledFunction::from_fn(&std::sync::Arc::new(rule), |t| match t {
        compact_fourier::GroupPoint::Torus(x) => num_complex::Complex64::new(x[0].cos(), 0.0),
        _ => unreachable!(),
    })
    .unwrap();
    let file = compact_fourier::io::SampledFile::from_function(&f);
    std::fs::write(d.path().join("f.json"), serde_json::to_string(&file).unwrap()).unwrap();
    let o = bin(&["transform", "--f", "file:f.json", "--format", "csv"], d.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let half = |label: &str| {
        text.lines()
            .find(|l| l.starts_with(label))
            .map(|l| l.split(',').nth(4).unwrap().parse::<f64>().unwrap())
            .unwrap()
    };
    assert!((half("torus:[1],") - 0.5).abs() < 1e-12);
    assert!((half("torus:[-1],") - 0.5).abs() < 1e-12);
}

#[test]
fn verify_writes_a_report() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(
        &[
            "--out",
            "o",
            "verify",
            "--group",
            "cyclic:8",
            "--suite",
            "hausdorff_young",
            "--samples",
            "4",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("PASS")), "{stdout}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("o/verify-hausdorff_young.json")).unwrap())
            .unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["config"]["samples"], 4);
    assert!(doc["config"].get("out").is_none());
    let bad = bin(&["verify", "--suite", "nope"], d.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn diagnose_and_report() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("ladder.json"), LADDER).unwrap();
    std::fs::write(d.path().join("consts.json"), CONSTS).unwrap();
    std::fs::write(
        d.path().join("bad.json"),
        r#"{"name":"x","group":"su2","kind":"warp","params":{}}"#,
    )
    .unwrap();

    let o = bin(&["--out", "o", "diagnose", "ladder.json", "--nets"], d.path());
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("not_precompact_no_decay"), "{stdout}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("o/ladder.diagnose.json")).unwrap()).unwrap();
    assert!(doc["nets"][0]["refused"].as_str().unwrap().contains("n=32"));
    assert!(d.path().join("o/ladder.tail_vs_shell.csv").exists());
    assert!(d.path().join("o/ladder.omega_vs_delta.csv").exists());

    assert_eq!(code(&bin(&["--out", "o", "diagnose", "consts.json"], d.path())), 0);
    assert_eq!(code(&bin(&["diagnose", "bad.json"], d.path())), 2);
    assert_eq!(code(&bin(&["diagnose", "missing.json"], d.path())), 2);

    let r = bin(
        &[
            "--out",
            "r",
            "report",
            "o/ladder.diagnose.json",
            "o/consts.diagnose.json",
        ],
        d.path(),
    );
    assert_eq!(code(&r), 0);
    let first = std::fs::read(d.path().join("r/report.json")).unwrap();
    let tails = std::fs::read_to_string(d.path().join("r/tail_vs_shell.csv")).unwrap();
    assert!(tails.starts_with("family,group,shell,sup_tail\n"));
    assert!(tails.contains("consts,su2,") && tails.contains("ladder,torus:1,"));
    let again = bin(
        &["--out", "r", "report", "r/report.json", "o/ladder.diagnose.json"],
        d.path(),
    );
    assert_eq!(code(&again), 0);
    assert_eq!(first, std::fs::read(d.path().join("r/report.json")).unwrap());
    assert_eq!(code(&bin(&["report"], d.path())), 2);
    assert_eq!(code(&bin(&["report", "consts.json"], d.path())), 2);
}
