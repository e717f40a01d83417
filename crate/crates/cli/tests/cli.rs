//! End-to-end runs of the `surface-dimer` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value as Json;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_surface-dimer"));
    cmd.env_remove("SURFACE_DIMER_JOBS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn json(out: &Output) -> Json {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn planar_grid_has_36_matchings() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "grid.json",
        &["--surface", "plane", "-m", "4", "-n", "4"],
    );
    for method in ["pfaffian", "brute"] {
        let out = run(&["z", arg(&g), "--method", method]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out).trim(), "36");
    }
    let out = run(&["z", arg(&g), "--mode", "float"]);
    let z: f64 = stdout(&out).trim().parse().unwrap();
    assert!((z - 36.0).abs() < 1e-9);
}

#[test]
fn lattice_equation_passes() {
    let out = run(&[
        "verify",
        "--identity",
        "eq1",
        "-m",
        "1",
        "-n",
        "1",
        "--weights",
        "xy:2,3",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["identity"], "eq1");
    assert_eq!(report["lhs"], report["rhs"]);
}

#[test]
fn odd_vertex_count_exits_with_precondition_code() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "path.json",
        &["--surface", "plane", "-m", "1", "-n", "3"],
    );
    let out = run(&["z", arg(&g), "--method", "pfaffian"]);
    assert_eq!(code(&out), 3);
    let out = run(&["z", arg(&g), "--method", "brute"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn generated_documents_verify_from_file() {
    let dir = TempDir::new().unwrap();
    let mobius = gen(
        &dir,
        "mobius.json",
        &[
            "--surface",
            "mobius",
            "-m",
            "3",
            "-n",
            "4",
            "--weights",
            "xy:2,3",
        ],
    );
    let doc = json(&run(&["twisted", arg(&mobius)]));
    assert_eq!(doc["classes"]["0"], doc["classes"]["1"]);
    for identity in ["thm1ii", "prop24", "main"] {
        let out = run(&["verify", "--identity", identity, arg(&mobius)]);
        assert_eq!(code(&out), 0, "{identity}: {}", stdout(&out));
    }
    let klein = gen(
        &dir,
        "klein.json",
        &["--surface", "klein", "-m", "3", "-n", "4"],
    );
    for identity in ["thm2", "main"] {
        let out = run(&["verify", "--identity", identity, arg(&klein)]);
        assert_eq!(code(&out), 0, "{identity}: {}", stdout(&out));
    }
    let square = gen(
        &dir,
        "square.json",
        &["--surface", "mobius", "-m", "2", "-n", "2"],
    );
    let out = run(&["verify", "--identity", "thm1i", arg(&square)]);
    assert_eq!(code(&out), 0);
}

#[test]
fn unmet_preconditions_exit_with_code_3() {
    let dir = TempDir::new().unwrap();
    let torus = gen(
        &dir,
        "torus.json",
        &["--surface", "torus", "-m", "2", "-n", "4"],
    );
    let out = run(&["verify", "--identity", "prop24", arg(&torus)]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["verdict"], "precondition-failed");
}

#[test]
fn usage_errors_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "g.json",
        &["--surface", "mobius", "-m", "2", "-n", "2"],
    );
    for args in [
        vec!["z"],
        vec!["frobnicate"],
        vec!["verify", "--identity", "bogus", arg(&g)],
        vec![
            "verify",
            "--identity",
            "eq1",
            "-m",
            "1",
            "-n",
            "1",
            "--mode",
            "float",
        ],
        vec!["verify", "--identity", "eq1", "-m", "1"],
        vec!["gen", "--surface", "sphere", "-m", "1", "-n", "1"],
        vec![
            "gen",
            "--surface",
            "plane",
            "-m",
            "1",
            "-n",
            "1",
            "--weights",
            "xy:1",
        ],
        vec!["z", "/nonexistent/graph.json"],
        vec!["bench", "--sizes", "4-8"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
}

#[test]
fn float_verification_needs_an_explicit_tolerance() {
    let out = run(&[
        "verify",
        "--identity",
        "eq3",
        "-m",
        "1",
        "-n",
        "1",
        "--mode",
        "float",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["mode"], "float");
}

#[test]
fn twisted_methods_agree() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "klein.json",
        &[
            "--surface",
            "klein",
            "-m",
            "3",
            "-n",
            "2",
            "--weights",
            "xy:3/2,1",
        ],
    );
    let brute = json(&run(&["twisted", arg(&g)]));
    let pf = json(&run(&["twisted", arg(&g), "--method", "pfaffian"]));
    assert_eq!(brute, pf);
}

#[test]
fn cover_and_kasteleyn_documents() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "g.json",
        &["--surface", "mobius", "-m", "2", "-n", "2"],
    );
    let cover = dir.path().join("cover.json");
    assert_eq!(code(&run(&["cover", arg(&g), "-o", arg(&cover)])), 0);
    let out = run(&["z", arg(&cover)]);
    assert_eq!(stdout(&out).trim(), "9");
    let doc: Json = serde_json::from_slice(&std::fs::read(&cover).unwrap()).unwrap();
    assert_eq!(doc["vertices"], 8);
    assert_eq!(doc["projection"]["vertices"].as_array().unwrap().len(), 8);

    let oriented = dir.path().join("k.json");
    assert_eq!(code(&run(&["kasteleyn", arg(&g), "-o", arg(&oriented)])), 0);
    assert_eq!(stdout(&run(&["z", arg(&oriented)])).trim(), "3");
    let matrix = stdout(&run(&["kasteleyn", arg(&g), "--matrix"]));
    assert_eq!(matrix.lines().count(), 4);
    assert!(matrix.lines().all(|l| l.split(',').count() == 4));
}

#[test]
fn enhancements_induce_forms_two_to_one() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "klein.json",
        &["--surface", "klein", "-m", "3", "-n", "2"],
    );
    let doc = json(&run(&["enhancements", arg(&g)]));
    assert_eq!(doc["enhancements"].as_array().unwrap().len(), 4);
    assert_eq!(doc["distinct_cover_forms"], 2);
}

#[test]
fn random_weights_follow_the_seed() {
    let args = |seed: &str| {
        stdout(&run(&[
            "gen",
            "--surface",
            "torus",
            "-m",
            "2",
            "-n",
            "2",
            "--weights",
            "random",
            "--seed",
            seed,
        ]))
    };
    assert_eq!(args("7"), args("7"));
    assert_ne!(args("7"), args("8"));
}

#[test]
fn job_count_does_not_change_output() {
    let dir = TempDir::new().unwrap();
    let graphs: Vec<PathBuf> = (0..4)
        .map(|i| {
            let seed = i.to_string();
            gen(
                &dir,
                &format!("g{i}.json"),
                &[
                    "--surface",
                    "mobius",
                    "-m",
                    "2",
                    "-n",
                    "3",
                    "--weights",
                    "random",
                    "--seed",
                    &seed,
                ],
            )
        })
        .collect();
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let mut cmd = bin();
        cmd.env("SURFACE_DIMER_JOBS", jobs)
            .args(["verify", "--identity", "prop24"])
            .args(&graphs);
        let out = cmd.output().unwrap();
        assert_eq!(code(&out), 0);
        let mut doc = json(&out);
        for r in doc.as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("timings");
        }
        outputs.push(doc);
    }
    assert_eq!(outputs[0].as_array().unwrap().len(), 4);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bench_prints_one_csv_row_per_size() {
    let out = run(&[
        "bench",
        "--surface",
        "torus",
        "--sizes",
        "4..8",
        "--step",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("family,surface,rows,cols"));
    assert!(lines[1].starts_with("square,torus,4,4,16,32,4,float"));
}
