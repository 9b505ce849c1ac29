use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hoctop_cli::RunReport;

fn hoctop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoctop")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn square(dir: &Path) -> PathBuf {
    write(dir, "square.csv", "# unit square scaled by 2\nx,y\n0,0\n2,0\n2,2\n0,2\n")
}

/// FNV-1a, stable across toolchains.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

#[test]
fn compute_square_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoctop(&["compute", square(dir.path()).to_str().unwrap(), "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: RunReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.pairs.len(), 1);
    assert_eq!(report.pairs[0].birth, 1.0);
    assert_eq!(format!("{:.5}", report.pairs[0].death), "1.41421");
    assert_eq!(report.probabilities, vec![(1, 1.0)]);
    assert_eq!(report.inferred.holes, 1);
    assert_eq!(report.input.points, 4);
    let t = report.timings;
    assert!(t.triangulate >= 0.0 && t.sort >= 0.0 && t.sweep >= 0.0);
    assert!(t.triangulate + t.sort + t.sweep <= t.total);
}

#[test]
fn json_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let synth = hoctop(&[
        "synth", "lattice", "--rows", "2", "--cols", "3", "--points", "600", "--noise", "0.02", "--seed", "5", "--out",
        cloud.to_str().unwrap(),
    ]);
    assert!(synth.status.success(), "{}", stderr(&synth));
    let out = hoctop(&["compute", cloud.to_str().unwrap(), "--json"]);
    let text = stdout(&out);
    let report: RunReport = serde_json::from_str(&text).unwrap();
    assert!(report.pairs.len() > 6);
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", text);
    let again: RunReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);
}

#[test]
fn csv_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoctop(&["compute", square(dir.path()).to_str().unwrap(), "--csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text, "birth,death\n1,1.4142135623731\n");
    let d = hoctop::io::read_pairs(text.as_bytes()).unwrap();
    assert_eq!(d.pairs()[0].birth, 1.0);
    assert!((d.pairs()[0].death - 2f64.sqrt()).abs() < 1e-14);
}

#[test]
fn synth_wheel_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w7.csv");
    let args =
        ["synth", "wheel", "--spokes", "7", "--points", "3265", "--noise", "0.03", "--seed", "42", "--out", path.to_str().unwrap()];
    assert!(hoctop(&args).status.success());
    let first = fs::read(&path).unwrap();
    assert!(hoctop(&args).status.success());
    assert_eq!(fs::read(&path).unwrap(), first);

    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().count(), 3265);
    let head: Vec<&str> = text.lines().take(3).collect();
    assert_eq!(
        head,
        [
            "-0.5456969774494667,-0.23728268579969447",
            "-0.3197586621145839,-0.8767904334598186",
            "-0.44715866964315426,0.7662716640571846",
        ]
    );
    assert_eq!(fnv1a(&first), GOLDEN_W7);

    let infer = hoctop(&["infer", path.to_str().unwrap()]);
    assert!(stdout(&infer).starts_with("holes: 7\n"), "{}", stdout(&infer));
}

const GOLDEN_W7: u64 = 0x5bd5_154a_8cce_6c3b;

#[test]
fn synth_polygon_needs_poly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let missing = hoctop(&["synth", "polygon", "--points", "50", "--noise", "0", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    let poly = write(dir.path(), "tri.csv", "0,0\n3,0\n0,3\n");
    let ok = hoctop(&[
        "synth", "polygon", "--poly", poly.to_str().unwrap(), "--points", "50", "--noise", "0", "--seed", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(ok.status.success(), "{}", stderr(&ok));
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 50);
}

#[test]
fn verify_reports_all_trials_equal() {
    let out = hoctop(&["verify", "--n", "100", "--trials", "10", "--seed", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "10/10 oracle-equal\n");
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", "0,0\n1,0\n# fine\n1,oops\n");
    let out = hoctop(&["compute", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let short = write(dir.path(), "short.csv", "0,0\n1\n");
    let out = hoctop(&["compute", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn too_few_points_is_explicit() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.csv", "0,0\n1,1\n1,1\n");
    let out = hoctop(&["compute", two.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("at least 3 distinct points, got 2"), "{}", stderr(&out));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(hoctop(&["compute"]).status.code(), Some(1));
    assert_eq!(hoctop(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hoctop(&["--help"]).status.code(), Some(0));
    assert_eq!(hoctop(&["--version"]).status.code(), Some(0));
    assert_eq!(hoctop(&["compute", "/nonexistent/cloud.csv"]).status.code(), Some(1));
}

#[test]
fn infer_and_bottleneck() {
    let dir = tempfile::tempdir().unwrap();
    let out = hoctop(&["infer", square(dir.path()).to_str().unwrap()]);
    assert_eq!(stdout(&out), "holes: 1\ngap: 0.41421356237309515\nP(1) = 100.0000%\n");

    let a = write(dir.path(), "a.csv", "birth,death\n1,3\n0,0.5\n");
    let b = write(dir.path(), "b.csv", "birth,death\n1,2.5\n");
    let out = hoctop(&["bottleneck", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    // (1,3) to (1,2.5) costs 0.5, (0,0.5) to the diagonal costs 0.25
    assert_eq!(stdout(&out).trim().parse::<f64>().unwrap(), 0.5);

    let bad = write(dir.path(), "c.csv", "birth,death\n2,1\n");
    assert_eq!(hoctop(&["bottleneck", a.to_str().unwrap(), bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn svg_dir_gets_three_plots() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("plots");
    let out = hoctop(&["compute", square(dir.path()).to_str().unwrap(), "--svg-dir", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["diagram", "barcode", "staircase"] {
        let text = fs::read_to_string(svg.join(format!("{name}.svg"))).unwrap();
        assert!(text.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(!text.contains("no holes"));
    }

    let flat = write(dir.path(), "flat.csv", "0,0\n4,0\n1,0.5\n");
    let out = hoctop(&["compute", flat.to_str().unwrap(), "--svg-dir", svg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(fs::read_to_string(svg.join("diagram.svg")).unwrap().contains("no holes"));
}

#[test]
fn bench_small_table() {
    let out = hoctop(&["bench", "--max-n", "10000", "--repeats", "1", "--seed", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.contains("ratio spread"));
    assert_eq!(hoctop(&["bench", "--max-n", "10"]).status.code(), Some(1));
}
