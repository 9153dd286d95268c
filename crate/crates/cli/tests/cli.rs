use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CORE_PERIPHERY: &str = "0.4532,0.2622;0.2622,0.0225";
/// Outer product of [0.55, 0.45] with itself: row sums 0.55 and 0.45.
const SKEWED_HALVES: &str = "0.3025,0.2475;0.2475,0.2025";
const UNIFORM: &str = "0.25,0.25;0.25,0.25";

fn pskg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pskg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gen(
    dir: &Path,
    name: &str,
    model: &str,
    initiator: &str,
    k: &str,
    edges: &str,
    seed: &str,
) -> String {
    let out = dir.join(name);
    let out = out.to_str().unwrap().to_string();
    let o = pskg(&[
        "gen",
        "--model",
        model,
        "--initiator-inline",
        initiator,
        "--k",
        k,
        "--edges",
        edges,
        "--seed",
        seed,
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn edge_lines(path: &str) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count()
}

#[test]
fn gen_core_periphery_pskg() {
    let dir = TempDir::new().unwrap();
    let init = dir.path().join("core.init");
    fs::write(&init, "2\n0.4532 0.2622\n0.2622 0.0225\n").unwrap();
    let out = dir.path().join("g.tsv");
    let o = pskg(&[
        "gen",
        "--model",
        "pskg",
        "--initiator",
        init.to_str().unwrap(),
        "--k",
        "12",
        "--edges",
        "11400",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("--seed 1"));
    let m = edge_lines(out.to_str().unwrap()) as f64;
    // Poisson(11400) total: 5 sd is about 534.
    assert!((m - 11400.0).abs() < 534.0, "{m} edges");
}

#[test]
fn gen_is_reproducible_from_the_echoed_seed() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a.tsv");
    let o = pskg(&[
        "gen",
        "--initiator-inline",
        CORE_PERIPHERY,
        "--k",
        "8",
        "--edges",
        "500",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let err = stderr(&o);
    let seed = err
        .split("--seed ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .expect("seed echoed");
    let again = gen(
        dir.path(),
        "b.tsv",
        "pskg",
        CORE_PERIPHERY,
        "8",
        "500",
        seed,
    );
    assert_eq!(fs::read(first).unwrap(), fs::read(again).unwrap());
}

#[test]
fn gen_zero_edges_is_header_only() {
    let dir = TempDir::new().unwrap();
    let out = gen(dir.path(), "e.tsv", "skg", UNIFORM, "3", "0", "1");
    assert_eq!(edge_lines(&out), 0);
    assert!(fs::read_to_string(&out).unwrap().contains("# vertices: 8"));
}

#[test]
fn gen_binary_format() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("g.bin");
    let o = pskg(&[
        "gen",
        "--initiator-inline",
        CORE_PERIPHERY,
        "--k",
        "6",
        "--edges",
        "100",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "binary",
    ]);
    assert!(o.status.success());
    assert!(fs::read(&out).unwrap().starts_with(b"PSKG"));
}

#[test]
fn gen_missing_initiator_names_the_path() {
    let dir = TempDir::new().unwrap();
    let o = pskg(&[
        "gen",
        "--initiator",
        "/does/not/exist.init",
        "--k",
        "3",
        "--edges",
        "5",
        "--out",
        dir.path().join("x.tsv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/does/not/exist.init"));
}

#[test]
fn gen_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.tsv");
    let out = out.to_str().unwrap();
    let bad_sum = pskg(&[
        "gen",
        "--initiator-inline",
        "0.5,0.5;0.5,0.5",
        "--k",
        "3",
        "--edges",
        "5",
        "--out",
        out,
    ]);
    assert_eq!(bad_sum.status.code(), Some(2));
    let overflow = pskg(&[
        "gen",
        "--initiator-inline",
        CORE_PERIPHERY,
        "--k",
        "64",
        "--edges",
        "5",
        "--out",
        out,
    ]);
    assert_eq!(overflow.status.code(), Some(2));
    let unwritable = pskg(&[
        "gen",
        "--initiator-inline",
        CORE_PERIPHERY,
        "--k",
        "3",
        "--edges",
        "5",
        "--out",
        "/does/not/exist/g.tsv",
    ]);
    assert_eq!(unwritable.status.code(), Some(2));
    let usage = pskg(&["gen", "--k", "3", "--edges", "5", "--out", out]);
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn partition_matches_the_worked_example() {
    let o = pskg(&[
        "partition",
        "--initiator-inline",
        SKEWED_HALVES,
        "--k",
        "3",
        "--workers",
        "4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ranges: Vec<(u64, u64)> = stdout(&o)
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(ranges, [(0, 1), (1, 3), (3, 5), (5, 8)]);

    let single = pskg(&[
        "partition",
        "--initiator-inline",
        SKEWED_HALVES,
        "--k",
        "3",
        "--workers",
        "1",
    ]);
    assert!(stdout(&single).starts_with("0\t0\t8\t"));

    let zero = pskg(&[
        "partition",
        "--initiator-inline",
        SKEWED_HALVES,
        "--k",
        "3",
        "--workers",
        "0",
    ]);
    assert!(!zero.status.success());
}

#[test]
fn analyze_empty_graph() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "e.tsv", "skg", UNIFORM, "3", "0", "1");
    let out = dir.path().join("patterns");
    let o = pskg(&[
        "analyze",
        "--in",
        &g,
        "--out-dir",
        out.to_str().unwrap(),
        "--patterns",
        "degree",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("degree.csv")).unwrap(),
        "x,y\n0,8\n"
    );
}

#[test]
fn analyze_unknown_pattern_lists_valid_names() {
    let dir = TempDir::new().unwrap();
    let g = gen(dir.path(), "e.tsv", "skg", UNIFORM, "3", "0", "1");
    let o = pskg(&[
        "analyze",
        "--in",
        &g,
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--patterns",
        "triangles",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for name in ["degree", "hop", "scree", "netvalue"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn analyze_core_periphery_writes_four_csvs() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        dir.path(),
        "g.tsv",
        "pskg",
        CORE_PERIPHERY,
        "12",
        "11400",
        "5",
    );
    let out = dir.path().join("patterns");
    let o = pskg(&["analyze", "--in", &g, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["degree", "hop", "scree", "netvalue"] {
        assert!(out.join(format!("{name}.csv")).exists());
    }
    let scree_rows = fs::read_to_string(out.join("scree.csv"))
        .unwrap()
        .lines()
        .count()
        - 1;
    assert_eq!(scree_rows, 20);
}

#[test]
fn compare_same_file_is_zero() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        dir.path(),
        "g.tsv",
        "pskg",
        CORE_PERIPHERY,
        "10",
        "3000",
        "2",
    );
    let o = pskg(&["compare", &g, &g]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    assert!(report.contains("overall PASS"));
    assert_eq!(report.matches("distance=0.000000").count(), 4);
}

#[test]
fn compare_distinct_models_fails() {
    let dir = TempDir::new().unwrap();
    let skg = gen(
        dir.path(),
        "skg.tsv",
        "skg",
        CORE_PERIPHERY,
        "12",
        "11400",
        "1",
    );
    let uniform = gen(dir.path(), "uni.tsv", "skg", UNIFORM, "12", "11400", "1");
    let o = pskg(&["compare", &skg, &uniform]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("overall FAIL"));
}

#[test]
fn compare_skg_and_pskg_at_default_thresholds() {
    let dir = TempDir::new().unwrap();
    let skg = gen(
        dir.path(),
        "skg.tsv",
        "skg",
        CORE_PERIPHERY,
        "12",
        "11400",
        "21",
    );
    let pskg_graph = gen(
        dir.path(),
        "pskg.tsv",
        "pskg",
        CORE_PERIPHERY,
        "12",
        "11400",
        "22",
    );
    let o = pskg(&["compare", &skg, &pskg_graph]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn end_to_end_gen_analyze_compare() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        dir.path(),
        "g.tsv",
        "skg-equiv",
        CORE_PERIPHERY,
        "9",
        "1500",
        "8",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = pskg(&["analyze", "--in", &g, "--out-dir", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let o = pskg(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("distance=0.000000").count(), 4);
    // A directory of CSVs and the edge list it came from agree as well.
    let o = pskg(&["compare", a.to_str().unwrap(), &g]);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn bound_delta(edges: &str, workers: &str, alpha: &str) -> f64 {
    let o = pskg(&[
        "bound",
        "--edges",
        edges,
        "--workers",
        workers,
        "--alpha",
        alpha,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("delta\t"))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn bound_values() {
    let delta = bound_delta("16000", "16", "0.95");
    // sqrt(2000) * sqrt(ln 16 + |ln |ln 0.05||)
    let want = 2000f64.sqrt() * (16f64.ln() + 0.05f64.ln().abs().ln().abs()).sqrt();
    assert!((delta - want).abs() < 1e-9);
    assert!((delta - 88.0).abs() < 0.05);
    let doubled = bound_delta("32000", "16", "0.95");
    assert!((doubled / delta - 2f64.sqrt()).abs() < 1e-12);
    let o = pskg(&[
        "bound",
        "--edges",
        "16000",
        "--workers",
        "16",
        "--alpha",
        "1.0",
    ]);
    assert!(!o.status.success());
}
