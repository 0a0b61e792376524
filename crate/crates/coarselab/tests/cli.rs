use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Cli {
    cache: TempDir,
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Cli {
    fn new() -> Self {
        Cli {
            cache: tempfile::tempdir().unwrap(),
        }
    }

    fn dir(&self, name: &str) -> PathBuf {
        self.cache.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Out {
        let o = Command::new(env!("CARGO_BIN_EXE_coarselab"))
            .args(args)
            .env("COARSELAB_CACHE", self.cache.path())
            .output()
            .unwrap();
        Out {
            code: o.status.code().unwrap_or(-1),
            stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
            stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
        }
    }

    fn ok(&self, args: &[&str]) -> Out {
        let o = self.run(args);
        assert_eq!(o.code, 0, "{args:?}\n{}\n{}", o.stdout, o.stderr);
        o
    }
}

fn json(p: impl AsRef<Path>) -> Value {
    serde_json::from_slice(&std::fs::read(p.as_ref()).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn all_passed(report: &Value) -> bool {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"].as_bool() == Some(true))
}

#[test]
fn integer_space_export() {
    let cli = Cli::new();
    cli.ok(&["space", "--model", "z", "--range", "100"]);
    let dir = cli.dir("space");
    let points = std::fs::read_to_string(dir.join("points.csv")).unwrap();
    assert_eq!(points.lines().count(), 202);
    let edges = std::fs::read_to_string(dir.join("edges.csv")).unwrap();
    assert_eq!(edges.lines().count(), 201);
    let summary = json(dir.join("summary.json"));
    assert!(summary["version"].is_u64());
    assert_eq!(summary["points"], 201);
    assert!(cli.dir("spaces").read_dir().unwrap().count() == 1);
}

#[test]
fn tree_space_count() {
    let cli = Cli::new();
    let o = cli.ok(&["space", "--model", "t3", "--radius", "10"]);
    assert!(o.stdout.contains("3070 points"), "{}", o.stdout);
    assert_eq!(json(cli.dir("space/summary.json"))["points"], 3070);
}

#[test]
fn plane_space_degree_bound() {
    let cli = Cli::new();
    cli.ok(&["space", "--model", "h2", "--ball", "8", "--sep", "1"]);
    let dir = cli.dir("space");
    let summary = json(dir.join("summary.json"));
    let n = summary["points"].as_u64().unwrap() as usize;
    let mut degree = vec![0usize; n];
    let edges = std::fs::read_to_string(dir.join("edges.csv")).unwrap();
    for line in edges.lines().skip(1) {
        let mut it = line.split(',').map(|s| s.parse::<usize>().unwrap());
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        degree[a] += 1;
        degree[b] += 1;
    }
    assert_eq!(summary["degree_bound"].as_u64().unwrap() as usize, *degree.iter().max().unwrap());
}

#[test]
fn walk_build_and_verify() {
    let cli = Cli::new();
    cli.ok(&["build", "walk", "--n", "1000"]);
    let dir = cli.dir("build-walk");
    assert!(all_passed(&json(dir.join("verification.json"))));
    let map = dir.join("map.json");
    let o = cli.ok(&["verify", path_str(&map), "--checks", "fibers:max=3,adjacent"]);
    assert!(o.stdout.contains("2 of 2 checks passed"));
    assert!(all_passed(&json(cli.dir("verify/verification.json"))));

    let o = cli.run(&["verify", path_str(&map), "--checks", "fibers:max=2"]);
    assert_eq!(o.code, 4);

    let o = cli.ok(&["analyze", "distortion", "--map", path_str(&map), "--anchored", "0"]);
    assert!(!o.stdout.is_empty());
    let rep = json(cli.dir("analyze-distortion/distortion.json"));
    assert!(rep["version"].is_u64());
    assert!(cli.dir("analyze-distortion/distortion.csv").exists());
}

#[test]
fn tiling_build_verify_and_escalate() {
    let cli = Cli::new();
    cli.ok(&["build", "tiling", "--r", "1", "--window", "ball:10"]);
    let dir = cli.dir("build-tiling");
    for f in ["space.json", "tiling.json", "decomposition.json", "verification.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    assert!(all_passed(&json(dir.join("verification.json"))));
    let decomp = dir.join("decomposition.json");
    // Balls of radius 2 exceed the tiling scale and meet four pieces.
    let o = cli.run(&["verify", path_str(&decomp), "--checks", "disjointness,multiplicity:R=2"]);
    assert_eq!(o.code, 4);
    assert!(o.stdout.contains("PASS disjointness"));
    let rep = json(cli.dir("verify/verification.json"));
    assert_eq!(rep["checks"][1]["pass"], false);
    assert!(rep["checks"][1]["witness"]["pieces"].as_array().unwrap().len() > 2);
    cli.ok(&["verify", path_str(&decomp), "--checks", "multiplicity:R=1:metric=model"]);

    cli.ok(&["analyze", "escalation", "--decomp", path_str(&decomp), "--s", "2", "--m", "3"]);
    let rep = json(cli.dir("analyze-escalation").join("escalation.json"));
    let ex: Vec<f64> = rep["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["exponent"].as_f64().unwrap())
        .collect();
    assert_eq!(ex.len(), 4);
    assert!(ex.windows(2).all(|w| w[1] >= w[0]), "{ex:?}");
}

#[test]
fn comb_growth_through_the_cli() {
    let cli = Cli::new();
    cli.ok(&["build", "comb", "--d", "2", "--extent", "50"]);
    let space = cli.dir("build-comb/space.json");
    assert!(space.exists());
    cli.ok(&["analyze", "growth", "--space", path_str(&space), "--center", "origin", "--rmin", "5"]);
    let rep = json(cli.dir("analyze-growth/growth.json"));
    let e = rep["fitted_exponent"].as_f64().unwrap();
    assert!((e - 2.0).abs() < 0.3, "{e}");
    assert!(cli.dir("analyze-growth/growth.csv").exists());
}

#[test]
fn amplified_factor_covers() {
    let cli = Cli::new();
    cli.ok(&["build", "bradyfarb", "--dim", "3", "--ball", "3"]);
    let f = cli.dir("build-bradyfarb/factor_decomposition.json");
    let o = cli.ok(&["verify", path_str(&f), "--checks", "coverage"]);
    assert!(o.stdout.contains("PASS coverage"));
}

#[test]
fn exit_codes() {
    let cli = Cli::new();
    cli.ok(&["build", "tiling", "--window", "ball:4"]);
    let decomp = cli.dir("build-tiling/decomposition.json");
    assert_eq!(cli.run(&["verify", path_str(&decomp), "--checks", "bogus"]).code, 2);
    assert_eq!(cli.run(&["verify", path_str(&decomp), "--checks", "colours:max=0"]).code, 4);
    assert_eq!(cli.run(&["space", "--model", "t3", "--radius", "60"]).code, 3);
    assert_eq!(cli.run(&["space", "--model", "nope"]).code, 2);

    let tiny = cli.dir("tiny");
    cli.ok(&["space", "--model", "z", "--range", "2", "--out", path_str(&tiny)]);
    let space = tiny.join("space.json");
    let o = cli.run(&["analyze", "growth", "--space", path_str(&space), "--center", "origin"]);
    assert_eq!(o.code, 5);
    assert!(o.stderr.contains("enlarge"), "{}", o.stderr);

    std::fs::write(cli.dir("broken.json"), b"{\"kind\": \"space\"}").unwrap();
    let o = cli.run(&["verify", path_str(&cli.dir("broken.json")), "--checks", "connected"]);
    assert_eq!(o.code, 2);
}

#[test]
fn builds_are_deterministic_and_replayable() {
    let cli = Cli::new();
    let (a, b) = (cli.dir("a"), cli.dir("b"));
    for out in [&a, &b] {
        cli.ok(&["--out", path_str(out), "build", "walk", "--n", "300"]);
    }
    for f in ["map.json", "source.json", "target.json", "anchored.csv", "verification.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let o = cli.ok(&["report", "--replay", path_str(&a.join("run.json"))]);
    assert!(o.stdout.contains("MATCH") && !o.stdout.contains("DIFF"), "{}", o.stdout);

    let run = std::fs::read_to_string(a.join("run.json")).unwrap();
    let first = json(a.join("run.json"))["outputs"][0]["sha256"].as_str().unwrap().to_string();
    std::fs::write(a.join("run.json"), run.replace(&first, &"0".repeat(64))).unwrap();
    assert_eq!(cli.run(&["report", "--replay", path_str(&a.join("run.json"))]).code, 4);

    let o = cli.ok(&["report", path_str(&b)]);
    assert!(o.stdout.contains("map.json"));
}
