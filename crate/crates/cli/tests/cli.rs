use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

use pro2eq_core::classifier::parse_golden;

fn data(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect()
}

#[derive(Debug, PartialEq, Eq)]
struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pro2eq(args: &[&str], env: &[(&str, &Path)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pro2eq"));
    cmd.args(args).env_remove("PRO2EQ_CACHE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {:?}", r))
}

#[test]
fn exit_codes_follow_golden_corpus() {
    let ann = data("corpus.ann");
    let ann = ann.to_str().unwrap();
    let golden = parse_golden(&std::fs::read_to_string(data("golden.txt")).unwrap()).unwrap();
    for g in &golden {
        for (strict, want) in [(false, g.expected), (true, g.expected_strict)] {
            let mut args = vec!["--json", "--annotations", ann, "compare", &g.a, &g.b];
            if strict {
                args.insert(0, "--strict-paper");
            }
            let r = pro2eq(&args, &[]);
            assert_eq!(r.code, want.exit_code(), "line {} strict={strict}: {r:?}", g.line);
            assert_eq!(json(&r)["verdict"], want.to_string());
        }
    }
}

#[test]
fn documented_examples() {
    let label = |e: &str| json(&pro2eq(&["classify", e], &[]))["label"].clone();
    assert_eq!(label("Z^3"), "C_Z3");
    assert_eq!(label("Z2*Z2*Z2"), "C_INF({})");
    let r = pro2eq(&["classify", "Mystery"], &[]);
    assert_eq!((r.code, json(&r)["label"].clone()), (2, "C_UNKNOWN".into()));

    assert_eq!(pro2eq(&["compare", "Z2*Z2*Z2", "Z^3 * Z^3"], &[]).code, 0);
    assert_eq!(pro2eq(&["compare", "Z x Z", "F2 x Z"], &[]).code, 1);
    assert_eq!(pro2eq(&["compare", "Z", "Z2 * Z2"], &[]).code, 0);

    let inv = json(&pro2eq(&["invariants", "F2 x Z"], &[]));
    for (k, v) in [
        ("ends", "ONE"),
        ("semistable", "TRUE"),
        ("proType", "TELESCOPIC_INF"),
        ("pNumber", "PINF"),
        ("h2rank", "INF"),
    ] {
        assert_eq!(inv[k], v, "{k}");
    }

    let ends = pro2eq(&["ends", "F2", "--k", "3", "--R", "8"], &[]);
    assert_eq!(json(&ends)["verdict"], "INF");
    assert!(ends.stderr.contains("k\tcomponents\ttouching\n"));

    let ml = pro2eq(&["tower", "ml", data("dyadic.twr").to_str().unwrap()], &[]);
    assert_eq!((json(&ml)["verdict"].clone(), json(&ml)["stage"].clone()), ("FAILS".into(), 0.into()));
    assert!(ml.stderr.starts_with("FAILS(stage 0)"));
}

#[test]
fn tower_commands() {
    let d = |n: &str| data(n).to_str().unwrap().to_string();
    let r = pro2eq(&["tower", "proiso", &d("telescopic_ones.twr"), &d("telescopic_five_zero.twr")], &[]);
    assert_eq!((r.code, json(&r)["proIso"].clone()), (0, true.into()));
    let r = pro2eq(&["tower", "proiso", &d("telescopic_finite.twr"), &d("telescopic_ones.twr")], &[]);
    assert_eq!((r.code, json(&r)["proIso"].clone()), (1, false.into()));
    assert_eq!(json(&pro2eq(&["tower", "type", &d("telescopic_ones.twr")], &[]))["proType"], "TELESCOPIC_INF");
    assert_eq!(json(&pro2eq(&["tower", "type", &d("telescopic_finite.twr")], &[]))["proType"], "PRO_Z");
    let r = pro2eq(&["tower", "protrivial", &d("dyadic.twr")], &[]);
    assert_eq!(json(&r)["verdict"], "NO");
    assert_eq!(pro2eq(&["tower", "type", &d("dyadic.twr")], &[]).code, 3);
}

#[test]
fn errors_exit_above_two() {
    assert_eq!(pro2eq(&["classify", "Z^("], &[]).code, 3);
    assert_eq!(pro2eq(&["frobnicate"], &[]).code, 3);
    assert_eq!(pro2eq(&["--depth", "0", "classify", "Z"], &[]).code, 4);
    assert_eq!(pro2eq(&["tower", "ml", "/nonexistent.twr"], &[]).code, 4);
    assert_eq!(pro2eq(&["--budget", "1000", "ends", "F2", "--R", "12"], &[]).code, 5);
    assert_eq!(pro2eq(&["ends", "FI(Z^2, 2)"], &[]).code, 3);
    assert_eq!(pro2eq(&["--help"], &[]).code, 0);
}

fn commands() -> Vec<Vec<String>> {
    let ann = data("corpus.ann").to_str().unwrap().to_string();
    let mut out: Vec<Vec<String>> = [
        vec!["classify", "Z^3"],
        vec!["--explain", "classify", "Z2 * Z2 * Z2"],
        vec!["--json", "classify", "Mystery"],
        vec!["compare", "Z2*Z2*Z2", "Z^3 * Z^3"],
        vec!["--explain", "compare", "Z x Z", "F2 x Z"],
        vec!["--strict-paper", "compare", "Z^4", "Z^3"],
        vec!["invariants", "F2 x Z"],
        vec!["--explain", "--json", "invariants", "Sg2 x Z5"],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect();
    for (a, b) in [("Knot", "Trefoil"), ("Tree", "Z2 * Sg2"), ("Hyp x Z", "Hyp2 x Z")] {
        out.push(
            ["--annotations", &ann, "compare", a, b].iter().map(|s| s.to_string()).collect(),
        );
    }
    out
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let cache_str = cache.to_str().unwrap().to_string();
    for args in commands() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let plain = pro2eq(&args, &[]);
        let mut with_cache = vec!["--cache", cache_str.as_str()];
        with_cache.extend_from_slice(&args);
        let cold = pro2eq(&with_cache, &[]);
        let warm = pro2eq(&with_cache, &[]);
        assert_eq!(plain, cold, "{args:?}");
        assert_eq!(cold, warm, "{args:?}");
    }
    let entries = walk(&cache);
    assert_eq!(entries.len(), commands().len());
}

#[test]
fn cache_env_var_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let plain = pro2eq(&["classify", "F2 x Z"], &[]);
    let cold = pro2eq(&["classify", "F2 x Z"], &[("PRO2EQ_CACHE", dir.path())]);
    assert_eq!(plain, cold);
    let entries = walk(dir.path());
    assert_eq!(entries.len(), 1);
    std::fs::write(&entries[0], "not json").unwrap();
    let again = pro2eq(&["classify", "F2 x Z"], &[("PRO2EQ_CACHE", dir.path())]);
    assert_eq!(plain, again);
    // normal forms share entries
    pro2eq(&["classify", "Z x F2"], &[("PRO2EQ_CACHE", dir.path())]);
    assert_eq!(walk(dir.path()).len(), 1);
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pairs.txt");
    let pairs = [("Z^3", "Z^2"), ("Z", "Z2 * Z2"), ("Mystery", "Z"), ("F2", "F3")];
    let text: String = std::iter::once("# pairs\n".to_string())
        .chain(pairs.iter().map(|(a, b)| format!("{a} | {b}\n")))
        .collect();
    std::fs::write(&file, text).unwrap();
    let r = pro2eq(&["--json", "--batch", file.to_str().unwrap(), "compare"], &[]);
    let arr = json(&r);
    let arr = arr.as_array().unwrap();
    assert_eq!(arr.len(), pairs.len());
    let mut worst = 0;
    for ((a, b), v) in pairs.iter().zip(arr) {
        let single = pro2eq(&["--json", "compare", a, b], &[]);
        assert_eq!(&json(&single), v);
        worst = worst.max(single.code);
    }
    assert_eq!(r.code, worst);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pro2eq.toml");
    std::fs::write(
        &cfg,
        format!("annotations = {:?}\nstrict-paper = true\n", data("corpus.ann").to_str().unwrap()),
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let r = pro2eq(&["--config", c, "--json", "compare", "Z^4", "Z^3"], &[]);
    assert_eq!(r.code, 2);
    assert_eq!(pro2eq(&["--config", c, "classify", "Trefoil"], &[]).code, 0);
    std::fs::write(&cfg, "depht = 3\n").unwrap();
    assert_eq!(pro2eq(&["--config", c, "classify", "Z"], &[]).code, 4);
}
