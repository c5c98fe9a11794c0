use std::path::Path;
use std::process::{Command, Output};

fn packman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_packman")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = packman(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen_small(dir: &Path, seed: &str) {
    ok(&["gen", "--opt", "3", "--count-min", "69", "--count-max", "111", "--episodes", "2", "--seed", seed, "--out", p(dir)]);
}

#[test]
fn full_pipeline_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "5");
    assert_eq!(std::fs::read_dir(&data).unwrap().count(), 2);

    let model = tmp.path().join("model.json");
    let curve = tmp.path().join("curve.csv");
    ok(&["train", "--data", p(&data), "--episodes", "3", "--max-bins", "6", "--seed", "1", "--out", p(&model), "--curve", p(&curve)]);
    let model2 = tmp.path().join("model2.json");
    ok(&["train", "--data", p(&data), "--episodes", "3", "--max-bins", "6", "--seed", "1", "--out", p(&model2)]);
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&model2).unwrap());
    assert_eq!(std::fs::read_to_string(&curve).unwrap().lines().count(), 4);

    let report = tmp.path().join("r.json");
    ok(&["run", "--algo", "firstfit,walle,packman", "--data", p(&data), "--model", p(&model), "--max-bins", "6", "--out", p(&report)]);
    let parsed = packman::bench::Report::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed.per_algorithm.len(), 3);
    assert_eq!(parsed.per_instance.len(), 6);
    let share: f64 = parsed.per_algorithm.values().map(|s| s.best_share).sum();
    assert!((share - 1.0).abs() < 1e-12);

    let evaluated = tmp.path().join("e.json");
    ok(&["eval", "--model", p(&model), "--data", p(&data), "--compare", "walle", "--out", p(&evaluated)]);
    let e = packman::bench::Report::from_json(&std::fs::read_to_string(&evaluated).unwrap()).unwrap();
    assert_eq!(e.config_echo["max_bins"], 6);

    let csv = tmp.path().join("s.csv");
    let rows = tmp.path().join("rows.csv");
    ok(&["report", "--in", p(&report), "--csv", p(&csv), "--per-instance", p(&rows)]);
    let rows = std::fs::read_to_string(&rows).unwrap();
    assert!(rows.starts_with("algorithm,instance,seed,bins_used,fill_first_opt,time_per_box_s\n"));
    assert_eq!(rows.lines().count(), 7);
}

#[test]
fn invalid_input_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nothing");
    assert_eq!(packman(&["run", "--algo", "walle", "--data", p(&missing), "--out", "x.json"]).status.code(), Some(2));
    assert_eq!(packman(&["run", "--algo", "bogus", "--data", p(&missing), "--out", "x.json"]).status.code(), Some(2));
    assert_eq!(packman(&["gen", "--bins", "4x4", "--out", p(&missing)]).status.code(), Some(2));
    assert_eq!(
        packman(&["gen", "--opt", "1", "--count-min", "9", "--count-max", "3", "--out", p(&missing)]).status.code(),
        Some(2)
    );

    let data = tmp.path().join("data");
    gen_small(&data, "1");
    let corrupt = tmp.path().join("bad.json");
    std::fs::write(&corrupt, "{\"format_version\": 1, \"layers\": [").unwrap();
    let out = packman(&["eval", "--model", p(&corrupt), "--data", p(&data), "--out", p(&tmp.path().join("e.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = packman(&["run", "--algo", "packman", "--data", p(&data), "--out", p(&tmp.path().join("r.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn divergence_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    gen_small(&data, "2");
    let out = packman(&[
        "train", "--data", p(&data), "--episodes", "6", "--max-bins", "6", "--learning-rate", "1e300", "--out",
        p(&tmp.path().join("m.json")),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
