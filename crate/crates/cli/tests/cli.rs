use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slavparse"));
    c.env_remove("SLAVPARSE_DATA_DIR");
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--gold"]).status.code(), Some(1));
    assert_eq!(run(&["train", "--output", "x.bin"]).status.code(), Some(1));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("predict"));
}

#[test]
fn data_errors_exit_two() {
    let o = run(&["eval", "--gold", "/nonexistent/g.conllu", "--pred", "/nonexistent/p.conllu"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "--gold", s(&fixture("eval_gold.conllu")), "--pred", s(&fixture("toy.conllu"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_prints_scores_and_collects_results() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("scores.json");
    let o = run(&[
        "eval",
        "--gold",
        s(&fixture("eval_gold.conllu")),
        "--pred",
        s(&fixture("eval_pred.conllu")),
        "--results",
        s(&results),
        "--test-set",
        "cm",
        "--model-name",
        "GEN",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("UAS: 60.00"), "{out}");
    assert!(out.contains("LAS: 40.00"), "{out}");
    assert!(out.contains("UPOS: 100.00"), "{out}");
    assert!(dir.path().join("scores.json.run.json").exists());

    let o = run(&["report", "--results", s(&results)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("*60.00"));
}

#[test]
fn convert_maps_morphotags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.conllu");
    let o = run(&[
        "convert",
        "--input",
        s(&fixture("sample.conllx")),
        "--mapping",
        s(&data("proiel-morphology.tsv")),
        "--output",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\tCase=Acc|Gender=Neut|Number=Sing\t"), "{text}");
    assert!(text.contains("\tMood=Ind|Number=Sing|Person=3|Tense=Past|Voice=Act\t"), "{text}");
    assert!(text.contains("1\tne\tne\tD\tDf\t_\t"), "{text}");
}

#[test]
fn split_and_stats_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("toy.conllu"), dir.path().join("toy.conllu")).unwrap();
    let manifest = dir.path().join("m.toml");
    fs::write(
        &manifest,
        "[[text]]\nlabel = \"toy\"\nvariety = \"OCS\"\nmacro_area = \"south\"\npath = \"toy.conllu\"\nsplit_mode = \"ratio\"\ntokens = 47\n",
    )
    .unwrap();
    let out = dir.path().join("splits");
    let o = run(&["split", "--manifest", s(&manifest), "--out", s(&out)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("(train only)"));
    for sec in ["train", "dev", "test"] {
        assert!(out.join(format!("toy.{sec}.conllu")).exists());
    }
    let o = run(&["stats", "--manifest", s(&manifest)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("47"));
    assert!(o.stderr.is_empty());
}

#[test]
fn data_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(fixture("toy.conllu"), dir.path().join("toy.conllu")).unwrap();
    let manifest = std::env::temp_dir().join(format!("slavparse-env-{}.toml", std::process::id()));
    fs::write(&manifest, "[[text]]\nlabel = \"toy\"\nvariety = \"OES\"\nmacro_area = \"east\"\npath = \"toy.conllu\"\nsplit_mode = \"ratio\"\n").unwrap();
    let o = bin().args(["stats", "--manifest", s(&manifest)]).env("SLAVPARSE_DATA_DIR", dir.path()).output().unwrap();
    fs::remove_file(&manifest).unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn train_small(dir: &Path, tag: &str) -> (PathBuf, PathBuf) {
    let model = dir.join(format!("{tag}.bin"));
    let log = dir.join(format!("{tag}.log.json"));
    let toy = fixture("toy.conllu");
    let o = run(&[
        "train",
        "--train-file",
        s(&toy),
        "--dev-file",
        s(&toy),
        "--char-dim",
        "8",
        "--word-dim",
        "8",
        "--pos-dim",
        "4",
        "--lstm-dim",
        "8",
        "--mlp-dim",
        "8",
        "--epochs",
        "3",
        "--seed",
        "5",
        "--output",
        s(&model),
        "--log",
        s(&log),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (model, log)
}

#[test]
fn train_predict_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (m1, log1) = train_small(dir.path(), "a");
    let (m2, log2) = train_small(dir.path(), "b");
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    assert_eq!(fs::read(&log1).unwrap(), fs::read(&log2).unwrap());

    let record: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a.bin.run.json")).unwrap()).unwrap();
    assert_eq!(record["seed"], 5);
    assert_eq!(record["config"]["d_lstm"], 8);
    assert_eq!(record["inputs"].as_object().unwrap().len(), 1);

    let pred = dir.path().join("pred.conllu");
    let o = run(&["predict", "--model", s(&m1), "--input", s(&fixture("toy.conllu")), "--output", s(&pred)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["eval", "--gold", s(&fixture("toy.conllu")), "--pred", s(&pred)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("UAS: "));

    let o = run(&["predict", "--model", s(&fixture("toy.conllu")), "--input", s(&fixture("toy.conllu")), "--output", s(&pred)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("SLAVPARSE"));
}

#[test]
fn grid_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy.conllu");
    let results = dir.path().join("grid.json");
    let o = run(&[
        "grid",
        "--train-file",
        s(&toy),
        "--dev-file",
        s(&toy),
        "--char-dim",
        "4",
        "--word-dim",
        "4",
        "--pos-dim",
        "4",
        "--epochs",
        "1",
        "--lstm-grid",
        "4,6",
        "--mlp-grid",
        "4",
        "--name",
        "toy-GEN",
        "--output",
        s(&dir.path().join("best.bin")),
        "--results",
        s(&results),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = run(&["report", "--grid", s(&results), "--published"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("toy-GEN"));
    assert!(out.contains("*83.79"));
    assert!(out.contains("*78.42"));
}
