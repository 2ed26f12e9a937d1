//! On-disk fixture tree for driving the binary end to end.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use axisprobe::axis::AxisSpec;
use axisprobe::embedding::write_word2vec_binary;
use axisprobe::synthetic::{build_planted, lexicon_word, PlantedConfig, PlantedModel};
use axisprobe::EmbeddingModel;

pub const LEXICON_SIZE: usize = 600;

pub struct Fixture {
    _dir: tempfile::TempDir,
    pub root: PathBuf,
}

impl Fixture {
    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn s(&self, rel: &str) -> String {
        self.path(rel).display().to_string()
    }
}

pub fn planted(rho: f64, seed: u64) -> PlantedModel {
    build_planted(&PlantedConfig {
        rho,
        seed,
        lexicon_size: LEXICON_SIZE,
        ..Default::default()
    })
    .expect("planted model")
}

fn write_text_model(m: &EmbeddingModel, path: &Path) {
    let mut s = format!("{} {}\n", m.vocab_size(), m.dim());
    for (i, w) in m.words().iter().enumerate() {
        s.push_str(w);
        for v in m.row(i) {
            s.push(' ');
            s.push_str(&v.to_string());
        }
        s.push('\n');
    }
    fs::write(path, s).unwrap();
}

fn write_lexicon(dir: &Path, name: &str, words: impl Iterator<Item = (String, f64)>) {
    let d = dir.join(name);
    fs::create_dir_all(&d).unwrap();
    let format = serde_json::json!({
        "name": name,
        "description": "test lexicon",
        "source": "generated",
        "kind": "binary",
        "parser": "delimited",
        "delimiter": "\t",
        "has_header": false,
        "word_column": 0,
        "score_column": 1,
        "data": "data.tsv"
    });
    fs::write(d.join("format.json"), serde_json::to_string_pretty(&format).unwrap()).unwrap();
    let mut data = String::new();
    for (w, s) in words {
        data.push_str(&format!("{w}\t{s}\n"));
    }
    fs::write(d.join("data.tsv"), data).unwrap();
}

pub fn build() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    for sub in [
        "models",
        "axes",
        "lexicons",
        "benchmarks/similarity",
        "benchmarks/analogy",
        "benchmarks/bats/1_inflectional",
    ] {
        fs::create_dir_all(root.join(sub)).unwrap();
    }
    let a = planted(0.5, 11);
    let b = planted(-0.3, 12);
    write_word2vec_binary(&a.model, fs::File::create(root.join("models/planted_a.bin")).unwrap()).unwrap();
    write_text_model(&b.model, &root.join("models/planted_b.txt"));

    fs::write(
        root.join("axes/planted.json"),
        serde_json::to_string_pretty(&a.axis).unwrap(),
    )
    .unwrap();
    fs::write(
        root.join("axes/planted_swapped.json"),
        serde_json::to_string_pretty(&AxisSpec {
            name: "planted_swapped".into(),
            ..a.axis.swapped()
        })
        .unwrap(),
    )
    .unwrap();

    let lex = |i: usize| (lexicon_word(i), if i.is_multiple_of(2) { 1.0 } else { -1.0 });
    write_lexicon(&root.join("lexicons"), "planted", (0..LEXICON_SIZE).map(lex));
    write_lexicon(&root.join("lexicons"), "planted_half", (0..LEXICON_SIZE / 2).map(lex));
    write_lexicon(
        &root.join("lexicons"),
        "planted_shifted",
        (0..LEXICON_SIZE).map(|i| (lexicon_word(i), if i % 3 == 0 { -1.0 } else { 1.0 })),
    );

    let mut pairs = String::from("# word1\tword2\n");
    for i in 0..150 {
        pairs.push_str(&format!("{}\t{}\n", lexicon_word(2 * i), lexicon_word(2 * i + 1)));
    }
    pairs.push_str("missing\tlex00000\n");
    fs::write(root.join("antonyms.tsv"), pairs).unwrap();

    let mut targets = String::from("word,value\n");
    for i in 0..25 {
        targets.push_str(&format!("{},{}\n", lexicon_word(i * 7), (i as f64 * 0.37).sin()));
    }
    targets.push_str("notaword,0.5\n");
    fs::write(root.join("targets.csv"), targets).unwrap();

    let mut sim = String::new();
    for i in 0..40 {
        sim.push_str(&format!(
            "{} {} {}\n",
            lexicon_word(i),
            lexicon_word(i + 40),
            (i * 13 % 17) as f64 / 2.0
        ));
    }
    fs::write(root.join("benchmarks/similarity/toy.txt"), sim).unwrap();
    let mut google = String::from(": capital-toy\n");
    for i in 0..20 {
        let w: Vec<String> = (0..4).map(|k| lexicon_word(100 + i * 4 + k)).collect();
        google.push_str(&w.join(" "));
        google.push('\n');
    }
    google.push_str(": gram-toy\n");
    for i in 0..10 {
        let w: Vec<String> = (0..4).map(|k| lexicon_word(200 + i * 4 + k)).collect();
        google.push_str(&w.join(" "));
        google.push('\n');
    }
    fs::write(root.join("benchmarks/analogy/google.txt"), google).unwrap();
    let mut bats = String::new();
    for i in 0..8 {
        bats.push_str(&format!(
            "{}\t{}/{}\n",
            lexicon_word(300 + i * 3),
            lexicon_word(301 + i * 3),
            lexicon_word(302 + i * 3)
        ));
    }
    fs::write(root.join("benchmarks/bats/1_inflectional/plural.txt"), bats).unwrap();
    Fixture { _dir: dir, root }
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_axisprobe")
}

pub fn run(args: &[String]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn axisprobe")
}

pub fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// One invocation per subcommand, without `--out`/`--threads`.
pub fn invocations(f: &Fixture) -> Vec<(&'static str, Vec<String>)> {
    let models = [f.s("models/planted_a.bin"), f.s("models/planted_b.txt")];
    let lexroot = f.s("lexicons");
    let mut v = Vec::new();
    let mut screen = args(&["screen", "--models"]);
    screen.extend(models.iter().cloned());
    screen.extend(args(&[
        "--axes",
        &f.s("axes"),
        "--lexicons-root",
        &lexroot,
        "--lexicon",
        "planted",
    ]));
    v.push(("screen", screen));
    let mut excise = args(&["excise", "--models"]);
    excise.extend(models.iter().cloned());
    excise.extend(args(&[
        "--axes",
        &f.s("axes/planted.json"),
        "--lexicons-root",
        &lexroot,
        "--lexicon",
        "planted",
        "--reps",
        "40",
        "--fractions",
        "0,0.25,0.5",
        "--seed",
        "7",
    ]));
    v.push(("excise", excise));
    let mut ens = args(&["ensemble", "--models"]);
    ens.extend(models.iter().cloned());
    ens.extend(args(&[
        "--axes",
        &f.s("axes"),
        "--lexicons-root",
        &lexroot,
        "--lexicons",
        "all",
    ]));
    v.push(("ensemble", ens));
    v.push((
        "align",
        args(&[
            "align",
            "--model",
            &models[0],
            "--axis",
            &f.s("axes/planted.json"),
            "--pairs",
            &f.s("antonyms.tsv"),
            "--lexicons-root",
            &lexroot,
            "--lexicon",
            "planted",
            "--top-k",
            "20",
            "--exclude",
            "lex00000",
        ]),
    ));
    v.push((
        "groundtruth",
        args(&[
            "groundtruth",
            "--model",
            &models[0],
            "--axis",
            &f.s("axes/planted.json"),
            "--targets",
            &f.s("targets.csv"),
        ]),
    ));
    v.push(("lexicon", args(&["lexicon", "stats", "--lexicons-root", &lexroot])));
    v.push((
        "plot",
        args(&[
            "plot",
            "scatter",
            "--model",
            &models[1],
            "--axis-x",
            &f.s("axes/planted.json"),
            "--axis-y",
            &f.s("axes/planted_swapped.json"),
            "--lexicons-root",
            &lexroot,
        ]),
    ));
    let mut eval = args(&["eval", "--model"]);
    eval.extend(models.iter().cloned());
    eval.extend(args(&["--benchmarks", &f.s("benchmarks"), "--predictions"]));
    v.push(("eval", eval));
    v
}

/// Data files of an output folder (manifest and log excluded), sorted.
pub fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let n = p.file_name().unwrap().to_string_lossy();
            n != "manifest.json" && n != "axisprobe.log"
        })
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}
