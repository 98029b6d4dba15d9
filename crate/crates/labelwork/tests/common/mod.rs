#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

pub const NAMES: &[&str] = &[
    "country::china",
    "country::france",
    "country::present-day france",
    "country::united kingdom",
    "country::england",
    "country::scotland",
    "country::sudan",
    "country::egypt",
    "country::sudan and egypt",
    "country::egypt or iraq",
    "country::iraq",
    "culture::french",
    "culture::british",
    "dimension::tiny",
    "dimension::small",
    "dimension::medium",
    "dimension::large",
    "dimension::huge",
    "medium::watercolor",
    "medium::watercolour",
    "medium::black",
    "medium::black chalk",
    "medium::black chalk on blue paper",
    "medium::bronze gilt",
    "medium::bronze-gilt",
    "medium::wool",
    "medium::silk",
    "medium::wool and silk",
    "medium::sand",
    "tags::portraits",
    "tags::men",
    "tags::women",
];

pub const PLAN: &str = r#"{
  "merges": [
    { "survivor": "medium::watercolor", "absorbed": ["medium::watercolour"] },
    { "survivor": "medium::bronze gilt", "absorbed": ["medium::bronze-gilt"] }
  ],
  "hierarchy_edges": [
    { "parent": "medium::black", "child": "medium::black chalk" },
    { "parent": "medium::black chalk", "child": "medium::black chalk on blue paper" }
  ],
  "and_splits": [
    { "source": "medium::wool and silk", "tokens": ["medium::wool", "medium::silk"], "remove_source": true }
  ],
  "or_groups": [
    { "source": "country::egypt or iraq", "components": ["country::egypt", "country::iraq"] }
  ],
  "exclusion_groups": [
    ["dimension::tiny", "dimension::small", "dimension::medium", "dimension::large", "dimension::huge"]
  ]
}
"#;

pub const EDGES: &str = "# curated\nculture::french,country::france\ncountry::united kingdom,country::england\ncountry::united kingdom,country::scotland\n";

pub struct Fixture {
    pub dir: TempDir,
    pub labels: PathBuf,
    pub train: PathBuf,
    pub scores: PathBuf,
    pub predictions: PathBuf,
    pub plan: PathBuf,
    pub edges: PathBuf,
}

impl Fixture {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

/// Seeded synthetic corpus over [`NAMES`] with dense scores that lean
/// towards the truth, and binary predictions at 0.2.
pub fn fixture(samples: usize, seed: u64) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = NAMES.len();

    let mut labels = String::from("attribute_id,attribute_name\n");
    for (i, name) in NAMES.iter().enumerate() {
        writeln!(labels, "{i},{name}").unwrap();
    }

    let mut train = String::from("id,attribute_ids\n");
    let mut scores = String::from("id,attribute_id,score\n");
    let mut preds = String::from("id,attribute_ids\n");
    for s in 0..samples {
        let id = format!("{s:05x}");
        let truth: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.12)).collect();
        let mut predicted = Vec::new();
        for l in 0..n {
            let u: f64 = rng.random();
            let score = if truth.contains(&l) {
                0.3 + 0.7 * u
            } else {
                0.25 * u * u * u
            };
            writeln!(scores, "{id},{l},{score:.6}").unwrap();
            if format!("{score:.6}").parse::<f64>().unwrap() >= 0.2 {
                predicted.push(l.to_string());
            }
        }
        let t: Vec<String> = truth.iter().map(|l| l.to_string()).collect();
        writeln!(train, "{id},{}", t.join(" ")).unwrap();
        writeln!(preds, "{id},{}", predicted.join(" ")).unwrap();
    }

    let put = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    Fixture {
        labels: put("labels.csv", &labels),
        train: put("train.csv", &train),
        scores: put("scores.csv", &scores),
        predictions: put("predictions.csv", &preds),
        plan: put("plan.json", PLAN),
        edges: put("edges.csv", EDGES),
        dir,
    }
}

pub fn labelwork(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelwork"))
        .args(args.iter().map(|a| a.as_ref()))
        .env("RUST_LOG", "error")
        .output()
        .expect("run labelwork")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}
