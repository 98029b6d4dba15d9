mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use labelwork::core::metrics::{fbeta_report, EvalScope};
use labelwork::io::{read_annotations, read_labels};

use common::{fixture, labelwork, read_json, Fixture, NAMES};

fn ok(args: &[&dyn AsRef<std::ffi::OsStr>]) -> String {
    let out = labelwork(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn sha(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

fn truth_rows(f: &Fixture) -> BTreeMap<String, BTreeSet<usize>> {
    let text = std::fs::read_to_string(&f.train).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (id, labels) = l.split_once(',').unwrap();
            (
                id.to_string(),
                labels.split_whitespace().map(|x| x.parse().unwrap()).collect(),
            )
        })
        .collect()
}

fn name_id(name: &str) -> usize {
    NAMES.iter().position(|n| *n == name).unwrap()
}

#[test]
fn every_subcommand_writes_enveloped_reports() {
    let f = fixture(150, 1);
    let before: Vec<String> = [&f.labels, &f.train, &f.scores, &f.predictions, &f.plan, &f.edges]
        .map(|p| sha(p))
        .to_vec();
    let family = f.path("family.csv");
    std::fs::write(&family, "model,f_score,g_score\na,0.5,0.5\nb,0.6,0.7\nc,0.7,0.6\n").unwrap();

    let runs: &[(&[&str], &[&str])] = &[
        (&["inspect"], &["inspect.json"]),
        (&["dupes"], &["dupes.json", "dupe_candidates.csv"]),
        (&["hierarchy"], &["hierarchy.json", "hierarchy_candidates.csv"]),
        (
            &["connectives", "--which", "or"],
            &["connectives_or.json", "connectives_or_plan.json"],
        ),
        (&["apply"], &["apply.json", "labels.csv", "annotations.csv"]),
        (&["graph"], &["graph.json", "graph_edges.csv"]),
        (&["eval"], &["eval.json"]),
        (&["eval-graph"], &["eval_graph.json"]),
        (&["eval-or"], &["eval_or.json"]),
        (&["eval-excl"], &["eval_excl.json", "predictions_excl.csv"]),
        (&["sweep", "--sweep-points", "8"], &["sweep.json", "sweep_family.csv"]),
        (&["compare"], &["compare.json"]),
    ];
    for (args, files) in runs {
        let out = f.path(&format!("out-{}", args[0]));
        let mut full: Vec<&dyn AsRef<std::ffi::OsStr>> = args.iter().map(|a| a as _).collect();
        full.extend::<[&dyn AsRef<std::ffi::OsStr>; 14]>([
            &"--labels",
            &f.labels,
            &"--annotations",
            &f.train,
            &"--scores",
            &f.scores,
            &"--plan",
            &f.plan,
            &"--graph-edges",
            &f.edges,
            &"--family",
            &family,
            &"--out",
            &out,
        ]);
        let stdout = ok(&full);
        for file in *files {
            let path = out.join(file);
            assert!(path.is_file(), "{}: {file} missing", args[0]);
            assert!(
                stdout.contains(&*path.display().to_string()),
                "{}: {file} not listed",
                args[0]
            );
            if file.ends_with(".json") && !file.ends_with("_plan.json") {
                let v = read_json(&path);
                assert_eq!(v["provenance"]["tool"], "labelwork");
                assert_eq!(v["provenance"]["command"], args[0]);
                assert!(v["provenance"]["config"].get("threads").is_none());
                for input in v["provenance"]["inputs"].as_array().unwrap() {
                    let p = Path::new(input["path"].as_str().unwrap());
                    assert_eq!(input["sha256"], sha(p), "{}: digest of {}", args[0], p.display());
                    assert_eq!(input["bytes"], std::fs::metadata(p).unwrap().len());
                }
                assert!(v["result"].is_object());
            }
        }
        let stray: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| !files.contains(&n.as_str()))
            .collect();
        assert!(stray.is_empty(), "{}: unexpected files {stray:?}", args[0]);
    }
    let after: Vec<String> = [&f.labels, &f.train, &f.scores, &f.predictions, &f.plan, &f.edges]
        .map(|p| sha(p))
        .to_vec();
    assert_eq!(before, after, "inputs were modified");
}

#[test]
fn inspect_pair_counts_match_a_direct_count() {
    let f = fixture(400, 2);
    let out = f.path("out");
    ok(&[
        &"inspect",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--pair",
        &"medium::bronze gilt",
        &"medium::bronze-gilt",
        &"--pair",
        &"medium::black chalk",
        &"medium::black",
        &"--out",
        &out,
    ]);
    let r = read_json(&out.join("inspect.json"))["result"].clone();
    let rows = truth_rows(&f);
    for (i, (a, b)) in [
        ("medium::bronze gilt", "medium::bronze-gilt"),
        ("medium::black chalk", "medium::black"),
    ]
    .iter()
    .enumerate()
    {
        let (a, b) = (name_id(a), name_id(b));
        let ca = rows.values().filter(|s| s.contains(&a)).count() as u64;
        let cb = rows.values().filter(|s| s.contains(&b)).count() as u64;
        let both = rows.values().filter(|s| s.contains(&a) && s.contains(&b)).count() as u64;
        let p = &r["pairs"][i];
        assert_eq!(p["count_first"], ca);
        assert_eq!(p["count_second"], cb);
        assert_eq!(p["count_both"], both);
        assert_eq!(p["merged"], ca + cb - both);
    }
    let stats = &r["stats"];
    assert_eq!(stats["label_count"], NAMES.len());
    assert_eq!(stats["sample_count"], 400);
    let mut sizes: Vec<usize> = rows.values().map(|s| s.len()).collect();
    sizes.sort();
    assert_eq!(stats["median_labels_per_sample"], sizes[(sizes.len() - 1) / 2]);
    let dim: BTreeSet<usize> = (0..NAMES.len())
        .filter(|&i| NAMES[i].starts_with("dimension::"))
        .collect();
    let covered = rows.values().filter(|s| !s.is_disjoint(&dim)).count();
    assert_eq!(stats["category_coverage"]["dimension"]["samples"], covered);
}

#[test]
fn apply_writes_a_consistent_corpus() {
    let f = fixture(300, 3);
    let out = f.path("out");
    ok(&[
        &"apply",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--plan",
        &f.plan,
        &"--out",
        &out,
    ]);
    let r = read_json(&out.join("apply.json"))["result"].clone();
    // two merges and one removed and-split source
    assert_eq!(r["labels_before"], NAMES.len());
    assert_eq!(r["labels_after"], NAMES.len() - 3);
    let removed: BTreeSet<&str> = r["removed_labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        removed,
        BTreeSet::from(["medium::watercolour", "medium::bronze-gilt", "medium::wool and silk"])
    );

    let cat = read_labels(&out.join("labels.csv"), "::").unwrap().value;
    let ann = read_annotations(&out.join("annotations.csv"), &cat).unwrap().value;
    let rows = truth_rows(&f);
    let [wc, wc2, bk, chalk, blue, wool, silk, ws] = [
        "medium::watercolor",
        "medium::watercolour",
        "medium::black",
        "medium::black chalk",
        "medium::black chalk on blue paper",
        "medium::wool",
        "medium::silk",
        "medium::wool and silk",
    ]
    .map(name_id);
    for (id, before) in &rows {
        let after: BTreeSet<usize> = ann.get(id).unwrap().iter().map(|l| l.0 as usize).collect();
        let has = |l| before.contains(&l);
        assert_eq!(after.contains(&wc), has(wc) || has(wc2), "{id}");
        assert_eq!(after.contains(&bk), has(bk) || has(chalk) || has(blue), "{id}");
        assert_eq!(after.contains(&chalk), has(chalk) || has(blue), "{id}");
        assert_eq!(after.contains(&wool), has(wool) || has(ws), "{id}");
        assert_eq!(after.contains(&silk), has(silk) || has(ws), "{id}");
        assert!(before
            .iter()
            .filter(|&&l| l != wc2 && l != ws && l != name_id("medium::bronze-gilt"))
            .all(|l| after.contains(l)));
    }
}

#[test]
fn thresholded_scores_equal_the_stored_predictions() {
    // predictions in the fixture are scores >= 0.2, so the threshold is inclusive
    let f = fixture(250, 4);
    let (a, b) = (f.path("a"), f.path("b"));
    ok(&[
        &"eval",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--predictions",
        &f.predictions,
        &"--out",
        &a,
    ]);
    ok(&[
        &"eval",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--scores",
        &f.scores,
        &"--threshold",
        &"0.2",
        &"--out",
        &b,
    ]);
    let ra = read_json(&a.join("eval.json"))["result"]["report"].clone();
    let rb = read_json(&b.join("eval.json"))["result"]["report"].clone();
    assert_eq!(ra, rb);

    let cat = read_labels(&f.labels, "::").unwrap().value;
    let truth = read_annotations(&f.train, &cat).unwrap().value;
    let pred = read_annotations(&f.predictions, &cat).unwrap().value;
    let direct = fbeta_report(&pred, &truth, 2.0, &EvalScope::classes(cat.all_ids())).unwrap();
    // compared through the same text form the binary writes
    let direct: Value = serde_json::from_str(&serde_json::to_string(&direct).unwrap()).unwrap();
    assert_eq!(ra, direct);
}

#[test]
fn category_scope_and_exclusion() {
    let f = fixture(200, 5);
    let out = f.path("out");
    ok(&[
        &"eval-excl",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--scores",
        &f.scores,
        &"--group-category",
        &"dimension",
        &"--category",
        &"dimension",
        &"--require-truth",
        &"--out",
        &out,
    ]);
    let r = read_json(&out.join("eval_excl.json"))["result"].clone();
    assert_eq!(r["scope"]["classes"], 5);
    let rows = truth_rows(&f);
    let dim: BTreeSet<usize> = (0..NAMES.len())
        .filter(|&i| NAMES[i].starts_with("dimension::"))
        .collect();
    assert_eq!(
        r["report"]["samples_evaluated"],
        rows.values().filter(|s| !s.is_disjoint(&dim)).count()
    );

    let cat = read_labels(&f.labels, "::").unwrap().value;
    let enforced = read_annotations(&out.join("predictions_excl.csv"), &cat).unwrap().value;
    assert_eq!(enforced.len(), 200);
    for (id, labels) in enforced.iter() {
        let n = labels.iter().filter(|l| dim.contains(&(l.0 as usize))).count();
        assert_eq!(n, 1, "{id}");
    }
}

#[test]
fn sweep_family_round_trips_through_compare() {
    let f = fixture(200, 6);
    let out = f.path("out");
    ok(&[
        &"sweep",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--scores",
        &f.scores,
        &"--graph-edges",
        &f.edges,
        &"--sweep-points",
        &"16",
        &"--out",
        &out,
    ]);
    let sweep = read_json(&out.join("sweep.json"))["result"].clone();
    assert_eq!(sweep["points"].as_array().unwrap().len(), 16);
    assert_eq!(sweep["points"][0]["threshold"], 0.0025);
    assert_eq!(sweep["points"][15]["threshold"], 0.5);
    let cmp = f.path("cmp");
    ok(&[&"compare", &"--family", &out.join("sweep_family.csv"), &"--out", &cmp]);
    let report = read_json(&cmp.join("compare.json"))["result"]["report"].clone();
    assert_eq!(report, sweep["comparison"]);
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let f = fixture(50, 7);
    let cfg = f.path("run.toml");
    std::fs::write(&cfg, "labels = \"labels.csv\"\nannotations = \"train.csv\"\nscores = \"scores.csv\"\nthreshold = 0.3\nbeta = 1.0\nout = \"cfg-out\"\n").unwrap();
    ok(&[&"eval", &"--config", &cfg, &"--threshold", &"0.2"]);
    let v = read_json(&f.path("cfg-out/eval.json"));
    let c = &v["provenance"]["config"];
    assert_eq!(c["threshold"], 0.2);
    assert_eq!(c["beta"], 1.0);
    assert_eq!(c["epsilon"], 1e-4);
    assert_eq!(v["result"]["report"]["beta"], 1.0);
}

fn err(args: &[&dyn AsRef<std::ffi::OsStr>]) -> (i32, Value) {
    let out = labelwork(args);
    assert!(!out.status.success());
    let text = String::from_utf8(out.stderr).unwrap();
    let line = text.lines().last().unwrap_or_default();
    (
        out.status.code().unwrap(),
        serde_json::from_str(line).unwrap_or_else(|e| panic!("{line}: {e}")),
    )
}

#[test]
fn failures_are_reported_as_json_with_exit_codes() {
    let f = fixture(20, 8);
    let out = f.path("out");

    let (code, e) = err(&[&"eval", &"--annotations", &f.train, &"--out", &out]);
    assert_eq!((code, e["error"]["kind"].as_str()), (2, Some("usage")));

    let (code, e) = err(&[&"eval", &"--no-such-flag"]);
    assert_eq!((code, e["error"]["kind"].as_str()), (2, Some("usage")));

    let (code, e) = err(&[
        &"eval",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--threshold",
        &"1.5",
        &"--out",
        &out,
    ]);
    assert_eq!((code, e["error"]["kind"].as_str()), (2, Some("config")));

    let bad = f.path("bad.csv");
    std::fs::write(&bad, "id,attribute_ids\na,1 2\nb,999\n").unwrap();
    let (code, e) = err(&[
        &"eval",
        &"--labels",
        &f.labels,
        &"--annotations",
        &bad,
        &"--predictions",
        &bad,
        &"--out",
        &out,
    ]);
    assert_eq!(code, 1);
    assert_eq!(e["error"]["line"], 3);
    assert_eq!(e["error"]["path"], bad.display().to_string());

    let plan = f.path("bad_plan.json");
    std::fs::write(
        &plan,
        r#"{"merges":[{"survivor":"medium::nope","absorbed":["medium::silk"]}]}"#,
    )
    .unwrap();
    let (code, e) = err(&[
        &"apply",
        &"--labels",
        &f.labels,
        &"--annotations",
        &f.train,
        &"--plan",
        &plan,
        &"--out",
        &out,
    ]);
    assert_eq!((code, e["error"]["kind"].as_str()), (1, Some("unknown_label")));

    let cfg = f.path("bad.toml");
    std::fs::write(&cfg, "threshhold = 0.2\n").unwrap();
    let (code, e) = err(&[&"eval", &"--config", &cfg]);
    assert_eq!((code, e["error"]["kind"].as_str()), (1, Some("parse")));
    assert_eq!(e["error"]["line"], 1);

    assert!(!out.exists(), "a failed run left output behind");
}

#[test]
fn shipped_plan_and_edges_load() {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let names = [
        "medium::watercolor",
        "medium::watercolour",
        "medium::emerald",
        "medium::emeralds",
        "medium::garnet",
        "medium::garnets",
        "medium::bronze gilt",
        "medium::bronze-gilt",
        "culture::french",
        "country::france",
        "country::united kingdom",
        "country::england",
        "country::scotland",
        "country::sudan",
        "country::egypt",
        "country::sudan and egypt",
    ];
    let mut labels = String::from("attribute_id,attribute_name\n");
    for (i, n) in names.iter().enumerate() {
        labels.push_str(&format!("{i},{n}\n"));
    }
    let labels_path = dir.path().join("labels.csv");
    std::fs::write(&labels_path, labels).unwrap();
    let train = dir.path().join("train.csv");
    std::fs::write(&train, "id,attribute_ids\na,1 3\nb,0 15\n").unwrap();
    let out = dir.path().join("out");
    ok(&[
        &"apply",
        &"--labels",
        &labels_path,
        &"--annotations",
        &train,
        &"--plan",
        &data.join("default_plan.json"),
        &"--out",
        &out,
    ]);
    assert_eq!(
        read_json(&out.join("apply.json"))["result"]["labels_after"],
        names.len() - 4
    );
    ok(&[
        &"graph",
        &"--labels",
        &labels_path,
        &"--graph-edges",
        &data.join("default_edges.csv"),
        &"--out",
        &out,
    ]);
    let g = read_json(&out.join("graph.json"))["result"]["graph"].clone();
    assert_eq!(g["curated_edges"], 3);
    assert_eq!(g["and_splits"], 1);
    let edges = std::fs::read_to_string(out.join("graph_edges.csv")).unwrap();
    assert_eq!(edges.lines().count(), 5, "{edges}");
}
