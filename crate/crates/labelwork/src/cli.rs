//! Command-line surface.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use labelwork_core::catalog::{compute_stats, cooccurrence};
use labelwork_core::cleanse::{
    and_splits_from, classify_connectives, find_hierarchy_candidates, or_groups_from, AndSplit, OrGroup, Propagation,
    TransformPlan,
};
use labelwork_core::compare::{compare, ModelFamily, TieConvention};
use labelwork_core::graph::{build_graph, RelationGraph};
use labelwork_core::metrics::{
    enforce_exclusion, log_grid, threshold, EvalScope, ExclusionMode, FlatMetric, FpMode, GraphMetric, MetricReport,
    OrAwareMetric, SampleFilter, ScoreSet,
};
use labelwork_core::text::Connective;
use labelwork_core::{AnnotationSet, LabelCatalog, LabelId, LabelSet};

use crate::config::{ConfigFile, Paths, Settings};
use crate::error::{Error, Result};
use crate::io;
use crate::parallel;
use crate::report::{digest_file, InputDigest, Outputs, Provenance, TOOL, VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "labelwork",
    version,
    about = "Clean, structure and evaluate large multi-label attribute vocabularies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// TOML file with default values for any of these options
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Label file (attribute_id,attribute_name)
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
    /// Ground-truth annotations (id,attribute_ids)
    #[arg(long, global = true)]
    pub annotations: Option<PathBuf>,
    /// Binary predictions in annotation format
    #[arg(long, global = true)]
    pub predictions: Option<PathBuf>,
    /// Raw scores (id,attribute_id,score)
    #[arg(long, global = true)]
    pub scores: Option<PathBuf>,
    /// Transform plan (JSON)
    #[arg(long, global = true)]
    pub plan: Option<PathBuf>,
    /// Curated relation-graph edges
    #[arg(long, global = true)]
    pub graph_edges: Option<PathBuf>,
    /// Model family (model,f_score,g_score)
    #[arg(long, global = true)]
    pub family: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Category/name separator in attribute names
    #[arg(long, global = true)]
    pub separator: Option<String>,
    /// Decision threshold on scores (inclusive)
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Duplicate-candidate similarity threshold
    #[arg(long, global = true)]
    pub similarity: Option<f64>,
    /// Tie tolerance for metric comparison
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub fp_mode: Option<FpModeArg>,
    /// Restrict scoring and the relation graph to a category (repeatable)
    #[arg(long = "category", global = true)]
    pub categories: Vec<String>,
    /// Only evaluate samples with a ground-truth label in scope
    #[arg(long, global = true)]
    pub require_truth: bool,
    /// Build one exclusion group from every label in this category
    #[arg(long, global = true)]
    pub group_category: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub propagation: Option<PropagationArg>,
    #[arg(long, global = true, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Compare duplicate candidates across categories
    #[arg(long, global = true)]
    pub cross_category: bool,
    #[arg(long, global = true)]
    pub sweep_min: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_max: Option<f64>,
    #[arg(long, global = true)]
    pub sweep_points: Option<usize>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FpModeArg {
    Literal,
    Complement,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PropagationArg {
    Transitive,
    Direct,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Strict,
    GTiesDiscordant,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Which {
    And,
    Or,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corpus statistics
    Inspect {
        /// Report co-occurrence for a pair of attribute names (repeatable)
        #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
        pair: Vec<String>,
    },
    /// Near-duplicate label candidates
    Dupes,
    /// Supercategory candidates from contiguous token runs
    Hierarchy,
    /// Classify labels containing a connective word
    Connectives {
        #[arg(long, value_enum, default_value = "and")]
        which: Which,
    },
    /// Apply a transform plan to labels and annotations
    Apply,
    /// Build and export the relation graph
    Graph,
    /// Flat F-beta
    Eval,
    /// Graph-distance F-beta
    EvalGraph,
    /// Or-aware F-beta
    EvalOr,
    /// Flat F-beta after top-1 exclusion
    EvalExcl,
    /// Flat and graph F-beta over a log-spaced threshold grid
    Sweep,
    /// Degree of consistency and discriminancy between two metrics
    Compare,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Inspect { .. } => "inspect",
            Command::Dupes => "dupes",
            Command::Hierarchy => "hierarchy",
            Command::Connectives { .. } => "connectives",
            Command::Apply => "apply",
            Command::Graph => "graph",
            Command::Eval => "eval",
            Command::EvalGraph => "eval-graph",
            Command::EvalOr => "eval-or",
            Command::EvalExcl => "eval-excl",
            Command::Sweep => "sweep",
            Command::Compare => "compare",
        }
    }
}

impl Opts {
    fn as_config(&self) -> ConfigFile {
        ConfigFile {
            labels: self.labels.clone(),
            annotations: self.annotations.clone(),
            predictions: self.predictions.clone(),
            scores: self.scores.clone(),
            plan: self.plan.clone(),
            graph_edges: self.graph_edges.clone(),
            family: self.family.clone(),
            out: self.out.clone(),
            separator: self.separator.clone(),
            threshold: self.threshold,
            beta: self.beta,
            similarity: self.similarity,
            epsilon: self.epsilon,
            fp_mode: self.fp_mode.map(|m| match m {
                FpModeArg::Literal => FpMode::Literal,
                FpModeArg::Complement => FpMode::Complement,
            }),
            categories: (!self.categories.is_empty()).then(|| self.categories.clone()),
            require_truth: self.require_truth.then_some(true),
            group_category: self.group_category.clone(),
            propagation: self.propagation.map(|p| match p {
                PropagationArg::Transitive => Propagation::Transitive,
                PropagationArg::Direct => Propagation::Direct,
            }),
            convention: self.convention.map(|c| match c {
                ConventionArg::Strict => TieConvention::Strict,
                ConventionArg::GTiesDiscordant => TieConvention::GTiesDiscordant,
            }),
            cross_category: self.cross_category.then_some(true),
            sweep_min: self.sweep_min,
            sweep_max: self.sweep_max,
            sweep_points: self.sweep_points,
            threads: self.threads,
        }
    }
}

/// Run a parsed command line; returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let file = match &cli.opts.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (settings, paths) = cli.opts.as_config().over(file).resolve()?;
    let threads = settings.threads;
    let mut session = Session {
        command: cli.command.name(),
        settings,
        outputs: Outputs::new(&paths.out),
        paths,
        inputs: Vec::new(),
    };
    log::info!("{}: start", session.command);
    parallel::with_threads(threads, || dispatch(&mut session, &cli.command))??;
    log::info!("{}: done", session.command);
    Ok(session.outputs.written)
}

fn dispatch(s: &mut Session, command: &Command) -> Result<()> {
    match command {
        Command::Inspect { pair } => inspect(s, pair),
        Command::Dupes => dupes(s),
        Command::Hierarchy => hierarchy(s),
        Command::Connectives { which } => connectives(s, *which),
        Command::Apply => apply(s),
        Command::Graph => graph(s),
        Command::Eval => eval(s),
        Command::EvalGraph => eval_graph(s),
        Command::EvalOr => eval_or(s),
        Command::EvalExcl => eval_excl(s),
        Command::Sweep => sweep(s),
        Command::Compare => compare_cmd(s),
    }
}

struct Session {
    command: &'static str,
    settings: Settings,
    paths: Paths,
    inputs: Vec<InputDigest>,
    outputs: Outputs,
}

impl Session {
    fn need(&self, path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
        path.clone()
            .ok_or_else(|| Error::Usage(format!("{} needs --{flag}", self.command)))
    }

    fn record(&mut self, role: &str, path: &Path) -> Result<()> {
        self.inputs.push(digest_file(role, path)?);
        Ok(())
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            tool: TOOL,
            version: VERSION,
            command: self.command.to_string(),
            inputs: self.inputs.clone(),
            config: serde_json::to_value(&self.settings).expect("settings serialize"),
        }
    }

    fn sep(&self) -> &str {
        &self.settings.separator
    }

    fn catalog(&mut self) -> Result<LabelCatalog> {
        let path = self.need(&self.paths.labels, "labels")?;
        self.record("labels", &path)?;
        Ok(io::read_labels(&path, &self.settings.separator)?.value)
    }

    fn truth(&mut self, catalog: &LabelCatalog) -> Result<AnnotationSet> {
        let path = self.need(&self.paths.annotations, "annotations")?;
        self.record("annotations", &path)?;
        Ok(io::read_annotations(&path, catalog)?.value)
    }

    fn plan(&mut self, catalog: &LabelCatalog) -> Result<Option<TransformPlan>> {
        let Some(path) = self.paths.plan.clone() else {
            return Ok(None);
        };
        self.record("plan", &path)?;
        io::read_plan(&path, catalog, &self.settings.separator).map(Some)
    }

    /// Scores with every ground-truth sample registered; a sample with no
    /// stored rows scores 0 on every label.
    fn scores(&mut self, catalog: &LabelCatalog, truth: &AnnotationSet) -> Result<ScoreSet> {
        let path = self.need(&self.paths.scores, "scores")?;
        self.record("scores", &path)?;
        let mut scores = io::read_scores(&path, catalog)?.value;
        let mut empty = 0usize;
        for id in truth.sample_ids() {
            if !scores.contains_sample(id) {
                scores.ensure_sample(id);
                empty += 1;
            }
        }
        if empty > 0 {
            log::warn!("{}: {empty} samples have no stored scores", path.display());
        }
        Ok(scores)
    }

    /// Binary predictions, or thresholded scores when no prediction file is given.
    fn predictions(
        &mut self,
        catalog: &LabelCatalog,
        truth: &AnnotationSet,
    ) -> Result<(AnnotationSet, Option<ScoreSet>)> {
        if let Some(path) = self.paths.predictions.clone() {
            self.record("predictions", &path)?;
            return Ok((io::read_annotations(&path, catalog)?.value, None));
        }
        if self.paths.scores.is_none() {
            return Err(Error::Usage(format!(
                "{} needs --predictions or --scores",
                self.command
            )));
        }
        let scores = self.scores(catalog, truth)?;
        Ok((threshold(&scores, self.settings.threshold)?, Some(scores)))
    }

    fn scope(&self, catalog: &LabelCatalog) -> Result<EvalScope> {
        let classes = if self.settings.categories.is_empty() {
            catalog.all_ids()
        } else {
            let mut classes = LabelSet::new();
            for c in &self.settings.categories {
                let ids = catalog.ids_in_category(c);
                if ids.is_empty() {
                    return Err(Error::Usage(format!("category {c:?} has no labels")));
                }
                classes.extend(ids.iter());
            }
            classes
        };
        let samples = if self.settings.require_truth {
            SampleFilter::TruthIntersects(classes.clone())
        } else {
            SampleFilter::All
        };
        Ok(EvalScope { classes, samples })
    }

    fn scope_json(&self, scope: &EvalScope, metric: &MetricReport) -> Value {
        json!({
            "categories": self.settings.categories,
            "classes": scope.classes.len(),
            "samples": if self.settings.require_truth { "truth_in_scope" } else { "all" },
            "samples_evaluated": metric.samples_evaluated,
        })
    }

    /// Relation graph from connective structure plus curated edges. The
    /// connective part comes from the plan when one is given, otherwise it
    /// is derived from the label names.
    fn graph(&mut self, catalog: &LabelCatalog) -> Result<(RelationGraph, Value)> {
        let plan = self.plan(catalog)?;
        let (or_groups, and_splits, source): (Vec<OrGroup>, Vec<AndSplit>, &str) = match plan {
            Some(p) => (p.or_groups, p.and_splits, "plan"),
            None => (
                or_groups_from(&classify_connectives(catalog, Connective::Or)),
                and_splits_from(&classify_connectives(catalog, Connective::And)),
                "label_names",
            ),
        };
        let curated = match self.paths.graph_edges.clone() {
            Some(path) => {
                self.record("graph_edges", &path)?;
                io::read_edges(&path, catalog, &self.settings.separator)?
            }
            None => Vec::new(),
        };
        let scope = (!self.settings.categories.is_empty()).then_some(self.settings.categories.as_slice());
        let g = build_graph(catalog, &or_groups, &and_splits, &curated, scope)?;
        let info = json!({
            "connective_source": source,
            "or_groups": or_groups.len(),
            "and_splits": and_splits.len(),
            "curated_edges": curated.len(),
            "summary": g.summary(),
        });
        Ok((g, info))
    }

    fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<()> {
        let prov = self.provenance();
        self.outputs.json(name, &prov, result)
    }
}

fn names(catalog: &LabelCatalog, ids: impl IntoIterator<Item = LabelId>, sep: &str) -> Vec<String> {
    ids.into_iter()
        .map(|id| {
            catalog
                .get(id)
                .map_or_else(|| id.to_string(), |r| r.attribute_name(sep))
        })
        .collect()
}

fn inspect(s: &mut Session, pair: &[String]) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let stats = compute_stats(&truth, &catalog);
    let sep = s.sep().to_string();
    let mut pairs = Vec::new();
    for p in pair.chunks(2) {
        let resolve = |n: &String| {
            io::resolve_name(&catalog, n, &sep).ok_or_else(|| Error::Usage(format!("unknown label name {n:?}")))
        };
        let (a, b) = (resolve(&p[0])?, resolve(&p[1])?);
        let c = cooccurrence(&truth, &catalog, a, b)?;
        pairs.push(json!({
            "first": p[0],
            "second": p[1],
            "count_first": c.count_a,
            "count_second": c.count_b,
            "count_both": c.count_both,
            "merged": c.count_a + c.count_b - c.count_both,
        }));
    }
    let dupes: Vec<Vec<String>> = catalog
        .canonical_duplicates()
        .into_iter()
        .map(|ids| names(&catalog, ids, &sep))
        .collect();
    let result = json!({
        "stats": stats,
        "canonical_duplicates": dupes,
        "uncategorized_labels": catalog.iter().filter(|r| !r.has_category).count(),
        "pairs": pairs,
    });
    s.json("inspect.json", &result)
}

fn dupes(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let same_category = !s.settings.cross_category;
    let pairs = parallel::find_duplicates(&catalog, s.settings.similarity, same_category)?;
    let sep = s.sep().to_string();
    s.outputs.file("dupe_candidates.csv", |w| {
        io::write_duplicate_candidates(w, &pairs, &catalog, &sep)
    })?;
    let result = json!({
        "candidates": pairs.len(),
        "dehyphenated": pairs.iter().filter(|p| p.dehyphenated).count(),
        "similarity": s.settings.similarity,
        "same_category_only": same_category,
    });
    s.json("dupes.json", &result)
}

fn hierarchy(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let found = find_hierarchy_candidates(&catalog);
    let sep = s.sep().to_string();
    s.outputs.file("hierarchy_candidates.csv", |w| {
        io::write_hierarchy_candidates(w, &found, &catalog, &sep)
    })?;
    let parents: BTreeSet<LabelId> = found.iter().map(|c| c.parent).collect();
    let result = json!({ "candidates": found.len(), "parents": parents.len() });
    s.json("hierarchy.json", &result)
}

fn connectives(s: &mut Session, which: Which) -> Result<()> {
    let catalog = s.catalog()?;
    let connective = match which {
        Which::And => Connective::And,
        Which::Or => Connective::Or,
    };
    let tally = classify_connectives(&catalog, connective);
    let sep = s.sep().to_string();
    let labels: Vec<Value> = tally
        .splits
        .iter()
        .map(|sp| {
            json!({
                "id": sp.source,
                "name": names(&catalog, [sp.source], &sep)[0],
                "class": sp.class,
                "tokens": sp.tokens,
                "resolved": sp.resolution.iter().map(|r| r.map(|id| names(&catalog, [id], &sep).remove(0))).collect::<Vec<_>>(),
            })
        })
        .collect();
    let embedded: Vec<Value> = tally
        .embedded_only
        .iter()
        .map(|&id| json!({ "id": id, "name": names(&catalog, [id], &sep)[0] }))
        .collect();
    let plan = match connective {
        Connective::And => TransformPlan {
            and_splits: and_splits_from(&tally),
            ..Default::default()
        },
        Connective::Or => TransformPlan {
            or_groups: or_groups_from(&tally),
            ..Default::default()
        },
    };
    let word = connective.word();
    let result = json!({
        "connective": connective,
        "total": tally.total,
        "all_resolved": tally.all_resolved,
        "none_resolved": tally.none_resolved,
        "partial": tally.partial,
        "labels": labels,
        "embedded_only": embedded,
    });
    s.json(&format!("connectives_{word}.json"), &result)?;
    // bare plan, no envelope, so it can be edited and passed to --plan
    let plan_file = io::write_plan(&plan, &catalog, &sep)?;
    s.outputs.file(&format!("connectives_{word}_plan.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &plan_file).map_err(|e| Error::io(Path::new("plan"), e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(Path::new("plan"), e))
    })
}

fn apply(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let plan = s
        .plan(&catalog)?
        .ok_or_else(|| Error::Usage("apply needs --plan".into()))?;
    let (annotations, new_catalog) = plan.apply(&truth, &catalog, s.settings.propagation)?;
    let sep = s.sep().to_string();
    let removed: Vec<String> = names(&catalog, catalog.ids().filter(|&id| !new_catalog.contains(id)), &sep);
    s.outputs
        .file("labels.csv", |w| io::write_labels(w, &new_catalog, &sep))?;
    s.outputs
        .file("annotations.csv", |w| io::write_annotations(w, &annotations))?;
    let result = json!({
        "labels_before": catalog.len(),
        "labels_after": new_catalog.len(),
        "samples": annotations.len(),
        "positives_before": truth.total_positives(),
        "positives_after": annotations.total_positives(),
        "merges": plan.merges.len(),
        "hierarchy_edges": plan.hierarchy_edges.len(),
        "and_splits": plan.and_splits.len(),
        "removed_labels": removed,
    });
    s.json("apply.json", &result)
}

fn graph(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let (g, info) = s.graph(&catalog)?;
    let sep = s.sep().to_string();
    s.outputs
        .file("graph_edges.csv", |w| io::write_edges(w, &g, &catalog, &sep))?;
    let result = json!({ "categories": s.settings.categories, "graph": info });
    s.json("graph.json", &result)
}

fn eval(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let (pred, _) = s.predictions(&catalog, &truth)?;
    let scope = s.scope(&catalog)?;
    let report = parallel::evaluate(&FlatMetric, &pred, &truth, &scope, s.settings.beta)?;
    let result = json!({ "scope": s.scope_json(&scope, &report), "report": report });
    s.json("eval.json", &result)
}

fn eval_graph(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let (pred, _) = s.predictions(&catalog, &truth)?;
    let scope = s.scope(&catalog)?;
    let (g, info) = s.graph(&catalog)?;
    let metric = GraphMetric {
        graph: &g,
        fp_mode: s.settings.fp_mode,
    };
    let report = parallel::evaluate(&metric, &pred, &truth, &scope, s.settings.beta)?;
    let result = json!({
        "scope": s.scope_json(&scope, &report),
        "fp_mode": s.settings.fp_mode,
        "graph": info,
        "report": report,
    });
    s.json("eval_graph.json", &result)
}

fn eval_or(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let (pred, _) = s.predictions(&catalog, &truth)?;
    let scope = s.scope(&catalog)?;
    let (groups, source) = match s.plan(&catalog)? {
        Some(p) => (p.or_groups, "plan"),
        None => (
            or_groups_from(&classify_connectives(&catalog, Connective::Or)),
            "label_names",
        ),
    };
    let beta = s.settings.beta;
    let flat = parallel::evaluate(&FlatMetric, &pred, &truth, &scope, beta)?;
    let or = parallel::evaluate(&OrAwareMetric::new(&groups), &pred, &truth, &scope, beta)?;
    let result = json!({
        "scope": s.scope_json(&scope, &or),
        "or_groups": groups.len(),
        "or_group_source": source,
        "note": "a true or-label hit only through a component counts as both a TP and an FN",
        "flat": flat,
        "report": or,
    });
    s.json("eval_or.json", &result)
}

fn eval_excl(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let (pred, scores) = s.predictions(&catalog, &truth)?;
    let scores = match scores {
        Some(sc) => sc,
        None => s.scores(&catalog, &truth)?,
    };
    let mut groups: Vec<LabelSet> = s.plan(&catalog)?.map(|p| p.exclusion_groups).unwrap_or_default();
    if let Some(c) = s.settings.group_category.clone() {
        let ids = catalog.ids_in_category(&c);
        if ids.is_empty() {
            return Err(Error::Usage(format!("category {c:?} has no labels")));
        }
        groups.push(ids);
    }
    if groups.is_empty() {
        return Err(Error::Usage(
            "eval-excl needs exclusion groups in --plan or --group-category".into(),
        ));
    }
    let scope = s.scope(&catalog)?;
    let enforced = enforce_exclusion(&pred, &scores, &groups, ExclusionMode::Top1, None)?;
    let beta = s.settings.beta;
    let before = parallel::evaluate(&FlatMetric, &pred, &truth, &scope, beta)?;
    let after = parallel::evaluate(&FlatMetric, &enforced, &truth, &scope, beta)?;
    s.outputs
        .file("predictions_excl.csv", |w| io::write_annotations(w, &enforced))?;
    let sep = s.sep().to_string();
    let group_names: Vec<Vec<String>> = groups.iter().map(|g| names(&catalog, g.iter(), &sep)).collect();
    let result = json!({
        "scope": s.scope_json(&scope, &after),
        "mode": ExclusionMode::Top1,
        "groups": group_names,
        "before": before,
        "report": after,
    });
    s.json("eval_excl.json", &result)
}

fn point_summary(r: &MetricReport) -> Value {
    json!({
        "micro_f": r.micro_f,
        "macro_f": r.macro_f,
        "micro_accuracy": r.micro_accuracy,
        "totals": r.totals,
        "classes_nan": r.classes_nan,
        "classes_zero": r.classes_zero,
        "classes_positive": r.classes_positive,
    })
}

fn sweep(s: &mut Session) -> Result<()> {
    let catalog = s.catalog()?;
    let truth = s.truth(&catalog)?;
    let scores = s.scores(&catalog, &truth)?;
    let scope = s.scope(&catalog)?;
    let (g, info) = s.graph(&catalog)?;
    let st = &s.settings;
    let grid = log_grid(st.sweep_min, st.sweep_max, st.sweep_points)?;
    let points = parallel::sweep(&scores, &truth, &grid, &g, st.fp_mode, st.beta, &scope)?;
    let comparison = match ModelFamily::from_sweep(&points) {
        Ok(family) => {
            let fam_copy = family.clone();
            s.outputs.file("sweep_family.csv", |w| io::write_family(w, &fam_copy))?;
            Some(compare(&family, s.settings.epsilon, s.settings.convention)?)
        }
        Err(_) => None,
    };
    let summary: Vec<Value> = points
        .iter()
        .map(|p| json!({ "threshold": p.threshold, "flat": point_summary(&p.flat), "graph": point_summary(&p.graph) }))
        .collect();
    let result = json!({
        "scope": {
            "categories": s.settings.categories,
            "classes": scope.classes.len(),
            "samples": if s.settings.require_truth { "truth_in_scope" } else { "all" },
        },
        "fp_mode": s.settings.fp_mode,
        "graph": info,
        "points": summary,
        "comparison": comparison,
        "comparison_metrics": { "f": "graph micro F", "g": "flat micro F" },
    });
    s.json("sweep.json", &result)
}

fn compare_cmd(s: &mut Session) -> Result<()> {
    let path = s.need(&s.paths.family, "family")?;
    s.record("family", &path)?;
    let family = io::read_family(&path)?;
    let report = compare(&family, s.settings.epsilon, s.settings.convention)?;
    let result = json!({ "models": family.len(), "report": report });
    s.json("compare.json", &result)
}

/// Binary entry point: parse, run, and print errors to stderr as JSON.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let err = Error::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
