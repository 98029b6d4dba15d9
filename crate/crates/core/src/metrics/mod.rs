//! Multi-label evaluation.
//!
//! Every report is built the same way: each evaluated sample yields a small
//! per-class [`SampleCounts`] from a [`SampleMetric`], and a [`Tally`] folds
//! those in ascending sample-id order. Callers that compute the per-sample
//! counts on several threads get bit-identical reports as long as they fold
//! in that same order.
//!
//! F-beta is `(1 + b^2) TP / ((1 + b^2) TP + b^2 FN + FP)`. A class with
//! `TP = FP = FN = 0` has no defined score; it is counted in
//! [`MetricReport::classes_nan`] and left out of the macro average.

mod deviation;
mod exclusion;
mod scores;
mod sweep;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::catalog::{AnnotationSet, LabelId, LabelSet};
use crate::cleanse::OrGroup;
use crate::error::{Error, Result};
use crate::graph::RelationGraph;

pub use deviation::{deviation_report, DeviationReport};
pub use exclusion::{enforce_exclusion, ExclusionMode};
pub use scores::{threshold, ScoreSet};
pub use sweep::{
    log_grid, sweep, sweep_point, validate_thresholds, SweepPoint, DEFAULT_SWEEP_POINTS, DEFAULT_SWEEP_RANGE,
};

pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_BETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
}

impl ConfusionCounts {
    pub fn is_zero(&self) -> bool {
        self.tp == 0.0 && self.fp == 0.0 && self.fn_ == 0.0
    }

    pub fn fbeta(&self, beta: f64) -> Option<f64> {
        fbeta(self, beta)
    }
}

impl AddAssign<&ConfusionCounts> for ConfusionCounts {
    fn add_assign(&mut self, rhs: &ConfusionCounts) {
        self.tp += rhs.tp;
        self.fp += rhs.fp;
        self.fn_ += rhs.fn_;
    }
}

/// `None` when the denominator vanishes (no truth and no predictions).
pub fn fbeta(counts: &ConfusionCounts, beta: f64) -> Option<f64> {
    let b2 = beta * beta;
    let num = (1.0 + b2) * counts.tp;
    let den = num + b2 * counts.fn_ + counts.fp;
    (den > 0.0).then(|| num / den)
}

pub fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "beta must be positive and finite, got {beta}"
        )))
    }
}

/// How graph false positives are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FpMode {
    /// Each prediction adds `max_T 1/(d(T,P)+1)`.
    #[default]
    Literal,
    /// Each prediction adds `1 - max_T 1/(d(T,P)+1)`.
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Flat,
    OrAware,
    GraphLiteral,
    GraphComplement,
}

/// Which samples enter an evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum SampleFilter {
    #[default]
    All,
    /// Samples whose ground truth holds at least one of these labels.
    TruthIntersects(LabelSet),
    Only(BTreeSet<String>),
}

impl SampleFilter {
    pub fn admits(&self, sample_id: &str, truth: &LabelSet) -> bool {
        match self {
            SampleFilter::All => true,
            SampleFilter::TruthIntersects(labels) => truth.intersects(labels),
            SampleFilter::Only(ids) => ids.contains(sample_id),
        }
    }
}

/// Classes scored and samples evaluated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalScope {
    pub classes: LabelSet,
    pub samples: SampleFilter,
}

impl EvalScope {
    pub fn classes(classes: LabelSet) -> Self {
        EvalScope {
            classes,
            samples: SampleFilter::All,
        }
    }

    pub fn with_samples(mut self, samples: SampleFilter) -> Self {
        self.samples = samples;
        self
    }
}

/// Per-class counts contributed by one sample, ascending label id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleCounts(pub Vec<(LabelId, ConfusionCounts)>);

impl SampleCounts {
    fn from_map(map: BTreeMap<LabelId, ConfusionCounts>) -> Self {
        SampleCounts(map.into_iter().collect())
    }

    pub fn total(&self) -> ConfusionCounts {
        let mut t = ConfusionCounts::default();
        for (_, c) in &self.0 {
            t += c;
        }
        t
    }
}

/// Per-sample scoring rule.
pub trait SampleMetric {
    fn kind(&self) -> MetricKind;

    /// Counts for one sample; only labels in `classes` are scored.
    fn sample(&self, truth: &LabelSet, predicted: &LabelSet, classes: &LabelSet) -> SampleCounts;
}

/// Standard set comparison.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlatMetric;

impl SampleMetric for FlatMetric {
    fn kind(&self) -> MetricKind {
        MetricKind::Flat
    }

    fn sample(&self, truth: &LabelSet, predicted: &LabelSet, classes: &LabelSet) -> SampleCounts {
        let mut map: BTreeMap<LabelId, ConfusionCounts> = BTreeMap::new();
        for l in truth.iter().filter(|&l| classes.contains(l)) {
            let c = map.entry(l).or_default();
            if predicted.contains(l) {
                c.tp += 1.0;
            } else {
                c.fn_ += 1.0;
            }
        }
        for l in predicted.iter().filter(|&l| classes.contains(l) && !truth.contains(l)) {
            map.entry(l).or_default().fp += 1.0;
        }
        SampleCounts::from_map(map)
    }
}

/// Flat scoring, except that a true or-label also earns a TP when any of its
/// components is predicted. FP and FN are left exactly as in the flat rule,
/// so a component-only hit yields both a TP and an FN for the or-label.
#[derive(Debug, Clone, Default)]
pub struct OrAwareMetric {
    groups: BTreeMap<LabelId, LabelSet>,
}

impl OrAwareMetric {
    pub fn new(or_groups: &[OrGroup]) -> Self {
        let mut groups: BTreeMap<LabelId, LabelSet> = BTreeMap::new();
        for g in or_groups {
            groups.entry(g.source).or_default().extend(g.components.iter().copied());
        }
        OrAwareMetric { groups }
    }
}

impl SampleMetric for OrAwareMetric {
    fn kind(&self) -> MetricKind {
        MetricKind::OrAware
    }

    fn sample(&self, truth: &LabelSet, predicted: &LabelSet, classes: &LabelSet) -> SampleCounts {
        let SampleCounts(mut entries) = FlatMetric.sample(truth, predicted, classes);
        for (label, counts) in &mut entries {
            if counts.fn_ > 0.0 {
                if let Some(components) = self.groups.get(label) {
                    if predicted.intersects(components) {
                        counts.tp += 1.0;
                    }
                }
            }
        }
        SampleCounts(entries)
    }
}

/// Partial credit `1 / (d + 1)` from hop distance in a relation graph.
///
/// Per sample, with `max` over an empty set taken as 0:
/// `TP = sum_T max_P c(T,P)`, `FN = sum_T (1 - max_P c(T,P))`, and
/// `FP = sum_P max_T c(T,P)` ([`FpMode::Literal`]) or
/// `FP = sum_P (1 - max_T c(T,P))` ([`FpMode::Complement`]).
#[derive(Debug, Clone, Copy)]
pub struct GraphMetric<'a> {
    pub graph: &'a RelationGraph,
    pub fp_mode: FpMode,
}

impl SampleMetric for GraphMetric<'_> {
    fn kind(&self) -> MetricKind {
        match self.fp_mode {
            FpMode::Literal => MetricKind::GraphLiteral,
            FpMode::Complement => MetricKind::GraphComplement,
        }
    }

    fn sample(&self, truth: &LabelSet, predicted: &LabelSet, classes: &LabelSet) -> SampleCounts {
        let t: Vec<LabelId> = truth.iter().filter(|&l| classes.contains(l)).collect();
        let p: Vec<LabelId> = predicted.iter().filter(|&l| classes.contains(l)).collect();
        let best = |from: LabelId, over: &[LabelId]| {
            over.iter()
                .map(|&o| self.graph.distance(from, o).credit())
                .fold(0.0, f64::max)
        };

        let mut map: BTreeMap<LabelId, ConfusionCounts> = BTreeMap::new();
        for &tl in &t {
            let credit = best(tl, &p);
            let c = map.entry(tl).or_default();
            c.tp += credit;
            c.fn_ += 1.0 - credit;
        }
        for &pl in &p {
            let credit = best(pl, &t);
            map.entry(pl).or_default().fp += match self.fp_mode {
                FpMode::Literal => credit,
                FpMode::Complement => 1.0 - credit,
            };
        }
        SampleCounts::from_map(map)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub beta: f64,
    pub micro_f: Option<f64>,
    pub macro_f: Option<f64>,
    /// Flat kind only: `(TP + TN) / (samples * classes)`.
    pub micro_accuracy: Option<f64>,
    pub totals: ConfusionCounts,
    pub samples_evaluated: usize,
    pub class_count: usize,
    pub classes_nan: usize,
    pub classes_zero: usize,
    pub classes_positive: usize,
    pub per_class_f: BTreeMap<LabelId, Option<f64>>,
    pub counts: BTreeMap<LabelId, ConfusionCounts>,
}

/// Ordered accumulator of [`SampleCounts`].
#[derive(Debug, Clone, Default)]
pub struct Tally {
    per_class: BTreeMap<LabelId, ConfusionCounts>,
    totals: ConfusionCounts,
    samples: usize,
}

impl Tally {
    pub fn add(&mut self, counts: &SampleCounts) {
        for (label, c) in &counts.0 {
            *self.per_class.entry(*label).or_default() += c;
            self.totals += c;
        }
        self.samples += 1;
    }

    pub fn finish(self, kind: MetricKind, beta: f64, classes: &LabelSet) -> MetricReport {
        let mut per_class_f = BTreeMap::new();
        let mut counts = BTreeMap::new();
        let (mut nan, mut zero, mut positive) = (0, 0, 0);
        let mut defined_sum = 0.0;
        for class in classes {
            let c = self.per_class.get(&class).copied().unwrap_or_default();
            let f = fbeta(&c, beta);
            match f {
                None => nan += 1,
                Some(v) if v > 0.0 => positive += 1,
                Some(_) => zero += 1,
            }
            if let Some(v) = f {
                defined_sum += v;
            }
            per_class_f.insert(class, f);
            counts.insert(class, c);
        }
        let defined = zero + positive;
        let micro_accuracy = match kind {
            MetricKind::Flat => {
                let decisions = (self.samples * classes.len()) as f64;
                let t = &self.totals;
                let tn = decisions - t.tp - t.fp - t.fn_;
                (decisions > 0.0).then(|| (t.tp + tn) / decisions)
            }
            _ => None,
        };
        MetricReport {
            kind,
            beta,
            micro_f: fbeta(&self.totals, beta),
            macro_f: (defined > 0).then(|| defined_sum / defined as f64),
            micro_accuracy,
            totals: self.totals,
            samples_evaluated: self.samples,
            class_count: classes.len(),
            classes_nan: nan,
            classes_zero: zero,
            classes_positive: positive,
            per_class_f,
            counts,
        }
    }
}

/// A sample admitted by the scope: (id, truth, prediction).
pub type AlignedSample<'a> = (&'a str, &'a LabelSet, &'a LabelSet);

/// Pair truth and prediction rows. Both sets must hold the same sample ids.
pub fn align<'a>(
    predictions: &'a AnnotationSet,
    truth: &'a AnnotationSet,
    scope: &EvalScope,
) -> Result<Vec<AlignedSample<'a>>> {
    if predictions.len() != truth.len() {
        return Err(Error::SampleMismatch(format!(
            "{} predicted samples vs {} ground-truth samples",
            predictions.len(),
            truth.len()
        )));
    }
    let mut rows = Vec::with_capacity(truth.len());
    for ((tid, tl), (pid, pl)) in truth.iter().zip(predictions.iter()) {
        if tid != pid {
            let missing = if predictions.contains_sample(tid) { pid } else { tid };
            return Err(Error::SampleMismatch(format!("sample {missing:?} is not in both sets")));
        }
        if scope.samples.admits(tid, tl) {
            rows.push((tid, tl, pl));
        }
    }
    Ok(rows)
}

/// Score already-aligned rows sequentially.
pub fn evaluate_aligned<M: SampleMetric + ?Sized>(
    metric: &M,
    rows: &[AlignedSample<'_>],
    classes: &LabelSet,
    beta: f64,
) -> Result<MetricReport> {
    check_beta(beta)?;
    let mut tally = Tally::default();
    for (_, truth, predicted) in rows {
        tally.add(&metric.sample(truth, predicted, classes));
    }
    Ok(tally.finish(metric.kind(), beta, classes))
}

pub fn evaluate<M: SampleMetric + ?Sized>(
    metric: &M,
    predictions: &AnnotationSet,
    truth: &AnnotationSet,
    scope: &EvalScope,
    beta: f64,
) -> Result<MetricReport> {
    check_beta(beta)?;
    let rows = align(predictions, truth, scope)?;
    evaluate_aligned(metric, &rows, &scope.classes, beta)
}

pub fn fbeta_report(
    predictions: &AnnotationSet,
    truth: &AnnotationSet,
    beta: f64,
    scope: &EvalScope,
) -> Result<MetricReport> {
    evaluate(&FlatMetric, predictions, truth, scope, beta)
}

pub fn or_aware_report(
    predictions: &AnnotationSet,
    truth: &AnnotationSet,
    or_groups: &[OrGroup],
    beta: f64,
    scope: &EvalScope,
) -> Result<MetricReport> {
    evaluate(&OrAwareMetric::new(or_groups), predictions, truth, scope, beta)
}

pub fn graph_fbeta_report(
    predictions: &AnnotationSet,
    truth: &AnnotationSet,
    graph: &RelationGraph,
    beta: f64,
    fp_mode: FpMode,
    scope: &EvalScope,
) -> Result<MetricReport> {
    evaluate(&GraphMetric { graph, fp_mode }, predictions, truth, scope, beta)
}
