//! Thread-pool drivers. Work is split across threads but always reduced in
//! input order, so results do not depend on the thread count.

use rayon::prelude::*;

use labelwork_core::cleanse::{DuplicateCandidate, DuplicateScanner};
use labelwork_core::graph::RelationGraph;
use labelwork_core::metrics::{
    align, check_beta, sweep_point, validate_thresholds, EvalScope, FpMode, MetricReport, SampleCounts, SampleMetric,
    ScoreSet, SweepPoint, Tally,
};
use labelwork_core::{AnnotationSet, LabelCatalog};

use crate::error::{Error, Result};

/// Run `f` on a pool capped at `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn find_duplicates(
    catalog: &LabelCatalog,
    threshold: f64,
    same_category_only: bool,
) -> Result<Vec<DuplicateCandidate>> {
    let scanner = DuplicateScanner::new(catalog, threshold, same_category_only)?;
    let rows: Vec<Vec<DuplicateCandidate>> = (0..scanner.rows()).into_par_iter().map(|i| scanner.row(i)).collect();
    Ok(DuplicateScanner::finish(rows.concat()))
}

pub fn evaluate<M: SampleMetric + Sync + ?Sized>(
    metric: &M,
    predictions: &AnnotationSet,
    truth: &AnnotationSet,
    scope: &EvalScope,
    beta: f64,
) -> Result<MetricReport> {
    check_beta(beta)?;
    let rows = align(predictions, truth, scope)?;
    let counts: Vec<SampleCounts> = rows
        .par_iter()
        .map(|(_, t, p)| metric.sample(t, p, &scope.classes))
        .collect();
    let mut tally = Tally::default();
    for c in &counts {
        tally.add(c);
    }
    Ok(tally.finish(metric.kind(), beta, &scope.classes))
}

pub fn sweep(
    scores: &ScoreSet,
    truth: &AnnotationSet,
    thresholds: &[f64],
    graph: &RelationGraph,
    fp_mode: FpMode,
    beta: f64,
    scope: &EvalScope,
) -> Result<Vec<SweepPoint>> {
    validate_thresholds(thresholds)?;
    let points: labelwork_core::Result<Vec<SweepPoint>> = thresholds
        .par_iter()
        .map(|&t| sweep_point(scores, truth, t, graph, fp_mode, beta, scope))
        .collect();
    Ok(points?)
}
