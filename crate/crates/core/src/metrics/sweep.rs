use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::AnnotationSet;
use crate::error::{Error, Result};
use crate::graph::RelationGraph;

use super::{align, evaluate_aligned, threshold, EvalScope, FlatMetric, FpMode, GraphMetric, MetricReport, ScoreSet};

pub const DEFAULT_SWEEP_RANGE: (f64, f64) = (0.0025, 0.5);
pub const DEFAULT_SWEEP_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub threshold: f64,
    pub flat: MetricReport,
    pub graph: MetricReport,
}

/// `n` thresholds spaced evenly in log space, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo <= hi && hi <= 1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad threshold grid: {n} points over [{lo}, {hi}]"
        )));
    }
    if n == 1 {
        return Ok(Vec::from([lo]));
    }
    let span = libm::log(hi / lo);
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * libm::exp(span * i as f64 / (n - 1) as f64),
        })
        .collect())
}

/// Thresholds must lie in `[0, 1]` and be strictly increasing.
pub fn validate_thresholds(thresholds: &[f64]) -> Result<()> {
    if thresholds.is_empty() {
        return Err(Error::InvalidArgument("no thresholds".into()));
    }
    if let Some(t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidArgument(format!("threshold {t} is outside [0, 1]")));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("thresholds must be strictly increasing".into()));
    }
    Ok(())
}

/// Flat and graph reports for one threshold.
pub fn sweep_point(
    scores: &ScoreSet,
    truth: &AnnotationSet,
    t: f64,
    graph: &RelationGraph,
    fp_mode: FpMode,
    beta: f64,
    scope: &EvalScope,
) -> Result<SweepPoint> {
    let predictions = threshold(scores, t)?;
    let rows = align(&predictions, truth, scope)?;
    Ok(SweepPoint {
        threshold: t,
        flat: evaluate_aligned(&FlatMetric, &rows, &scope.classes, beta)?,
        graph: evaluate_aligned(&GraphMetric { graph, fp_mode }, &rows, &scope.classes, beta)?,
    })
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
    thresholds
        .iter()
        .map(|&t| sweep_point(scores, truth, t, graph, fp_mode, beta, scope))
        .collect()
}
