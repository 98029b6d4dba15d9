use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::catalog::LabelId;
use crate::error::{Error, Result};

use super::MetricReport;

/// Spread of per-class F-scores across repeated runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub runs: usize,
    /// Population standard deviation of every defined per-class score,
    /// pooled over all runs.
    pub overall_deviation: f64,
    /// Mean over classes (defined in every run) of each class's
    /// across-run population standard deviation.
    pub mean_class_deviation: Option<f64>,
    pub per_class_deviation: BTreeMap<LabelId, f64>,
    pub scores_pooled: usize,
}

fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    libm::sqrt(var)
}

pub fn deviation_report(runs: &[MetricReport]) -> Result<DeviationReport> {
    if runs.len() < 2 {
        return Err(Error::TooFew {
            what: "runs",
            needed: 2,
            got: runs.len(),
        });
    }
    let classes: Vec<LabelId> = runs[0].per_class_f.keys().copied().collect();
    if runs
        .iter()
        .any(|r| !r.per_class_f.keys().copied().eq(classes.iter().copied()))
    {
        return Err(Error::InvalidArgument("runs score different class sets".into()));
    }

    let pooled: Vec<f64> = runs
        .iter()
        .flat_map(|r| r.per_class_f.values().flatten().copied())
        .collect();

    let mut per_class_deviation = BTreeMap::new();
    for class in classes {
        let values: Option<Vec<f64>> = runs.iter().map(|r| r.per_class_f[&class]).collect();
        if let Some(values) = values {
            per_class_deviation.insert(class, population_std(&values));
        }
    }
    let mean_class_deviation = (!per_class_deviation.is_empty())
        .then(|| per_class_deviation.values().sum::<f64>() / per_class_deviation.len() as f64);

    Ok(DeviationReport {
        runs: runs.len(),
        overall_deviation: population_std(&pooled),
        mean_class_deviation,
        per_class_deviation,
        scores_pooled: pooled.len(),
    })
}
