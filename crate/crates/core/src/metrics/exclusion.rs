use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::catalog::{AnnotationSet, LabelId, LabelSet};
use crate::error::{Error, Result};

use super::ScoreSet;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExclusionMode {
    /// Keep only the highest-scoring member; ties go to the lowest id.
    #[default]
    Top1,
}

/// Replace each group's members in a prediction with the group's single
/// argmax-score label. Labels outside every group are untouched.
///
/// `samples` limits enforcement to the given ids; other samples pass through.
pub fn enforce_exclusion(
    predictions: &AnnotationSet,
    scores: &ScoreSet,
    groups: &[LabelSet],
    mode: ExclusionMode,
    samples: Option<&BTreeSet<String>>,
) -> Result<AnnotationSet> {
    let mut seen = BTreeSet::new();
    for g in groups {
        if g.is_empty() {
            return Err(Error::InvalidArgument("empty exclusion group".into()));
        }
        if let Some(dup) = g.iter().find(|&id| !seen.insert(id)) {
            return Err(Error::InvalidArgument(format!(
                "label {dup} is in two exclusion groups"
            )));
        }
    }

    let mut out = AnnotationSet::new();
    for (sample, labels) in predictions.iter() {
        let enforce = samples.is_none_or(|ids| ids.contains(sample));
        if !enforce {
            out.insert(sample, labels.clone())?;
            continue;
        }
        let row = scores
            .sample(sample)
            .ok_or_else(|| Error::MissingScores(String::from(sample)))?;
        let mut kept = labels.clone();
        for g in groups {
            let ExclusionMode::Top1 = mode;
            let mut best: Option<(LabelId, f64)> = None;
            for id in g {
                let s = row.get(&id).copied().unwrap_or(0.0);
                // strict comparison keeps the lowest id on ties
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((id, s));
                }
                kept.remove(id);
            }
            if let Some((id, _)) = best {
                kept.insert(id);
            }
        }
        out.insert(sample, kept)?;
    }
    Ok(out)
}
