//! Run configuration: command-line flags over an optional TOML file over
//! built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use labelwork_core::cleanse::{Propagation, DEFAULT_SIMILARITY};
use labelwork_core::compare::{TieConvention, DEFAULT_EPSILON};
use labelwork_core::metrics::{FpMode, DEFAULT_BETA, DEFAULT_SWEEP_POINTS, DEFAULT_SWEEP_RANGE, DEFAULT_THRESHOLD};

use crate::error::{Error, Result};
use crate::io::DEFAULT_SEPARATOR;

/// Every knob, all optional. Used both for the config file and for the
/// values given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub labels: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub graph_edges: Option<PathBuf>,
    pub family: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub separator: Option<String>,
    pub threshold: Option<f64>,
    pub beta: Option<f64>,
    pub similarity: Option<f64>,
    pub epsilon: Option<f64>,
    pub fp_mode: Option<FpMode>,
    pub categories: Option<Vec<String>>,
    pub require_truth: Option<bool>,
    pub group_category: Option<String>,
    pub propagation: Option<Propagation>,
    pub convention: Option<TieConvention>,
    pub cross_category: Option<bool>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_points: Option<usize>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    /// Relative paths in the file are taken relative to the file itself.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.labels,
            &mut cfg.annotations,
            &mut cfg.predictions,
            &mut cfg.scores,
            &mut cfg.plan,
            &mut cfg.graph_edges,
            &mut cfg.family,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() as u64 + 1);
            Error::parse(path, line, e.message().to_string())
        })
    }

    /// Values set in `self` win over `base`.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            labels: self.labels.or(base.labels),
            annotations: self.annotations.or(base.annotations),
            predictions: self.predictions.or(base.predictions),
            scores: self.scores.or(base.scores),
            plan: self.plan.or(base.plan),
            graph_edges: self.graph_edges.or(base.graph_edges),
            family: self.family.or(base.family),
            out: self.out.or(base.out),
            separator: self.separator.or(base.separator),
            threshold: self.threshold.or(base.threshold),
            beta: self.beta.or(base.beta),
            similarity: self.similarity.or(base.similarity),
            epsilon: self.epsilon.or(base.epsilon),
            fp_mode: self.fp_mode.or(base.fp_mode),
            categories: self.categories.or(base.categories),
            require_truth: self.require_truth.or(base.require_truth),
            group_category: self.group_category.or(base.group_category),
            propagation: self.propagation.or(base.propagation),
            convention: self.convention.or(base.convention),
            cross_category: self.cross_category.or(base.cross_category),
            sweep_min: self.sweep_min.or(base.sweep_min),
            sweep_max: self.sweep_max.or(base.sweep_max),
            sweep_points: self.sweep_points.or(base.sweep_points),
            threads: self.threads.or(base.threads),
        }
    }

    pub fn resolve(self) -> Result<(Settings, Paths)> {
        let (sweep_lo, sweep_hi) = DEFAULT_SWEEP_RANGE;
        let settings = Settings {
            separator: self.separator.unwrap_or_else(|| DEFAULT_SEPARATOR.to_string()),
            threshold: self.threshold.unwrap_or(DEFAULT_THRESHOLD),
            beta: self.beta.unwrap_or(DEFAULT_BETA),
            similarity: self.similarity.unwrap_or(DEFAULT_SIMILARITY),
            epsilon: self.epsilon.unwrap_or(DEFAULT_EPSILON),
            fp_mode: self.fp_mode.unwrap_or_default(),
            categories: self.categories.unwrap_or_default(),
            require_truth: self.require_truth.unwrap_or(false),
            group_category: self.group_category,
            propagation: self.propagation.unwrap_or_default(),
            convention: self.convention.unwrap_or_default(),
            cross_category: self.cross_category.unwrap_or(false),
            sweep_min: self.sweep_min.unwrap_or(sweep_lo),
            sweep_max: self.sweep_max.unwrap_or(sweep_hi),
            sweep_points: self.sweep_points.unwrap_or(DEFAULT_SWEEP_POINTS),
            threads: self.threads,
        };
        settings.validate()?;
        let paths = Paths {
            labels: self.labels,
            annotations: self.annotations,
            predictions: self.predictions,
            scores: self.scores,
            plan: self.plan,
            graph_edges: self.graph_edges,
            family: self.family,
            out: self.out.unwrap_or_else(|| PathBuf::from("labelwork-out")),
        };
        Ok((settings, paths))
    }
}

/// Effective numeric and mode settings. Serialized into every report; the
/// thread count is left out because it never changes a result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub separator: String,
    pub threshold: f64,
    pub beta: f64,
    pub similarity: f64,
    pub epsilon: f64,
    pub fp_mode: FpMode,
    pub categories: Vec<String>,
    pub require_truth: bool,
    pub group_category: Option<String>,
    pub propagation: Propagation,
    pub convention: TieConvention,
    pub cross_category: bool,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Settings {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: String| Err(Error::Config(format!("{what} out of range: {v}")));
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if self.separator.is_empty() {
            return bad("separator", "\"\"".into());
        }
        if !unit(self.threshold) {
            return bad("threshold (expected 0..=1)", self.threshold.to_string());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad("beta (expected > 0)", self.beta.to_string());
        }
        if !unit(self.similarity) {
            return bad("similarity (expected 0..=1)", self.similarity.to_string());
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad("epsilon (expected >= 0)", self.epsilon.to_string());
        }
        if !(self.sweep_min > 0.0 && self.sweep_min <= self.sweep_max && self.sweep_max <= 1.0) {
            return bad(
                "sweep range (expected 0 < min <= max <= 1)",
                format!("{}..{}", self.sweep_min, self.sweep_max),
            );
        }
        if self.sweep_points == 0 {
            return bad("sweep_points (expected >= 1)", "0".into());
        }
        if self.threads == Some(0) {
            return bad("threads (expected >= 1)", "0".into());
        }
        Ok(())
    }
}

/// Input and output locations. Reported through input digests rather than
/// the settings block.
#[derive(Debug, Clone, PartialEq)]
pub struct Paths {
    pub labels: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub plan: Option<PathBuf>,
    pub graph_edges: Option<PathBuf>,
    pub family: Option<PathBuf>,
    pub out: PathBuf,
}
