//! Degree of consistency (DoC) and degree of discriminancy (DoD) between two
//! metrics `f` and `g` scored over the same family of models.
//!
//! For every unordered pair with `df = f(B) - f(A)` and `dg = g(B) - g(A)`:
//!
//! * both `|df| <= eps` and `|dg| <= eps`: skipped;
//! * `|dg| <= eps` only: counted in P (f separates, g ties);
//! * `|df| <= eps` only: counted in Q (g separates, f ties);
//! * otherwise R when `df` and `dg` have the same sign, S when they differ.
//!
//! `DoC = |R| / (|R| + |S|)`, `DoD = |P| / |Q|`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub model: String,
    pub f_score: f64,
    pub g_score: f64,
}

/// At least two models with unique tags and finite scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFamily {
    entries: Vec<FamilyEntry>,
}

impl ModelFamily {
    pub fn new(entries: Vec<FamilyEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::TooFew {
                what: "models",
                needed: 2,
                got: entries.len(),
            });
        }
        let mut tags = BTreeSet::new();
        for e in &entries {
            if !tags.insert(e.model.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate model tag {:?}", e.model)));
            }
            if !(e.f_score.is_finite() && e.g_score.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite score for model {:?}",
                    e.model
                )));
            }
        }
        Ok(ModelFamily { entries })
    }

    /// One model per sweep threshold, tagged by the threshold; undefined
    /// micro scores count as 0.
    pub fn from_sweep(points: &[crate::metrics::SweepPoint]) -> Result<Self> {
        Self::new(
            points
                .iter()
                .map(|p| FamilyEntry {
                    model: format!("t={}", p.threshold),
                    f_score: p.graph.micro_f.unwrap_or(0.0),
                    g_score: p.flat.micro_f.unwrap_or(0.0),
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[FamilyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same models with `f` and `g` exchanged.
    pub fn swapped(&self) -> ModelFamily {
        ModelFamily {
            entries: self
                .entries
                .iter()
                .map(|e| FamilyEntry {
                    model: e.model.clone(),
                    f_score: e.g_score,
                    g_score: e.f_score,
                })
                .collect(),
        }
    }
}

/// Where a pair that only `f` separates is counted for DoC.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieConvention {
    /// S holds strictly opposite orderings only. DoC is symmetric in f, g.
    #[default]
    Strict,
    /// S also holds pairs that g ties. DoC is then not symmetric.
    GTiesDiscordant,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum Dod {
    Finite(f64),
    Infinite,
    Undefined,
}

impl Dod {
    pub fn value(self) -> Option<f64> {
        match self {
            Dod::Finite(v) => Some(v),
            Dod::Infinite => Some(f64::INFINITY),
            Dod::Undefined => None,
        }
    }
}

impl Serialize for Dod {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        match self {
            Dod::Finite(v) => s.serialize_f64(*v),
            Dod::Infinite => s.serialize_str("infinite"),
            Dod::Undefined => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    FBetter,
    GBetter,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub r_count: u64,
    pub s_count: u64,
    pub p_count: u64,
    pub q_count: u64,
    pub skipped: u64,
    pub pair_total: u64,
    pub epsilon: f64,
    pub convention: TieConvention,
    pub doc: Option<f64>,
    pub dod: Dod,
    pub verdict: Verdict,
}

/// Class of one ordered score difference pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Skipped,
    R,
    S,
    P,
    Q,
}

/// Classify one pair from its score differences. A pair in P also counts in
/// S under [`TieConvention::GTiesDiscordant`]; that is handled by the caller.
pub fn classify_pair(df: f64, dg: f64, epsilon: f64) -> PairClass {
    let f_tied = df.abs() <= epsilon;
    let g_tied = dg.abs() <= epsilon;
    match (f_tied, g_tied) {
        (true, true) => PairClass::Skipped,
        (false, true) => PairClass::P,
        (true, false) => PairClass::Q,
        (false, false) if (df > 0.0) == (dg > 0.0) => PairClass::R,
        (false, false) => PairClass::S,
    }
}

pub fn compare(family: &ModelFamily, epsilon: f64, convention: TieConvention) -> Result<ComparisonReport> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let e = &family.entries;
    let (mut r, mut s, mut p, mut q, mut skipped) = (0u64, 0u64, 0u64, 0u64, 0u64);
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let df = e[j].f_score - e[i].f_score;
            let dg = e[j].g_score - e[i].g_score;
            match classify_pair(df, dg, epsilon) {
                PairClass::Skipped => skipped += 1,
                PairClass::R => r += 1,
                PairClass::S => s += 1,
                PairClass::P => {
                    p += 1;
                    if convention == TieConvention::GTiesDiscordant {
                        s += 1;
                    }
                }
                PairClass::Q => q += 1,
            }
        }
    }
    let n = e.len() as u64;
    let doc = (r + s > 0).then(|| r as f64 / (r + s) as f64);
    let dod = match (p, q) {
        (0, 0) => Dod::Undefined,
        (_, 0) => Dod::Infinite,
        _ => Dod::Finite(p as f64 / q as f64),
    };
    Ok(ComparisonReport {
        r_count: r,
        s_count: s,
        p_count: p,
        q_count: q,
        skipped,
        pair_total: n * (n - 1) / 2,
        epsilon,
        convention,
        doc,
        dod,
        verdict: interpret(doc, dod),
    })
}

/// `f` is better when DoC > 0.5 and DoD(f, g) > 1; `g` is better when
/// DoC > 0.5 and DoD(f, g) < 1, since DoD(g, f) = 1 / DoD(f, g).
pub fn interpret(doc: Option<f64>, dod: Dod) -> Verdict {
    let (Some(doc), Some(dod)) = (doc, dod.value()) else {
        return Verdict::Inconclusive;
    };
    if doc <= 0.5 {
        Verdict::Inconclusive
    } else if dod > 1.0 {
        Verdict::FBetter
    } else if dod < 1.0 {
        Verdict::GBetter
    } else {
        Verdict::Inconclusive
    }
}
