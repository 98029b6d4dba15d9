//! Cleaning and structure-aware evaluation for large, noisy multi-label
//! attribute vocabularies.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. File formats,
//! parallel drivers and the command line live in the `labelwork` crate.
//!
//! Modules, roughly in pipeline order:
//!
//! - [`catalog`]: label vocabulary, annotation sets and corpus statistics.
//! - [`text`]: edit distance, similarity ratio, tokenization and
//!   connective ("and" / "or") decomposition of label names.
//! - [`cleanse`]: candidate generation for human review and application of
//!   verified [`cleanse::TransformPlan`]s.
//! - [`graph`]: undirected label-relation graph with hop distances.
//! - [`metrics`]: thresholding, F-beta reports (flat, or-aware, graph
//!   distance), exclusion enforcement, run deviation and threshold sweeps.
//! - [`compare`]: degree of consistency / discriminancy between two metrics.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod catalog;
pub mod cleanse;
pub mod compare;
mod error;
pub mod graph;
pub mod metrics;
pub mod text;

pub use catalog::{AnnotationSet, LabelCatalog, LabelId, LabelRecord, LabelSet};
pub use error::{Error, Result};
