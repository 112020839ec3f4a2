//! Corpus analytics for machine-translationese detection.
//!
//! The pipeline runs in five stages over tagged corpora:
//!
//! - [`corpus`]: the canonical token/sentence/document model and its
//!   column-based file format.
//! - [`features`]: the five-layer, ratio-normalized feature set (lexical,
//!   syntactical, readability, translatability, N-PoS-gram).
//! - [`selection`]: chi-square ranking of features against class labels and
//!   top-k retention.
//! - [`classify`]: five classical classifiers evaluated over shared
//!   stratified folds, with accuracy and F1 averaged across classifiers.
//! - [`cluster`] and [`stats`]: k-means with the adjusted Rand index, and
//!   per-feature group contrasts (ANOVA or Kruskal-Wallis behind a normality
//!   gate).
//!
//! [`grouping`] maps document labels onto the comparison tasks, and [`synth`]
//! generates planted-signal corpora used by the test suites and the demo
//! command.

pub mod classify;
pub mod cluster;
pub mod corpus;
pub mod features;
pub mod grouping;
pub mod matrix;
pub mod selection;
pub mod stats;
pub mod synth;

pub use corpus::{Corpus, Document, GroupLabel, Origin, Sentence, Tagset, Token};
pub use features::{FeatureInventory, FeatureVector};
pub use matrix::FeatureMatrix;
