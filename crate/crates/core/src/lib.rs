//! Seasonal variation analysis for residential smart meter data.
//!
//! The pipeline turns hourly household load readings into daily shapes,
//! extracts typical load profiles per household and representative patterns
//! across households with a two-stage K-Medoids clustering, measures how the
//! mix of patterns shifts between adjacent seasons with a base-K relative
//! entropy, and links those shifts to socioeconomic attributes with CART
//! decision trees.
//!
//! - [`ingestion`]: CSV parsing, the canonical data model and season calendar
//! - [`preprocessing`]: complete-day assembly, outlier removal, min-max normalization
//! - [`clustering`]: K-Medoids, silhouette and the two-stage procedure
//! - [`seasonal`]: per-season cluster occupancy and relative entropy
//! - [`classification`]: variation labels, decision trees, cross-validation, importance
//! - [`synthetic`]: cohort generator with planted ground truth
//! - [`pipeline`]: run configuration, stage orchestration and artifact I/O

pub mod classification;
pub mod clustering;
pub mod error;
pub mod ingestion;
pub mod io;
pub mod pipeline;
pub mod preprocessing;
pub mod seasonal;
pub mod synthetic;

pub use error::{Error, ErrorClass, Result};

/// Number of hourly slots in a daily profile.
pub const HOURS: usize = 24;
