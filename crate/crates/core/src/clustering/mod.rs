//! Two-stage K-Medoids clustering of daily load profiles.
//!
//! Stage 1 reduces each consumer's days to at most four typical load
//! profiles (TLPs). Stage 2 clusters the pooled TLPs of all consumers into
//! K representative patterns, with K chosen by mean silhouette. Each
//! original day then inherits the stage-2 cluster of the TLP it belonged to.

mod distance;
mod kmedoids;
mod silhouette;
mod two_stage;

pub use distance::{DistanceMatrix, DistanceMetric};
pub use kmedoids::{kmedoids, kmedoids_on_matrix, KMedoids, DEFAULT_MAX_ITER};
pub use silhouette::{silhouette, silhouette_on_matrix};
pub use two_stage::{
    assign_days, cluster_days, stage1_tlps, stage2_cluster, ClusterModel, ClusterParams,
    DayAssignment, Stage1Result, TlpAssignment, TlpRef, TypicalLoadProfile, MAX_TLPS,
};
