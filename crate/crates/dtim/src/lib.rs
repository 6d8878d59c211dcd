//! Diversity-sensitive targeted influence maximization under the linear
//! threshold model.
//!
//! Pipeline: ingest a directed social graph, rank silent users, derive
//! diffusion weights and a target set, then pick seed sets that trade off
//! expected captured attention against topical diversity. Monte Carlo
//! simulation and a reverse-sampling selector provide evaluation and a
//! scalable alternative.

pub mod diversity;
pub mod error;
pub mod fixture;
pub mod graph;
pub mod manifest;
pub mod metrics;
pub mod rank;
pub mod ris;
pub mod select;
pub mod simulate;
pub mod synth;
pub mod weights;

pub use diversity::{max_normalize, UnfoldState};
pub use error::{DtimError, Result};
pub use graph::{CentralityStats, LoadWarnings, NodeId, SocialGraph};
pub use rank::{lurker_rank, RankConfig, RankVector};
pub use ris::{ris_select, KptEstimate, RRSet, RisConfig, RisVariant};
pub use select::{dtim_select, first_round_scores, SeedResult, SeedScore, SelectionConfig, Variant};
pub use simulate::{estimate_capital, exact_capital, SimulationReport};
pub use weights::{
    edge_weights, node_weights, select_targets, DiffusionGraph, NodeWeights, TargetMode, TargetSet,
};
