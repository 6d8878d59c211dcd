//! A small hand-crafted network used throughout tests, docs and the CLI's
//! `example2` subcommand.
//!
//! One node (`T`) carries all the lurking weight and is the sole target.
//! Nine ordinary users can reach it over weighted paths, and two of them
//! (`U1`, `U2`) sit on the rim of foreign components: their incoming edges
//! from the cloud nodes carry no influence weight but make them boundary
//! nodes, so diversity-aware selection values them beyond their raw capital.

use crate::error::Result;
use crate::graph::{NodeId, SocialGraph};
use crate::weights::{select_targets, DiffusionGraph, TargetMode, TargetSet};

pub const T: NodeId = 0;
pub const E: NodeId = 1;
pub const C: NodeId = 2;
pub const G: NodeId = 3;
pub const B: NodeId = 4;
pub const H: NodeId = 5;
pub const D: NodeId = 6;
pub const F: NodeId = 7;
pub const A: NodeId = 8;
pub const U1: NodeId = 9;
pub const U2: NodeId = 10;

pub const NODE_COUNT: usize = 19;

/// The weighted (influence-carrying) edges.
pub const WEIGHTED_EDGES: [((NodeId, NodeId), f64); 14] = [
    ((B, T), 0.35),
    ((G, T), 0.3),
    ((C, T), 0.2),
    ((E, T), 0.15),
    ((F, C), 0.7),
    ((A, C), 0.3),
    ((A, F), 0.7),
    ((A, G), 0.8),
    ((H, E), 0.6),
    ((D, H), 0.5),
    ((U1, D), 0.3),
    ((U1, B), 0.6),
    ((U2, D), 0.7),
    ((U2, B), 0.4),
];

/// Builds the example diffusion graph. Nodes 11..=16 and 17..=18 are the
/// cloud components feeding `U1` and `U2` through structure-only edges.
pub fn example_two() -> DiffusionGraph {
    let mut edges: Vec<(NodeId, NodeId)> =
        WEIGHTED_EDGES.iter().map(|&(e, _)| e).collect();
    for cloud in 11..=16 {
        edges.push((cloud, U1));
    }
    for cloud in 17..=18 {
        edges.push((cloud, U2));
    }
    let graph = SocialGraph::from_dense_edges(NODE_COUNT, &edges).expect("valid fixture");
    let mut ell = vec![0.0; NODE_COUNT];
    ell[T as usize] = 0.5;
    DiffusionGraph::manual(graph, ell, &WEIGHTED_EDGES).expect("admissible fixture")
}

/// Target set of the example: exactly `{T}`.
pub fn example_two_targets(dg: &DiffusionGraph) -> Result<TargetSet> {
    select_targets(dg.node_weights(), TargetMode::Absolute(0.5))
}
