//! Synthetic graph generation for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{NodeId, SocialGraph};
use crate::rank::{lurker_rank, RankConfig};
use crate::weights::DiffusionGraph;

/// Directed preferential-attachment graph: each new node receives
/// `edges_per_node` incoming edges from existing nodes picked with
/// probability proportional to degree plus one.
pub fn preferential_attachment(
    node_count: usize,
    edges_per_node: usize,
    rng_seed: u64,
) -> Result<SocialGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut degree = vec![1usize; node_count];
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for v in 1..node_count {
        let attach = edges_per_node.min(v);
        let mut picked: Vec<NodeId> = Vec::with_capacity(attach);
        while picked.len() < attach {
            // degree-weighted draw over nodes 0..v
            let mass: usize = degree[..v].iter().sum();
            let mut draw = rng.gen_range(0..mass);
            let mut u = 0;
            while draw >= degree[u] {
                draw -= degree[u];
                u += 1;
            }
            let u = u as NodeId;
            if !picked.contains(&u) {
                picked.push(u);
            }
        }
        for u in picked {
            edges.push((u, v as NodeId));
            degree[u as usize] += 1;
            degree[v] += 1;
        }
    }
    SocialGraph::from_dense_edges(node_count, &edges)
}

/// Scale-free graph with fully derived weighting: rank, node weights and
/// edge weights in one call.
pub fn synthetic_diffusion(
    node_count: usize,
    edges_per_node: usize,
    rng_seed: u64,
) -> Result<DiffusionGraph> {
    let graph = preferential_attachment(node_count, edges_per_node, rng_seed)?;
    let ranks = lurker_rank(&graph, &RankConfig::default())?;
    DiffusionGraph::derive(graph, &ranks, None)
}
