//! From a raw edge list to a fully weighted diffusion graph.
//!
//! Node weights come from the rank vector rescaled to [0, 1); edge weights
//! split e^(ell(v) - 1) across each node's in-edges so that influence mass
//! concentrates on the most attractive targets while staying admissible
//! under the linear threshold model.
//!
//! Run with: cargo run --example build_diffusion_graph

use dtim::{lurker_rank, select_targets, DiffusionGraph, RankConfig, SocialGraph, TargetMode};

fn main() -> dtim::Result<()> {
    let (graph, _) = SocialGraph::from_edges(&[
        (0, 1),
        (0, 2),
        (1, 2),
        (2, 3),
        (3, 1),
        (4, 2),
        (4, 3),
        (1, 0),
    ])?;
    let ranks = lurker_rank(&graph, &RankConfig::default())?;
    let dg = DiffusionGraph::derive(graph, &ranks, None)?;

    println!("node  ell       in-weight-sum");
    for v in 0..dg.graph().node_count() as u32 {
        let sum: f64 = dg.in_weighted(v).iter().map(|&(_, b)| b).sum::<f64>() + 0.0;
        println!("{:>4}  {:.6}  {:.6}", v, dg.node_weight(v), sum);
        // for non-isolated nodes the in-weight sum equals e^(ell - 1)
        if !dg.graph().in_neighbors(v).is_empty() {
            assert!((sum - (dg.node_weight(v) - 1.0).exp()).abs() < 1e-12);
        }
    }

    // two ways to cut the target set
    let by_value = select_targets(dg.node_weights(), TargetMode::Absolute(0.5))?;
    let by_share = select_targets(dg.node_weights(), TargetMode::Percentile(40.0))?;
    println!("targets with ell >= 0.5: {:?}", by_value.members());
    println!("top 40% by ell:          {:?}", by_share.members());
    Ok(())
}
