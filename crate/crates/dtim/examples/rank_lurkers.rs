//! Rank the silent consumers of a small follower graph.
//!
//! Edge (u, v) means v consumes content from u, so nodes that mostly sit at
//! the receiving end of many productive accounts score highest.
//!
//! Run with: cargo run --example rank_lurkers

use dtim::{lurker_rank, RankConfig, SocialGraph};

fn main() -> dtim::Result<()> {
    // a hub (0) broadcasting to a chain of consumers
    let edges = [
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 3),
        (2, 3),
        (3, 4),
        (1, 4),
        (4, 5),
        (2, 5),
    ];
    let (graph, _) = SocialGraph::from_edges(&edges)?;

    let ranks = lurker_rank(&graph, &RankConfig::default())?;
    println!(
        "converged in {} iterations (residual {:.2e})",
        ranks.iterations_used, ranks.residual
    );

    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by(|&a, &b| ranks.scores[b].partial_cmp(&ranks.scores[a]).unwrap());
    println!("node  in  out  score");
    for v in order {
        println!(
            "{:>4} {:>3} {:>4}  {:.6}",
            graph.original_id(v as u32),
            graph.in_degree(v as u32),
            graph.out_degree(v as u32),
            ranks.scores[v]
        );
    }
    Ok(())
}
