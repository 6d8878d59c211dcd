//! Fixed-point ranking of silent (information-consuming) users via power
//! iteration, used both for target selection and diffusion-graph weighting.
//!
//! Edge direction convention: an edge (u, v) means that v consumes or
//! receives information from u. In-neighbor and out-neighbor counts are
//! Laplace add-one smoothed everywhere to avoid zero or infinite ratios.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{DtimError, Result};
use crate::graph::{NodeId, SocialGraph};

#[derive(Debug, Clone, Copy)]
pub struct RankConfig {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            damping: 0.85,
            tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

/// Stationary score vector. All entries strictly positive, L1-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector {
    pub scores: Vec<f64>,
    pub iterations_used: usize,
    pub residual: f64,
}

/// Smoothed in/out counts for one node.
#[inline]
fn smoothed(g: &SocialGraph, v: NodeId) -> (f64, f64) {
    (g.in_degree(v) as f64 + 1.0, g.out_degree(v) as f64 + 1.0)
}

/// Power iteration for the in-out-neighbors-driven ranking:
/// `score(v) = d * [L_in(v) * (1 + L_out(v))] + (1 - d) / n`,
/// with the vector L1-normalized after each sweep. Stops when the L1 change
/// between consecutive normalized sweeps drops to `tolerance`.
pub fn lurker_rank(g: &SocialGraph, cfg: &RankConfig) -> Result<RankVector> {
    let n = g.node_count();
    if n == 0 {
        return Err(DtimError::EmptyGraph);
    }
    let d = cfg.damping;
    let uniform = 1.0 / n as f64;
    let mut current = vec![uniform; n];
    let mut residual = f64::INFINITY;

    for iteration in 1..=cfg.max_iterations {
        let previous = current;
        let mut next: Vec<f64> = (0..n as NodeId)
            .into_par_iter()
            .map(|v| {
                let (_, out_v) = smoothed(g, v);
                let l_in: f64 = g
                    .in_neighbors(v)
                    .iter()
                    .map(|&u| {
                        let (in_u, out_u) = smoothed(g, u);
                        out_u / in_u * previous[u as usize]
                    })
                    .sum::<f64>()
                    / out_v;
                let l_out = if g.out_degree(v) == 0 {
                    0.0
                } else {
                    let (in_v, _) = smoothed(g, v);
                    let denom: f64 = g
                        .out_neighbors(v)
                        .iter()
                        .map(|&u| smoothed(g, u).0)
                        .sum();
                    let weighted: f64 = g
                        .out_neighbors(v)
                        .iter()
                        .map(|&u| {
                            let (in_u, out_u) = smoothed(g, u);
                            in_u / out_u * previous[u as usize]
                        })
                        .sum();
                    in_v / denom * weighted
                };
                d * (l_in * (1.0 + l_out)) + (1.0 - d) * uniform
            })
            .collect();

        let total: f64 = next.iter().sum();
        if total > 0.0 {
            for score in next.iter_mut() {
                *score /= total;
            }
        }
        residual = next
            .iter()
            .zip(&previous)
            .map(|(a, b)| (a - b).abs())
            .sum();
        current = next;
        if residual <= cfg.tolerance {
            return Ok(RankVector {
                scores: current,
                iterations_used: iteration,
                residual,
            });
        }
    }
    Err(DtimError::NoConvergence {
        max_iterations: cfg.max_iterations,
        residual,
    })
}

/// Writes scores as "node-id score" lines (original ids, 17 significant
/// digits).
pub fn write_scores<W: Write>(g: &SocialGraph, ranks: &RankVector, mut writer: W) -> Result<()> {
    for (v, score) in ranks.scores.iter().enumerate() {
        writeln!(writer, "{} {:.16e}", g.original_id(v as NodeId), score)?;
    }
    Ok(())
}
