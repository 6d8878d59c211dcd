//! Monte Carlo estimation of expected capital under the linear threshold
//! model, plus an exact live-edge enumeration oracle for small instances.
//!
//! Each run draws node activation thresholds lazily (on first contact) from
//! U[0,1]; a node activates once the summed weight of its active in-neighbors
//! reaches its threshold. Capital is the summed lurking weight of activated
//! targets outside the seed set. Runs use per-index RNG substreams and are
//! reduced in a fixed chunk order, so reports are bit-identical regardless of
//! thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{DtimError, Result};
use crate::graph::NodeId;
use crate::weights::{DiffusionGraph, TargetSet};

const REDUCTION_CHUNK: usize = 1024;
const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub capital_estimate: f64,
    pub capital_std_error: f64,
    pub runs: usize,
    pub activation_probability: Vec<f64>,
    pub rng_seed: u64,
}

struct ChunkStats {
    capital_sum: f64,
    capital_sq_sum: f64,
    activation_counts: Vec<u64>,
}

fn single_run(
    dg: &DiffusionGraph,
    seeds: &[NodeId],
    ts: &TargetSet,
    rng: &mut ChaCha8Rng,
    activated_out: &mut Vec<NodeId>,
) -> f64 {
    let n = dg.graph().node_count();
    let mut active = vec![false; n];
    let mut received = vec![0.0f64; n];
    let mut threshold = vec![f64::NAN; n];
    let mut frontier: Vec<NodeId> = Vec::new();
    activated_out.clear();
    for &s in seeds {
        if !active[s as usize] {
            active[s as usize] = true;
            frontier.push(s);
            activated_out.push(s);
        }
    }
    while !frontier.is_empty() {
        let mut next: Vec<NodeId> = Vec::new();
        for &u in &frontier {
            for &(v, b) in dg.out_weighted(u) {
                let vi = v as usize;
                if active[vi] || b == 0.0 {
                    continue;
                }
                if threshold[vi].is_nan() {
                    threshold[vi] = rng.gen::<f64>();
                }
                received[vi] += b;
                if received[vi] >= threshold[vi] {
                    active[vi] = true;
                    next.push(v);
                    activated_out.push(v);
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        frontier = next;
    }
    let mut capital = 0.0;
    let seed_set: Vec<bool> = {
        let mut s = vec![false; n];
        for &x in seeds {
            s[x as usize] = true;
        }
        s
    };
    for &v in activated_out.iter() {
        if ts.contains(v) && !seed_set[v as usize] {
            capital += dg.node_weight(v);
        }
    }
    capital
}

/// Runs `runs` independent LT cascades from `seeds` and reports the mean
/// capital, its standard error and per-node activation frequencies.
pub fn estimate_capital(
    dg: &DiffusionGraph,
    seeds: &[NodeId],
    ts: &TargetSet,
    runs: usize,
    rng_seed: u64,
) -> Result<SimulationReport> {
    if runs < 1 {
        return Err(DtimError::InvalidInput("runs must be at least 1".into()));
    }
    let n = dg.graph().node_count();
    for &s in seeds {
        if s as usize >= n {
            return Err(DtimError::InvalidInput(format!(
                "seed {s} outside node range"
            )));
        }
    }
    let chunk_starts: Vec<usize> = (0..runs).step_by(REDUCTION_CHUNK).collect();
    let chunks: Vec<ChunkStats> = chunk_starts
        .par_iter()
        .map(|&start| {
            let end = (start + REDUCTION_CHUNK).min(runs);
            let mut stats = ChunkStats {
                capital_sum: 0.0,
                capital_sq_sum: 0.0,
                activation_counts: vec![0u64; n],
            };
            let mut activated = Vec::new();
            for run in start..end {
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                rng.set_stream(run as u64);
                let capital = single_run(dg, seeds, ts, &mut rng, &mut activated);
                stats.capital_sum += capital;
                stats.capital_sq_sum += capital * capital;
                for &v in &activated {
                    stats.activation_counts[v as usize] += 1;
                }
            }
            stats
        })
        .collect();

    let mut capital_sum = 0.0;
    let mut capital_sq_sum = 0.0;
    let mut counts = vec![0u64; n];
    for chunk in &chunks {
        capital_sum += chunk.capital_sum;
        capital_sq_sum += chunk.capital_sq_sum;
        for (total, &c) in counts.iter_mut().zip(&chunk.activation_counts) {
            *total += c;
        }
    }
    let runs_f = runs as f64;
    let mean = capital_sum / runs_f;
    let std_error = if runs > 1 {
        let variance = (capital_sq_sum - capital_sum * capital_sum / runs_f) / (runs_f - 1.0);
        (variance.max(0.0) / runs_f).sqrt()
    } else {
        0.0
    };
    Ok(SimulationReport {
        capital_estimate: mean,
        capital_std_error: std_error,
        runs,
        activation_probability: counts.iter().map(|&c| c as f64 / runs_f).collect(),
        rng_seed,
    })
}

/// Exact expected capital by enumerating every live-edge world: each node
/// independently keeps at most one incoming edge, edge (u,v) with probability
/// b(u,v), none with the residual probability.
pub fn exact_capital(dg: &DiffusionGraph, seeds: &[NodeId], ts: &TargetSet) -> Result<f64> {
    let n = dg.graph().node_count();
    let choosers: Vec<NodeId> = (0..n as NodeId)
        .filter(|&v| dg.in_weighted(v).iter().any(|&(_, b)| b > 0.0))
        .collect();
    let mut worlds: u128 = 1;
    for &v in &choosers {
        let options = dg.in_weighted(v).iter().filter(|&&(_, b)| b > 0.0).count() as u128 + 1;
        worlds = worlds.saturating_mul(options);
        if worlds > ENUMERATION_LIMIT {
            return Err(DtimError::EnumerationTooLarge {
                worlds,
                limit: ENUMERATION_LIMIT,
            });
        }
    }
    let seed_set: Vec<bool> = {
        let mut s = vec![false; n];
        for &x in seeds {
            s[x as usize] = true;
        }
        s
    };
    let mut chosen: Vec<Option<NodeId>> = vec![None; n];
    let mut total = 0.0;
    enumerate(dg, seeds, ts, &seed_set, &choosers, 0, 1.0, &mut chosen, &mut total);
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    dg: &DiffusionGraph,
    seeds: &[NodeId],
    ts: &TargetSet,
    seed_set: &[bool],
    choosers: &[NodeId],
    depth: usize,
    probability: f64,
    chosen: &mut Vec<Option<NodeId>>,
    total: &mut f64,
) {
    if probability == 0.0 {
        return;
    }
    if depth == choosers.len() {
        *total += probability * world_capital(dg, seeds, ts, seed_set, chosen);
        return;
    }
    let v = choosers[depth];
    let mut residual = 1.0;
    for &(u, b) in dg.in_weighted(v) {
        if b == 0.0 {
            continue;
        }
        residual -= b;
        chosen[v as usize] = Some(u);
        enumerate(dg, seeds, ts, seed_set, choosers, depth + 1, probability * b, chosen, total);
    }
    chosen[v as usize] = None;
    enumerate(
        dg,
        seeds,
        ts,
        seed_set,
        choosers,
        depth + 1,
        probability * residual.max(0.0),
        chosen,
        total,
    );
}

fn world_capital(
    dg: &DiffusionGraph,
    seeds: &[NodeId],
    ts: &TargetSet,
    seed_set: &[bool],
    chosen: &[Option<NodeId>],
) -> f64 {
    let n = dg.graph().node_count();
    let mut reached = vec![false; n];
    let mut stack: Vec<NodeId> = seeds.to_vec();
    for &s in seeds {
        reached[s as usize] = true;
    }
    // a node is reachable when its chosen live in-edge comes from a reached
    // node; propagate until fixpoint
    let mut changed = !stack.is_empty();
    while changed {
        changed = false;
        stack.clear();
        for v in 0..n {
            if reached[v] {
                continue;
            }
            if let Some(u) = chosen[v] {
                if reached[u as usize] {
                    reached[v] = true;
                    changed = true;
                }
            }
        }
    }
    let mut capital = 0.0;
    for v in 0..n as NodeId {
        if reached[v as usize] && ts.contains(v) && !seed_set[v as usize] {
            capital += dg.node_weight(v);
        }
    }
    capital
}
