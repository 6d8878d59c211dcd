//! Reverse influence sampling: target-weighted root sampling, reverse
//! reachable set generation under the live-edge view of the linear threshold
//! model, pool sizing via a lower-bound estimate of the optimal objective,
//! and diversity-aware greedy coverage over the pool.
//!
//! Under LT every node keeps at most one incoming live edge, so the set of
//! nodes that can reach a root is a simple chain produced by walking
//! backward: the current node picks one in-edge with its weight as
//! probability, or stops with the residual. Roots are drawn from the target
//! set proportionally to their lurking weight, which makes the covered
//! fraction of a pool an unbiased estimator of normalized capital.

use std::collections::HashMap;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{DtimError, Result};
use crate::graph::NodeId;
use crate::select::{SeedResult, SeedScore};
use crate::weights::{DiffusionGraph, TargetSet};

/// Disjoint RNG stream bands per sampling stage, so stages never share a
/// substream regardless of pool sizes.
const STREAM_BAND: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq)]
pub struct RRSet {
    pub root: NodeId,
    /// Walk order: root first, then each predecessor along the live chain.
    pub members: Vec<NodeId>,
    /// Number of graph edges pointing into the members.
    pub width: usize,
    pub target_members: Vec<NodeId>,
    pub member_ell_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KptEstimate {
    pub kpt: f64,
    pub refined_kpt: f64,
    pub theta: usize,
    pub epsilon: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisVariant {
    Local,
    Global,
    CapitalOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct RisConfig {
    pub k: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub variant: RisVariant,
}

fn ell_prime(dg: &DiffusionGraph, ts: &TargetSet, v: NodeId) -> f64 {
    if ts.contains(v) {
        dg.node_weight(v)
    } else {
        0.0
    }
}

fn target_mass(dg: &DiffusionGraph, ts: &TargetSet) -> f64 {
    ts.members().iter().map(|&v| dg.node_weight(v)).sum()
}

/// Draws a root from the target set with probability `ell(v) / L_TS`.
pub fn sample_root<R: Rng>(dg: &DiffusionGraph, ts: &TargetSet, rng: &mut R) -> Result<NodeId> {
    let total = target_mass(dg, ts);
    if total <= 0.0 {
        return Err(DtimError::InvalidInput(
            "target set carries no lurking weight".into(),
        ));
    }
    let draw = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for &v in ts.members() {
        cumulative += dg.node_weight(v);
        if draw < cumulative {
            return Ok(v);
        }
    }
    Ok(*ts.members().last().expect("nonempty target set"))
}

/// Reverse walk from `root`: the current node keeps one incoming edge with
/// its weight as probability or stops with the residual; a revisit closes a
/// live-world cycle and stops the walk.
pub fn generate_rr_set<R: Rng>(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    root: NodeId,
    rng: &mut R,
) -> RRSet {
    let mut members = vec![root];
    let mut seen = vec![root];
    let mut current = root;
    loop {
        let draw = rng.gen::<f64>();
        let mut cumulative = 0.0;
        let mut picked = None;
        for &(u, b) in dg.in_weighted(current) {
            if b == 0.0 {
                continue;
            }
            cumulative += b;
            if draw < cumulative {
                picked = Some(u);
                break;
            }
        }
        match picked {
            Some(u) if !seen.contains(&u) => {
                members.push(u);
                seen.push(u);
                current = u;
            }
            _ => break,
        }
    }
    let width = members
        .iter()
        .map(|&v| dg.graph().in_degree(v))
        .sum();
    let target_members: Vec<NodeId> = members
        .iter()
        .copied()
        .filter(|&v| ts.contains(v))
        .collect();
    let member_ell_sum = members.iter().map(|&v| ell_prime(dg, ts, v)).sum();
    RRSet {
        root,
        members,
        width,
        target_members,
        member_ell_sum,
    }
}

/// `[1 - (1 - |TS_R|/m)^k] * (sum of member lurking weights) / |TS_R|`.
/// An edgeless graph (m = 0) sets the bracket to zero.
pub fn kappa_hat(rr: &RRSet, m: usize, k: usize) -> f64 {
    let targets = rr.target_members.len();
    if targets == 0 {
        return 0.0;
    }
    let bracket = if m == 0 {
        0.0
    } else {
        1.0 - (1.0 - targets as f64 / m as f64).powi(k as i32)
    };
    bracket * rr.member_ell_sum / targets as f64
}

/// Generates `count` RR sets on substreams `band * STREAM_BAND + i`.
pub fn generate_pool(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    count: usize,
    rng_seed: u64,
    band: u64,
) -> Result<Vec<RRSet>> {
    if target_mass(dg, ts) <= 0.0 {
        return Err(DtimError::InvalidInput(
            "target set carries no lurking weight".into(),
        ));
    }
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(band * STREAM_BAND + i as u64);
            let root = sample_root(dg, ts, &mut rng).expect("positive target mass");
            generate_rr_set(dg, ts, root, &mut rng)
        })
        .collect())
}

fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n);
    (1..=k)
        .map(|i| (((n - k + i) as f64) / i as f64).ln())
        .sum()
}

fn lambda_constant(n: usize, k: usize, epsilon: f64) -> f64 {
    let n_f = n as f64;
    (8.0 + 2.0 * epsilon) * n_f * (n_f.ln() + ln_choose(n, k) + 2.0f64.ln())
        / (epsilon * epsilon)
}

fn kpt_floor(dg: &DiffusionGraph, ts: &TargetSet) -> f64 {
    let min_positive = ts
        .members()
        .iter()
        .map(|&v| dg.node_weight(v))
        .filter(|&l| l > 0.0)
        .fold(f64::INFINITY, f64::min);
    min_positive / dg.graph().node_count() as f64
}

fn theta_for(lambda: f64, kpt: f64) -> usize {
    (lambda / kpt).ceil().max(1.0) as usize
}

/// Doubling estimation of the lower bound on the optimal objective: batches
/// of RR sets of geometrically growing size are scored with `kappa_hat`
/// until the batch mean clears the iteration's threshold. Returns the
/// estimate together with the last batch (kept for refinement).
pub fn estimate_kpt(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    k: usize,
    epsilon: f64,
    rng_seed: u64,
) -> Result<(KptEstimate, Vec<RRSet>)> {
    if k < 1 {
        return Err(DtimError::InvalidInput("budget k must be at least 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(DtimError::InvalidInput(format!(
            "epsilon is {epsilon}, must be positive"
        )));
    }
    let n = dg.graph().node_count();
    let m = dg.graph().edge_count();
    let lambda = lambda_constant(n, k, epsilon);
    let floor = kpt_floor(dg, ts);
    let log2n = (n as f64).log2().max(2.0);
    let rounds = (log2n as usize).saturating_sub(1).max(1);
    let mut drawn = 0usize;
    let mut pool: Vec<RRSet> = Vec::new();
    let mut kpt = floor;
    for i in 1..=rounds {
        let ci = ((6.0 * (n as f64).ln() + 6.0 * log2n.ln()) * 2f64.powi(i as i32))
            .ceil()
            .max(1.0) as usize;
        let batch = generate_pool(dg, ts, ci + drawn, rng_seed, 0)?
            .split_off(drawn);
        drawn += ci;
        let sum: f64 = batch.iter().map(|rr| kappa_hat(rr, m, k)).sum();
        pool = batch;
        // the halved batch mean is kept even when a round misses its
        // threshold, so tiny graphs still get a data-driven bound
        kpt = (n as f64 * sum / (2.0 * ci as f64)).max(floor);
        if sum / ci as f64 > 2f64.powi(-(i as i32)) {
            break;
        }
    }
    let estimate = KptEstimate {
        kpt,
        refined_kpt: kpt,
        theta: theta_for(lambda, kpt),
        epsilon,
        lambda,
    };
    Ok((estimate, pool))
}

/// Root-weighted greedy cover: picks up to k nodes maximizing the summed
/// root weights of the RR sets they cover.
fn greedy_cover(dg: &DiffusionGraph, pool: &[RRSet], k: usize, n: usize) -> Vec<NodeId> {
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, rr) in pool.iter().enumerate() {
        for &v in &rr.members {
            membership[v as usize].push(idx);
        }
    }
    let mut alive = vec![true; pool.len()];
    let mut picked = Vec::new();
    for _ in 0..k {
        let mut best: Option<(NodeId, f64)> = None;
        for v in 0..n {
            if picked.contains(&(v as NodeId)) {
                continue;
            }
            let score: f64 = membership[v]
                .iter()
                .filter(|&&idx| alive[idx])
                .map(|&idx| dg.node_weight(pool[idx].root))
                .sum();
            if score > 0.0 && best.map_or(true, |(_, s)| score > s) {
                best = Some((v as NodeId, score));
            }
        }
        let Some((v, _)) = best else { break };
        for &idx in &membership[v as usize] {
            alive[idx] = false;
        }
        picked.push(v);
    }
    picked
}

/// Tightens the bound: a greedy cover seed set from the estimation pool is
/// scored against a fresh pool; the covered fraction of root weight scales
/// the total target mass into an alternative lower bound.
pub fn refine_kpt(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    k: usize,
    estimate: &KptEstimate,
    pool: &[RRSet],
    rng_seed: u64,
) -> Result<KptEstimate> {
    let n = dg.graph().node_count();
    let cover = greedy_cover(dg, pool, k, n);
    let fresh = generate_pool(dg, ts, pool.len().max(1), rng_seed, 1)?;
    let mut covered_weight = 0.0;
    let mut total_weight = 0.0;
    for rr in &fresh {
        let w = ell_prime(dg, ts, rr.root);
        total_weight += w;
        if rr.members.iter().any(|v| cover.contains(v)) {
            covered_weight += w;
        }
    }
    let f = if total_weight > 0.0 {
        covered_weight / total_weight
    } else {
        0.0
    };
    let eps_prime = 5.0 * (estimate.epsilon * estimate.epsilon / (k as f64 + 1.0)).cbrt();
    let bound = f * target_mass(dg, ts) / (1.0 + eps_prime);
    let refined = estimate.kpt.max(bound);
    Ok(KptEstimate {
        kpt: estimate.kpt,
        refined_kpt: refined,
        theta: theta_for(estimate.lambda, refined),
        epsilon: estimate.epsilon,
        lambda: estimate.lambda,
    })
}

/// Greedy diversity-aware coverage over a pool. The capital score of a node
/// is the target mass times the root-weight fraction of still-uncovered RR
/// sets containing it; `diversity` (already normalized, indexed by node) is
/// frozen across iterations. Stops early once every RR set is covered.
pub fn ris_node_selection(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    pool: &[RRSet],
    k: usize,
    alpha: f64,
    diversity: Option<&[f64]>,
) -> Result<SeedResult> {
    if pool.is_empty() {
        return Err(DtimError::InvalidInput("empty RR-set pool".into()));
    }
    let n = dg.graph().node_count();
    let l_ts = target_mass(dg, ts);
    let total_root_weight: f64 = pool
        .iter()
        .map(|rr| ell_prime(dg, ts, rr.root))
        .sum();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, rr) in pool.iter().enumerate() {
        for &v in &rr.members {
            membership[v as usize].push(idx);
        }
    }
    let mut alive = vec![true; pool.len()];
    let mut alive_count = pool.len();
    let mut in_seed = vec![false; n];
    let mut seeds = Vec::new();
    let mut exhausted = false;
    for _ in 0..k {
        if alive_count == 0 {
            exhausted = true;
            break;
        }
        let mut best: Option<(NodeId, f64, f64, f64)> = None;
        for v in 0..n {
            if in_seed[v] || membership[v].is_empty() {
                continue;
            }
            let covered: f64 = membership[v]
                .iter()
                .filter(|&&idx| alive[idx])
                .map(|&idx| ell_prime(dg, ts, pool[idx].root))
                .sum();
            let capital = if total_root_weight > 0.0 {
                l_ts * covered / total_root_weight
            } else {
                0.0
            };
            let div = diversity.map_or(0.0, |d| d[v]);
            let objective = alpha * capital + (1.0 - alpha) * div;
            if best.map_or(true, |(_, o, _, _)| objective > o) {
                best = Some((v as NodeId, objective, capital, div));
            }
        }
        let Some((node, objective, capital, div)) = best else {
            exhausted = true;
            break;
        };
        in_seed[node as usize] = true;
        for &idx in &membership[node as usize] {
            if alive[idx] {
                alive[idx] = false;
                alive_count -= 1;
            }
        }
        seeds.push(SeedScore {
            node,
            objective,
            capital,
            diversity: div,
        });
    }
    Ok(SeedResult { seeds, exhausted })
}

/// Aggregated live-edge chains per root: every walk is a path ending at the
/// root, merged by (node, depth) so a node can occupy several positions.
struct PathTree {
    positions: Vec<TreePosition>,
}

struct TreePosition {
    node: NodeId,
    depth: usize,
    parent: Option<usize>,
    children: Vec<usize>,
}

impl PathTree {
    fn build(walks: &[&RRSet]) -> PathTree {
        let mut positions: Vec<TreePosition> = Vec::new();
        let mut index: HashMap<(NodeId, usize), usize> = HashMap::new();
        let root = walks[0].root;
        index.insert((root, 0), 0);
        positions.push(TreePosition {
            node: root,
            depth: 0,
            parent: None,
            children: Vec::new(),
        });
        for rr in walks {
            let mut parent = 0usize;
            for (depth, &node) in rr.members.iter().enumerate().skip(1) {
                let slot = *index.entry((node, depth)).or_insert_with(|| {
                    positions.push(TreePosition {
                        node,
                        depth,
                        parent: Some(parent),
                        children: Vec::new(),
                    });
                    positions.len() - 1
                });
                if !positions[parent].children.contains(&slot) {
                    positions[parent].children.push(slot);
                }
                parent = slot;
            }
        }
        PathTree { positions }
    }

    fn max_depth(&self) -> usize {
        self.positions.iter().map(|p| p.depth).max().unwrap_or(0)
    }

    /// Distinct outgoing graph edges of `node` absorbed in the tree.
    fn out_span(&self, node: NodeId) -> usize {
        let mut parents: Vec<NodeId> = self
            .positions
            .iter()
            .filter(|p| p.node == node)
            .filter_map(|p| p.parent.map(|q| self.positions[q].node))
            .collect();
        parents.sort_unstable();
        parents.dedup();
        parents.len()
    }

    /// Mean over all of u's positions of the boundary-share score, where
    /// only leaf positions score: external share times log-smoothed span.
    fn global_scores(&self, dg: &DiffusionGraph) -> HashMap<NodeId, f64> {
        let leaves: Vec<usize> = (0..self.positions.len())
            .filter(|&i| self.positions[i].children.is_empty())
            .collect();
        let b = leaves.len() as f64;
        let mut sums: HashMap<NodeId, f64> = HashMap::new();
        let mut occurrences: HashMap<NodeId, usize> = HashMap::new();
        for p in &self.positions {
            *occurrences.entry(p.node).or_insert(0) += 1;
        }
        for &i in &leaves {
            let node = self.positions[i].node;
            let ext = dg.graph().in_degree(node) as f64;
            let span = self.out_span(node) as f64;
            *sums.entry(node).or_insert(0.0) += ext / b * (1.0 + span / b).ln();
        }
        occurrences
            .into_iter()
            .map(|(node, occ)| {
                let total = sums.get(&node).copied().unwrap_or(0.0);
                (node, total / occ as f64)
            })
            .collect()
    }

    /// Level-wise truncation: for every depth d, the truncated tree's leaves
    /// form the boundary; positions present in the truncation score an
    /// incremental boundary-share value; scores average uniformly over
    /// depths, then over a node's positions.
    fn local_scores(&self, dg: &DiffusionGraph) -> HashMap<NodeId, f64> {
        let max_depth = self.max_depth();
        let mut per_position: Vec<(f64, usize)> = vec![(0.0, 0); self.positions.len()];
        for d in 1..=max_depth {
            let boundary: Vec<usize> = (0..self.positions.len())
                .filter(|&i| {
                    let p = &self.positions[i];
                    p.depth == d || (p.depth < d && p.children.is_empty())
                })
                .collect();
            let b = boundary.len() as f64;
            let ext_sum: f64 = boundary
                .iter()
                .map(|&i| dg.graph().in_degree(self.positions[i].node) as f64)
                .sum();
            for (i, p) in self.positions.iter().enumerate() {
                if p.depth > d {
                    continue;
                }
                let indeg = dg.graph().in_degree(p.node) as f64;
                let score = if indeg == 0.0 || ext_sum == 0.0 || b == 0.0 {
                    0.0
                } else {
                    let absorbed = if p.depth < d {
                        p.children.len() as f64
                    } else {
                        0.0
                    };
                    let ext = (indeg - absorbed).max(0.0);
                    b / (1.0 + b) * (1.0 + ext / ext_sum)
                };
                per_position[i].0 += score;
                per_position[i].1 += 1;
            }
        }
        let mut sums: HashMap<NodeId, f64> = HashMap::new();
        let mut counts: HashMap<NodeId, usize> = HashMap::new();
        for (p, &(total, depths)) in self.positions.iter().zip(&per_position) {
            let mean = if depths > 0 {
                total / depths as f64
            } else {
                0.0
            };
            *sums.entry(p.node).or_insert(0.0) += mean;
            *counts.entry(p.node).or_insert(0) += 1;
        }
        sums.into_iter()
            .map(|(node, total)| (node, total / counts[&node] as f64))
            .collect()
    }
}

/// Per-node total RR-diversity: tree-level scores averaged over every path
/// tree the node appears in.
pub fn rr_diversity(dg: &DiffusionGraph, pool: &[RRSet], variant: RisVariant) -> Vec<f64> {
    let n = dg.graph().node_count();
    let mut totals = vec![0.0f64; n];
    let mut tree_counts = vec![0usize; n];
    if variant == RisVariant::CapitalOnly {
        return totals;
    }
    let mut by_root: HashMap<NodeId, Vec<&RRSet>> = HashMap::new();
    for rr in pool {
        by_root.entry(rr.root).or_default().push(rr);
    }
    let mut roots: Vec<NodeId> = by_root.keys().copied().collect();
    roots.sort_unstable();
    for root in roots {
        let tree = PathTree::build(&by_root[&root]);
        let scores = match variant {
            RisVariant::Global => tree.global_scores(dg),
            RisVariant::Local => tree.local_scores(dg),
            RisVariant::CapitalOnly => unreachable!(),
        };
        for (node, score) in scores {
            totals[node as usize] += score;
            tree_counts[node as usize] += 1;
        }
    }
    for (total, &count) in totals.iter_mut().zip(&tree_counts) {
        if count > 0 {
            *total /= count as f64;
        }
    }
    totals
}

/// End-to-end RIS selection: size the pool from the refined lower bound,
/// sample it, score diversity once, then run the greedy coverage.
pub fn ris_select(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    cfg: &RisConfig,
    rng_seed: u64,
) -> Result<(SeedResult, KptEstimate)> {
    if !(0.0..=1.0).contains(&cfg.alpha) {
        return Err(DtimError::InvalidInput(format!(
            "alpha is {}, outside [0,1]",
            cfg.alpha
        )));
    }
    let (estimate, pool) = estimate_kpt(dg, ts, cfg.k, cfg.epsilon, rng_seed)?;
    let refined = refine_kpt(dg, ts, cfg.k, &estimate, &pool, rng_seed)?;
    let final_pool = generate_pool(dg, ts, refined.theta, rng_seed, 2)?;
    let diversity = if cfg.variant == RisVariant::CapitalOnly || cfg.alpha == 1.0 {
        None
    } else {
        let mut scores = rr_diversity(dg, &final_pool, cfg.variant);
        crate::diversity::max_normalize(&mut scores);
        Some(scores)
    };
    let result = ris_node_selection(
        dg,
        ts,
        &final_pool,
        cfg.k,
        cfg.alpha,
        diversity.as_deref(),
    )?;
    Ok((result, refined))
}

const CACHE_MAGIC: &[u8; 8] = b"DTIMRRS1";

/// Persists a pool: magic, graph content hash, rng seed, count, then one
/// length-prefixed member list per RR set (walk order).
pub fn write_rr_cache<W: Write>(
    dg: &DiffusionGraph,
    pool: &[RRSet],
    rng_seed: u64,
    mut writer: W,
) -> Result<()> {
    writer.write_all(CACHE_MAGIC)?;
    writer.write_all(dg.graph().content_hash().as_bytes())?;
    writer.write_all(&rng_seed.to_le_bytes())?;
    writer.write_all(&(pool.len() as u64).to_le_bytes())?;
    for rr in pool {
        writer.write_all(&(rr.members.len() as u32).to_le_bytes())?;
        for &v in &rr.members {
            writer.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a pool written by `write_rr_cache`, recomputing width and target
/// statistics against the given graph. Fails on magic or hash mismatch.
pub fn read_rr_cache<R: Read>(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    mut reader: R,
) -> Result<(Vec<RRSet>, u64)> {
    let mut magic = [0u8; 8];
    reader.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(DtimError::InvalidInput("not an RR-set cache".into()));
    }
    let mut hash = [0u8; 64];
    reader.read_exact(&mut hash)?;
    if &hash[..] != dg.graph().content_hash().as_bytes() {
        return Err(DtimError::InvalidInput(
            "RR-set cache was built for a different graph".into(),
        ));
    }
    let mut u64_buf = [0u8; 8];
    reader.read_exact(&mut u64_buf)?;
    let rng_seed = u64::from_le_bytes(u64_buf);
    reader.read_exact(&mut u64_buf)?;
    let count = u64::from_le_bytes(u64_buf) as usize;
    let mut pool = Vec::with_capacity(count);
    let mut u32_buf = [0u8; 4];
    for _ in 0..count {
        reader.read_exact(&mut u32_buf)?;
        let len = u32::from_le_bytes(u32_buf) as usize;
        let mut members = Vec::with_capacity(len);
        for _ in 0..len {
            reader.read_exact(&mut u32_buf)?;
            members.push(u32::from_le_bytes(u32_buf));
        }
        if members.is_empty() {
            return Err(DtimError::InvalidInput("empty RR set in cache".into()));
        }
        let root = members[0];
        let width = members.iter().map(|&v| dg.graph().in_degree(v)).sum();
        let target_members: Vec<NodeId> = members
            .iter()
            .copied()
            .filter(|&v| ts.contains(v))
            .collect();
        let member_ell_sum = members.iter().map(|&v| ell_prime(dg, ts, v)).sum();
        pool.push(RRSet {
            root,
            members,
            width,
            target_members,
            member_ell_sum,
        });
    }
    Ok((pool, rng_seed))
}
