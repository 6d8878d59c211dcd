//! Diffusion-graph modeling: node lurking values, edge influence weights,
//! and target selection.
//!
//! Node weights scale and normalize the rank stationary distribution into
//! `[0,1)`. Edge weights split a node's incoming influence proportionally to
//! the rank mass contributed by each in-neighbor, dampened by the node's own
//! lurking value so that the incoming weights of node v always sum to
//! `exp(ell(v) - 1) <= 1`.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{DtimError, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::rank::RankVector;

const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Social graph plus edge influence weights `b` and node lurking values
/// `ell`. Edges may carry a zero weight, meaning they exist in the social
/// topology (and count for diversity) but transmit no influence.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionGraph {
    graph: SocialGraph,
    node_weight: Vec<f64>,
    edge_weight: Vec<f64>,
    in_weighted: Vec<Vec<(NodeId, f64)>>,
    out_weighted: Vec<Vec<(NodeId, f64)>>,
}

impl DiffusionGraph {
    /// Wraps explicitly supplied weights. `edge_weights` pairs an edge with
    /// its influence weight; edges of the graph not listed get weight zero.
    pub fn manual(
        graph: SocialGraph,
        node_weight: Vec<f64>,
        edge_weights: &[((NodeId, NodeId), f64)],
    ) -> Result<Self> {
        if node_weight.len() != graph.node_count() {
            return Err(DtimError::InvalidInput(format!(
                "expected {} node weights, got {}",
                graph.node_count(),
                node_weight.len()
            )));
        }
        for (v, &ell) in node_weight.iter().enumerate() {
            if !(0.0..=1.0).contains(&ell) {
                return Err(DtimError::InvalidInput(format!(
                    "node weight of {v} is {ell}, outside [0,1]"
                )));
            }
        }
        let mut aligned = vec![0.0f64; graph.edge_count()];
        for &((u, v), b) in edge_weights {
            let slot = graph
                .edges()
                .binary_search(&(u, v))
                .map_err(|_| DtimError::InvalidInput(format!("edge ({u},{v}) not in graph")))?;
            if !(b > 0.0 && b <= 1.0) {
                return Err(DtimError::InvalidInput(format!(
                    "weight of edge ({u},{v}) is {b}, outside (0,1]"
                )));
            }
            aligned[slot] = b;
        }
        Self::assemble(graph, node_weight, aligned)
    }

    /// Derives the full weighting from a rank vector: `node_weights` followed
    /// by `edge_weights`.
    pub fn derive(graph: SocialGraph, ranks: &RankVector, epsilon_r: Option<f64>) -> Result<Self> {
        let nw = node_weights(ranks, epsilon_r);
        let ew = edge_weights(&graph, ranks, &nw.values);
        Self::assemble(graph, nw.values, ew)
    }

    fn assemble(graph: SocialGraph, node_weight: Vec<f64>, edge_weight: Vec<f64>) -> Result<Self> {
        let mut in_weighted = vec![Vec::new(); graph.node_count()];
        let mut out_weighted = vec![Vec::new(); graph.node_count()];
        for (&(u, v), &b) in graph.edges().iter().zip(&edge_weight) {
            in_weighted[v as usize].push((u, b));
            out_weighted[u as usize].push((v, b));
        }
        for (v, incoming) in in_weighted.iter_mut().enumerate() {
            incoming.sort_unstable_by_key(|&(u, _)| u);
            let sum: f64 = incoming.iter().map(|&(_, b)| b).sum();
            if sum > 1.0 + ADMISSIBILITY_SLACK {
                return Err(DtimError::Inadmissible {
                    node: v as NodeId,
                    sum,
                });
            }
        }
        for outgoing in out_weighted.iter_mut() {
            outgoing.sort_unstable_by_key(|&(v, _)| v);
        }
        Ok(DiffusionGraph {
            graph,
            node_weight,
            edge_weight,
            in_weighted,
            out_weighted,
        })
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn node_weight(&self, v: NodeId) -> f64 {
        self.node_weight[v as usize]
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weight
    }

    /// Incoming weighted edges of v, sorted ascending by source id. Zero
    /// weights (structure-only edges) are included.
    pub fn in_weighted(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.in_weighted[v as usize]
    }

    /// Outgoing weighted edges of u, sorted ascending by destination id.
    pub fn out_weighted(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.out_weighted[u as usize]
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> f64 {
        match self.graph.edges().binary_search(&(u, v)) {
            Ok(slot) => self.edge_weight[slot],
            Err(_) => 0.0,
        }
    }

    /// Edge weights aligned with `graph().edges()`.
    pub fn edge_weight_slice(&self) -> &[f64] {
        &self.edge_weight
    }

    /// Text serialization: header "n m", then m "u v b" lines, then n "v ell"
    /// lines (original ids, 17 significant digits).
    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(
            writer,
            "{} {}",
            self.graph.node_count(),
            self.graph.edge_count()
        )?;
        for (&(u, v), &b) in self.graph.edges().iter().zip(&self.edge_weight) {
            writeln!(
                writer,
                "{} {} {:.16e}",
                self.graph.original_id(u),
                self.graph.original_id(v),
                b
            )?;
        }
        for (v, &ell) in self.node_weight.iter().enumerate() {
            writeln!(
                writer,
                "{} {:.16e}",
                self.graph.original_id(v as NodeId),
                ell
            )?;
        }
        Ok(())
    }

    pub fn read<R: Read>(source: R) -> Result<Self> {
        let reader = BufReader::new(source);
        let mut lines = reader.lines().enumerate();
        let parse_err = |line: usize, message: String| DtimError::Parse {
            line: line + 1,
            message,
        };
        let (idx, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty input".into()))?;
        let header = header?;
        let mut fields = header.split_whitespace();
        let n: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(idx, "bad node count".into()))?;
        let m: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| parse_err(idx, "bad edge count".into()))?;

        let mut raw_edges = Vec::with_capacity(m);
        let mut raw_weights = Vec::with_capacity(m);
        for _ in 0..m {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, "truncated edge section".into()))?;
            let line = line?;
            let mut fields = line.split_whitespace();
            let u: u64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| parse_err(idx, "bad edge source".into()))?;
            let v: u64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| parse_err(idx, "bad edge destination".into()))?;
            let b: f64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| parse_err(idx, "bad edge weight".into()))?;
            raw_edges.push((u, v));
            raw_weights.push(b);
        }
        let mut node_ids = Vec::with_capacity(n);
        let mut raw_ells = Vec::with_capacity(n);
        for _ in 0..n {
            let (idx, line) = lines
                .next()
                .ok_or_else(|| parse_err(0, "truncated node section".into()))?;
            let line = line?;
            let mut fields = line.split_whitespace();
            let v: u64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| parse_err(idx, "bad node id".into()))?;
            let ell: f64 = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| parse_err(idx, "bad node weight".into()))?;
            node_ids.push(v);
            raw_ells.push(ell);
        }
        let graph = SocialGraph::from_labeled(&node_ids, &raw_edges)?;
        // reorder per the graph's ascending-id remap
        let mut node_weight = vec![0.0; n];
        for (&id, &ell) in node_ids.iter().zip(&raw_ells) {
            let slot = graph
                .original_ids()
                .binary_search(&id)
                .expect("id present by construction");
            node_weight[slot] = ell;
        }
        let mut edge_weight = vec![0.0; m];
        for (&(u, v), &b) in raw_edges.iter().zip(&raw_weights) {
            let u = graph.original_ids().binary_search(&u).unwrap() as NodeId;
            let v = graph.original_ids().binary_search(&v).unwrap() as NodeId;
            let slot = graph.edges().binary_search(&(u, v)).unwrap();
            edge_weight[slot] = b;
        }
        Self::assemble(graph, node_weight, edge_weight)
    }
}

/// Result of scaling a rank vector into node lurking values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeights {
    pub values: Vec<f64>,
    pub epsilon_r: f64,
    /// All ranks equal: every value is 0 and the target set degenerates.
    pub degenerate: bool,
}

/// Scales the stationary distribution into `[0,1)`:
/// `ell(v) = (pi~_v - min_r) / ((max_r - min_r) + eps_r)` where `pi~` is `pi`
/// divided by the base-10 power of the order of magnitude of its minimum.
/// When `epsilon_r` is not given it defaults to `(max_r - min_r) * 1e-2`,
/// which caps the largest value at `1/1.01`.
pub fn node_weights(ranks: &RankVector, epsilon_r: Option<f64>) -> NodeWeights {
    let min_pi = ranks
        .scores
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let scale = 10f64.powi(min_pi.log10().floor() as i32);
    let scaled: Vec<f64> = ranks.scores.iter().map(|&s| s / scale).collect();
    let min_r = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_r = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_r == min_r {
        return NodeWeights {
            values: vec![0.0; scaled.len()],
            epsilon_r: epsilon_r.unwrap_or(0.0),
            degenerate: true,
        };
    }
    let eps = epsilon_r.unwrap_or((max_r - min_r) * 1e-2);
    let denom = (max_r - min_r) + eps;
    NodeWeights {
        values: scaled.iter().map(|&r| (r - min_r) / denom).collect(),
        epsilon_r: eps,
        degenerate: false,
    }
}

/// Edge weights aligned with `g.edges()`:
/// `b(u,v) = b0(u,v) * exp(ell(v) - 1)` where `b0` splits v's incoming mass
/// proportionally to `out(u)/in(u) * pi_u` over v's in-neighbors (smoothed
/// counts). Incoming weights of v sum to `exp(ell(v) - 1)` by construction.
pub fn edge_weights(g: &SocialGraph, ranks: &RankVector, ell: &[f64]) -> Vec<f64> {
    let contribution = |u: NodeId| {
        let in_u = g.in_degree(u) as f64 + 1.0;
        let out_u = g.out_degree(u) as f64 + 1.0;
        out_u / in_u * ranks.scores[u as usize]
    };
    let column_mass: Vec<f64> = (0..g.node_count() as NodeId)
        .map(|v| g.in_neighbors(v).iter().map(|&u| contribution(u)).sum())
        .collect();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let b0 = contribution(u) / column_mass[v as usize];
            b0 * (ell[v as usize] - 1.0).exp()
        })
        .collect()
}

/// Threshold rule for picking the target set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetMode {
    /// Every node with `ell(v) >= threshold`.
    Absolute(f64),
    /// Threshold chosen so the selected set is the top given percentage of
    /// the `ell` distribution; ties at the cut are all included.
    Percentile(f64),
}

/// Nodes selected as diffusion targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    members: Vec<NodeId>,
    pub threshold_used: f64,
    pub percentage_used: Option<f64>,
}

impl TargetSet {
    /// Members sorted ascending by node id.
    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

pub fn select_targets(ell: &[f64], mode: TargetMode) -> Result<TargetSet> {
    let (threshold, percentage) = match mode {
        TargetMode::Absolute(threshold) => (threshold, None),
        TargetMode::Percentile(perc) => {
            if !(perc > 0.0 && perc <= 100.0) {
                return Err(DtimError::InvalidInput(format!(
                    "percentile {perc} outside (0, 100]"
                )));
            }
            let mut sorted: Vec<f64> = ell.to_vec();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let count = ((ell.len() as f64 * perc / 100.0).ceil() as usize)
                .clamp(1, ell.len());
            (sorted[count - 1], Some(perc))
        }
    };
    let members: Vec<NodeId> = ell
        .iter()
        .enumerate()
        .filter(|&(_, &l)| l >= threshold)
        .map(|(v, _)| v as NodeId)
        .collect();
    if members.is_empty() {
        return Err(DtimError::EmptyTargetSet);
    }
    Ok(TargetSet {
        members,
        threshold_used: threshold,
        percentage_used: percentage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::RankVector;

    fn ranks(scores: &[f64]) -> RankVector {
        RankVector {
            scores: scores.to_vec(),
            iterations_used: 1,
            residual: 0.0,
        }
    }

    #[test]
    fn uniform_ranks_are_degenerate() {
        let nw = node_weights(&ranks(&[0.2, 0.2, 0.2]), None);
        assert!(nw.degenerate);
        assert_eq!(nw.values, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn minimum_order_of_magnitude_rescales() {
        // min of order 1e-3: scaled to (1, 2, 4) before normalization
        let nw = node_weights(&ranks(&[0.001, 0.002, 0.004]), None);
        assert!((nw.epsilon_r - 0.03).abs() < 1e-12);
        assert!((nw.values[0]).abs() < 1e-12);
        assert!((nw.values[1] - 1.0 / 3.03).abs() < 1e-10);
        assert!((nw.values[2] - 3.0 / 3.03).abs() < 1e-10);
        assert!((nw.values[1] - 0.3300).abs() < 1e-4);
        assert!((nw.values[2] - 0.9901).abs() < 1e-4);
    }

    #[test]
    fn single_in_neighbor_gets_full_column() {
        let g = SocialGraph::from_dense_edges(2, &[(0, 1)]).unwrap();
        let r = ranks(&[0.5, 0.5]);
        let ell = vec![0.0, 0.25];
        let b = edge_weights(&g, &r, &ell);
        assert!((b[0] - (-0.75f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn zero_ell_column_sums_to_inverse_e() {
        let g = SocialGraph::from_dense_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let r = ranks(&[0.4, 0.3, 0.3]);
        let ell = vec![0.1, 0.9, 0.0];
        let b = edge_weights(&g, &r, &ell);
        let sum: f64 = b.iter().sum();
        assert!((sum - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_neighbors_split_evenly() {
        let g =
            SocialGraph::from_dense_edges(3, &[(0, 2), (1, 2), (2, 0), (2, 1)]).unwrap();
        let r = ranks(&[0.3, 0.3, 0.4]);
        let ell = vec![0.0, 0.0, 0.5];
        let b = edge_weights(&g, &r, &ell);
        let b02 = g.edges().iter().position(|&e| e == (0, 2)).unwrap();
        let b12 = g.edges().iter().position(|&e| e == (1, 2)).unwrap();
        assert!((b[b02] - b[b12]).abs() < 1e-15);
        assert!((b[b02] - (-0.5f64).exp() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn absolute_threshold_selection() {
        let ts = select_targets(&[0.1, 0.5, 0.9], TargetMode::Absolute(0.5)).unwrap();
        assert_eq!(ts.members(), &[1, 2]);
    }

    #[test]
    fn percentile_top_quarter() {
        let ts =
            select_targets(&[0.1, 0.5, 0.9, 0.95], TargetMode::Percentile(25.0)).unwrap();
        assert_eq!(ts.members(), &[3]);
        assert!((ts.threshold_used - 0.95).abs() < 1e-15);
    }

    #[test]
    fn percentile_keeps_ties_at_cut() {
        let ts =
            select_targets(&[0.5, 0.5, 0.1, 0.1], TargetMode::Percentile(25.0)).unwrap();
        assert_eq!(ts.members(), &[0, 1]);
        // membership is exactly the absolute rule at the reported threshold
        let abs = select_targets(
            &[0.5, 0.5, 0.1, 0.1],
            TargetMode::Absolute(ts.threshold_used),
        )
        .unwrap();
        assert_eq!(ts.members(), abs.members());
    }

    #[test]
    fn empty_target_set_is_an_error() {
        assert!(matches!(
            select_targets(&[0.1, 0.2], TargetMode::Absolute(0.5)),
            Err(DtimError::EmptyTargetSet)
        ));
    }

    #[test]
    fn manual_rejects_inadmissible_column() {
        let g = SocialGraph::from_dense_edges(3, &[(0, 2), (1, 2)]).unwrap();
        let err = DiffusionGraph::manual(
            g,
            vec![0.0, 0.0, 0.5],
            &[((0, 2), 0.51), ((1, 2), 0.5)],
        )
        .unwrap_err();
        assert!(matches!(err, DtimError::Inadmissible { node: 2, .. }));
    }

    #[test]
    fn manual_edgeless_graph_is_valid() {
        let g = SocialGraph::from_dense_edges(2, &[]).unwrap();
        let dg = DiffusionGraph::manual(g, vec![0.3, 0.4], &[]).unwrap();
        assert_eq!(dg.graph().edge_count(), 0);
    }

    #[test]
    fn serialization_round_trips() {
        let g = SocialGraph::from_dense_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let dg = DiffusionGraph::manual(
            g,
            vec![0.25, 0.5, 0.75],
            &[((0, 1), 0.4), ((1, 2), 0.3), ((2, 0), 0.9)],
        )
        .unwrap();
        let mut buf = Vec::new();
        dg.write(&mut buf).unwrap();
        let dg2 = DiffusionGraph::read(buf.as_slice()).unwrap();
        assert_eq!(dg, dg2);
        let mut buf2 = Vec::new();
        dg2.write(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }
}
