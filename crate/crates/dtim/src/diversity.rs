//! Topological diversity of a partially unfolded influence subgraph.
//!
//! While the selection walk unfolds paths toward a target, the visited nodes
//! and traversed edges form a growing subgraph. A visited node is a boundary
//! node when it still has incoming edges that the unfold has not absorbed;
//! those external edges are the channels through which fresh, unexplored
//! regions of the network reach the target. The measures here score how much
//! a node widens that frontier.

use std::collections::HashSet;

use crate::error::{DtimError, Result};
use crate::graph::{NodeId, SocialGraph};

/// Incremental bookkeeping for one target's unfolded subgraph.
#[derive(Debug, Clone)]
pub struct UnfoldState<'g> {
    graph: &'g SocialGraph,
    visited: Vec<bool>,
    members: Vec<NodeId>,
    /// Per node, how many of its incoming edges are part of the unfold.
    absorbed_in: Vec<usize>,
    /// Per node, how many of its outgoing edges are part of the unfold.
    out_span: Vec<usize>,
    edges: HashSet<(NodeId, NodeId)>,
    on_boundary: Vec<bool>,
    boundary_size: usize,
    external_sum: usize,
}

impl<'g> UnfoldState<'g> {
    pub fn new(graph: &'g SocialGraph) -> Self {
        let n = graph.node_count();
        UnfoldState {
            graph,
            visited: vec![false; n],
            members: Vec::new(),
            absorbed_in: vec![0; n],
            out_span: vec![0; n],
            edges: HashSet::new(),
            on_boundary: vec![false; n],
            boundary_size: 0,
            external_sum: 0,
        }
    }

    /// Incoming edges of v not absorbed by the unfold. Defined for any node,
    /// visited or not.
    pub fn external_in(&self, v: NodeId) -> usize {
        self.graph.in_degree(v) - self.absorbed_in[v as usize]
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.visited[v as usize]
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn boundary_size(&self) -> usize {
        self.boundary_size
    }

    pub fn is_boundary(&self, v: NodeId) -> bool {
        self.on_boundary[v as usize]
    }

    pub fn add_node(&mut self, v: NodeId) {
        let vi = v as usize;
        if self.visited[vi] {
            return;
        }
        self.visited[vi] = true;
        self.members.push(v);
        let ext = self.external_in(v);
        if ext > 0 {
            self.on_boundary[vi] = true;
            self.boundary_size += 1;
            self.external_sum += ext;
        }
    }

    /// Absorbs the edge (u, v), visiting both endpoints. Absorbing an
    /// incoming edge of v shrinks v's external count, possibly retiring it
    /// from the boundary.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) {
        debug_assert!(self.graph.has_edge(u, v));
        self.add_node(u);
        self.add_node(v);
        if !self.edges.insert((u, v)) {
            return;
        }
        self.out_span[u as usize] += 1;
        self.absorbed_in[v as usize] += 1;
        if self.on_boundary[v as usize] {
            self.external_sum -= 1;
            if self.external_in(v) == 0 {
                self.on_boundary[v as usize] = false;
                self.boundary_size -= 1;
            }
        }
    }

    /// Mean external in-degree over the boundary.
    pub fn boundary_diversity(&self) -> Result<f64> {
        if self.boundary_size == 0 {
            return Err(DtimError::EmptyBoundary);
        }
        Ok(self.external_sum as f64 / self.boundary_size as f64)
    }

    /// Boundary diversity after hypothetically adjoining u to the boundary,
    /// without mutating the state. u joins the average unconditionally, even
    /// with zero external edges or when already counted.
    pub fn incremental_boundary_diversity(&self, u: NodeId) -> f64 {
        (self.external_sum as f64 + self.external_in(u) as f64)
            / (self.boundary_size as f64 + 1.0)
    }

    /// Local contribution of u: how much adjoining u moves the boundary
    /// average, rescaled against the current frontier mass. Sources (no
    /// incoming edges at all) contribute nothing.
    pub fn local_diversity(&self, u: NodeId) -> f64 {
        if self.graph.in_degree(u) == 0 || self.boundary_size == 0 {
            return 0.0;
        }
        let b = self.boundary_size as f64;
        b / (1.0 + b) * (1.0 + self.external_in(u) as f64 / self.external_sum as f64)
    }

    /// Global contribution of v: its share of the external frontier, damped
    /// by how widely the unfold spans its outgoing edges. Zero off the
    /// boundary.
    pub fn global_diversity(&self, v: NodeId) -> f64 {
        if !self.on_boundary[v as usize] {
            return 0.0;
        }
        let b = self.boundary_size as f64;
        self.external_in(v) as f64 / b * (1.0 + self.out_span[v as usize] as f64 / b).ln()
    }
}

/// Rescales values so the maximum becomes 1. All-zero input stays zero.
pub fn max_normalize(values: &mut [f64]) {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    if max > 0.0 {
        for v in values.iter_mut() {
            *v /= max;
        }
    }
}
