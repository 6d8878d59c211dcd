//! Immutable directed-graph storage with edge-list ingestion and exact
//! centrality statistics.
//!
//! Node ids are remapped to a dense `0..n-1` range at load time (ascending by
//! original id) so that adjacency can be array-indexed; the original ids are
//! kept in a translation table. Adjacency lists are sorted ascending, which
//! fixes the in-neighbor iteration order relied on by the selection
//! algorithms.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, BufReader, Read, Write};

use sha2::{Digest, Sha256};

use crate::error::{DtimError, Result};

pub type NodeId = u32;

/// Immutable directed graph. No self-loops, no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    in_adjacency: Vec<Vec<NodeId>>,
    out_adjacency: Vec<Vec<NodeId>>,
    original_ids: Vec<u64>,
}

/// Counts of records dropped while ingesting an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadWarnings {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl SocialGraph {
    /// Builds a graph from edges over arbitrary (sparse) ids. Ids are
    /// remapped to `0..n-1` in ascending order of original id; duplicates and
    /// self-loops are dropped and counted.
    pub fn from_edges(raw_edges: &[(u64, u64)]) -> Result<(Self, LoadWarnings)> {
        if raw_edges.is_empty() {
            return Err(DtimError::EmptyGraph);
        }
        let mut warnings = LoadWarnings::default();
        let mut ids: Vec<u64> = raw_edges
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<u64, NodeId> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as NodeId))
            .collect();

        let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(raw_edges.len());
        for &(u, v) in raw_edges {
            if u == v {
                warnings.self_loops += 1;
                continue;
            }
            edges.push((index[&u], index[&v]));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        warnings.duplicate_edges = before - edges.len();
        if edges.is_empty() {
            return Err(DtimError::EmptyGraph);
        }

        let n = ids.len();
        let mut in_adjacency = vec![Vec::new(); n];
        let mut out_adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adjacency[u as usize].push(v);
            in_adjacency[v as usize].push(u);
        }
        for adj in in_adjacency.iter_mut().chain(out_adjacency.iter_mut()) {
            adj.sort_unstable();
        }

        Ok((
            SocialGraph {
                node_count: n,
                edges,
                in_adjacency,
                out_adjacency,
                original_ids: ids,
            },
            warnings,
        ))
    }

    /// Builds a graph from an explicit node set plus edges over original ids.
    /// Unlike [`SocialGraph::from_edges`], isolated nodes survive.
    pub fn from_labeled(node_ids: &[u64], raw_edges: &[(u64, u64)]) -> Result<Self> {
        let mut ids = node_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != node_ids.len() {
            return Err(DtimError::InvalidInput("duplicate node ids".into()));
        }
        let index: HashMap<u64, NodeId> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as NodeId))
            .collect();
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(u, v) in raw_edges {
            let (&u, &v) = (
                index
                    .get(&u)
                    .ok_or_else(|| DtimError::InvalidInput(format!("unknown node id {u}")))?,
                index
                    .get(&v)
                    .ok_or_else(|| DtimError::InvalidInput(format!("unknown node id {v}")))?,
            );
            edges.push((u, v));
        }
        let mut graph = Self::from_dense_edges(ids.len(), &edges)?;
        graph.original_ids = ids;
        Ok(graph)
    }

    /// Builds a graph whose ids are already dense `0..node_count-1`. Isolated
    /// nodes are allowed. The translation table is the identity.
    pub fn from_dense_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut edges: Vec<(NodeId, NodeId)> = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        for &(u, v) in &edges {
            if u == v {
                return Err(DtimError::InvalidInput(format!("self-loop on node {u}")));
            }
            if u as usize >= node_count || v as usize >= node_count {
                return Err(DtimError::InvalidInput(format!(
                    "edge ({u},{v}) outside node range 0..{node_count}"
                )));
            }
        }
        let mut in_adjacency = vec![Vec::new(); node_count];
        let mut out_adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            out_adjacency[u as usize].push(v);
            in_adjacency[v as usize].push(u);
        }
        for adj in in_adjacency.iter_mut().chain(out_adjacency.iter_mut()) {
            adj.sort_unstable();
        }
        Ok(SocialGraph {
            node_count,
            edges,
            in_adjacency,
            out_adjacency,
            original_ids: (0..node_count as u64).collect(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted ascending by (source, destination).
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adjacency[v as usize]
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adjacency[v as usize]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adjacency[v as usize].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adjacency[u as usize].binary_search(&v).is_ok()
    }

    /// Translation table: remapped id -> original id.
    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    pub fn original_id(&self, v: NodeId) -> u64 {
        self.original_ids[v as usize]
    }

    /// Parses the text edge-list format: one edge per line, two integer ids
    /// separated by whitespace or a comma; lines starting with `#` ignored.
    pub fn load_edge_list<R: Read>(source: R) -> Result<(Self, LoadWarnings)> {
        let reader = BufReader::new(source);
        let mut raw: Vec<(u64, u64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split(|c: char| c.is_whitespace() || c == ',');
            let mut next_field = |what: &str| -> Result<u64> {
                let field = fields
                    .by_ref()
                    .find(|f| !f.is_empty())
                    .ok_or_else(|| DtimError::Parse {
                        line: idx + 1,
                        message: format!("missing {what} id"),
                    })?;
                field.parse::<u64>().map_err(|_| DtimError::Parse {
                    line: idx + 1,
                    message: format!("invalid {what} id {field:?}"),
                })
            };
            let u = next_field("source")?;
            let v = next_field("destination")?;
            if let Some(extra) = fields.find(|f| !f.is_empty()) {
                return Err(DtimError::Parse {
                    line: idx + 1,
                    message: format!("unexpected trailing field {extra:?}"),
                });
            }
            raw.push((u, v));
        }
        Self::from_edges(&raw)
    }

    /// Serializes the graph as an edge list over original ids, sorted by the
    /// remapped (source, destination) pair. Round-trips bit-exactly through
    /// `load_edge_list` for graphs without isolated nodes.
    pub fn write_edge_list<W: Write>(&self, mut writer: W) -> Result<()> {
        for &(u, v) in &self.edges {
            writeln!(
                writer,
                "{} {}",
                self.original_ids[u as usize], self.original_ids[v as usize]
            )?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical edge-list serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut bytes = Vec::new();
        self.write_edge_list(&mut bytes).expect("in-memory write");
        let digest = Sha256::digest(&bytes);
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}

/// Exact per-node centrality measures used by the evaluation suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityStats {
    pub outdegree: Vec<usize>,
    pub betweenness: Vec<f64>,
    pub coreness: Vec<usize>,
}

/// Computes exact outdegree, betweenness (directed, unweighted shortest
/// paths, endpoints excluded) and coreness (degree peeling on the undirected
/// projection).
pub fn centrality_stats(g: &SocialGraph) -> CentralityStats {
    CentralityStats {
        outdegree: (0..g.node_count()).map(|v| g.out_degree(v as NodeId)).collect(),
        betweenness: betweenness(g),
        coreness: coreness(g),
    }
}

/// Brandes accumulation over directed unweighted shortest paths.
fn betweenness(g: &SocialGraph) -> Vec<f64> {
    let n = g.node_count();
    let mut centrality = vec![0.0f64; n];
    for s in 0..n as NodeId {
        let mut stack: Vec<NodeId> = Vec::new();
        let mut predecessors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s as usize] = 1.0;
        dist[s as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.out_neighbors(v) {
                if dist[w as usize] < 0 {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
                if dist[w as usize] == dist[v as usize] + 1 {
                    sigma[w as usize] += sigma[v as usize];
                    predecessors[w as usize].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w as usize] {
                delta[v as usize] +=
                    sigma[v as usize] / sigma[w as usize] * (1.0 + delta[w as usize]);
            }
            if w != s {
                centrality[w as usize] += delta[w as usize];
            }
        }
    }
    centrality
}

/// Iterative degree peeling on the undirected projection.
fn coreness(g: &SocialGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        if !g.has_edge(v, u) || u < v {
            neighbors[u as usize].push(v);
            neighbors[v as usize].push(u);
        }
    }
    let mut degree: Vec<usize> = neighbors.iter().map(Vec::len).collect();
    let mut core = vec![0usize; n];
    let mut removed = vec![false; n];
    let mut level = 0usize;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| degree[v])
            .expect("unremoved node");
        level = level.max(degree[v]);
        core[v] = level;
        removed[v] = true;
        for &w in &neighbors[v] {
            let w = w as usize;
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    core
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(edges: &[(u64, u64)]) -> SocialGraph {
        SocialGraph::from_edges(edges).unwrap().0
    }

    #[test]
    fn loads_minimal_cycle() {
        let (g, w) = SocialGraph::load_edge_list("0 1\n1 2\n2 0".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(w, LoadWarnings::default());
    }

    #[test]
    fn drops_duplicates_and_self_loops() {
        let (g, w) = SocialGraph::load_edge_list("0 1\n0 1\n1 1".as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(w.duplicate_edges, 1);
        assert_eq!(w.self_loops, 1);
    }

    #[test]
    fn malformed_record_reports_line() {
        let err = SocialGraph::load_edge_list("0 1\nfoo bar\n".as_bytes()).unwrap_err();
        match err {
            DtimError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            SocialGraph::load_edge_list("# nothing\n".as_bytes()),
            Err(DtimError::EmptyGraph)
        ));
    }

    #[test]
    fn comma_separator_accepted() {
        let (g, _) = SocialGraph::load_edge_list("5,3\n3,5".as_bytes()).unwrap();
        assert_eq!(g.node_count(), 2);
        // ids remapped ascending: 3 -> 0, 5 -> 1
        assert_eq!(g.original_ids(), &[3, 5]);
        assert_eq!(g.edges(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let (g, _) =
            SocialGraph::load_edge_list("9 4\n4 2\n2 9\n9 2\n4 9".as_bytes()).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let (g2, _) = SocialGraph::load_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, g2);
        let mut buf2 = Vec::new();
        g2.write_edge_list(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn adjacency_consistency() {
        let g = graph(&[(0, 1), (2, 1), (1, 2), (0, 2)]);
        for v in 0..g.node_count() as NodeId {
            let indeg = g.edges().iter().filter(|&&(_, d)| d == v).count();
            assert_eq!(g.in_degree(v), indeg);
        }
        let out_sum: usize = (0..g.node_count()).map(|v| g.out_degree(v as NodeId)).sum();
        let in_sum: usize = (0..g.node_count()).map(|v| g.in_degree(v as NodeId)).sum();
        assert_eq!(out_sum, g.edge_count());
        assert_eq!(in_sum, g.edge_count());
    }

    #[test]
    fn path_center_betweenness() {
        let g = graph(&[(0, 1), (1, 2)]);
        let stats = centrality_stats(&g);
        assert_eq!(stats.betweenness, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn triangle_outdegrees() {
        let g = graph(&[(0, 1), (1, 2), (2, 0)]);
        let stats = centrality_stats(&g);
        assert_eq!(stats.outdegree, vec![1, 1, 1]);
    }

    #[test]
    fn coreness_bounded_by_total_degree() {
        let g = graph(&[(0, 1), (1, 2), (2, 0), (0, 2), (3, 0)]);
        let stats = centrality_stats(&g);
        for v in 0..g.node_count() as NodeId {
            let total = g.in_degree(v) + g.out_degree(v);
            assert!(stats.coreness[v as usize] <= total);
        }
    }

    /// Independent oracle: betweenness from all-pairs shortest-path counts.
    fn betweenness_oracle(g: &SocialGraph) -> Vec<f64> {
        let n = g.node_count();
        let mut dist = vec![vec![i64::MAX; n]; n];
        let mut paths = vec![vec![0f64; n]; n];
        for s in 0..n {
            dist[s][s] = 0;
            paths[s][s] = 1.0;
            let mut frontier = vec![s as NodeId];
            let mut d = 0;
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &w in g.out_neighbors(v) {
                        let w = w as usize;
                        if dist[s][w] == i64::MAX {
                            dist[s][w] = d + 1;
                            next.push(w as NodeId);
                        }
                        if dist[s][w] == d + 1 {
                            paths[s][w] += paths[s][v as usize];
                        }
                    }
                }
                next.sort_unstable();
                next.dedup();
                frontier = next;
                d += 1;
            }
        }
        let mut bc = vec![0f64; n];
        for s in 0..n {
            for t in 0..n {
                if s == t || dist[s][t] == i64::MAX {
                    continue;
                }
                for v in 0..n {
                    if v == s || v == t {
                        continue;
                    }
                    if dist[s][v] != i64::MAX
                        && dist[v][t] != i64::MAX
                        && dist[s][v] + dist[v][t] == dist[s][t]
                    {
                        bc[v] += paths[s][v] * paths[v][t] / paths[s][t];
                    }
                }
            }
        }
        bc
    }

    #[test]
    fn betweenness_matches_path_enumeration_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 50u64;
        let mut edges = Vec::new();
        for _ in 0..200 {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
        let (g, _) = SocialGraph::from_edges(&edges).unwrap();
        let got = centrality_stats(&g).betweenness;
        let want = betweenness_oracle(&g);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "betweenness mismatch: {a} vs {b}");
        }
    }
}
