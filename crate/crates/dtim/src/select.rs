//! Greedy seed selection maximizing the diversity-sensitive capital.
//!
//! Each round walks backward from every remaining target, enumerating simple
//! paths whose live-edge probability survives the pruning threshold. A path
//! reaching node u contributes its probability times the target's weight to
//! u's capital. During the first round only, the walk also unfolds the
//! target's diffusion subgraph and scores each visited node's diversity,
//! either incrementally at visit time (local variant) or once the subgraph is
//! complete (global variant); the scores are max-normalized per target and
//! frozen for all later rounds. The node maximizing
//! `alpha * C + (1 - alpha) * D` joins the seed set.

use std::collections::HashMap;
use std::io::Write;

use crate::diversity::{max_normalize, UnfoldState};
use crate::error::{DtimError, Result};
use crate::graph::NodeId;
use crate::weights::{DiffusionGraph, TargetSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy)]
pub struct SelectionConfig {
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub variant: Variant,
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(DtimError::InvalidInput("budget k must be at least 1".into()));
        }
        for (name, value) in [("alpha", self.alpha), ("eta", self.eta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(DtimError::InvalidInput(format!(
                    "{name} is {value}, outside [0,1]"
                )));
            }
        }
        Ok(())
    }
}

/// One selected seed with the objective decomposition at selection time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedScore {
    pub node: NodeId,
    pub objective: f64,
    pub capital: f64,
    pub diversity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub seeds: Vec<SeedScore>,
    /// Candidates or targets ran out before the budget was met.
    pub exhausted: bool,
}

struct Walk<'a> {
    dg: &'a DiffusionGraph,
    eta: f64,
    target_ell: f64,
    in_seed: &'a [bool],
    on_path: Vec<bool>,
    capital: &'a mut [f64],
    candidate: &'a mut [bool],
}

impl Walk<'_> {
    /// First-round descent: accrues capital and influence, unfolds the
    /// subgraph and (local variant) scores diversity at visit time.
    fn first(
        &mut self,
        v: NodeId,
        pp: f64,
        state: &mut UnfoldState<'_>,
        influence: &mut [f64],
        dset: &mut HashMap<NodeId, f64>,
        local: bool,
    ) {
        for &(u, b) in self.dg.in_weighted(v) {
            if b == 0.0 || self.in_seed[u as usize] || self.on_path[u as usize] {
                continue;
            }
            let pp = pp * b;
            if pp < self.eta {
                continue;
            }
            self.capital[u as usize] += pp * self.target_ell;
            self.candidate[u as usize] = true;
            influence[u as usize] += pp;
            if local {
                dset.insert(u, state.local_diversity(u));
            }
            state.add_edge(u, v);
            self.on_path[u as usize] = true;
            self.first(u, pp, state, influence, dset, local);
            self.on_path[u as usize] = false;
        }
    }

    /// Later rounds: diversity is frozen, so each surviving path adds its
    /// probability times the stored per-target score.
    fn later(&mut self, v: NodeId, pp: f64, frozen: &HashMap<NodeId, f64>, diversity: &mut [f64]) {
        for &(u, b) in self.dg.in_weighted(v) {
            if b == 0.0 || self.in_seed[u as usize] || self.on_path[u as usize] {
                continue;
            }
            let pp = pp * b;
            if pp < self.eta {
                continue;
            }
            self.capital[u as usize] += pp * self.target_ell;
            self.candidate[u as usize] = true;
            if let Some(&score) = frozen.get(&u) {
                diversity[u as usize] += pp * score;
            }
            self.on_path[u as usize] = true;
            self.later(u, pp, frozen, diversity);
            self.on_path[u as usize] = false;
        }
    }
}

/// Scores every candidate as if it were the first seed picked: capital,
/// diversity and blended objective on the pristine graph. Useful for rank
/// correlation studies and for evaluating modular set functions built from
/// per-node scores.
pub fn first_round_scores(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    cfg: &SelectionConfig,
) -> Result<Vec<SeedScore>> {
    cfg.validate()?;
    if ts.is_empty() {
        return Err(DtimError::EmptyTargetSet);
    }
    let n = dg.graph().node_count();
    let in_seed = vec![false; n];
    let mut capital = vec![0.0f64; n];
    let mut diversity = vec![0.0f64; n];
    let mut candidate = vec![false; n];

    for &t in ts.members() {
        let target_ell = dg.node_weight(t);
        let mut walk = Walk {
            dg,
            eta: cfg.eta,
            target_ell,
            in_seed: &in_seed,
            on_path: {
                let mut p = vec![false; n];
                p[t as usize] = true;
                p
            },
            capital: &mut capital,
            candidate: &mut candidate,
        };
        let mut state = UnfoldState::new(dg.graph());
        state.add_node(t);
        let mut influence = vec![0.0f64; n];
        let mut dset: HashMap<NodeId, f64> = HashMap::new();
        walk.first(
            t,
            1.0,
            &mut state,
            &mut influence,
            &mut dset,
            cfg.variant == Variant::Local,
        );
        if cfg.variant == Variant::Global {
            for &v in state.members() {
                dset.insert(v, state.global_diversity(v));
            }
        }
        let mut nodes: Vec<NodeId> = dset.keys().copied().collect();
        nodes.sort_unstable();
        let mut values: Vec<f64> = nodes.iter().map(|v| dset[v]).collect();
        max_normalize(&mut values);
        for (v, score) in nodes.into_iter().zip(values) {
            diversity[v as usize] += influence[v as usize] * score;
        }
    }

    Ok((0..n)
        .filter(|&v| candidate[v])
        .map(|v| SeedScore {
            node: v as NodeId,
            objective: cfg.alpha * capital[v] + (1.0 - cfg.alpha) * diversity[v],
            capital: capital[v],
            diversity: diversity[v],
        })
        .collect())
}

/// Greedy selection of up to `cfg.k` seeds.
pub fn dtim_select(dg: &DiffusionGraph, ts: &TargetSet, cfg: &SelectionConfig) -> Result<SeedResult> {
    cfg.validate()?;
    if ts.is_empty() {
        return Err(DtimError::EmptyTargetSet);
    }
    let n = dg.graph().node_count();
    let mut in_seed = vec![false; n];
    let mut frozen: HashMap<NodeId, HashMap<NodeId, f64>> = HashMap::new();
    let mut seeds = Vec::with_capacity(cfg.k);
    let mut exhausted = false;

    for round in 0..cfg.k {
        let remaining: Vec<NodeId> = ts
            .members()
            .iter()
            .copied()
            .filter(|&t| !in_seed[t as usize])
            .collect();
        if remaining.is_empty() {
            exhausted = true;
            break;
        }
        let mut capital = vec![0.0f64; n];
        let mut diversity = vec![0.0f64; n];
        let mut candidate = vec![false; n];

        for &t in &remaining {
            let target_ell = dg.node_weight(t);
            let mut walk = Walk {
                dg,
                eta: cfg.eta,
                target_ell,
                in_seed: &in_seed,
                on_path: {
                    let mut p = vec![false; n];
                    p[t as usize] = true;
                    p
                },
                capital: &mut capital,
                candidate: &mut candidate,
            };
            if round == 0 {
                let mut state = UnfoldState::new(dg.graph());
                state.add_node(t);
                let mut influence = vec![0.0f64; n];
                let mut dset: HashMap<NodeId, f64> = HashMap::new();
                walk.first(
                    t,
                    1.0,
                    &mut state,
                    &mut influence,
                    &mut dset,
                    cfg.variant == Variant::Local,
                );
                if cfg.variant == Variant::Global {
                    for &v in state.members() {
                        dset.insert(v, state.global_diversity(v));
                    }
                }
                let mut nodes: Vec<NodeId> = dset.keys().copied().collect();
                nodes.sort_unstable();
                let mut values: Vec<f64> =
                    nodes.iter().map(|v| dset[v]).collect();
                max_normalize(&mut values);
                let normalized: HashMap<NodeId, f64> =
                    nodes.into_iter().zip(values).collect();
                for (&v, &score) in &normalized {
                    diversity[v as usize] += influence[v as usize] * score;
                }
                frozen.insert(t, normalized);
            } else {
                let empty = HashMap::new();
                let table = frozen.get(&t).unwrap_or(&empty);
                walk.later(t, 1.0, table, &mut diversity);
            }
        }

        let mut best: Option<(NodeId, f64)> = None;
        for v in 0..n {
            if !candidate[v] || in_seed[v] {
                continue;
            }
            let objective = cfg.alpha * capital[v] + (1.0 - cfg.alpha) * diversity[v];
            let better = match best {
                None => true,
                Some((_, current)) => objective > current,
            };
            if better {
                best = Some((v as NodeId, objective));
            }
        }
        let Some((node, objective)) = best else {
            exhausted = true;
            break;
        };
        in_seed[node as usize] = true;
        seeds.push(SeedScore {
            node,
            objective,
            capital: capital[node as usize],
            diversity: diversity[node as usize],
        });
    }
    Ok(SeedResult { seeds, exhausted })
}

/// Writes "rank node-id DIC C D" lines over original node ids.
pub fn write_seed_result<W: Write>(
    dg: &DiffusionGraph,
    result: &SeedResult,
    mut writer: W,
) -> Result<()> {
    for (rank, seed) in result.seeds.iter().enumerate() {
        writeln!(
            writer,
            "{} {} {:.16e} {:.16e} {:.16e}",
            rank + 1,
            dg.graph().original_id(seed.node),
            seed.objective,
            seed.capital,
            seed.diversity
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    fn config(variant: Variant, alpha: f64, eta: f64, k: usize) -> SelectionConfig {
        SelectionConfig {
            k,
            alpha,
            eta,
            variant,
        }
    }

    #[test]
    fn global_variant_prefers_the_boundary_bridge() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Global, 0.5, 0.0, 1)).unwrap();
        assert_eq!(result.seeds.len(), 1);
        let seed = result.seeds[0];
        assert_eq!(seed.node, fixture::U1);
        // inf(u1) = 0.0135 + 0.21; C = inf * 0.5, D = inf * 1
        assert!((seed.capital - 0.111_75).abs() < 1e-12);
        assert!((seed.diversity - 0.2235).abs() < 1e-12);
        assert!((seed.objective - 0.167_625).abs() < 1e-12);
        assert!(!result.exhausted);
    }

    #[test]
    fn local_variant_prefers_the_heavier_bridge() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Local, 0.5, 0.0, 1)).unwrap();
        let seed = result.seeds[0];
        assert_eq!(seed.node, fixture::B);
        assert!((seed.capital - 0.175).abs() < 1e-12);
        // Dset(b) = 3/4 * (1 + 2/9), max over targets of Dset is 1.2
        let norm = 0.75 * (1.0 + 2.0 / 9.0) / 1.2;
        assert!((seed.diversity - 0.35 * norm).abs() < 1e-12);
        let want = 0.5 * 0.175 + 0.5 * 0.35 * norm;
        assert!((seed.objective - want).abs() < 1e-12);
    }

    #[test]
    fn pure_capital_picks_the_strongest_influencer() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        for variant in [Variant::Local, Variant::Global] {
            let result = dtim_select(&dg, &ts, &config(variant, 1.0, 0.0, 1)).unwrap();
            let seed = result.seeds[0];
            assert_eq!(seed.node, fixture::A);
            // inf(a) = 0.098 + 0.06 + 0.24 = 0.398
            assert!((seed.capital - 0.199).abs() < 1e-12);
            assert!((seed.objective - 0.199).abs() < 1e-12);
        }
    }

    #[test]
    fn pruning_threshold_drops_weak_paths() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        // at eta = 0.15 only a's strongest path survives (0.24), so b's
        // single 0.35 path wins the pure-capital contest
        let result =
            dtim_select(&dg, &ts, &config(Variant::Global, 1.0, 0.15, 1)).unwrap();
        let seed = result.seeds[0];
        assert_eq!(seed.node, fixture::B);
        assert!((seed.capital - 0.175).abs() < 1e-12);
    }

    #[test]
    fn raising_eta_never_raises_capital() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let mut previous = f64::INFINITY;
        for eta in [0.0, 0.01, 0.05, 0.1, 0.2, 0.5] {
            let result =
                dtim_select(&dg, &ts, &config(Variant::Global, 1.0, eta, 1)).unwrap();
            let capital = result.seeds.first().map_or(0.0, |s| s.capital);
            assert!(capital <= previous + 1e-15, "eta {eta}");
            previous = capital;
        }
    }

    #[test]
    fn greedy_fills_budget_then_exhausts() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Global, 0.5, 0.0, 3)).unwrap();
        assert_eq!(result.seeds.len(), 3);
        assert!(!result.exhausted);
        let mut ids: Vec<_> = result.seeds.iter().map(|s| s.node).collect();
        ids.dedup();
        assert_eq!(ids.len(), 3);
        // candidates dry up once every direct in-neighbor of the target is
        // seeded, so an oversized budget ends early with the flag set
        let greedy_all =
            dtim_select(&dg, &ts, &config(Variant::Global, 0.5, 0.0, 50)).unwrap();
        assert!(greedy_all.exhausted);
        assert!(greedy_all.seeds.len() < 50);
        let picked: Vec<_> = greedy_all.seeds.iter().map(|s| s.node).collect();
        for direct in [fixture::E, fixture::C, fixture::G, fixture::B] {
            assert!(picked.contains(&direct));
        }
    }

    #[test]
    fn exact_ties_break_on_smallest_id() {
        use crate::graph::SocialGraph;
        use crate::weights::{select_targets, DiffusionGraph, TargetMode};
        let g = SocialGraph::from_dense_edges(3, &[(1, 0), (2, 0)]).unwrap();
        let dg = DiffusionGraph::manual(
            g,
            vec![0.8, 0.0, 0.0],
            &[((1, 0), 0.4), ((2, 0), 0.4)],
        )
        .unwrap();
        let ts = select_targets(dg.node_weights(), TargetMode::Absolute(0.5)).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Global, 1.0, 0.0, 1)).unwrap();
        assert_eq!(result.seeds[0].node, 1);
    }

    #[test]
    fn seeds_are_excluded_from_later_walks() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Local, 1.0, 0.0, 2)).unwrap();
        assert_eq!(result.seeds[0].node, fixture::A);
        // with a removed, c and f lose their upstream paths; b's direct edge
        // dominates the remaining capital
        assert_eq!(result.seeds[1].node, fixture::B);
        assert!((result.seeds[1].capital - 0.175).abs() < 1e-12);
    }

    #[test]
    fn deterministic_across_runs() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let a = dtim_select(&dg, &ts, &config(Variant::Local, 0.5, 0.0, 4)).unwrap();
        let b = dtim_select(&dg, &ts, &config(Variant::Local, 0.5, 0.0, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fully_unfolded_boundary_scores() {
        use crate::diversity::UnfoldState;
        let dg = fixture::example_two();
        let mut state = UnfoldState::new(dg.graph());
        state.add_node(fixture::T);
        for &((u, v), _) in fixture::WEIGHTED_EDGES.iter() {
            state.add_edge(u, v);
        }
        assert_eq!(state.boundary_size(), 2);
        let u1 = state.global_diversity(fixture::U1);
        let u2 = state.global_diversity(fixture::U2);
        assert!((u1 - 3.0 * 2.0f64.ln()).abs() < 1e-12);
        assert!((u2 - 2.0f64.ln()).abs() < 1e-12);
        assert!((u2 / u1 - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn result_writer_format() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let result =
            dtim_select(&dg, &ts, &config(Variant::Global, 0.5, 0.0, 1)).unwrap();
        let mut buf = Vec::new();
        write_seed_result(&dg, &result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let fields: Vec<&str> = text.split_whitespace().collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0], "1");
        assert_eq!(fields[1], "9");
    }
}
