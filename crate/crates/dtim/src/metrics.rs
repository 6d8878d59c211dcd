//! Evaluation measurements: seed-set overlap, coefficient of variation,
//! correlation helpers and the parameter-sweep driver.

use std::io::Write;

use crate::error::{DtimError, Result};
use crate::graph::NodeId;
use crate::select::{dtim_select, SelectionConfig, Variant};
use crate::simulate::estimate_capital;
use crate::weights::{DiffusionGraph, TargetSet};

/// Normalized overlap `|a intersect b| / k` of two size-k seed sets.
pub fn seed_overlap(a: &[NodeId], b: &[NodeId], k: usize) -> Result<f64> {
    if a.len() != k || b.len() != k {
        return Err(DtimError::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut a_sorted = a.to_vec();
    a_sorted.sort_unstable();
    let shared = b
        .iter()
        .filter(|v| a_sorted.binary_search(v).is_ok())
        .count();
    Ok(shared as f64 / k as f64)
}

/// Pairwise overlap of labeled seed sets; symmetric with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

pub fn overlap_matrix(runs: &[(String, Vec<NodeId>)], k: usize) -> Result<OverlapMatrix> {
    let mut values = vec![vec![0.0; runs.len()]; runs.len()];
    for i in 0..runs.len() {
        for j in 0..runs.len() {
            values[i][j] = seed_overlap(&runs[i].1, &runs[j].1, k)?;
        }
    }
    Ok(OverlapMatrix {
        labels: runs.iter().map(|(label, _)| label.clone()).collect(),
        values,
    })
}

/// Sample standard deviation divided by the mean.
pub fn coefficient_of_variation(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(DtimError::InvalidInput("empty sequence".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(DtimError::ZeroMean);
    }
    if values.len() == 1 {
        return Ok(0.0);
    }
    let variance = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (n - 1.0);
    Ok(variance.sqrt() / mean)
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(DtimError::SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(DtimError::InvalidInput(
            "need at least two points for correlation".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(DtimError::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Average ranks, with ties sharing their mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &order[i..=j] {
            ranks[slot] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson over average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// One cell of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub k: usize,
    pub seeds: Vec<NodeId>,
    pub capital_estimate: f64,
    pub capital_std_error: f64,
    /// 100 equal-width bins of the per-node activation probabilities.
    pub activation_histogram: Vec<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub variant: Variant,
    pub eta: f64,
    pub runs: usize,
    pub rng_seed: u64,
}

const HISTOGRAM_BINS: usize = 100;

/// Runs selection plus simulation over the full alpha-times-k grid.
pub fn sweep(
    dg: &DiffusionGraph,
    ts: &TargetSet,
    alphas: &[f64],
    ks: &[usize],
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() || ks.is_empty() {
        return Err(DtimError::InvalidInput("empty sweep grid".into()));
    }
    let mut rows = Vec::with_capacity(alphas.len() * ks.len());
    for &k in ks {
        for &alpha in alphas {
            let selection = SelectionConfig {
                k,
                alpha,
                eta: cfg.eta,
                variant: cfg.variant,
            };
            let result = dtim_select(dg, ts, &selection)?;
            let seeds: Vec<NodeId> = result.seeds.iter().map(|s| s.node).collect();
            let report = estimate_capital(dg, &seeds, ts, cfg.runs, cfg.rng_seed)?;
            let mut histogram = vec![0u64; HISTOGRAM_BINS];
            for &p in &report.activation_probability {
                let bin = ((p * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
                histogram[bin] += 1;
            }
            rows.push(SweepRow {
                alpha,
                k,
                seeds,
                capital_estimate: report.capital_estimate,
                capital_std_error: report.capital_std_error,
                activation_histogram: histogram,
            });
        }
    }
    Ok(rows)
}

/// Tab-separated sweep output; `#` header lines name every parameter.
pub fn write_sweep<W: Write>(
    dg: &DiffusionGraph,
    rows: &[SweepRow],
    cfg: &SweepConfig,
    mut writer: W,
) -> Result<()> {
    let variant = match cfg.variant {
        Variant::Local => "local",
        Variant::Global => "global",
    };
    writeln!(
        writer,
        "# variant={variant}\teta={}\truns={}\trng_seed={}",
        cfg.eta, cfg.runs, cfg.rng_seed
    )?;
    writeln!(
        writer,
        "alpha\tk\tcapital\tcapital_std_error\tseeds\tactivation_histogram"
    )?;
    for row in rows {
        let seeds = row
            .seeds
            .iter()
            .map(|&v| dg.graph().original_id(v).to_string())
            .collect::<Vec<_>>()
            .join(",");
        let histogram = row
            .activation_histogram
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            writer,
            "{}\t{}\t{:.16e}\t{:.16e}\t{}\t{}",
            row.alpha, row.k, row.capital_estimate, row.capital_std_error, seeds, histogram
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;

    #[test]
    fn overlap_identical_disjoint_and_half() {
        assert_eq!(seed_overlap(&[1, 2, 3], &[3, 2, 1], 3).unwrap(), 1.0);
        assert_eq!(seed_overlap(&[1, 2], &[3, 4], 2).unwrap(), 0.0);
        assert_eq!(
            seed_overlap(&[1, 2, 3, 4], &[3, 4, 5, 6], 4).unwrap(),
            0.5
        );
        assert!(matches!(
            seed_overlap(&[1], &[1, 2], 2),
            Err(DtimError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn overlap_matrix_is_symmetric_with_unit_diagonal() {
        let runs = vec![
            ("a".to_string(), vec![1, 2]),
            ("b".to_string(), vec![2, 3]),
            ("c".to_string(), vec![4, 5]),
        ];
        let m = overlap_matrix(&runs, 2).unwrap();
        for i in 0..3 {
            assert_eq!(m.values[i][i], 1.0);
            for j in 0..3 {
                assert_eq!(m.values[i][j], m.values[j][i]);
            }
        }
        assert_eq!(m.values[0][1], 0.5);
        assert_eq!(m.values[0][2], 0.0);
    }

    #[test]
    fn cv_constant_sample_and_errors() {
        assert_eq!(coefficient_of_variation(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
        let cv = coefficient_of_variation(&[1.0, 3.0]).unwrap();
        assert!((cv - 2.0f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(matches!(
            coefficient_of_variation(&[0.0, 0.0]),
            Err(DtimError::ZeroMean)
        ));
    }

    #[test]
    fn cv_is_scale_invariant() {
        let x = [1.0, 4.0, 2.5, 9.0];
        let scaled: Vec<f64> = x.iter().map(|v| v * 7.3).collect();
        let a = coefficient_of_variation(&x).unwrap();
        let b = coefficient_of_variation(&scaled).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn pearson_perfect_and_inverse() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let double: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let negative: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &double).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &negative).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson(&x, &[1.0, 1.0, 1.0, 1.0]),
            Err(DtimError::ZeroVariance)
        ));
    }

    #[test]
    fn independent_sequences_are_uncorrelated() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(27);
        let x: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
        let y: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
        assert!(pearson(&x, &y).unwrap().abs() < 0.05);
    }

    #[test]
    fn spearman_is_rank_based() {
        // monotone but nonlinear: perfect rank correlation
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.exp()).collect();
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-15);
        // ties share average ranks
        let ranks = average_ranks(&[2.0, 1.0, 2.0]);
        assert_eq!(ranks, vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn single_cell_sweep_matches_direct_run() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let cfg = SweepConfig {
            variant: Variant::Global,
            eta: 0.0,
            runs: 2000,
            rng_seed: 5,
        };
        let rows = sweep(&dg, &ts, &[1.0], &[1], &cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].seeds, vec![fixture::A]);
        assert_eq!(
            rows[0].activation_histogram.iter().sum::<u64>(),
            fixture::NODE_COUNT as u64
        );
        let again = sweep(&dg, &ts, &[1.0], &[1], &cfg).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn sweep_output_has_grid_shape() {
        let dg = fixture::example_two();
        let ts = fixture::example_two_targets(&dg).unwrap();
        let cfg = SweepConfig {
            variant: Variant::Local,
            eta: 0.0,
            runs: 200,
            rng_seed: 1,
        };
        let rows = sweep(&dg, &ts, &[0.0, 0.5, 1.0], &[1, 2], &cfg).unwrap();
        assert_eq!(rows.len(), 6);
        let mut buf = Vec::new();
        write_sweep(&dg, &rows, &cfg, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("# variant=local"));
    }
}
