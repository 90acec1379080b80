//! Reference centralities and the comparison protocol: per-community
//! eigenvector centrality, weighted PageRank, MAD normalization, Euclidean
//! distances, Hadamard-power rescaling and power fitting.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_adjacency, induced_subgraph, Graph, MatrixMode, SquareMatrix};
use crate::spectral::{
    eigenvector_centrality, CentralityVector, Method, Normalization,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PagerankOptions {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PagerankOptions {
    fn default() -> Self {
        PagerankOptions {
            damping: 0.85,
            tol: 1e-12,
            max_iter: 1000,
        }
    }
}

/// Weighted PageRank by power iteration.
///
/// Transitions follow row-normalized weights; rows without out-weight
/// redistribute uniformly and teleportation is uniform.
pub fn pagerank(m: &SquareMatrix, opts: &PagerankOptions) -> Result<CentralityVector> {
    if m.mode() != MatrixMode::Adjacency {
        return Err(Error::Mode {
            expected: MatrixMode::Adjacency,
            found: m.mode(),
        });
    }
    if !(0.0..=1.0).contains(&opts.damping) {
        return Err(Error::input(format!(
            "damping must lie in [0, 1], got {}",
            opts.damping
        )));
    }
    let n = m.n();
    if n == 0 {
        return Err(Error::input("pagerank of an empty graph"));
    }
    let nf = n as f64;
    let out_weight = m.row_sums();
    let d = opts.damping;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];

    for _ in 0..opts.max_iter {
        let dangling: f64 = (0..n).filter(|&i| out_weight[i] <= 0.0).map(|i| x[i]).sum();
        next.fill((1.0 - d) / nf + d * dangling / nf);
        for i in 0..n {
            if out_weight[i] > 0.0 {
                let share = d * x[i] / out_weight[i];
                for (j, &a) in m.row(i).iter().enumerate() {
                    if a != 0.0 {
                        next[j] += share * a;
                    }
                }
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let change: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if change <= opts.tol {
            return Ok(CentralityVector {
                values: x,
                method: Method::Pagerank,
                matrix_mode: MatrixMode::Adjacency,
                k_used: None,
                normalization: Normalization::UnitSum,
            });
        }
    }
    let hint = if d >= 1.0 {
        "; the walk may be periodic, use damping < 1"
    } else {
        ""
    };
    Err(Error::numerical(
        format!(
            "pagerank did not converge within {} iterations{hint}",
            opts.max_iter
        ),
        None,
    ))
}

/// Eigenvector centrality computed independently inside each community.
///
/// Each community block has unit 2-norm; communities without internal edges
/// score zero.
pub fn community_eigenvector_centrality(g: &Graph) -> Result<CentralityVector> {
    let labels = g
        .community_labels()
        .ok_or_else(|| Error::input("community eigenvector centrality needs community labels"))?;
    let communities = g.communities().expect("labels present");
    let mut values = vec![0.0; g.node_count()];
    for label in &labels {
        let sub = induced_subgraph(g, label)?;
        let members = (0..g.node_count()).filter(|&i| communities[i] == *label);
        let a = build_adjacency(&sub);
        if a.as_row_major().iter().all(|&w| w == 0.0) {
            continue;
        }
        let c = eigenvector_centrality(&a)?;
        for (global, value) in members.zip(c.values) {
            values[global] = value;
        }
    }
    Ok(CentralityVector {
        values,
        method: Method::CommunityEigenvector,
        matrix_mode: MatrixMode::Adjacency,
        k_used: Some(1),
        normalization: Normalization::UnitTwoNorm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MadMode {
    #[default]
    CenterScale,
    ScaleOnly,
    /// Raw values, no normalization.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadNormalized {
    pub values: Vec<f64>,
    pub median: f64,
    /// Divisor actually used (MAD, or the mean-absolute-deviation fallback).
    pub scale: f64,
    pub used_fallback: bool,
    /// Both spread measures were zero; `values` are all zero.
    pub degenerate: bool,
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Spreads at or below this fraction of `max |x|` count as zero.
pub const SPREAD_FLOOR: f64 = 1e-12;

/// Median absolute deviation scaling, optionally centred on the median.
///
/// A zero MAD falls back to the mean absolute deviation from the median; if
/// that is zero too the result is all zeros with `degenerate` set.
pub fn mad_normalize(x: &[f64], mode: MadMode) -> Result<MadNormalized> {
    if x.len() < 2 {
        return Err(Error::input(format!(
            "MAD normalization needs at least 2 values, got {}",
            x.len()
        )));
    }
    let med = median(x);
    if mode == MadMode::None {
        return Ok(MadNormalized {
            values: x.to_vec(),
            median: med,
            scale: 1.0,
            used_fallback: false,
            degenerate: false,
        });
    }
    let deviations: Vec<f64> = x.iter().map(|v| (v - med).abs()).collect();
    let floor = SPREAD_FLOOR * x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mad = median(&deviations);
    let (scale, used_fallback) = if mad > floor {
        (mad, false)
    } else {
        (deviations.iter().sum::<f64>() / x.len() as f64, true)
    };
    if scale <= floor {
        return Ok(MadNormalized {
            values: vec![0.0; x.len()],
            median: med,
            scale: 0.0,
            used_fallback,
            degenerate: true,
        });
    }
    let center = match mode {
        MadMode::CenterScale => med,
        MadMode::ScaleOnly | MadMode::None => 0.0,
    };
    Ok(MadNormalized {
        values: x.iter().map(|v| (v - center) / scale).collect(),
        median: med,
        scale,
        used_fallback,
        degenerate: false,
    })
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::input(format!(
            "vectors differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance between independently MAD-normalized vectors.
pub fn distance(x: &[f64], y: &[f64], mode: MadMode) -> Result<f64> {
    check_lengths(x, y)?;
    let nx = mad_normalize(x, mode)?;
    let ny = mad_normalize(y, mode)?;
    Ok(euclidean(&nx.values, &ny.values))
}

/// `x^p / Σ x^p`, element-wise.
pub fn rescale(x: &[f64], p: f64) -> Result<Vec<f64>> {
    if p.is_nan() || p <= 0.0 || !p.is_finite() {
        return Err(Error::input(format!("rescaling power must be positive, got {p}")));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::input(format!(
            "rescaling needs finite nonnegative values, got {bad}"
        )));
    }
    let powered: Vec<f64> = x.iter().map(|v| v.powf(p)).collect();
    let total: f64 = powered.iter().sum();
    if total <= 0.0 {
        return Err(Error::input("rescaling an all-zero vector"));
    }
    Ok(powered.into_iter().map(|v| v / total).collect())
}

/// Powers 0.05, 0.10, …, 1.00.
pub fn default_power_grid() -> Vec<f64> {
    power_grid(0.05)
}

/// Grid `step, 2·step, …` up to 1 inclusive.
pub fn power_grid(step: f64) -> Vec<f64> {
    let count = (1.0 / step).round() as usize;
    (1..=count).map(|i| i as f64 / count as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub p: f64,
    pub distance: f64,
    /// (p, distance) for every grid point, in grid order.
    pub curve: Vec<(f64, f64)>,
}

/// Grid power whose rescaling of `x` lies closest to `reference`; ties go to
/// the smallest power.
pub fn fit_power(x: &[f64], reference: &[f64], grid: &[f64], mode: MadMode) -> Result<PowerFit> {
    check_lengths(x, reference)?;
    if grid.is_empty() {
        return Err(Error::input("empty power grid"));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let reference_norm = mad_normalize(reference, mode)?;
    let mut curve = Vec::with_capacity(sorted.len());
    let mut best: Option<(f64, f64)> = None;
    for &p in &sorted {
        let nx = mad_normalize(&rescale(x, p)?, mode)?;
        let d = euclidean(&nx.values, &reference_norm.values);
        curve.push((p, d));
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((p, d));
        }
    }
    let (p, distance) = best.expect("non-empty grid");
    Ok(PowerFit { p, distance, curve })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDifference {
    pub node_id: String,
    pub x: f64,
    pub y: f64,
    /// `norm(y) − norm(x)` in MAD units.
    pub diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quartiles with linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> Quartiles {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (s.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    Quartiles {
        min: s[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: s[s.len() - 1],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Sorted by `x` descending, ties by input order.
    pub per_node_diff: Vec<NodeDifference>,
    pub distance: f64,
    pub normalization: MadMode,
    pub x_mad: f64,
    pub y_mad: f64,
    pub quartiles: Quartiles,
    pub fraction_within_one_mad: f64,
    pub fitted_p: Option<f64>,
}

/// Per-node differences between `y` and `x` in MAD units.
pub fn difference_report(
    node_ids: &[String],
    x: &[f64],
    y: &[f64],
    mode: MadMode,
) -> Result<ComparisonReport> {
    check_lengths(x, y)?;
    if node_ids.len() != x.len() {
        return Err(Error::input(format!(
            "{} node ids for {} values",
            node_ids.len(),
            x.len()
        )));
    }
    let nx = mad_normalize(x, mode)?;
    let ny = mad_normalize(y, mode)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let per_node_diff: Vec<NodeDifference> = order
        .iter()
        .map(|&i| NodeDifference {
            node_id: node_ids[i].clone(),
            x: x[i],
            y: y[i],
            diff: ny.values[i] - nx.values[i],
        })
        .collect();
    let diffs: Vec<f64> = per_node_diff.iter().map(|d| d.diff).collect();
    let within = diffs.iter().filter(|d| d.abs() <= 1.0).count();
    Ok(ComparisonReport {
        distance: euclidean(&nx.values, &ny.values),
        normalization: mode,
        x_mad: nx.scale,
        y_mad: ny.scale,
        quartiles: quartiles(&diffs),
        fraction_within_one_mad: within as f64 / diffs.len() as f64,
        per_node_diff,
        fitted_p: None,
    })
}
