//! Empirical degree statistics, goodness of fit, k-cores and Monte Carlo
//! aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::graph::MultiGraph;
use crate::processes::Trajectory;
use crate::theory::DegreeModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("histogram is empty")]
    Empty,
    #[error("goodness of fit needs at least two cells after pooling")]
    Degenerate,
    #[error("need at least 2 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("replicate {replicate} has checkpoints {found:?}, expected {expected:?}")]
    MismatchedCheckpoints {
        replicate: usize,
        expected: Vec<u64>,
        found: Vec<u64>,
    },
}

/// Counts of vertices by degree. Merging histograms pools their vertices,
/// which turns a series of snapshots into a time average.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DegreeHistogram {
    counts: Vec<u64>,
    n: u64,
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let mut h = DegreeHistogram::default();
        for &d in degrees {
            h.add(d, 1);
        }
        h
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let n = counts.iter().sum();
        DegreeHistogram { counts, n }
    }

    pub fn from_graph(g: &MultiGraph) -> Self {
        Self::from_degrees(g.degrees())
    }

    pub fn add(&mut self, degree: u32, count: u64) {
        let k = degree as usize;
        if self.counts.len() <= k {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += count;
        self.n += count;
    }

    pub fn merge(&mut self, other: &DegreeHistogram) {
        for (k, &c) in other.counts.iter().enumerate() {
            if c > 0 {
                self.add(k as u32, c);
            }
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.counts.iter().rposition(|&c| c > 0).map(|k| k as u32)
    }

    /// Fraction of vertices with degree `k`.
    pub fn pi_k(&self, k: u32) -> f64 {
        self.counts.get(k as usize).copied().unwrap_or(0) as f64 / self.n as f64
    }

    /// `(1/n) sum_v d_v^k`.
    pub fn mu_hat_k(&self, k: u32) -> f64 {
        let s: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(d, &c)| c as f64 * (d as f64).powi(k as i32))
            .sum();
        s / self.n as f64
    }

    /// `sum_v d_v (d_v - 2)`, exact.
    pub fn breve_mu(&self) -> i128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(d, &c)| c as i128 * d as i128 * (d as i128 - 2))
            .sum()
    }

    /// `sum_v d_v`, exact.
    pub fn degree_sum(&self) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(d, &c)| c as u128 * d as u128)
            .sum()
    }
}

/// Total variation distance between the empirical law and `model`; the mass
/// of `model` above the largest observed degree enters as one tail cell.
pub fn tv_distance(h: &DegreeHistogram, model: &DegreeModel) -> Result<f64, StatsError> {
    if h.n == 0 {
        return Err(StatsError::Empty);
    }
    let top = h.counts.len() as u64;
    let body: f64 = (0..top).map(|k| (h.pi_k(k as u32) - model.pmf(k)).abs()).sum();
    Ok(0.5 * (body + model.sf(top)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub stat: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Pearson chi-square of the histogram against `model`. Adjacent cells are
/// pooled left to right until each has expected count at least 5; the model
/// tail above the largest observed degree is a final cell.
pub fn chi_square(h: &DegreeHistogram, model: &DegreeModel) -> Result<ChiSquareResult, StatsError> {
    if h.n == 0 {
        return Err(StatsError::Empty);
    }
    let n = h.n as f64;
    let top = h.counts.len() as u64;
    let mut raw: Vec<(f64, f64)> = (0..top)
        .map(|k| (h.counts[k as usize] as f64, n * model.pmf(k)))
        .collect();
    raw.push((0.0, n * model.sf(top)));
    let observed_cells: Vec<(f64, f64)> = pool_cells(&raw, 5.0);
    let cells = pooled_with_remainder(observed_cells);
    if cells.len() < 2 {
        return Err(StatsError::Degenerate);
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len() as u64 - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(stat))
        .unwrap_or(f64::NAN);
    Ok(ChiSquareResult { stat, dof, p_value })
}

fn pool_cells(raw: &[(f64, f64)], threshold: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for &(oi, ei) in raw {
        o += oi;
        e += ei;
        if e >= threshold {
            out.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if o > 0.0 || e > 0.0 {
        out.push((o, e));
    }
    out
}

// a short last cell is folded into its predecessor
fn pooled_with_remainder(mut cells: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if cells.len() >= 2 && cells.last().is_some_and(|&(_, e)| e < 5.0) {
        let (o, e) = cells.pop().expect("nonempty");
        let last = cells.last_mut().expect("nonempty");
        last.0 += o;
        last.1 += e;
    }
    cells.retain(|&(_, e)| e > 0.0);
    cells
}

/// Number of vertices in the k-core, by repeatedly deleting vertices of
/// degree below `k`. Loops count twice and parallel edges with multiplicity.
pub fn kcore_census(g: &MultiGraph, k: u32) -> usize {
    let n = g.n();
    let mut deg: Vec<u32> = g.degrees().to_vec();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(v, w) in g.edges() {
        adj[v as usize].push(w);
        adj[w as usize].push(v);
    }
    let mut removed = vec![false; n];
    let mut stack: Vec<u32> = (0..n as u32).filter(|&v| deg[v as usize] < k).collect();
    for &v in &stack {
        removed[v as usize] = true;
    }
    let mut core = n - stack.len();
    while let Some(v) = stack.pop() {
        for &w in &adj[v as usize] {
            let wi = w as usize;
            if removed[wi] {
                continue;
            }
            deg[wi] -= 1;
            if deg[wi] < k {
                removed[wi] = true;
                core -= 1;
                stack.push(w);
            }
        }
    }
    core
}

/// Mean, standard error and normal 95% interval of replicate values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Result<Estimate, StatsError> {
        let r = xs.len();
        if r < 2 {
            return Err(StatsError::TooFewReplicates(r));
        }
        let mean = xs.iter().sum::<f64>() / r as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        let stderr = (var / r as f64).sqrt();
        Ok(Estimate {
            mean,
            stderr,
            count: r,
            ci_low: mean - 1.96 * stderr,
            ci_high: mean + 1.96 * stderr,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointSummary {
    pub m: u64,
    pub l1_frac: Estimate,
    pub l2_frac: Estimate,
    pub l2_over_l1: Estimate,
    pub susceptibility: Estimate,
    /// Degree fractions keyed by degree.
    pub pi: BTreeMap<u32, Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub replicates: usize,
    pub checkpoints: Vec<CheckpointSummary>,
}

/// Per-checkpoint estimates across replicates; `pi_ks` selects the degree
/// fractions to summarise.
pub fn aggregate(runs: &[Trajectory], pi_ks: &[u32]) -> Result<McSummary, StatsError> {
    if runs.len() < 2 {
        return Err(StatsError::TooFewReplicates(runs.len()));
    }
    let schedule: Vec<u64> = runs[0].checkpoints.iter().map(|c| c.m).collect();
    for (i, t) in runs.iter().enumerate() {
        let found: Vec<u64> = t.checkpoints.iter().map(|c| c.m).collect();
        if found != schedule || t.n != runs[0].n {
            return Err(StatsError::MismatchedCheckpoints {
                replicate: i,
                expected: schedule,
                found,
            });
        }
    }
    let n = runs[0].n as f64;
    let column = |j: usize, f: &dyn Fn(&crate::processes::Checkpoint) -> f64| {
        let xs: Vec<f64> = runs.iter().map(|t| f(&t.checkpoints[j])).collect();
        Estimate::from_samples(&xs)
    };
    let mut checkpoints = Vec::with_capacity(schedule.len());
    for (j, &m) in schedule.iter().enumerate() {
        let mut pi = BTreeMap::new();
        for &k in pi_ks {
            let e = column(j, &|c| c.degree_histogram.get(k as usize).copied().unwrap_or(0) as f64 / n)?;
            pi.insert(k, e);
        }
        checkpoints.push(CheckpointSummary {
            m,
            l1_frac: column(j, &|c| c.l1 as f64 / n)?,
            l2_frac: column(j, &|c| c.l2 as f64 / n)?,
            l2_over_l1: column(j, &|c| c.l2 as f64 / c.l1 as f64)?,
            susceptibility: column(j, &|c| c.susceptibility)?,
            pi,
        });
    }
    Ok(McSummary {
        replicates: runs.len(),
        checkpoints,
    })
}
