//! Exact distributions of the processes on tiny instances, in rational
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::Vertex;
use crate::processes::{Mode, RewireConvention};

pub type Rational = BigRational;

/// Canonical multigraph key: sorted list of sorted pairs.
pub type GraphKey = Vec<(Vertex, Vertex)>;

pub const MAX_N: usize = 4;
pub const MAX_M: usize = 3;
pub const MAX_CM_STUBS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle bounds exceeded: {0}")]
    Bounds(String),
    #[error("alpha must be positive")]
    Alpha,
    #[error("degree sum {0} is odd")]
    OddDegreeSum(u32),
    #[error("no admissible edge at step {0}")]
    Stuck(usize),
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn int(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

pub fn canonical(edges: &[(Vertex, Vertex)]) -> GraphKey {
    let mut e: Vec<_> = edges.iter().map(|&(v, w)| (v.min(w), v.max(w))).collect();
    e.sort_unstable();
    e
}

pub fn degrees_of(n: usize, g: &GraphKey) -> Vec<u32> {
    let mut d = vec![0u32; n];
    for &(v, w) in g {
        d[v as usize] += 1;
        d[w as usize] += 1;
    }
    d
}

/// Exact law over canonical multigraphs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExactDistribution {
    pub probs: BTreeMap<GraphKey, Rational>,
}

impl ExactDistribution {
    fn add(&mut self, key: GraphKey, p: Rational) {
        let slot = self.probs.entry(key).or_insert_with(Rational::zero);
        *slot += p;
    }

    pub fn get(&self, key: &GraphKey) -> Rational {
        self.probs.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().fold(Rational::zero(), |a, p| a + p)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Law of the degree sequence.
    pub fn degree_law(&self, n: usize) -> BTreeMap<Vec<u32>, Rational> {
        let mut out = BTreeMap::new();
        for (g, p) in &self.probs {
            *out.entry(degrees_of(n, g)).or_insert_with(Rational::zero) += p;
        }
        out
    }

    /// Conditional law given the degree sequence `d`.
    pub fn conditional_on(&self, n: usize, d: &[u32]) -> ExactDistribution {
        let mut out = ExactDistribution::default();
        let mut mass = Rational::zero();
        for (g, p) in &self.probs {
            if degrees_of(n, g) == d {
                out.add(g.clone(), p.clone());
                mass += p;
            }
        }
        if !mass.is_zero() {
            for p in out.probs.values_mut() {
                *p /= mass.clone();
            }
        }
        out
    }
}

/// Per-vertex attachment weight for the oracle: `d + alpha` or a table.
#[derive(Debug, Clone)]
pub enum OracleWeight {
    Alpha(Rational),
    /// `f(k)` for `k < len`, zero beyond.
    Table(Vec<Rational>),
}

impl OracleWeight {
    fn at(&self, d: u32) -> Rational {
        match self {
            OracleWeight::Alpha(a) => int(d as u64) + a,
            OracleWeight::Table(f) => f.get(d as usize).cloned().unwrap_or_else(Rational::zero),
        }
    }
}

fn check_bounds(n: usize, m: usize) -> Result<(), OracleError> {
    if n == 0 || n > MAX_N || m > MAX_M {
        return Err(OracleError::Bounds(format!(
            "need 1 <= n <= {MAX_N} and m <= {MAX_M}, got n = {n}, m = {m}"
        )));
    }
    Ok(())
}

/// Exact law of the `m`-edge graph of the `alpha` process, built step by step
/// from the one-step probabilities with their closed-form normalisers:
/// `(2i + alpha n)(2i + alpha n + 1)` for the multigraph and
/// `(2i + alpha n)^2 - Q` for the simple graph, where
/// `Q = 2 sum_{edges xy} (d_x + alpha)(d_y + alpha) + sum_x (d_x + alpha)^2`.
pub fn enumerate_process(
    n: usize,
    m: usize,
    alpha: &Rational,
    mode: Mode,
) -> Result<ExactDistribution, OracleError> {
    check_bounds(n, m)?;
    if *alpha <= Rational::zero() {
        return Err(OracleError::Alpha);
    }
    let mut dist = ExactDistribution::default();
    dist.add(Vec::new(), Rational::one());
    for i in 0..m {
        let mut next = ExactDistribution::default();
        let s = int(2 * i as u64) + alpha * int(n as u64);
        for (g, p) in &dist.probs {
            let d = degrees_of(n, g);
            let w: Vec<Rational> = d.iter().map(|&k| int(k as u64) + alpha).collect();
            let z = match mode {
                Mode::Multigraph => s.clone() * (s.clone() + Rational::one()),
                Mode::Simple => {
                    let on_edges = g
                        .iter()
                        .fold(Rational::zero(), |acc, &(x, y)| acc + &w[x as usize] * &w[y as usize]);
                    let squares = w.iter().fold(Rational::zero(), |acc, x| acc + x * x);
                    s.clone() * s.clone() - (int(2) * on_edges + squares)
                }
            };
            if z.is_zero() {
                return Err(OracleError::Stuck(i));
            }
            for v in 0..n as Vertex {
                for u in v..n as Vertex {
                    let weight = if u == v {
                        match mode {
                            Mode::Simple => continue,
                            Mode::Multigraph => &w[v as usize] * (&w[v as usize] + Rational::one()),
                        }
                    } else {
                        if mode == Mode::Simple && g.contains(&(v, u)) {
                            continue;
                        }
                        int(2) * &w[v as usize] * &w[u as usize]
                    };
                    let mut h = g.clone();
                    h.push((v, u));
                    next.add(canonical(&h), p * weight / z.clone());
                }
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// Exact law of the general-weight process with weights `f`, normalised by
/// direct summation over all admissible options.
pub fn enumerate_process_weighted(
    n: usize,
    m: usize,
    f: &OracleWeight,
    mode: Mode,
) -> Result<ExactDistribution, OracleError> {
    check_bounds(n, m)?;
    let mut dist = ExactDistribution::default();
    dist.add(Vec::new(), Rational::one());
    for i in 0..m {
        let mut next = ExactDistribution::default();
        for (g, p) in &dist.probs {
            let d = degrees_of(n, g);
            let mut options = Vec::new();
            for v in 0..n as Vertex {
                for u in v..n as Vertex {
                    let weight = if u == v {
                        if mode == Mode::Simple {
                            continue;
                        }
                        f.at(d[v as usize]) * f.at(d[v as usize] + 1)
                    } else {
                        if mode == Mode::Simple && g.contains(&(v, u)) {
                            continue;
                        }
                        let pair = f.at(d[v as usize]) * f.at(d[u as usize]);
                        match mode {
                            Mode::Multigraph => int(2) * pair,
                            Mode::Simple => pair,
                        }
                    };
                    if !weight.is_zero() {
                        options.push(((v, u), weight));
                    }
                }
            }
            let z = options.iter().fold(Rational::zero(), |a, (_, w)| a + w);
            if z.is_zero() {
                return Err(OracleError::Stuck(i));
            }
            for (e, weight) in options {
                let mut h = g.clone();
                h.push(e);
                next.add(canonical(&h), p * weight / z.clone());
            }
        }
        dist = next;
    }
    Ok(dist)
}

/// Multigraph law from the urn: a draw sequence with counts `d_v` has
/// probability `prod_v alpha^(d_v) / (alpha n)^(2m)` in rising factorials,
/// and consecutive draws are paired.
pub fn enumerate_urn_sequences(n: usize, m: usize, alpha: &Rational) -> Result<ExactDistribution, OracleError> {
    check_bounds(n, m)?;
    if *alpha <= Rational::zero() {
        return Err(OracleError::Alpha);
    }
    let rising = |x: &Rational, k: u32| (0..k).fold(Rational::one(), |acc, j| acc * (x + int(j as u64)));
    let len = 2 * m as u32;
    let denom = rising(&(alpha * int(n as u64)), len);
    let mut dist = ExactDistribution::default();
    let total = (n as u64).pow(len);
    for code in 0..total {
        let mut c = code;
        let seq: Vec<Vertex> = (0..len)
            .map(|_| {
                let v = (c % n as u64) as Vertex;
                c /= n as u64;
                v
            })
            .collect();
        let mut counts = vec![0u32; n];
        for &v in &seq {
            counts[v as usize] += 1;
        }
        let num = counts.iter().fold(Rational::one(), |acc, &k| acc * rising(alpha, k));
        let edges: Vec<_> = seq.chunks(2).map(|p| (p[0], p[1])).collect();
        dist.add(canonical(&edges), num / denom.clone());
    }
    Ok(dist)
}

/// Configuration model on `deg`: uniform over the perfect matchings of the
/// half-edges (equivalently over their orderings).
pub fn enumerate_cm(deg: &[u32]) -> Result<ExactDistribution, OracleError> {
    let total: u32 = deg.iter().sum();
    if total % 2 == 1 {
        return Err(OracleError::OddDegreeSum(total));
    }
    if total > MAX_CM_STUBS {
        return Err(OracleError::Bounds(format!(
            "degree sum {total} exceeds {MAX_CM_STUBS}"
        )));
    }
    let stubs: Vec<Vertex> = deg
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as Vertex, d as usize))
        .collect();
    let mut counts: BTreeMap<GraphKey, u64> = BTreeMap::new();
    let mut matchings = 0u64;
    let mut free: Vec<usize> = (0..stubs.len()).collect();
    let mut edges = Vec::new();
    match_all(&stubs, &mut free, &mut edges, &mut |e| {
        *counts.entry(canonical(e)).or_insert(0) += 1;
        matchings += 1;
    });
    let mut dist = ExactDistribution::default();
    for (g, c) in counts {
        dist.add(g, rational(c as i64, matchings as i64));
    }
    Ok(dist)
}

fn match_all(
    stubs: &[Vertex],
    free: &mut Vec<usize>,
    edges: &mut Vec<(Vertex, Vertex)>,
    visit: &mut dyn FnMut(&[(Vertex, Vertex)]),
) {
    if free.is_empty() {
        visit(edges);
        return;
    }
    let first = free.remove(0);
    for j in 0..free.len() {
        let partner = free.remove(j);
        edges.push((stubs[first], stubs[partner]));
        match_all(stubs, free, edges, visit);
        edges.pop();
        free.insert(j, partner);
    }
    free.insert(0, first);
}

/// Outcome of an exact oracle comparison.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl OracleReport {
    fn new(name: impl Into<String>) -> Self {
        OracleReport {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checks > 0
    }

    fn expect_eq(&mut self, what: impl FnOnce() -> String, a: &Rational, b: &Rational) {
        self.checks += 1;
        if a != b {
            self.failures.push(format!("{}: {a} != {b}", what()));
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{}: {} checks, {}", self.name, self.checks, status)?;
        for fail in &self.failures {
            write!(f, "\n  {fail}")?;
        }
        Ok(())
    }
}

/// For every degree sequence reachable by the `alpha` multigraph process,
/// compares the conditional law of the graph with the configuration model.
pub fn verify_conditional_equivalence(n: usize, m: usize, alpha: &Rational) -> Result<OracleReport, OracleError> {
    let dist = enumerate_process(n, m, alpha, Mode::Multigraph)?;
    let mut report = OracleReport::new(format!("conditional equivalence n={n} m={m} alpha={alpha}"));
    for d in dist.degree_law(n).keys() {
        let conditional = dist.conditional_on(n, d);
        let cm = enumerate_cm(d)?;
        let keys: std::collections::BTreeSet<_> = conditional.probs.keys().chain(cm.probs.keys()).collect();
        for g in keys {
            report.expect_eq(|| format!("d={d:?} G={g:?}"), &conditional.get(g), &cm.get(g));
        }
    }
    Ok(report)
}

/// Exact rewiring kernel on `m`-edge multigraphs of `[n]`: each edge slot
/// and endpoint is chosen with probability `1 / (2m)`, the new endpoint with
/// weight `d'_w + alpha` under `convention`.
pub fn rewiring_kernel(
    g: &GraphKey,
    n: usize,
    alpha: &Rational,
    convention: RewireConvention,
) -> BTreeMap<GraphKey, Rational> {
    let m = g.len();
    let mut out = BTreeMap::new();
    let pick = rational(1, 2 * m as i64);
    for (e, &(a, b)) in g.iter().enumerate() {
        for (kept, dropped) in [(a, b), (b, a)] {
            let mut d = degrees_of(n, g);
            match convention {
                RewireConvention::Detached => d[dropped as usize] -= 1,
                RewireConvention::Removed => {
                    d[dropped as usize] -= 1;
                    d[kept as usize] -= 1;
                }
                RewireConvention::Kept => {}
            }
            let weights: Vec<Rational> = d.iter().map(|&k| int(k as u64) + alpha).collect();
            let z = weights.iter().fold(Rational::zero(), |acc, x| acc + x);
            for (w, weight) in weights.iter().enumerate() {
                let mut h = g.clone();
                h[e] = (kept, w as Vertex);
                *out.entry(canonical(&h)).or_insert_with(Rational::zero) += &pick * weight / z.clone();
            }
        }
    }
    out
}

/// Checks `pi P = pi` for the rewiring kernel, with `pi` the exact law of
/// the `m`-edge multigraph process.
pub fn verify_rewiring_stationarity(
    n: usize,
    m: usize,
    alpha: &Rational,
    convention: RewireConvention,
) -> Result<OracleReport, OracleError> {
    if m == 0 {
        return Err(OracleError::Bounds("rewiring needs m >= 1".into()));
    }
    let pi = enumerate_process(n, m, alpha, Mode::Multigraph)?;
    let mut image = ExactDistribution::default();
    for (g, p) in &pi.probs {
        for (h, q) in rewiring_kernel(g, n, alpha, convention) {
            image.add(h, p * q);
        }
    }
    let mut report = OracleReport::new(format!(
        "rewiring stationarity ({convention:?}) n={n} m={m} alpha={alpha}"
    ));
    let keys: std::collections::BTreeSet<_> = pi.probs.keys().chain(image.probs.keys()).collect();
    for g in keys {
        report.expect_eq(|| format!("G={g:?}"), &image.get(g), &pi.get(g));
    }
    Ok(report)
}
