use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{MultiGraph, Vertex};

/// Attachment weight `f(k)` as a table for small degrees plus a rule for
/// degrees past the end of the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FTable {
    pub values: Vec<f64>,
    #[serde(default)]
    pub tail: Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    #[default]
    Zero,
    Constant { value: f64 },
    /// `f(k) = k + offset`
    Linear { offset: f64 },
}

impl FTable {
    pub fn constant(c: f64) -> Self {
        FTable {
            values: vec![c],
            tail: Tail::Constant { value: c },
        }
    }

    pub fn linear(alpha: f64) -> Self {
        FTable {
            values: vec![alpha],
            tail: Tail::Linear { offset: alpha },
        }
    }

    /// `f(k) = max(r - k, 0)`
    pub fn capped(r: u32) -> Self {
        FTable {
            values: (0..=r).map(|k| (r - k) as f64).collect(),
            tail: Tail::Zero,
        }
    }

    /// `f(k) = 1{k < d}`
    pub fn d_process(d: u32) -> Self {
        FTable {
            values: vec![1.0; d as usize],
            tail: Tail::Zero,
        }
    }

    pub fn eval(&self, k: u32) -> f64 {
        match self.values.get(k as usize) {
            Some(&v) => v,
            None => match self.tail {
                Tail::Zero => 0.0,
                Tail::Constant { value } => value,
                Tail::Linear { offset } => k as f64 + offset,
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let tail_ok = match self.tail {
            Tail::Zero => true,
            Tail::Constant { value } => value.is_finite() && value >= 0.0,
            Tail::Linear { offset } => offset.is_finite() && offset >= 0.0,
        };
        if !tail_ok {
            return Err("f tail must be finite and nonnegative".into());
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err("f values must be finite and nonnegative".into());
        }
        Ok(())
    }
}

/// Fenwick tree over nonnegative weights with sampling by prefix descent.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
    leaf: Vec<f64>,
    updates: usize,
}

impl Fenwick {
    pub(crate) fn new(weights: Vec<f64>) -> Self {
        let mut f = Fenwick {
            tree: vec![0.0; weights.len() + 1],
            leaf: weights,
            updates: 0,
        };
        f.rebuild();
        f
    }

    fn rebuild(&mut self) {
        let n = self.leaf.len();
        self.tree.iter_mut().for_each(|x| *x = 0.0);
        for i in 1..=n {
            self.tree[i] += self.leaf[i - 1];
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                self.tree[j] += self.tree[i];
            }
        }
        self.updates = 0;
    }

    pub(crate) fn get(&self, i: usize) -> f64 {
        self.leaf[i]
    }

    pub(crate) fn set(&mut self, i: usize, value: f64) {
        let delta = value - self.leaf[i];
        self.leaf[i] = value;
        if delta == 0.0 {
            return;
        }
        self.updates += 1;
        // periodic rebuild bounds accumulated rounding drift
        if self.updates > 4 * self.leaf.len() + 64 {
            self.rebuild();
            return;
        }
        let n = self.leaf.len();
        let mut k = i + 1;
        while k <= n {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    pub(crate) fn total(&self) -> f64 {
        let mut k = self.leaf.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s.max(0.0)
    }

    /// Index `i` with probability `leaf[i] / total`; `None` if the descent
    /// lands on a zero weight through rounding.
    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let n = self.leaf.len();
        let mut u = rng.random::<f64>() * self.total();
        let mut pos = 0usize;
        let mut step = n.checked_next_power_of_two()?;
        if step > n {
            step >>= 1;
        }
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                u -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        (pos < n && self.leaf[pos] > 0.0).then_some(pos)
    }
}

/// Sampler for the general-f process: vertex weights `f(d_v)` and loop
/// weights `f(d_v) f(d_v + 1)`.
#[derive(Debug, Clone)]
pub struct GeneralSampler {
    f: FTable,
    weight: Fenwick,
    square: Fenwick,
    loop_weight: Fenwick,
    positive: usize,
}

impl GeneralSampler {
    pub fn new(n: usize, f: FTable) -> Self {
        let f0 = f.eval(0);
        let f1 = f.eval(1);
        GeneralSampler {
            weight: Fenwick::new(vec![f0; n]),
            square: Fenwick::new(vec![f0 * f0; n]),
            loop_weight: Fenwick::new(vec![f0 * f1; n]),
            positive: if f0 > 0.0 { n } else { 0 },
            f,
        }
    }

    pub fn f(&self) -> &FTable {
        &self.f
    }

    /// Refreshes the weights of `v` after its degree changed to `d`.
    pub fn update(&mut self, v: Vertex, d: u32) {
        let i = v as usize;
        let old = self.weight.get(i);
        let w = self.f.eval(d);
        match (old > 0.0, w > 0.0) {
            (true, false) => self.positive -= 1,
            (false, true) => self.positive += 1,
            _ => {}
        }
        self.weight.set(i, w);
        self.square.set(i, w * w);
        self.loop_weight.set(i, w * self.f.eval(d + 1));
    }

    fn draw_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(Vertex, Vertex)> {
        let v = self.weight.sample(rng)?;
        let w = self.weight.sample(rng)?;
        Some((v as Vertex, w as Vertex))
    }

    /// Multigraph step: distinct `{v, w}` with weight `2 f(d_v) f(d_w)`, loop
    /// at `v` with weight `f(d_v) f(d_v + 1)`.
    pub fn step_multigraph<R: Rng + ?Sized>(
        &mut self,
        max_tries: u64,
        rng: &mut R,
    ) -> Option<(Vertex, Vertex)> {
        let total = self.weight.total();
        let distinct = if self.positive >= 2 {
            (total * total - self.square.total()).max(0.0)
        } else {
            0.0
        };
        let loops = self.loop_weight.total();
        if distinct + loops <= 0.0 {
            return None;
        }
        if rng.random::<f64>() * (distinct + loops) < distinct {
            for _ in 0..max_tries {
                if let Some((v, w)) = self.draw_pair(rng) {
                    if v != w {
                        return Some((v, w));
                    }
                }
            }
        } else {
            for _ in 0..max_tries {
                if let Some(v) = self.loop_weight.sample(rng) {
                    return Some((v as Vertex, v as Vertex));
                }
            }
        }
        None
    }

    /// Simple step: non-adjacent distinct pair with weight `f(d_v) f(d_w)`.
    pub fn step_simple<R: Rng + ?Sized>(
        &mut self,
        graph: &MultiGraph,
        max_tries: u64,
        rng: &mut R,
    ) -> Option<(Vertex, Vertex)> {
        if self.positive < 2 {
            return None;
        }
        for _ in 0..max_tries {
            if let Some((v, w)) = self.draw_pair(rng) {
                if v != w && !graph.contains_edge(v, w) {
                    return Some((v, w));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_tails() {
        let f = FTable::linear(0.5);
        assert_eq!(f.eval(0), 0.5);
        assert_eq!(f.eval(7), 7.5);
        let g = FTable::capped(3);
        assert_eq!((0..6).map(|k| g.eval(k)).collect::<Vec<_>>(), [3.0, 2.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(FTable::d_process(2).eval(2), 0.0);
        assert_eq!(FTable::constant(1.0).eval(100), 1.0);
    }

    #[test]
    fn fenwick_sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut fw = Fenwick::new(vec![1.0, 0.0, 3.0, 2.0, 0.0]);
        fw.set(4, 4.0);
        assert!((fw.total() - 10.0).abs() < 1e-12);
        let trials = 200_000;
        let mut counts = [0u32; 5];
        for _ in 0..trials {
            counts[fw.sample(&mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[1], 0);
        for (c, w) in counts.iter().zip([1.0, 0.0, 3.0, 2.0, 4.0]) {
            assert!((*c as f64 / trials as f64 - w / 10.0).abs() < 0.005);
        }
    }

    #[test]
    fn fenwick_drift_stays_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut fw = Fenwick::new(vec![0.1; 50]);
        for _ in 0..100_000 {
            let i = rng.random_range(0..50);
            fw.set(i, rng.random::<f64>() * 1e3);
        }
        let exact: f64 = (0..50).map(|i| fw.get(i)).sum();
        assert!((fw.total() - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn er_first_edge_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = MultiGraph::new(3);
        let mut counts = [0u32; 3];
        let trials = 150_000;
        for _ in 0..trials {
            let mut s = GeneralSampler::new(3, FTable::constant(1.0));
            let (v, w) = s.step_simple(&g, 1000, &mut rng).unwrap();
            counts[(v + w - 1) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.005);
        }
    }

    #[test]
    fn capped_never_exceeds_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 100;
        let mut s = GeneralSampler::new(n, FTable::capped(3));
        let mut g = MultiGraph::new(n);
        while let Some((v, w)) = s.step_multigraph(1_000_000, &mut rng) {
            g.add_edge(v, w, true).unwrap();
            s.update(v, g.degree(v));
            s.update(w, g.degree(w));
        }
        assert!(g.degrees().iter().all(|&d| d <= 3));
        assert!(g.edge_count() >= 148);
    }
}
