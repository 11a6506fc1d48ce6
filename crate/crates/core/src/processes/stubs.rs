use std::collections::HashMap;

use rand::Rng;

use crate::graph::{MultiGraph, Vertex};

/// Below this many free half-edges the simple process samples by explicit
/// enumeration, which also detects exhaustion exactly.
const ENUMERATE_BELOW: usize = 64;

/// Free half-edges of the `alpha = -r` process: every vertex starts with `r`
/// and picking a uniform free half-edge selects `v` with probability
/// proportional to `r - d_v`.
#[derive(Debug, Clone)]
pub struct StubPool {
    free: Vec<Vertex>,
}

impl StubPool {
    pub fn new(n: usize, r: u32) -> Self {
        let free = (0..n as Vertex)
            .flat_map(|v| std::iter::repeat_n(v, r as usize))
            .collect();
        StubPool { free }
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Two distinct free half-edges chosen uniformly; `None` when fewer than two remain.
    pub fn step_multigraph<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<(Vertex, Vertex)> {
        if self.free.len() < 2 {
            return None;
        }
        let i = rng.random_range(0..self.free.len());
        let v = self.free.swap_remove(i);
        let j = rng.random_range(0..self.free.len());
        let w = self.free.swap_remove(j);
        Some((v, w))
    }

    /// Non-adjacent distinct pair with probability proportional to
    /// `(r - d_v)(r - d_w)`. `None` means no admissible pair is left (or the
    /// rejection budget ran out).
    pub fn step_simple<R: Rng + ?Sized>(
        &mut self,
        graph: &MultiGraph,
        max_tries: u64,
        rng: &mut R,
    ) -> Option<(Vertex, Vertex)> {
        if self.free.len() < 2 {
            return None;
        }
        if self.free.len() < ENUMERATE_BELOW {
            return self.step_simple_enumerated(graph, rng);
        }
        let len = self.free.len();
        for _ in 0..max_tries {
            let i = rng.random_range(0..len);
            let j = rng.random_range(0..len);
            let (v, w) = (self.free[i], self.free[j]);
            if v != w && !graph.contains_edge(v, w) {
                self.free.swap_remove(i.max(j));
                self.free.swap_remove(i.min(j));
                return Some((v, w));
            }
        }
        None
    }

    fn step_simple_enumerated<R: Rng + ?Sized>(
        &mut self,
        graph: &MultiGraph,
        rng: &mut R,
    ) -> Option<(Vertex, Vertex)> {
        let mut counts: HashMap<Vertex, u64> = HashMap::new();
        for &v in &self.free {
            *counts.entry(v).or_insert(0) += 1;
        }
        let mut vertices: Vec<_> = counts.into_iter().collect();
        vertices.sort_unstable();
        let mut options = Vec::new();
        let mut total = 0u64;
        for (i, &(v, cv)) in vertices.iter().enumerate() {
            for &(w, cw) in &vertices[i + 1..] {
                if !graph.contains_edge(v, w) {
                    total += cv * cw;
                    options.push((total, v, w));
                }
            }
        }
        if total == 0 {
            return None;
        }
        let pick = rng.random_range(0..total);
        let &(_, v, w) = options.iter().find(|(cum, _, _)| pick < *cum)?;
        self.remove_one(v);
        self.remove_one(w);
        Some((v, w))
    }

    fn remove_one(&mut self, v: Vertex) {
        let pos = self
            .free
            .iter()
            .position(|&x| x == v)
            .expect("vertex has a free half-edge");
        self.free.swap_remove(pos);
    }
}
