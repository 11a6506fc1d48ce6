use rand::Rng;

use crate::graph::{MultiGraph, Vertex};

/// Pólya urn over `[n]` with `alpha` initial balls per colour. The next draw
/// is `v` with probability `(#v among draws + alpha) / (i + alpha n)`.
#[derive(Debug, Clone)]
pub struct UrnState {
    n: usize,
    alpha: f64,
    draws: Vec<Vertex>,
}

impl UrnState {
    pub fn new(n: usize, alpha: f64) -> Self {
        assert!(n > 0, "urn needs at least one colour");
        assert!(alpha > 0.0 && alpha.is_finite(), "urn needs a finite alpha > 0");
        UrnState {
            n,
            alpha,
            draws: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn draws(&self) -> &[Vertex] {
        &self.draws
    }

    /// Samples from the current urn without recording the draw. O(1).
    pub fn peek<R: Rng + ?Sized>(&self, rng: &mut R) -> Vertex {
        let fresh = self.alpha * self.n as f64;
        let total = self.draws.len() as f64 + fresh;
        let u = rng.random::<f64>() * total;
        if u < fresh {
            ((u / self.alpha) as usize).min(self.n - 1) as Vertex
        } else {
            self.draws[rng.random_range(0..self.draws.len())]
        }
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vertex {
        let v = self.peek(rng);
        self.draws.push(v);
        v
    }

    pub(crate) fn commit(&mut self, v: Vertex) {
        self.draws.push(v);
    }

    /// Two consecutive draws paired into an edge (a loop when equal).
    pub fn step_multigraph<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Vertex, Vertex) {
        let v = self.draw(rng);
        let w = self.draw(rng);
        (v, w)
    }

    /// Next edge of the simple process: an unordered non-adjacent pair with
    /// probability proportional to `(d_v + alpha)(d_w + alpha)`. Draws are
    /// taken from the current urn without committing; only the accepted
    /// pair is recorded. Returns `None` after `max_tries` rejections.
    pub fn step_simple<R: Rng + ?Sized>(
        &mut self,
        graph: &MultiGraph,
        max_tries: u64,
        rng: &mut R,
    ) -> Option<(Vertex, Vertex)> {
        for _ in 0..max_tries {
            let v = self.peek(rng);
            let w = self.peek(rng);
            if v != w && !graph.contains_edge(v, w) {
                self.commit(v);
                self.commit(w);
                return Some((v, w));
            }
        }
        None
    }
}
