//! Multigraph storage on a fixed vertex set and incremental component tracking.

use std::collections::HashMap;

use thiserror::Error;

/// Vertex label in `0..n`.
pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("loop at vertex {0} rejected in simple mode")]
    RejectedLoop(Vertex),
    #[error("duplicate edge {{{0}, {1}}} rejected in simple mode")]
    RejectedDuplicate(Vertex, Vertex),
    #[error("edge index {index} out of range for {edges} edges")]
    EdgeOutOfRange { index: usize, edges: usize },
}

#[inline]
pub(crate) fn normalize(v: Vertex, w: Vertex) -> (Vertex, Vertex) {
    if v <= w {
        (v, w)
    } else {
        (w, v)
    }
}

/// An edge multiset over `[n]`, loops allowed, with degrees where a loop
/// counts twice at its endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    deg: Vec<u32>,
    multiplicity: HashMap<(Vertex, Vertex), u32>,
    loops: u64,
    surplus: u64,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph {
            n,
            edges: Vec::new(),
            deg: vec![0; n],
            multiplicity: HashMap::new(),
            loops: 0,
            surplus: 0,
        }
    }

    /// Builds a multigraph from an edge list, accepting loops and repeats.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = MultiGraph::new(n);
        g.edges.reserve(edges.len());
        for &(v, w) in edges {
            g.add_edge(v, w, true)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[u32] {
        &self.deg
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.deg[v as usize]
    }

    /// Number of loop edges.
    pub fn loop_count(&self) -> u64 {
        self.loops
    }

    /// Number of edges repeating an already present vertex pair, i.e.
    /// `sum over pairs of (multiplicity - 1)`, loops included.
    pub fn multi_edge_count(&self) -> u64 {
        self.surplus
    }

    pub fn multiplicity(&self, v: Vertex, w: Vertex) -> u32 {
        self.multiplicity
            .get(&normalize(v, w))
            .copied()
            .unwrap_or(0)
    }

    pub fn contains_edge(&self, v: Vertex, w: Vertex) -> bool {
        self.multiplicity(v, w) > 0
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Appends the edge `{v, w}`. With `allow_multi == false` loops and
    /// repeated pairs are rejected and the graph is left untouched.
    pub fn add_edge(&mut self, v: Vertex, w: Vertex, allow_multi: bool) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        if !allow_multi {
            if v == w {
                return Err(GraphError::RejectedLoop(v));
            }
            if self.contains_edge(v, w) {
                let (a, b) = normalize(v, w);
                return Err(GraphError::RejectedDuplicate(a, b));
            }
        }
        self.edges.push((v, w));
        self.attach(v, w);
        Ok(())
    }

    fn attach(&mut self, v: Vertex, w: Vertex) {
        self.deg[v as usize] += 1;
        self.deg[w as usize] += 1;
        if v == w {
            self.loops += 1;
        }
        let mult = self.multiplicity.entry(normalize(v, w)).or_insert(0);
        if *mult > 0 {
            self.surplus += 1;
        }
        *mult += 1;
    }

    fn detach(&mut self, v: Vertex, w: Vertex) {
        self.deg[v as usize] -= 1;
        self.deg[w as usize] -= 1;
        if v == w {
            self.loops -= 1;
        }
        let key = normalize(v, w);
        let mult = self
            .multiplicity
            .get_mut(&key)
            .expect("detached edge must be present");
        *mult -= 1;
        if *mult == 0 {
            self.multiplicity.remove(&key);
        } else {
            self.surplus -= 1;
        }
    }

    /// Replaces the edge at `index` by `{v, w}` keeping its slot in the edge list.
    pub fn replace_edge(&mut self, index: usize, v: Vertex, w: Vertex) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        let (a, b) = *self.edges.get(index).ok_or(GraphError::EdgeOutOfRange {
            index,
            edges: self.edges.len(),
        })?;
        self.detach(a, b);
        self.edges[index] = (v, w);
        self.attach(v, w);
        Ok(())
    }

    /// Canonical form of the edge multiset: sorted list of sorted pairs.
    pub fn canonical_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e: Vec<_> = self.edges.iter().map(|&(v, w)| normalize(v, w)).collect();
        e.sort_unstable();
        e
    }
}

/// Outcome of a [`ComponentTracker::union`] call. `s1`, `s2` are the sizes
/// of the two components before the call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeInfo {
    pub merged: bool,
    pub s1: u64,
    pub s2: u64,
}

/// Checkpoint summary of the component structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub l1: u64,
    pub l2: u64,
    /// `sum_sq / n`, the susceptibility.
    pub susceptibility: f64,
    pub sum_sq: u128,
    /// `(size, count)` pairs in increasing size order.
    pub census: Vec<(u64, u64)>,
}

/// Union-find over `[n]` with union by size, path halving and a running
/// `sum over components of |C|^2`.
#[derive(Debug, Clone)]
pub struct ComponentTracker {
    parent: Vec<u32>,
    size: Vec<u32>,
    sum_sq: u128,
    components: usize,
}

impl ComponentTracker {
    pub fn new(n: usize) -> Self {
        ComponentTracker {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            sum_sq: n as u128,
            components: n,
        }
    }

    pub fn from_graph(g: &MultiGraph) -> Self {
        let mut t = ComponentTracker::new(g.n());
        for &(v, w) in g.edges() {
            t.union(v, w);
        }
        t
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn sum_sq(&self) -> u128 {
        self.sum_sq
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn find(&mut self, v: Vertex) -> Vertex {
        let mut x = v;
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn component_size(&mut self, v: Vertex) -> u64 {
        let r = self.find(v);
        self.size[r as usize] as u64
    }

    pub fn union(&mut self, v: Vertex, w: Vertex) -> MergeInfo {
        let mut a = self.find(v);
        let mut b = self.find(w);
        let s1 = self.size[a as usize] as u64;
        let s2 = self.size[b as usize] as u64;
        if a == b {
            return MergeInfo { merged: false, s1, s2 };
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        self.sum_sq += 2 * s1 as u128 * s2 as u128;
        self.components -= 1;
        MergeInfo { merged: true, s1, s2 }
    }

    /// Sizes of all current components, unordered.
    pub fn component_sizes(&self) -> Vec<u64> {
        self.parent
            .iter()
            .enumerate()
            .filter(|&(i, &p)| i as u32 == p)
            .map(|(i, _)| self.size[i] as u64)
            .collect()
    }

    /// O(n) scan over the roots.
    pub fn stats(&self) -> ComponentStats {
        let mut l1 = 0u64;
        let mut l2 = 0u64;
        let mut census: HashMap<u64, u64> = HashMap::new();
        for s in self.component_sizes() {
            if s > l1 {
                l2 = l1;
                l1 = s;
            } else if s > l2 {
                l2 = s;
            }
            *census.entry(s).or_insert(0) += 1;
        }
        let mut census: Vec<_> = census.into_iter().collect();
        census.sort_unstable();
        let n = self.n();
        ComponentStats {
            l1,
            l2,
            susceptibility: if n == 0 { 0.0 } else { self.sum_sq as f64 / n as f64 },
            sum_sq: self.sum_sq,
            census,
        }
    }
}
