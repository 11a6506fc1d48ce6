//! Random graph processes: the preferential attachment process in simple and
//! multigraph form, its negative-alpha and general-f variants, the rewiring
//! chain, and the configuration model.

mod general;
mod rewire;
mod sampling;
mod stubs;
mod urn;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ComponentTracker, GraphError, MultiGraph, Vertex};

pub use general::{FTable, GeneralSampler, Tail};
pub use rewire::{rewiring_step, rewiring_step_with, RewireConvention};
pub use sampling::{
    sample_birth_degrees, sample_conditioned_degrees, sample_configuration_model, NegBinomialSampler,
};
pub use stubs::StubPool;
pub use urn::UrnState;

/// Rejection attempts allowed per step before the process is declared exhausted.
pub const MAX_TRIES: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error("process exhausted after {m_reached} edges")]
    Exhausted {
        m_reached: u64,
        partial: Box<Trajectory>,
    },
    #[error("no addable edge left")]
    NoAddableEdge,
    #[error("invalid process configuration: {0}")]
    InvalidConfig(String),
    #[error("degree sum {0} is odd")]
    OddDegreeSum(u64),
    #[error("rejection sampler gave up after {attempts} attempts")]
    SamplingFailure { attempts: u64 },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRule {
    LinearAlpha { alpha: f64 },
    NegativeInteger { r: u32 },
    GeneralF { f: FTable },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Simple,
    Multigraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub n: usize,
    pub weight_rule: WeightRule,
    #[serde(default)]
    pub mode: Mode,
    pub m_max: u64,
    /// Sorted edge counts at which statistics are recorded.
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub seed: u64,
}

impl ProcessConfig {
    pub fn validate(&self) -> Result<(), ProcessError> {
        let bad = |s: String| Err(ProcessError::InvalidConfig(s));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.n > u32::MAX as usize {
            return bad(format!("n = {} exceeds the vertex label range", self.n));
        }
        match &self.weight_rule {
            WeightRule::LinearAlpha { alpha } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return bad(format!("alpha must be finite and positive, got {alpha}"));
                }
            }
            WeightRule::NegativeInteger { r } => {
                if *r < 3 {
                    return bad(format!("r must be at least 3, got {r}"));
                }
                let stop = *r as u64 * self.n as u64 / 2;
                if self.m_max > stop {
                    return bad(format!("m_max = {} exceeds r n / 2 = {stop}", self.m_max));
                }
            }
            WeightRule::GeneralF { f } => f.validate().map_err(ProcessError::InvalidConfig)?,
        }
        if self.mode == Mode::Simple {
            let n = self.n as u64;
            if self.m_max > n * (n - 1) / 2 {
                return bad(format!("m_max = {} exceeds n (n - 1) / 2 in simple mode", self.m_max));
            }
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("checkpoints must be strictly increasing".into());
        }
        if self.checkpoints.last().is_some_and(|&c| c > self.m_max) {
            return bad("checkpoints must not exceed m_max".into());
        }
        Ok(())
    }
}

/// Statistics recorded at one edge count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub m: u64,
    pub l1: u64,
    pub l2: u64,
    pub susceptibility: f64,
    /// `degree_histogram[k]` = number of vertices of degree `k`.
    pub degree_histogram: Vec<u64>,
    pub loops: u64,
    pub multi_edges: u64,
}

impl Checkpoint {
    pub fn capture(graph: &MultiGraph, tracker: &ComponentTracker) -> Self {
        let stats = tracker.stats();
        Checkpoint {
            m: graph.edge_count() as u64,
            l1: stats.l1,
            l2: stats.l2,
            susceptibility: stats.susceptibility,
            degree_histogram: degree_histogram(graph.degrees()),
            loops: graph.loop_count(),
            multi_edges: graph.multi_edge_count(),
        }
    }
}

pub fn degree_histogram(degrees: &[u32]) -> Vec<u64> {
    let max = degrees.iter().copied().max().unwrap_or(0) as usize;
    let mut h = vec![0u64; max + 1];
    for &d in degrees {
        h[d as usize] += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: usize,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone)]
enum Engine {
    Urn(UrnState),
    Stubs(StubPool),
    General(GeneralSampler),
}

/// A running process: the graph built so far, its components and the
/// sampler state.
#[derive(Debug, Clone)]
pub struct Process {
    mode: Mode,
    graph: MultiGraph,
    tracker: ComponentTracker,
    engine: Engine,
    max_tries: u64,
}

impl Process {
    pub fn new(n: usize, rule: &WeightRule, mode: Mode) -> Self {
        let engine = match rule {
            WeightRule::LinearAlpha { alpha } => Engine::Urn(UrnState::new(n, *alpha)),
            WeightRule::NegativeInteger { r } => Engine::Stubs(StubPool::new(n, *r)),
            WeightRule::GeneralF { f } => Engine::General(GeneralSampler::new(n, f.clone())),
        };
        Process {
            mode,
            graph: MultiGraph::new(n),
            tracker: ComponentTracker::new(n),
            engine,
            max_tries: MAX_TRIES,
        }
    }

    pub fn with_max_tries(mut self, max_tries: u64) -> Self {
        self.max_tries = max_tries;
        self
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn tracker(&self) -> &ComponentTracker {
        &self.tracker
    }

    pub fn into_graph(self) -> MultiGraph {
        self.graph
    }

    /// Adds one edge. `Err(NoAddableEdge)` leaves the process unchanged.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(Vertex, Vertex), ProcessError> {
        let simple = self.mode == Mode::Simple;
        let edge = match &mut self.engine {
            Engine::Urn(urn) => {
                if simple {
                    let n = self.graph.n() as u64;
                    if self.graph.edge_count() as u64 >= n * (n - 1) / 2 {
                        return Err(ProcessError::NoAddableEdge);
                    }
                    urn.step_simple(&self.graph, self.max_tries, rng)
                } else {
                    Some(urn.step_multigraph(rng))
                }
            }
            Engine::Stubs(pool) => {
                if simple {
                    pool.step_simple(&self.graph, self.max_tries, rng)
                } else {
                    pool.step_multigraph(rng)
                }
            }
            Engine::General(s) => {
                if simple {
                    s.step_simple(&self.graph, self.max_tries, rng)
                } else {
                    s.step_multigraph(self.max_tries, rng)
                }
            }
        };
        let (v, w) = edge.ok_or(ProcessError::NoAddableEdge)?;
        self.graph.add_edge(v, w, !simple)?;
        self.tracker.union(v, w);
        if let Engine::General(s) = &mut self.engine {
            s.update(v, self.graph.degree(v));
            if w != v {
                s.update(w, self.graph.degree(w));
            }
        }
        Ok((v, w))
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint::capture(&self.graph, &self.tracker)
    }
}

/// Runs the configured process to `m_max` edges, recording a [`Checkpoint`]
/// at every scheduled edge count.
pub fn run_process<R: Rng + ?Sized>(cfg: &ProcessConfig, rng: &mut R) -> Result<Trajectory, ProcessError> {
    cfg.validate()?;
    let mut process = Process::new(cfg.n, &cfg.weight_rule, cfg.mode);
    let mut trajectory = Trajectory {
        n: cfg.n,
        checkpoints: Vec::with_capacity(cfg.checkpoints.len()),
    };
    let mut next = cfg.checkpoints.iter().copied().peekable();
    if next.next_if_eq(&0).is_some() {
        trajectory.checkpoints.push(process.checkpoint());
    }
    for m in 1..=cfg.m_max {
        match process.step(rng) {
            Ok(_) => {}
            Err(ProcessError::NoAddableEdge) => {
                return Err(ProcessError::Exhausted {
                    m_reached: m - 1,
                    partial: Box::new(trajectory),
                })
            }
            Err(e) => return Err(e),
        }
        if next.next_if_eq(&m).is_some() {
            trajectory.checkpoints.push(process.checkpoint());
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(n: usize, rule: WeightRule, mode: Mode, m_max: u64, checkpoints: Vec<u64>) -> ProcessConfig {
        ProcessConfig {
            n,
            weight_rule: rule,
            mode,
            m_max,
            checkpoints,
            seed: 0,
        }
    }

    #[test]
    fn empty_run() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let c = cfg(10, WeightRule::LinearAlpha { alpha: 1.0 }, Mode::Simple, 0, vec![0]);
        let t = run_process(&c, &mut rng).unwrap();
        assert_eq!(t.checkpoints.len(), 1);
        assert_eq!(t.checkpoints[0].l1, 1);
        assert_eq!(t.checkpoints[0].susceptibility, 1.0);
        assert_eq!(t.checkpoints[0].degree_histogram, vec![10]);
    }

    #[test]
    fn simple_two_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut p = Process::new(2, &WeightRule::LinearAlpha { alpha: 1.0 }, Mode::Simple);
        let (v, w) = p.step(&mut rng).unwrap();
        assert_eq!((v.min(w), v.max(w)), (0, 1));
        assert!(matches!(p.step(&mut rng), Err(ProcessError::NoAddableEdge)));
    }

    #[test]
    fn simple_mode_stays_simple() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for rule in [
            WeightRule::LinearAlpha { alpha: 0.3 },
            WeightRule::NegativeInteger { r: 4 },
            WeightRule::GeneralF { f: FTable::linear(1.0) },
        ] {
            let c = cfg(300, rule, Mode::Simple, 500, vec![100, 250, 500]);
            let t = run_process(&c, &mut rng).unwrap();
            for cp in &t.checkpoints {
                assert_eq!(cp.loops, 0);
                assert_eq!(cp.multi_edges, 0);
                let degsum: u64 = cp.degree_histogram.iter().enumerate().map(|(k, c)| k as u64 * c).sum();
                assert_eq!(degsum, 2 * cp.m);
            }
            assert!(t.checkpoints.windows(2).all(|w| w[0].l1 <= w[1].l1));
        }
    }

    #[test]
    fn exhaustion_reports_progress() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let c = cfg(4, WeightRule::GeneralF { f: FTable::d_process(1) }, Mode::Simple, 6, vec![1, 6]);
        match run_process(&c, &mut rng) {
            Err(ProcessError::Exhausted { m_reached, partial }) => {
                assert_eq!(m_reached, 2);
                assert_eq!(partial.checkpoints.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(2000, WeightRule::LinearAlpha { alpha: 1.0 }, Mode::Multigraph, 1500, vec![500, 1000, 1500]);
        let a = run_process(&c, &mut ChaCha8Rng::seed_from_u64(45)).unwrap();
        let b = run_process(&c, &mut ChaCha8Rng::seed_from_u64(45)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let ok = cfg(10, WeightRule::NegativeInteger { r: 3 }, Mode::Multigraph, 15, vec![0, 15]);
        assert!(ok.validate().is_ok());
        let too_far = ProcessConfig { m_max: 16, ..ok.clone() };
        assert!(too_far.validate().is_err());
        let r2 = ProcessConfig { weight_rule: WeightRule::NegativeInteger { r: 2 }, ..ok.clone() };
        assert!(r2.validate().is_err());
        let unsorted = ProcessConfig { checkpoints: vec![5, 3], ..ok.clone() };
        assert!(unsorted.validate().is_err());
        let past = ProcessConfig { checkpoints: vec![20], ..ok };
        assert!(past.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let c = cfg(
            50,
            WeightRule::GeneralF { f: FTable { values: vec![1.0, 0.5], tail: Tail::Linear { offset: 2.0 } } },
            Mode::Multigraph,
            20,
            vec![10, 20],
        );
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ProcessConfig>(&s).unwrap(), c);
    }
}
