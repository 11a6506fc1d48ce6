//! Replicated process runs and their output tables.

use std::fs;
use std::path::Path;

use anyhow::Context;
use pagiant::montecarlo::run_replicates;
use pagiant::processes::{run_process, ProcessConfig, ProcessError, Trajectory};
use pagiant::stats::{aggregate, McSummary};
use pagiant::theory::{self, TheoryPrediction};
use serde::Serialize;

use crate::spec::{theory_alpha, ExperimentSpec, SpecError};

#[derive(Debug, Clone, PartialEq)]
pub enum ReplicateOutcome {
    Completed(Trajectory),
    Exhausted { m_reached: u64, partial: Trajectory },
    Failed(String),
}

impl ReplicateOutcome {
    /// Checkpoints that were reached.
    pub fn trajectory(&self) -> Option<&Trajectory> {
        match self {
            ReplicateOutcome::Completed(t) => Some(t),
            ReplicateOutcome::Exhausted { partial, .. } => Some(partial),
            ReplicateOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ProcessConfig,
    pub outcomes: Vec<ReplicateOutcome>,
}

pub fn run_config(cfg: &ProcessConfig, replicates: u64, jobs: Option<usize>) -> ExperimentResult {
    let outcomes = run_replicates(cfg.seed, replicates, jobs, |_, rng| match run_process(cfg, rng) {
        Ok(t) => ReplicateOutcome::Completed(t),
        Err(ProcessError::Exhausted { m_reached, partial }) => ReplicateOutcome::Exhausted {
            m_reached,
            partial: *partial,
        },
        Err(e) => ReplicateOutcome::Failed(e.to_string()),
    });
    ExperimentResult {
        config: cfg.clone(),
        outcomes,
    }
}

pub fn run_experiment(spec: &ExperimentSpec, seed: u64, jobs: Option<usize>) -> Result<ExperimentResult, SpecError> {
    let cfg = spec.process_config(seed)?;
    Ok(run_config(&cfg, spec.replicates, jobs))
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// `replicate,m,L1,L2,S,loops,multi_edges`
pub fn trajectory_csv(result: &ExperimentResult) -> Vec<u8> {
    let rows = result.outcomes.iter().enumerate().flat_map(|(i, o)| {
        o.trajectory()
            .map(|t| t.checkpoints.as_slice())
            .unwrap_or_default()
            .iter()
            .map(move |c| {
                vec![
                    i.to_string(),
                    c.m.to_string(),
                    c.l1.to_string(),
                    c.l2.to_string(),
                    c.susceptibility.to_string(),
                    c.loops.to_string(),
                    c.multi_edges.to_string(),
                ]
            })
    });
    csv_bytes(&["replicate", "m", "L1", "L2", "S", "loops", "multi_edges"], rows)
}

/// `replicate,m,degree,count`, nonzero counts only.
pub fn degree_csv(result: &ExperimentResult) -> Vec<u8> {
    let rows = result.outcomes.iter().enumerate().flat_map(|(i, o)| {
        o.trajectory()
            .map(|t| t.checkpoints.as_slice())
            .unwrap_or_default()
            .iter()
            .flat_map(move |c| {
                c.degree_histogram
                    .iter()
                    .enumerate()
                    .filter(|(_, &count)| count > 0)
                    .map(move |(k, count)| vec![i.to_string(), c.m.to_string(), k.to_string(), count.to_string()])
            })
    });
    csv_bytes(&["replicate", "m", "degree", "count"], rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustedReplicate {
    pub replicate: usize,
    pub m_reached: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailedReplicate {
    pub replicate: usize,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckpointTheory {
    pub m: u64,
    pub eps: f64,
    pub prediction: Option<TheoryPrediction>,
    /// Closed-form susceptibility at `t = m / n`, below the blow-up only.
    pub susceptibility: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub n: usize,
    pub seed: u64,
    pub replicates: usize,
    pub completed: usize,
    pub exhausted: Vec<ExhaustedReplicate>,
    pub failed: Vec<FailedReplicate>,
    pub checkpoints: Vec<u64>,
    /// Across completed replicates; absent with fewer than two.
    pub statistics: Option<McSummary>,
    pub theory: Option<Vec<CheckpointTheory>>,
}

pub fn summarize(spec: &ExperimentSpec, result: &ExperimentResult) -> Summary {
    let completed: Vec<Trajectory> = result
        .outcomes
        .iter()
        .filter_map(|o| match o {
            ReplicateOutcome::Completed(t) => Some(t.clone()),
            _ => None,
        })
        .collect();
    let mut exhausted = Vec::new();
    let mut failed = Vec::new();
    for (i, o) in result.outcomes.iter().enumerate() {
        match o {
            ReplicateOutcome::Exhausted { m_reached, .. } => exhausted.push(ExhaustedReplicate {
                replicate: i,
                m_reached: *m_reached,
            }),
            ReplicateOutcome::Failed(e) => failed.push(FailedReplicate {
                replicate: i,
                error: e.clone(),
            }),
            ReplicateOutcome::Completed(_) => {}
        }
    }
    let theory = spec.comparison.as_ref().and_then(|cmp| {
        let alpha = theory_alpha(&spec.weight_rule)?;
        let n = result.config.n as f64;
        let m_c = theory::m_crit(alpha, n).ok()?;
        Some(
            result
                .config
                .checkpoints
                .iter()
                .map(|&m| {
                    let eps = m as f64 / m_c - 1.0;
                    let t = m as f64 / n;
                    let below_blowup = theory::susceptibility_blowup(alpha).is_ok_and(|t_c| t < t_c);
                    CheckpointTheory {
                        m,
                        eps,
                        prediction: theory::predict(alpha, eps, Some(n), &cmp.ks).ok(),
                        susceptibility: below_blowup
                            .then(|| theory::susceptibility_closed(alpha, t).ok())
                            .flatten(),
                    }
                })
                .collect(),
        )
    });
    Summary {
        n: result.config.n,
        seed: result.config.seed,
        replicates: result.outcomes.len(),
        completed: completed.len(),
        exhausted,
        failed,
        checkpoints: result.config.checkpoints.clone(),
        statistics: aggregate(&completed, &spec.pi_ks).ok(),
        theory,
    }
}

pub fn summary_json(summary: &Summary) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(summary).expect("summary serialises");
    bytes.push(b'\n');
    bytes
}

/// Runs the experiment and writes the three output files into `out`.
pub fn simulate(spec: &ExperimentSpec, seed: u64, jobs: Option<usize>, out: &Path) -> anyhow::Result<Summary> {
    let result = run_experiment(spec, seed, jobs)?;
    let summary = summarize(spec, &result);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let files = [
        (&spec.outputs.trajectory_csv, trajectory_csv(&result)),
        (&spec.outputs.degree_csv, degree_csv(&result)),
        (&spec.outputs.summary_json, summary_json(&summary)),
    ];
    for (name, bytes) in files {
        let path = out.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_json;

    fn spec(json: &str) -> ExperimentSpec {
        parse_json(json).unwrap()
    }

    #[test]
    fn empty_process_rows() {
        let s = spec(
            r#"{"n": 5, "weight_rule": {"kind": "linear_alpha", "alpha": 1.0},
                "checkpoints": [0], "replicates": 1}"#,
        );
        let r = run_experiment(&s, 0, Some(1)).unwrap();
        let text = String::from_utf8(trajectory_csv(&r)).unwrap();
        assert_eq!(text, "replicate,m,L1,L2,S,loops,multi_edges\n0,0,1,1,1,0,0\n");
        let text = String::from_utf8(degree_csv(&r)).unwrap();
        assert_eq!(text, "replicate,m,degree,count\n0,0,0,5\n");
        let summary = summarize(&s, &r);
        assert!(summary.statistics.is_none());
    }

    #[test]
    fn exhaustion_is_recorded_and_run_continues() {
        let s = spec(
            r#"{"n": 4, "weight_rule": {"kind": "general_f", "f": {"values": [1.0]}},
                "checkpoints": [1, 3], "replicates": 3}"#,
        );
        let r = run_experiment(&s, 1, None).unwrap();
        let summary = summarize(&s, &r);
        assert_eq!(summary.exhausted.len(), 3);
        assert!(summary.exhausted.iter().all(|e| e.m_reached == 2));
        let text = String::from_utf8(trajectory_csv(&r)).unwrap();
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn theory_comparison_attached() {
        let s = spec(
            r#"{"n": 2000, "weight_rule": {"kind": "linear_alpha", "alpha": 1.0},
                "checkpoints": [0.2, 1.5], "checkpoints_rel": true, "replicates": 2,
                "pi_ks": [0, 1], "comparison": {"ks": [3]}}"#,
        );
        let r = run_experiment(&s, 2, None).unwrap();
        let summary = summarize(&s, &r);
        let theory = summary.theory.unwrap();
        let p = theory[1].prediction.as_ref().unwrap();
        assert!((p.rho - 0.2416942607882).abs() < 1e-9);
        assert!(theory[0].susceptibility.is_some());
        assert!(theory[1].susceptibility.is_none());
        assert_eq!(summary.statistics.unwrap().checkpoints[0].pi.len(), 2);
    }
}
