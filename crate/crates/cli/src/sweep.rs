//! Parameter sweeps: one process run per replicate, observed at every grid point.

use std::collections::BTreeSet;

use pagiant::processes::ProcessConfig;
use pagiant::stats::{aggregate, Estimate};
use pagiant::theory;

use crate::simulate::{run_config, ReplicateOutcome};
use crate::spec::{theory_alpha, SpecError, SweepParameter, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub m: u64,
    pub l1_frac: Estimate,
    pub susceptibility: Estimate,
    pub theory: Option<f64>,
}

fn grid_edges(spec: &SweepSpec) -> Result<Vec<u64>, SpecError> {
    let n = spec.n as f64;
    let m_c = match spec.grid.parameter {
        SweepParameter::Eps => {
            let alpha = theory_alpha(&spec.weight_rule)
                .ok_or_else(|| SpecError::Invalid("an eps grid needs an alpha weight rule".into()))?;
            Some(theory::m_crit(alpha, n).map_err(|e| SpecError::Invalid(e.to_string()))?)
        }
        SweepParameter::T => None,
    };
    spec.grid
        .values
        .iter()
        .map(|&x| {
            let m = match m_c {
                Some(m_c) => m_c * (1.0 + x),
                None => x * n,
            };
            if !(m >= 0.0 && m.is_finite()) {
                return Err(SpecError::Invalid(format!("grid value {x} gives no valid edge count")));
            }
            Ok(m.round() as u64)
        })
        .collect()
}

fn theory_value(spec: &SweepSpec, x: f64) -> Option<f64> {
    let alpha = theory_alpha(&spec.weight_rule)?;
    match spec.grid.parameter {
        SweepParameter::Eps if x > 0.0 => theory::rho(alpha, x).ok(),
        SweepParameter::Eps => Some(0.0),
        SweepParameter::T => {
            let t_c = theory::susceptibility_blowup(alpha).ok()?;
            (x < t_c).then(|| theory::susceptibility_closed(alpha, x).ok()).flatten()
        }
    }
}

pub fn run_sweep(spec: &SweepSpec, seed: u64, jobs: Option<usize>) -> Result<Vec<SweepRow>, SpecError> {
    let edges = grid_edges(spec)?;
    let checkpoints: Vec<u64> = edges.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let cfg = ProcessConfig {
        n: spec.n,
        weight_rule: spec.weight_rule.clone(),
        mode: spec.mode,
        m_max: checkpoints.last().copied().unwrap_or(0),
        checkpoints: checkpoints.clone(),
        seed,
    };
    cfg.validate().map_err(|e| SpecError::Invalid(e.to_string()))?;
    let result = run_config(&cfg, spec.replicates, jobs);
    let completed: Vec<_> = result
        .outcomes
        .into_iter()
        .filter_map(|o| match o {
            ReplicateOutcome::Completed(t) => Some(t),
            _ => None,
        })
        .collect();
    let summary = aggregate(&completed, &[]).map_err(|e| SpecError::Invalid(e.to_string()))?;
    Ok(spec
        .grid
        .values
        .iter()
        .zip(&edges)
        .map(|(&value, &m)| {
            let cp = &summary.checkpoints[checkpoints.binary_search(&m).expect("grid point scheduled")];
            SweepRow {
                value,
                m,
                l1_frac: cp.l1_frac,
                susceptibility: cp.susceptibility,
                theory: theory_value(spec, value),
            }
        })
        .collect())
}

/// `parameter,value,m,L1_frac_mean,L1_frac_stderr,S_mean,S_stderr,theory`
pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> Vec<u8> {
    let name = match spec.grid.parameter {
        SweepParameter::Eps => "eps",
        SweepParameter::T => "t",
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["parameter", "value", "m", "L1_frac_mean", "L1_frac_stderr", "S_mean", "S_stderr", "theory"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            name.to_string(),
            r.value.to_string(),
            r.m.to_string(),
            r.l1_frac.mean.to_string(),
            r.l1_frac.stderr.to_string(),
            r.susceptibility.mean.to_string(),
            r.susceptibility.stderr.to_string(),
            r.theory.map(|x| x.to_string()).unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_json;

    #[test]
    fn eps_sweep_tracks_theory() {
        let spec: SweepSpec = parse_json(
            r#"{"n": 20000, "weight_rule": {"kind": "linear_alpha", "alpha": 1.0},
                "replicates": 4, "grid": {"parameter": "eps", "values": [0.4, 0.8, 1.0]}}"#,
        )
        .unwrap();
        let rows = run_sweep(&spec, 3, None).unwrap();
        assert!(rows.windows(2).all(|w| w[0].l1_frac.mean < w[1].l1_frac.mean));
        for r in &rows {
            assert!((r.l1_frac.mean - r.theory.unwrap()).abs() < 0.03, "{r:?}");
        }
        let text = String::from_utf8(sweep_csv(&spec, &rows)).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("parameter,value,m,"));
    }

    #[test]
    fn t_sweep_theory_only_below_blowup() {
        let spec: SweepSpec = parse_json(
            r#"{"n": 5000, "weight_rule": {"kind": "linear_alpha", "alpha": 1.0},
                "replicates": 2, "grid": {"parameter": "t", "values": [0.1, 0.3]}}"#,
        )
        .unwrap();
        let rows = run_sweep(&spec, 0, None).unwrap();
        assert!((rows[0].theory.unwrap() - 0.8 / 0.6).abs() < 1e-12);
        assert!(rows[1].theory.is_none());
    }
}
