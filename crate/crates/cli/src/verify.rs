//! Self-checks: exact oracles, theory identities and (in full mode) scaled
//! statistical comparisons.

use std::fmt;

use num_rational::BigRational;
use pagiant::montecarlo::{replicate_rng, run_replicates};
use pagiant::oracle::{
    enumerate_cm, enumerate_process, enumerate_urn_sequences, rational, verify_conditional_equivalence,
    verify_rewiring_stationarity, OracleReport,
};
use pagiant::processes::{run_process, Mode, ProcessConfig, RewireConvention, WeightRule};
use pagiant::stats::{tv_distance, DegreeHistogram};
use pagiant::theory::{self, Alpha, DegreeModel};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub level: Level,
    /// Added to every giant-fraction value the theory checks see.
    pub perturb_rho: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            level: Level::Quick,
            perturb_rho: 0.0,
            seed: 0,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "[{tag}] {:<8} {}: {}", c.suite, c.name, c.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            suite,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn oracle(&mut self, report: Result<OracleReport, pagiant::oracle::OracleError>) {
        match report {
            Ok(r) => {
                let detail = match r.failures.first() {
                    None => format!("{} exact checks", r.checks),
                    Some(f) => format!("{} of {} failed, first: {f}", r.failures.len(), r.checks),
                };
                self.push("oracle", r.name.clone(), r.passed(), detail);
            }
            Err(e) => self.push("oracle", "oracle", false, e.to_string()),
        }
    }

    fn close(&mut self, suite: &'static str, name: impl Into<String>, got: f64, want: f64, tol: f64) {
        let err = (got - want).abs();
        self.push(suite, name, err <= tol, format!("{got:.12} vs {want:.12}, |diff| = {err:.3e} (tol {tol:.0e})"));
    }
}

fn q(num: i64, den: i64) -> BigRational {
    rational(num, den)
}

fn oracle_checks(c: &mut Checks) {
    for (n, m) in [(2, 2), (3, 2), (3, 3), (4, 2)] {
        for mode in [Mode::Multigraph, Mode::Simple] {
            if mode == Mode::Simple && m > n * (n - 1) / 2 {
                continue;
            }
            let d = enumerate_process(n, m, &q(1, 1), mode);
            let ok = d.as_ref().is_ok_and(|d| d.total() == q(1, 1));
            c.push("oracle", format!("law sums to one n={n} m={m} {mode:?}"), ok, format!("{} graphs", d.map(|d| d.len()).unwrap_or(0)));
        }
    }
    for (n, m, alpha) in [(3, 2, q(1, 2)), (3, 3, q(2, 1)), (4, 2, q(1, 1))] {
        let step = enumerate_process(n, m, &alpha, Mode::Multigraph);
        let urn = enumerate_urn_sequences(n, m, &alpha);
        let ok = matches!((&step, &urn), (Ok(a), Ok(b)) if a == b);
        c.push("oracle", format!("step law equals urn sequences n={n} m={m} alpha={alpha}"), ok, "exact");
    }
    for n in [2, 3] {
        for m in [1, 2] {
            for alpha in [q(1, 2), q(1, 1), q(2, 1)] {
                c.oracle(verify_conditional_equivalence(n, m, &alpha));
            }
        }
    }
    for (n, m) in [(2, 2), (3, 2)] {
        c.oracle(verify_rewiring_stationarity(n, m, &q(1, 1), RewireConvention::Detached));
    }
    let cm = enumerate_cm(&[2, 1, 1]);
    let ok = cm.as_ref().is_ok_and(|d| {
        d.get(&vec![(0, 1), (0, 2)]) == q(2, 3) && d.get(&vec![(0, 0), (1, 2)]) == q(1, 3)
    });
    c.push("oracle", "configuration model (2,1,1)", ok, "star 2/3, loop 1/3");
}

fn theory_checks(c: &mut Checks, perturb: f64) {
    let rho = |a: Alpha, eps: f64| theory::rho(a, eps).map(|r| r + perturb).unwrap_or(f64::NAN);
    let one = Alpha::Finite(1.0);

    c.close("theory", "rho(1, 0.5)", rho(one, 0.5), 0.241694260788208, 1e-9);
    c.close("theory", "rho(inf, 1)", rho(Alpha::Infinite, 1.0), 0.79681213002002, 1e-9);
    c.close("theory", "rho(-3, 0.2)", rho(Alpha::NegativeInteger(3), 0.2), 19.0 / 27.0, 1e-9);

    // giant fraction as 1 - G(xi) of the limiting degree law
    for (a, eps) in [(one, 0.5), (Alpha::Finite(0.3), 1.0), (Alpha::Finite(7.0), 0.2), (Alpha::NegativeInteger(4), 0.3)] {
        let xi = theory::solve_xi(a, eps).unwrap_or(f64::NAN);
        let d = theory::limit_degree_model(a, eps).expect("supercritical");
        c.close("theory", format!("rho = 1 - G(xi) at alpha={a}, eps={eps}"), rho(a, eps), 1.0 - d.pgf(xi), 1e-9);
        c.close(
            "theory",
            format!("xi fixed point at alpha={a}, eps={eps}"),
            d.pgf_prime(xi),
            xi * d.mean(),
            1e-10,
        );
    }

    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 2.0, 5.0, 10.0] {
        for eps in [0.1, 0.25, 0.5, 1.0] {
            let c_p = (1.0 + eps) * a / (a + 1.0);
            let p = theory::pittel_giant(a, c_p).unwrap_or(f64::NAN);
            worst = worst.max((p - rho(Alpha::Finite(a), eps)).abs());
        }
    }
    c.push("theory", "Pittel parametrisation, 20 points", worst < 1e-8, format!("max |diff| = {worst:.3e}"));

    let mut ok = true;
    let mut detail = Vec::new();
    for eps in [1e-3, 1e-2, 5e-2] {
        let t = theory::bnk_time(1.0, 0.25 * (1.0 + eps)).unwrap_or(f64::NAN);
        let err = (theory::bnk_giant(t) - rho(one, eps)).abs();
        ok &= err < 10.0 * eps * eps;
        detail.push(format!("eps={eps}: {err:.2e}"));
    }
    c.push("theory", "rate-equation giant, alpha = 1", ok, detail.join(", "));

    for a in [Alpha::Finite(0.5), one, Alpha::Finite(10.0), Alpha::Infinite] {
        let slope = theory::rho_slope(a).unwrap_or(f64::NAN);
        let eps = 1e-3;
        let err = (rho(a, eps) / eps - slope).abs();
        c.push("theory", format!("slope at alpha={a}"), err < 5.0 * eps, format!("|rho/eps - {slope:.4}| = {err:.2e}"));
    }

    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 4.0] {
        let alpha = Alpha::Finite(a);
        let t_c = theory::susceptibility_blowup(alpha).unwrap();
        for i in 0..20 {
            let t = t_c * i as f64 / 21.0;
            let s = theory::susceptibility_closed(alpha, t).unwrap();
            let den = a - 2.0 * (a + 1.0) * t;
            let ds = 2.0 * a * a / (den * den);
            let rhs = theory::susceptibility_ode_rhs(alpha, t, s).unwrap();
            worst = worst.max((ds - rhs).abs() / ds);
        }
    }
    c.push("theory", "susceptibility ODE residual", worst < 1e-9, format!("max relative {worst:.2e}"));

    let c3 = theory::kcore_threshold(one, 3).map(|k| k.c_k).unwrap_or(f64::NAN);
    c.close("theory", "3-core threshold alpha = 1", c3, 0.946695464161, 1e-6);

    let grid: Vec<f64> = (1..40).map(|i| rho(one, i as f64 * 0.05)).collect();
    let monotone = grid.windows(2).all(|w| w[0] < w[1]);
    c.push("theory", "rho increasing in eps", monotone, "eps = 0.05..1.95");
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn statistical_checks(c: &mut Checks, opts: &VerifyOptions) {
    let n = 100_000usize;
    let alpha = Alpha::Finite(1.0);
    for mode in [Mode::Multigraph, Mode::Simple] {
        let cfg = ProcessConfig {
            n,
            weight_rule: WeightRule::LinearAlpha { alpha: 1.0 },
            mode,
            m_max: n as u64 / 2,
            checkpoints: vec![n as u64 / 2],
            seed: opts.seed,
        };
        match run_process(&cfg, &mut replicate_rng(opts.seed, 0)) {
            Ok(t) => {
                let h = DegreeHistogram::from_counts(t.checkpoints[0].degree_histogram.clone());
                let tv = tv_distance(&h, &DegreeModel::NegBinomial { shape: 1.0, p: 0.5 }).unwrap_or(f64::NAN);
                c.push("stats", format!("degree law at m = n/2 ({mode:?})"), tv < 0.01, format!("TV = {tv:.4}"));
            }
            Err(e) => c.push("stats", format!("degree law at m = n/2 ({mode:?})"), false, e.to_string()),
        }
    }

    let reps = 10;
    let m_c = theory::m_crit(alpha, n as f64).unwrap();
    let cfg = ProcessConfig {
        n,
        weight_rule: WeightRule::LinearAlpha { alpha: 1.0 },
        mode: Mode::Simple,
        m_max: (1.5 * m_c).round() as u64,
        checkpoints: vec![(1.5 * m_c).round() as u64],
        seed: opts.seed,
    };
    let fracs: Vec<f64> = run_replicates(opts.seed, reps, opts.jobs, |_, rng| {
        run_process(&cfg, rng).map(|t| t.checkpoints[0].l1 as f64 / n as f64).unwrap_or(f64::NAN)
    });
    let target = theory::rho(alpha, 0.5).unwrap() + opts.perturb_rho;
    let got = mean(&fracs);
    c.push(
        "stats",
        "giant fraction at 1.5 m_c",
        (got - target).abs() < 0.02,
        format!("L1/n = {got:.4} vs {target:.4} over {reps} runs"),
    );

    let t = 0.15;
    let cfg = ProcessConfig {
        m_max: (t * n as f64) as u64,
        checkpoints: vec![(t * n as f64) as u64],
        ..cfg
    };
    let s: Vec<f64> = run_replicates(opts.seed ^ 1, reps, opts.jobs, |_, rng| {
        run_process(&cfg, rng).map(|t| t.checkpoints[0].susceptibility).unwrap_or(f64::NAN)
    });
    let want = theory::susceptibility_closed(alpha, t).unwrap();
    let got = mean(&s);
    c.push(
        "stats",
        "susceptibility at t = 0.15",
        (got / want - 1.0).abs() < 0.1,
        format!("S = {got:.4} vs {want:.4}"),
    );
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let mut c = Checks(Vec::new());
    oracle_checks(&mut c);
    theory_checks(&mut c, opts.perturb_rho);
    if opts.level == Level::Full {
        statistical_checks(&mut c, opts);
    }
    VerifyReport {
        level: opts.level,
        passed: c.0.iter().all(|c| c.passed),
        checks: c.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_passes() {
        let report = run_verify(&VerifyOptions::default());
        assert!(report.passed, "{report}");
    }

    #[test]
    fn perturbed_rho_is_caught() {
        let report = run_verify(&VerifyOptions {
            perturb_rho: 1e-3,
            ..Default::default()
        });
        assert!(!report.passed);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.iter().all(|c| c.suite == "theory"));
        assert!(failed.len() >= 5);
    }
}
