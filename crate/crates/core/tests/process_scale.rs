use pagiant::montecarlo::replicate_rng;
use pagiant::processes::{
    run_process, sample_birth_degrees, sample_conditioned_degrees, FTable, Mode, Process, ProcessConfig,
    ProcessError, WeightRule,
};
use pagiant::stats::{chi_square, tv_distance, DegreeHistogram};
use pagiant::theory::{self, Alpha, DegreeModel};
use proptest::prelude::*;

fn config(n: usize, rule: WeightRule, mode: Mode, checkpoints: Vec<u64>) -> ProcessConfig {
    ProcessConfig {
        n,
        weight_rule: rule,
        mode,
        m_max: *checkpoints.last().unwrap(),
        checkpoints,
        seed: 0,
    }
}

#[test]
fn giant_emerges_past_critical_point() {
    let n = 100_000;
    let mc = theory::m_crit(Alpha::Finite(1.0), n as f64).unwrap();
    let cfg = config(
        n,
        WeightRule::LinearAlpha { alpha: 1.0 },
        Mode::Simple,
        vec![mc as u64, (1.5 * mc) as u64],
    );
    let t = run_process(&cfg, &mut replicate_rng(1, 0)).unwrap();
    assert!(t.checkpoints[0].l1 < n as u64 / 20, "L1 at m_c = {}", t.checkpoints[0].l1);
    let frac = t.checkpoints[1].l1 as f64 / n as f64;
    let rho = theory::rho(Alpha::Finite(1.0), 0.5).unwrap();
    assert!((frac - rho).abs() < 0.02, "{frac} vs {rho}");
}

#[test]
fn multigraph_degrees_are_negative_binomial() {
    let n = 100_000;
    let cfg = config(
        n,
        WeightRule::LinearAlpha { alpha: 1.0 },
        Mode::Multigraph,
        vec![n as u64 / 4, n as u64 / 2],
    );
    let t = run_process(&cfg, &mut replicate_rng(2, 0)).unwrap();
    let h = DegreeHistogram::from_counts(t.checkpoints[1].degree_histogram.clone());
    let nb = DegreeModel::NegBinomial { shape: 1.0, p: 0.5 };
    assert!(tv_distance(&h, &nb).unwrap() < 0.01);
    assert_eq!(h.mu_hat_k(1), 1.0);
    // E Y(Y - 2) = (2m/n)^2 (1 + 1/alpha) - 2m/n: 1 at m = n/2, 0 at m = n/4
    assert!((h.mu_hat_k(2) - 2.0 * h.mu_hat_k(1) - 1.0).abs() < 0.1);
    let h = DegreeHistogram::from_counts(t.checkpoints[0].degree_histogram.clone());
    assert!((h.mu_hat_k(2) - 2.0 * h.mu_hat_k(1)).abs() < 0.05);
}

#[test]
fn erdos_renyi_degrees_are_poisson() {
    let n = 100_000;
    let cfg = config(n, WeightRule::GeneralF { f: FTable::constant(1.0) }, Mode::Simple, vec![n as u64 / 2]);
    let t = run_process(&cfg, &mut replicate_rng(3, 0)).unwrap();
    let h = DegreeHistogram::from_counts(t.checkpoints[0].degree_histogram.clone());
    assert!(tv_distance(&h, &DegreeModel::Poisson { lambda: 1.0 }).unwrap() < 0.01);
}

#[test]
fn birth_process_degrees() {
    let n = 100_000;
    let deg = sample_birth_degrees(n, 1.0, 2f64.ln(), &mut replicate_rng(4, 0));
    let h = DegreeHistogram::from_degrees(&deg);
    let fit = chi_square(&h, &DegreeModel::NegBinomial { shape: 1.0, p: 0.5 }).unwrap();
    assert!(fit.p_value > 1e-3, "{fit:?}");

    // mean degree at t_m = log(1 + 2m/(alpha n)) is 2m/n
    let (alpha, m) = (0.5, 30_000.0);
    let t = (1.0 + 2.0 * m / (alpha * n as f64)).ln();
    let deg = sample_birth_degrees(n, alpha, t, &mut replicate_rng(4, 1));
    let mean = deg.iter().map(|&d| d as f64).sum::<f64>() / n as f64;
    let target = 2.0 * m / n as f64;
    // sd of one degree is sqrt(mean (1 + mean / alpha))
    let se = (target * (1.0 + target / alpha) / n as f64).sqrt();
    assert!((mean - target).abs() < 5.0 * se, "{mean} vs {target}");
}

#[test]
fn conditioned_degrees_match_degree_law() {
    let n = 100_000;
    let deg = sample_conditioned_degrees(n, 1.0, n as u64 / 2, None, &mut replicate_rng(5, 0)).unwrap();
    assert_eq!(deg.iter().map(|&d| d as u64).sum::<u64>(), n as u64);
    let h = DegreeHistogram::from_degrees(&deg);
    assert!(tv_distance(&h, &DegreeModel::NegBinomial { shape: 1.0, p: 0.5 }).unwrap() < 0.01);
}

#[test]
fn negative_alpha_runs_almost_to_the_end() {
    let n = 10_000usize;
    let stop = 3 * n as u64 / 2;
    for mode in [Mode::Simple, Mode::Multigraph] {
        for rep in 0..5 {
            let mut p = Process::new(n, &WeightRule::NegativeInteger { r: 3 }, mode);
            let mut rng = replicate_rng(6, rep);
            let mut m = 0u64;
            while p.step(&mut rng).is_ok() {
                m += 1;
            }
            assert!(p.graph().degrees().iter().all(|&d| d <= 3));
            assert!(m + 10 * (n as f64).ln() as u64 >= stop, "{mode:?}: stopped at {m} of {stop}");
        }
    }
}

#[test]
fn negative_alpha_exhaustion_is_reported() {
    let n = 1000;
    let cfg = config(n, WeightRule::NegativeInteger { r: 3 }, Mode::Simple, vec![1500]);
    match run_process(&cfg, &mut replicate_rng(7, 0)) {
        Ok(t) => assert_eq!(t.checkpoints[0].m, 1500),
        Err(ProcessError::Exhausted { m_reached, .. }) => assert!(m_reached >= 1400),
        Err(e) => panic!("{e}"),
    }
}

fn rule_strategy() -> impl Strategy<Value = WeightRule> {
    prop_oneof![
        (0.05f64..20.0).prop_map(|alpha| WeightRule::LinearAlpha { alpha }),
        (3u32..6).prop_map(|r| WeightRule::NegativeInteger { r }),
        prop::collection::vec(0.0f64..3.0, 1..5).prop_map(|values| WeightRule::GeneralF {
            f: FTable { values, tail: pagiant::processes::Tail::Constant { value: 1.0 } }
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn checkpoint_invariants(
        n in 2usize..60,
        rule in rule_strategy(),
        multigraph in any::<bool>(),
        seed in any::<u64>(),
        frac in 0.1f64..1.5,
    ) {
        let mode = if multigraph { Mode::Multigraph } else { Mode::Simple };
        let mut m_max = (frac * n as f64) as u64;
        if let WeightRule::NegativeInteger { r } = rule {
            m_max = m_max.min(r as u64 * n as u64 / 2);
        }
        if mode == Mode::Simple {
            m_max = m_max.min((n * (n - 1) / 2) as u64);
        }
        let checkpoints: Vec<u64> = (0..=m_max).step_by(3).collect();
        let cfg = ProcessConfig { n, weight_rule: rule.clone(), mode, m_max, checkpoints, seed };
        let t = match run_process(&cfg, &mut replicate_rng(seed, 0)) {
            Ok(t) => t,
            Err(ProcessError::Exhausted { partial, .. }) => *partial,
            Err(e) => panic!("{e}"),
        };
        let mut last_l1 = 0;
        for c in &t.checkpoints {
            let h = DegreeHistogram::from_counts(c.degree_histogram.clone());
            prop_assert_eq!(h.n(), n as u64);
            prop_assert_eq!(h.degree_sum(), 2 * c.m as u128);
            prop_assert!(c.l1 >= last_l1 && c.l2 <= c.l1);
            last_l1 = c.l1;
            if mode == Mode::Simple {
                prop_assert_eq!(c.loops, 0);
                prop_assert_eq!(c.multi_edges, 0);
            }
            if let WeightRule::NegativeInteger { r } = rule {
                prop_assert!(h.max_degree().unwrap_or(0) <= r);
            }
        }
        let again = run_process(&cfg, &mut replicate_rng(seed, 0));
        match again {
            Ok(u) => prop_assert_eq!(u, t),
            Err(ProcessError::Exhausted { partial, .. }) => prop_assert_eq!(*partial, t),
            Err(e) => panic!("{e}"),
        }
    }
}
