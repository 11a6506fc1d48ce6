use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, Poisson};

use super::ProcessError;
use crate::graph::{MultiGraph, Vertex};

/// Configuration model on a degree sequence: the `2m` half-edges are shuffled
/// uniformly and consecutive pairs become edges.
pub fn sample_configuration_model<R: Rng + ?Sized>(
    deg: &[u32],
    rng: &mut R,
) -> Result<MultiGraph, ProcessError> {
    let total: u64 = deg.iter().map(|&d| d as u64).sum();
    if total % 2 == 1 {
        return Err(ProcessError::OddDegreeSum(total));
    }
    let mut stubs: Vec<Vertex> = deg
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v as Vertex, d as usize))
        .collect();
    stubs.shuffle(rng);
    let edges: Vec<_> = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Ok(MultiGraph::from_edges(deg.len(), &edges)?)
}

/// Degrees at time `t` of `n` independent pure birth processes with rates
/// `k + alpha`, simulated through their exponential holding times.
pub fn sample_birth_degrees<R: Rng + ?Sized>(n: usize, alpha: f64, t: f64, rng: &mut R) -> Vec<u32> {
    assert!(alpha > 0.0 && t >= 0.0, "birth process needs alpha > 0 and t >= 0");
    (0..n)
        .map(|_| {
            let mut k = 0u32;
            let mut clock = 0.0;
            loop {
                let hold: f64 = Exp::new(k as f64 + alpha)
                    .expect("positive rate")
                    .sample(rng);
                clock += hold;
                if clock > t {
                    break k;
                }
                k += 1;
            }
        })
        .collect()
}

/// Negative binomial sampler: table inversion for the bulk, gamma-Poisson
/// mixture restricted to the region past the table for the tail.
#[derive(Debug, Clone)]
pub struct NegBinomialSampler {
    cdf: Vec<f64>,
    gamma: Option<Gamma<f64>>,
    ratio: f64,
}

impl NegBinomialSampler {
    /// `P(k) = Gamma(k + shape) / (Gamma(shape) k!) p^k (1 - p)^shape`.
    pub fn new(shape: f64, p: f64) -> Self {
        assert!(shape > 0.0 && (0.0..1.0).contains(&p), "NB needs shape > 0 and p in [0, 1)");
        let mut cdf = Vec::new();
        let mut pk = (1.0 - p).powf(shape);
        let mut acc = 0.0;
        let mut k = 0f64;
        // stop once the remaining mass is negligible and the pmf is decreasing
        while acc + pk < 1.0 - 1e-13 || k < shape * p / (1.0 - p) {
            acc += pk;
            cdf.push(acc);
            pk *= p * (k + shape) / (k + 1.0);
            k += 1.0;
            if pk == 0.0 || cdf.len() > 1 << 20 {
                break;
            }
        }
        let gamma = (p > 0.0).then(|| Gamma::new(shape, p / (1.0 - p)).expect("valid gamma"));
        NegBinomialSampler {
            cdf,
            gamma,
            ratio: p,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.ratio == 0.0 {
            return 0;
        }
        let u: f64 = rng.random();
        let last = *self.cdf.last().expect("nonempty table");
        if u < last {
            return self.cdf.partition_point(|&c| c <= u) as u32;
        }
        let gamma = self.gamma.as_ref().expect("p > 0");
        let cut = self.cdf.len() as f64;
        loop {
            let lambda = gamma.sample(rng);
            if lambda <= 0.0 {
                continue;
            }
            let k: f64 = Poisson::new(lambda).expect("positive rate").sample(rng);
            if k >= cut {
                return k as u32;
            }
        }
    }
}

/// iid `NB(alpha, 2m / (alpha n + 2m))` degrees conditioned on summing to
/// `2m`, by rejection. The default budget is `10^4 sqrt(n)` attempts.
pub fn sample_conditioned_degrees<R: Rng + ?Sized>(
    n: usize,
    alpha: f64,
    m: u64,
    max_attempts: Option<u64>,
    rng: &mut R,
) -> Result<Vec<u32>, ProcessError> {
    if !(alpha > 0.0 && alpha.is_finite()) || n == 0 {
        return Err(ProcessError::InvalidConfig(format!(
            "conditioned degrees need n > 0 and alpha > 0, got n = {n}, alpha = {alpha}"
        )));
    }
    if m == 0 {
        return Ok(vec![0; n]);
    }
    let target = 2 * m;
    let p = target as f64 / (alpha * n as f64 + target as f64);
    let nb = NegBinomialSampler::new(alpha, p);
    let budget = max_attempts.unwrap_or_else(|| (1e4 * (n as f64).sqrt()).ceil() as u64);
    let mut deg = vec![0u32; n];
    for _ in 0..budget {
        let mut sum = 0u64;
        for d in deg.iter_mut() {
            *d = nb.sample(rng);
            sum += *d as u64;
        }
        if sum == target {
            return Ok(deg);
        }
    }
    Err(ProcessError::SamplingFailure { attempts: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cm_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let g = sample_configuration_model(&[2, 0, 0], &mut rng).unwrap();
        assert_eq!(g.canonical_edges(), vec![(0, 0)]);
        let g = sample_configuration_model(&[1, 1], &mut rng).unwrap();
        assert_eq!(g.canonical_edges(), vec![(0, 1)]);
        assert!(matches!(
            sample_configuration_model(&[1, 0], &mut rng),
            Err(ProcessError::OddDegreeSum(1))
        ));
    }

    #[test]
    fn cm_two_one_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let trials = 150_000;
        let loops = (0..trials)
            .filter(|_| {
                sample_configuration_model(&[2, 1, 1], &mut rng)
                    .unwrap()
                    .loop_count()
                    == 1
            })
            .count();
        assert!((loops as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.005);
    }

    #[test]
    fn birth_degrees_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        assert!(sample_birth_degrees(100, 0.7, 0.0, &mut rng).iter().all(|&d| d == 0));
    }

    #[test]
    fn birth_degrees_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let n = 200_000;
        let deg = sample_birth_degrees(n, 1.0, 2f64.ln(), &mut rng);
        for k in 0..5u32 {
            let f = deg.iter().filter(|&&d| d == k).count() as f64 / n as f64;
            assert!((f - 0.5f64.powi(k as i32 + 1)).abs() < 0.004, "k={k} f={f}");
        }
    }

    #[test]
    fn nb_sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for (shape, p) in [(1.0, 0.5), (0.3, 0.9), (5.0, 0.2), (2.0, 0.999)] {
            let nb = NegBinomialSampler::new(shape, p);
            let trials = 200_000;
            let xs: Vec<f64> = (0..trials).map(|_| nb.sample(&mut rng) as f64).collect();
            let mean = xs.iter().sum::<f64>() / trials as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / trials as f64;
            let m = shape * p / (1.0 - p);
            let v = m / (1.0 - p);
            assert!((mean - m).abs() < 5.0 * (v / trials as f64).sqrt(), "{shape} {p}: {mean} vs {m}");
            assert!((var / v - 1.0).abs() < 0.1, "{shape} {p}: {var} vs {v}");
        }
    }

    #[test]
    fn conditioned_two_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        assert_eq!(sample_conditioned_degrees(5, 1.0, 0, None, &mut rng).unwrap(), vec![0; 5]);
        let trials = 100_000;
        let mut counts = [0u32; 3];
        for _ in 0..trials {
            let d = sample_conditioned_degrees(2, 1.0, 1, None, &mut rng).unwrap();
            assert_eq!(d[0] + d[1], 2);
            counts[d[0] as usize] += 1;
        }
        // geometric weights make all three splits of 2 equally likely
        for c in counts {
            assert!((c as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.006, "{counts:?}");
        }
    }

    #[test]
    fn conditioned_budget_exhausts() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        assert!(matches!(
            sample_conditioned_degrees(1000, 1.0, 500, Some(0), &mut rng),
            Err(ProcessError::SamplingFailure { attempts: 0 })
        ));
    }
}
