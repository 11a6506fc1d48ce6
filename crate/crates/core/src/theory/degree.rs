use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// Limiting degree laws of the process family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeModel {
    /// `NB(shape, p)`: `P(k) = C(shape + k - 1, k) (1 - p)^shape p^k`.
    NegBinomial { shape: f64, p: f64 },
    Poisson { lambda: f64 },
    Binomial { trials: u32, p: f64 },
    /// Finite-support law given by explicit probabilities indexed by degree.
    Empirical { probs: Vec<f64> },
}

/// `E (Y)_k` for `Y ~ NB(alpha, p)`, i.e. `(E Y)^k prod_{1 <= j < k} (1 + j/alpha)`.
pub fn nb_factorial_moment(alpha: f64, p: f64, k: u32) -> f64 {
    let mean = alpha * p / (1.0 - p);
    (1..k).fold(mean.powi(k as i32), |acc, j| acc * (1.0 + j as f64 / alpha))
}

fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

impl DegreeModel {
    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            DegreeModel::NegBinomial { shape, p } => {
                if p == 0.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                let kf = k as f64;
                (ln_gamma(shape + kf) - ln_gamma(shape) - ln_factorial(k)
                    + shape * (-p).ln_1p()
                    + kf * p.ln())
                .exp()
            }
            DegreeModel::Poisson { lambda } => {
                if lambda == 0.0 {
                    return if k == 0 { 1.0 } else { 0.0 };
                }
                (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
            }
            DegreeModel::Binomial { trials, p } => {
                let r = trials as u64;
                if k > r {
                    return 0.0;
                }
                if p == 0.0 || p == 1.0 {
                    let at = if p == 0.0 { 0 } else { r };
                    return if k == at { 1.0 } else { 0.0 };
                }
                let kf = k as f64;
                (ln_factorial(r) - ln_factorial(k) - ln_factorial(r - k)
                    + kf * p.ln()
                    + (r - k) as f64 * (-p).ln_1p())
                .exp()
            }
            DegreeModel::Empirical { ref probs } => probs.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// `E x^D`.
    pub fn pgf(&self, x: f64) -> f64 {
        match *self {
            DegreeModel::NegBinomial { shape, p } => ((1.0 - p) / (1.0 - p * x)).powf(shape),
            DegreeModel::Poisson { lambda } => (lambda * (x - 1.0)).exp(),
            DegreeModel::Binomial { trials, p } => (1.0 - p + p * x).powi(trials as i32),
            DegreeModel::Empirical { ref probs } => {
                probs.iter().rev().fold(0.0, |acc, &q| acc * x + q)
            }
        }
    }

    /// `E [D x^(D-1)]`.
    pub fn pgf_prime(&self, x: f64) -> f64 {
        match *self {
            DegreeModel::NegBinomial { shape, p } => {
                shape * p * (1.0 - p).powf(shape) / (1.0 - p * x).powf(shape + 1.0)
            }
            DegreeModel::Poisson { lambda } => lambda * (lambda * (x - 1.0)).exp(),
            DegreeModel::Binomial { trials, p } => {
                if trials == 0 {
                    0.0
                } else {
                    trials as f64 * p * (1.0 - p + p * x).powi(trials as i32 - 1)
                }
            }
            DegreeModel::Empirical { ref probs } => probs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &q)| acc * x + k as f64 * q),
        }
    }

    /// `E (D)_k = E D(D-1)...(D-k+1)`.
    pub fn factorial_moment(&self, k: u32) -> f64 {
        match *self {
            DegreeModel::NegBinomial { shape, p } => nb_factorial_moment(shape, p, k),
            DegreeModel::Poisson { lambda } => lambda.powi(k as i32),
            DegreeModel::Binomial { trials, p } => {
                if k > trials {
                    return 0.0;
                }
                (0..k).map(|j| (trials - j) as f64).product::<f64>() * p.powi(k as i32)
            }
            DegreeModel::Empirical { ref probs } => probs
                .iter()
                .enumerate()
                .map(|(d, &q)| q * (0..k).map(|j| d as f64 - j as f64).product::<f64>())
                .sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.factorial_moment(1)
    }

    /// `P(D >= k)`, accurate in relative terms also deep in the upper tail.
    pub fn sf(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let head: f64 = (0..k).map(|j| self.pmf(j)).sum();
        if head <= 0.5 {
            return (1.0 - head).max(0.0);
        }
        match self {
            DegreeModel::Binomial { trials, .. } => {
                (k..=*trials as u64).map(|j| self.pmf(j)).sum()
            }
            DegreeModel::Empirical { probs } => probs.iter().skip(k as usize).sum(),
            _ => {
                let mean = self.mean();
                let mut acc = 0.0;
                let mut j = k;
                loop {
                    let term = self.pmf(j);
                    acc += term;
                    if j as f64 > mean && term <= acc * 1e-17 {
                        break;
                    }
                    j += 1;
                }
                acc
            }
        }
    }

    /// Smallest `K` with `P(D > K) < tol`, at least the mean.
    pub fn support_bound(&self, tol: f64) -> u64 {
        let mut k = 0u64;
        let mut cdf = 0.0;
        loop {
            cdf += self.pmf(k);
            if 1.0 - cdf < tol && k as f64 >= self.mean() {
                return k;
            }
            if let DegreeModel::Binomial { trials, .. } = self {
                if k >= *trials as u64 {
                    return k;
                }
            }
            if let DegreeModel::Empirical { probs } = self {
                if k + 1 >= probs.len() as u64 {
                    return k;
                }
            }
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn models() -> Vec<DegreeModel> {
        vec![
            DegreeModel::NegBinomial { shape: 1.0, p: 1.0 / 3.0 },
            DegreeModel::NegBinomial { shape: 2.0, p: 1.0 / 3.0 },
            DegreeModel::NegBinomial { shape: 0.5, p: 0.6 },
            DegreeModel::Poisson { lambda: 1.7 },
            DegreeModel::Binomial { trials: 3, p: 0.6 },
            DegreeModel::Empirical { probs: vec![0.2, 0.3, 0.5] },
        ]
    }

    #[test]
    fn pmf_sums_to_one() {
        for d in models() {
            let total: f64 = (0..2000).map(|k| d.pmf(k)).sum();
            assert!((total - 1.0).abs() < 1e-12, "{d:?}: {total}");
        }
    }

    #[test]
    fn moments_agree_with_pmf_summation() {
        for d in models() {
            for k in 0..5u32 {
                let direct: f64 = (0..3000u64)
                    .map(|j| d.pmf(j) * (0..k).map(|i| j as f64 - i as f64).product::<f64>())
                    .sum();
                let fm = d.factorial_moment(k);
                assert!((direct - fm).abs() < 1e-9 * fm.max(1.0), "{d:?} k={k}: {direct} vs {fm}");
            }
            assert!((d.factorial_moment(1) - d.pgf_prime(1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn pgf_consistency_by_numeric_derivative() {
        for d in models() {
            assert!((d.pgf(1.0) - 1.0).abs() < 1e-12);
            let h = 1e-6;
            let numeric = (d.pgf(1.0 + h) - d.pgf(1.0 - h)) / (2.0 * h);
            assert!((numeric - d.pgf_prime(1.0)).abs() < 1e-6, "{d:?}");
            let x = 0.37;
            let series: f64 = (0..3000u64).map(|k| d.pmf(k) * f64::powi(x, k as i32)).sum();
            assert!((series - d.pgf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn nb_pgf_closed_form() {
        let (a, p) = (2.5, 0.4);
        let d = DegreeModel::NegBinomial { shape: a, p };
        for &x in &[0.0, 0.5, 1.2, 2.4] {
            assert!((d.pgf(x) - ((1.0 - p) / (1.0 - p * x)).powf(a)).abs() < 1e-14);
        }
    }

    #[test]
    fn factorial_moment_examples() {
        assert_eq!(nb_factorial_moment(3.0, 0.2, 0), 1.0);
        assert!((nb_factorial_moment(2.0, 1.0 / 3.0, 1) - 1.0).abs() < 1e-15);
        assert!((nb_factorial_moment(2.0, 1.0 / 3.0, 2) - 1.5).abs() < 1e-15);
        // (alpha, p_n) with p_n = 2m/(n alpha + 2m): E Y(Y-1) = (2m/n)^2 (1 + 1/alpha)
        let (n, m, alpha) = (1000.0, 700.0, 1.5);
        let p = 2.0 * m / (n * alpha + 2.0 * m);
        let x: f64 = 2.0 * m / n;
        assert!((nb_factorial_moment(alpha, p, 2) - x * x * (1.0 + 1.0 / alpha)).abs() < 1e-12);
    }

    #[test]
    fn survival_tail_is_accurate() {
        let d = DegreeModel::Poisson { lambda: 1e-4 };
        // P(Po >= 2) ~ lambda^2 / 2
        let sf = d.sf(2);
        assert!((sf / (0.5e-8) - 1.0).abs() < 1e-3, "{sf}");
        let d = DegreeModel::NegBinomial { shape: 2.0, p: 0.5 };
        let head: f64 = (0..3).map(|k| d.pmf(k)).sum();
        assert!((d.sf(3) - (1.0 - head)).abs() < 1e-14);
    }
}
