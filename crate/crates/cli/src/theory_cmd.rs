//! Theory queries from the command line.

use anyhow::{bail, Context};
use pagiant::theory::{self, Alpha, TheoryPrediction};

/// `eps` either given directly or from `m = m_c (1 + eps)`.
pub fn resolve_eps(alpha: Alpha, eps: Option<f64>, m: Option<f64>, n: Option<f64>) -> anyhow::Result<f64> {
    match (eps, m, n) {
        (Some(eps), None, _) => Ok(eps),
        (None, Some(m), Some(n)) => {
            let m_c = theory::m_crit(alpha, n)?;
            Ok(m / m_c - 1.0)
        }
        (Some(_), Some(_), _) => bail!("give either --eps or --m with --n, not both"),
        _ => bail!("give --eps, or --m together with --n"),
    }
}

pub fn theory_json(
    alpha: &str,
    eps: Option<f64>,
    m: Option<f64>,
    n: Option<f64>,
    ks: &[u32],
) -> anyhow::Result<TheoryPrediction> {
    let alpha: Alpha = alpha.parse().with_context(|| format!("parsing alpha {alpha:?}"))?;
    let eps = resolve_eps(alpha, eps, m, n)?;
    Ok(theory::predict(alpha, eps, n, ks)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_from_edge_count() {
        let p = theory_json("1", None, Some(375.0), Some(1000.0), &[3]).unwrap();
        assert!((p.eps - 0.5).abs() < 1e-12);
        assert!((p.rho - 0.241694260788208).abs() < 1e-9);
        assert_eq!(p.c_k.len(), 1);
        assert!(theory_json("1", Some(0.5), Some(1.0), None, &[]).is_err());
        assert!(theory_json("-1", Some(0.5), None, None, &[]).is_err());
        assert!(theory_json("inf", Some(1.0), None, None, &[]).is_ok());
    }
}
