//! Closed forms and fixed-point solutions for the giant component of the
//! fixed-vertex preferential attachment process.
//!
//! The weight offset `alpha` enters in three flavours (see [`Alpha`]):
//! a positive real, the Erdős–Rényi limit `alpha = inf`, and a negative
//! integer `-r` with `r >= 3`. For all three the limiting degree law of a
//! vertex after `m = m_c (1 + eps)` edges is
//!
//! * `NB(a, (1 + eps) / (a + 2 + eps))` for finite `a > 0`,
//! * `Poisson(1 + eps)` for `a = inf`,
//! * `Bin(r, (1 + eps) / (r - 1))` for `a = -r`,
//!
//! and the giant fraction is `rho = 1 - E xi^D` where `xi` is the root in
//! `(0, 1)` of `E D xi^(D-1) = xi E D`. Both the finite and the negative
//! case reduce to `xi = (1 + (1 + eps)(1 - xi) / (a + 1))^-(a + 1)`.

mod degree;
pub mod roots;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use degree::{nb_factorial_moment, DegreeModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("{param} = {value} is outside the domain: {reason}")]
    Domain {
        param: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("solver failed: {0}")]
    Solver(&'static str),
    #[error("susceptibility blows up at t_c = {t_c}, asked for t = {t}")]
    BlowUp { t: f64, t_c: f64 },
}

fn domain(param: &'static str, value: impl fmt::Display, reason: &'static str) -> TheoryError {
    TheoryError::Domain {
        param,
        value: value.to_string(),
        reason,
    }
}

/// Preference offset of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha {
    /// `alpha in (0, inf)`.
    Finite(f64),
    /// The Erdős–Rényi limit.
    Infinite,
    /// `alpha = -r`.
    NegativeInteger(u32),
}

impl Alpha {
    /// Real value of `alpha`, `None` for the infinite case.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Alpha::Finite(a) => Some(a),
            Alpha::Infinite => None,
            Alpha::NegativeInteger(r) => Some(-(r as f64)),
        }
    }

    /// Rejects `alpha in [-2, 0]` and non-finite reals.
    pub fn validate(&self) -> Result<(), TheoryError> {
        match *self {
            Alpha::Finite(a) if !(a > 0.0 && a.is_finite()) => {
                Err(domain("alpha", a, "finite alpha must be positive"))
            }
            Alpha::NegativeInteger(r) if r < 3 => {
                Err(domain("alpha", -(r as i64), "negative alpha must be an integer <= -3"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Infinite => write!(f, "inf"),
            Alpha::NegativeInteger(r) => write!(f, "-{r}"),
        }
    }
}

impl FromStr for Alpha {
    type Err = TheoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf" | "∞") {
            return Ok(Alpha::Infinite);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| domain("alpha", t, "not a number or 'inf'"))?;
        let alpha = if v < 0.0 {
            if v.fract() != 0.0 {
                return Err(domain("alpha", t, "negative alpha must be an integer"));
            }
            Alpha::NegativeInteger((-v) as u32)
        } else {
            Alpha::Finite(v)
        };
        alpha.validate()?;
        Ok(alpha)
    }
}

/// Critical edge count `m_c = n alpha / (2 (alpha + 1))`; `n / 2` for `alpha = inf`.
pub fn m_crit(alpha: Alpha, n: f64) -> Result<f64, TheoryError> {
    match alpha {
        Alpha::Finite(a) if a > 0.0 => Ok(n * a / (2.0 * (a + 1.0))),
        Alpha::Finite(a) => Err(domain("alpha", a, "m_c is singular for alpha in {-1, 0}")),
        Alpha::Infinite => Ok(n / 2.0),
        Alpha::NegativeInteger(r) if r >= 2 => {
            let r = r as f64;
            Ok(n * r / (2.0 * (r - 1.0)))
        }
        Alpha::NegativeInteger(r) => Err(domain("alpha", -(r as i64), "m_c is singular for alpha in {-1, 0}")),
    }
}

/// Parameter of the finite-`n` degree law after `m` edges: `2m / (n alpha + 2m)`
/// (and `2m / (n r)` for `alpha = -r`, `0` in the Poisson limit).
pub fn p_edge(alpha: Alpha, n: f64, m: f64) -> f64 {
    match alpha {
        Alpha::Finite(a) => 2.0 * m / (n * a + 2.0 * m),
        Alpha::Infinite => 0.0,
        Alpha::NegativeInteger(r) => 2.0 * m / (n * r as f64),
    }
}

/// Finite-`n` degree law after `m` edges.
pub fn finite_degree_model(alpha: Alpha, n: f64, m: f64) -> DegreeModel {
    match alpha {
        Alpha::Finite(a) => DegreeModel::NegBinomial {
            shape: a,
            p: p_edge(alpha, n, m),
        },
        Alpha::Infinite => DegreeModel::Poisson { lambda: 2.0 * m / n },
        Alpha::NegativeInteger(r) => DegreeModel::Binomial {
            trials: r,
            p: p_edge(alpha, n, m),
        },
    }
}

/// Limit of `p_edge` at `m = m_c (1 + eps)`.
pub fn p_limit(alpha: Alpha, eps: f64) -> f64 {
    match alpha {
        Alpha::Finite(a) => (1.0 + eps) / (a + 2.0 + eps),
        Alpha::Infinite => 0.0,
        Alpha::NegativeInteger(r) => (1.0 + eps) / (r as f64 - 1.0),
    }
}

/// Limiting degree law at `m = m_c (1 + eps)`.
pub fn limit_degree_model(alpha: Alpha, eps: f64) -> Result<DegreeModel, TheoryError> {
    alpha.validate()?;
    if eps <= -1.0 {
        return Err(domain("eps", eps, "eps must exceed -1"));
    }
    Ok(match alpha {
        Alpha::Finite(a) => DegreeModel::NegBinomial {
            shape: a,
            p: p_limit(alpha, eps),
        },
        Alpha::Infinite => DegreeModel::Poisson { lambda: 1.0 + eps },
        Alpha::NegativeInteger(r) => {
            let p = p_limit(alpha, eps);
            if p > 1.0 {
                return Err(domain("eps", eps, "m_c (1 + eps) exceeds r n / 2 for alpha = -r"));
            }
            DegreeModel::Binomial { trials: r, p }
        }
    })
}

/// Molloy–Reed quantity `E D(D - 2)`.
pub fn mr_criterion(d: &DegreeModel) -> f64 {
    d.factorial_moment(2) - d.factorial_moment(1)
}

/// `2 E D / E D(D-1)(D-2)`, the prefactor of the critical-window largest component.
pub fn critical_window_constant(d: &DegreeModel) -> Result<f64, TheoryError> {
    let third = d.factorial_moment(3);
    if third <= 0.0 {
        return Err(domain("E D(D-1)(D-2)", third, "third factorial moment must be positive"));
    }
    Ok(2.0 * d.mean() / third)
}

/// Largest component predicted in the critical window, `constant * hat_mu`
/// with `hat_mu = sum_v d_v (d_v - 2)`.
pub fn critical_window_l1(d: &DegreeModel, hat_mu: f64) -> Result<f64, TheoryError> {
    Ok(critical_window_constant(d)? * hat_mu)
}

fn check_supercritical(alpha: Alpha, eps: f64) -> Result<(), TheoryError> {
    alpha.validate()?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(domain("eps", eps, "eps must be positive"));
    }
    if let Alpha::NegativeInteger(r) = alpha {
        if eps >= r as f64 - 2.0 {
            return Err(domain("eps", eps, "alpha = -r requires eps < r - 2"));
        }
    }
    Ok(())
}

/// `g(xi) - xi` written in `u = 1 - xi`, with its derivative in `u`.
/// `H(0) = 0`, `H'(0) = -eps` and the wanted root is the other zero in `(0, 1]`.
fn xi_residual(alpha: Alpha, eps: f64, u: f64) -> (f64, f64) {
    let psi = (1.0 + eps) * u;
    match alpha.value() {
        None => {
            let g = (-psi).exp();
            ((-psi).exp_m1() + u, 1.0 - (1.0 + eps) * g)
        }
        Some(a) => {
            let c = a + 1.0;
            let base = (psi / c).ln_1p();
            let g = (-c * base).exp();
            let value = (-c * base).exp_m1() + u;
            let deriv = 1.0 - (1.0 + eps) * g / (1.0 + psi / c);
            (value, deriv)
        }
    }
}

fn xi_map(alpha: Alpha, eps: f64, xi: f64) -> f64 {
    let (h, _) = xi_residual(alpha, eps, 1.0 - xi);
    // g(xi) = H(u) + xi
    h + xi
}

/// Unique root `xi in (0, 1)` of the branching fixed point, to absolute
/// accuracy below `1e-12`.
pub fn solve_xi(alpha: Alpha, eps: f64) -> Result<f64, TheoryError> {
    check_supercritical(alpha, eps)?;
    const EDGE: f64 = 1e-15;
    let f = |u: f64| xi_residual(alpha, eps, u);
    // H < 0 just right of u = 0 by convexity; H(1) = g(0) > 0 unless the root
    // sits below EDGE in xi.
    let (hi_val, _) = f(1.0 - EDGE);
    if hi_val <= 0.0 {
        // xi < 1e-15: g is nearly flat there, plain iteration contracts.
        let mut xi = 0.0;
        for _ in 0..100 {
            let next = xi_map(alpha, eps, xi);
            if next == xi {
                break;
            }
            xi = next;
        }
        return Ok(xi);
    }
    let u = roots::bisect_newton(f, EDGE, 1.0 - EDGE, 1e-16)
        .ok_or(TheoryError::Solver("no sign change bracketing xi"))?;
    let xi = 1.0 - u;
    if !(xi > 0.0 && xi < 1.0) {
        return Err(TheoryError::Solver("xi left (0, 1)"));
    }
    Ok(xi)
}

/// Giant-component fraction and the fixed point it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoSolution {
    pub xi: f64,
    /// `1 - xi^(a/(a+1))` (`1 - xi` for `a = inf`).
    pub rho: f64,
    /// `(1 - xi)(1 - (1 + eps) xi / (a + 1))`.
    pub rho_product: f64,
}

pub fn rho_solution(alpha: Alpha, eps: f64) -> Result<RhoSolution, TheoryError> {
    let xi = solve_xi(alpha, eps)?;
    let u = 1.0 - xi;
    let (rho, rho_product) = match alpha.value() {
        None => (u, u),
        Some(a) => {
            let power = -((a / (a + 1.0)) * (-u).ln_1p()).exp_m1();
            let product = u * (1.0 - (1.0 + eps) * xi / (a + 1.0));
            (power, product)
        }
    };
    Ok(RhoSolution { xi, rho, rho_product })
}

/// Limiting fraction of vertices in the giant at `m = m_c (1 + eps)`.
pub fn rho(alpha: Alpha, eps: f64) -> Result<f64, TheoryError> {
    Ok(rho_solution(alpha, eps)?.rho)
}

/// Leading coefficient of `psi = (1 + eps)(1 - xi)` as `eps -> 0`:
/// `psi = 2(a+1)/(a+2) eps + O(eps^2)`.
fn psi_slope(a: f64) -> f64 {
    2.0 * (a + 1.0) / (a + 2.0)
}

/// `lim rho(a, eps) / eps = 2a / (a + 2)`, equal to 2 for `a = inf`.
pub fn rho_slope(alpha: Alpha) -> Result<f64, TheoryError> {
    match alpha.value() {
        None => Ok(2.0),
        Some(a) if (-2.0..=0.0).contains(&a) => Err(domain("alpha", a, "slope undefined for alpha in [-2, 0]")),
        // rho = psi/(1+eps) * (a/(a+1) + O(eps))
        Some(a) => Ok(psi_slope(a) * a / (a + 1.0)),
    }
}

/// Pittel's `c*`: the root in `(0, c_alpha)` of
/// `x a^(a+1) / (a + x)^(a+2) = c a^(a+1) / (a + c)^(a+2)` for `c > c_alpha = a/(a+1)`.
pub fn pittel_cstar(alpha: f64, c: f64) -> Result<f64, TheoryError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain("alpha", alpha, "Pittel's c* needs finite alpha > 0"));
    }
    let c_alpha = alpha / (alpha + 1.0);
    if !(c > c_alpha) {
        return Err(domain("c", c, "c must exceed c_alpha = alpha/(alpha+1)"));
    }
    // log of the left-hand side without the constant alpha^(alpha+1)
    let log_phi = |x: f64| x.ln() - (alpha + 2.0) * (alpha + x).ln();
    let target = log_phi(c);
    let (lo, hi) = roots::bisect(|x| log_phi(x) - target, f64::MIN_POSITIVE, c_alpha, 1e-17, 4000)
        .ok_or(TheoryError::Solver("c* not bracketed"))?;
    Ok(0.5 * (lo + hi))
}

/// Giant fraction in Pittel's parametrisation, `1 - ((a + c*)/(a + c))^a`.
pub fn pittel_giant(alpha: f64, c: f64) -> Result<f64, TheoryError> {
    let cs = pittel_cstar(alpha, c)?;
    Ok(-(alpha * ((alpha + cs) / (alpha + c)).ln()).exp_m1())
}

/// Rate-equation time for `alpha = 1`: `t = (1 + n / (2m))^-1`.
pub fn bnk_time(n: f64, m: f64) -> Result<f64, TheoryError> {
    if !(m > 0.0) {
        return Err(domain("m", m, "m must be positive"));
    }
    Ok(1.0 / (1.0 + n / (2.0 * m)))
}

/// Small-`eps` giant fraction `3 (t - 1/3)`, clamped at zero below `t = 1/3`.
pub fn bnk_giant(t: f64) -> f64 {
    (3.0 * (t - 1.0 / 3.0)).max(0.0)
}

/// Blow-up time `t_c = 1 / (2 (1 + 1/alpha))` of the susceptibility.
pub fn susceptibility_blowup(alpha: Alpha) -> Result<f64, TheoryError> {
    match alpha {
        Alpha::Finite(a) if a > 0.0 => Ok(1.0 / (2.0 * (1.0 + 1.0 / a))),
        Alpha::Infinite => Ok(0.5),
        other => Err(domain("alpha", other, "susceptibility ODE needs alpha > 0")),
    }
}

/// `s(t) = (alpha - 2t) / (alpha - 2 (alpha + 1) t)`; `1 / (1 - 2t)` for `alpha = inf`.
pub fn susceptibility_closed(alpha: Alpha, t: f64) -> Result<f64, TheoryError> {
    let t_c = susceptibility_blowup(alpha)?;
    if t < 0.0 {
        return Err(domain("t", t, "t must be non-negative"));
    }
    if t >= t_c {
        return Err(TheoryError::BlowUp { t, t_c });
    }
    Ok(match alpha {
        Alpha::Finite(a) => (a - 2.0 * t) / (a - 2.0 * (a + 1.0) * t),
        _ => 1.0 / (1.0 - 2.0 * t),
    })
}

/// `s'(t) = 2 ((2 + alpha) s - 2)^2 / (2t + alpha)^2`; `2 s^2` for `alpha = inf`.
pub fn susceptibility_ode_rhs(alpha: Alpha, t: f64, s: f64) -> Result<f64, TheoryError> {
    match alpha {
        Alpha::Finite(a) if a > 0.0 => {
            let num = (2.0 + a) * s - 2.0;
            let den = 2.0 * t + a;
            Ok(2.0 * num * num / (den * den))
        }
        Alpha::Infinite => Ok(2.0 * s * s),
        other => Err(domain("alpha", other, "susceptibility ODE needs alpha > 0")),
    }
}

/// k-core emergence point in units of `n`, with the minimising `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KcoreThreshold {
    pub k: u32,
    pub c_k: f64,
    pub mu_star: f64,
}

fn kcore_tail_model(alpha: Alpha, mu: f64) -> DegreeModel {
    match alpha {
        Alpha::Finite(a) => DegreeModel::NegBinomial {
            shape: a + 1.0,
            p: mu / (a + mu),
        },
        _ => DegreeModel::Poisson { lambda: mu },
    }
}

/// `c_k = 1/2 inf_{mu > 0} mu / P(Z(mu) >= k - 1)` with
/// `Z(mu) ~ NB(alpha + 1, mu / (alpha + mu))` (`Poisson(mu)` for `alpha = inf`).
pub fn kcore_threshold(alpha: Alpha, k: u32) -> Result<KcoreThreshold, TheoryError> {
    if k < 2 {
        return Err(domain("k", k, "k must be at least 2"));
    }
    match alpha {
        Alpha::Finite(a) if a > 0.0 => {}
        Alpha::Infinite => {}
        other => return Err(domain("alpha", other, "k-core threshold needs alpha > 0")),
    }
    let objective = |log_mu: f64| {
        let mu = log_mu.exp();
        mu / kcore_tail_model(alpha, mu).sf(k as u64 - 1)
    };
    const GRID: usize = 200;
    let (lo, hi) = (1e-6f64.ln(), 1e3f64.ln());
    let step = (hi - lo) / (GRID - 1) as f64;
    let grid: Vec<f64> = (0..GRID).map(|i| lo + step * i as f64).collect();
    let best = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, objective(x)))
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(TheoryError::Solver("k-core objective not finite on the grid"))?
        .0;
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(GRID - 1)];
    let (x, fx) = roots::golden_section_min(objective, a, b, 1e-10);
    Ok(KcoreThreshold {
        k,
        c_k: 0.5 * fx,
        mu_star: x.exp(),
    })
}

/// Everything the theory engine predicts for one `(alpha, eps)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryPrediction {
    pub alpha: String,
    pub eps: f64,
    pub n: Option<f64>,
    /// `m_c / n`.
    pub m_c_over_n: f64,
    pub m_c: Option<f64>,
    /// Finite-`n` degree parameter at `m = m_c (1 + eps)`.
    pub p_n: Option<f64>,
    pub p_limit: f64,
    pub ed: f64,
    /// `E D (D - 2)` of the limiting degree law.
    pub mr_criterion: f64,
    pub xi: f64,
    pub rho: f64,
    pub rho_product: f64,
    pub rho_slope: f64,
    pub rho_linear: f64,
    pub critical_constant: Option<f64>,
    pub c_star: Option<f64>,
    pub pittel_giant: Option<f64>,
    pub bnk_t: Option<f64>,
    pub bnk_giant: Option<f64>,
    pub t_c: Option<f64>,
    pub c_k: Vec<KcoreThreshold>,
}

/// Assembles a [`TheoryPrediction`]. For `eps <= 0` the giant fraction is 0
/// and `xi = 1`. `c_k` stays empty for negative `alpha`.
pub fn predict(alpha: Alpha, eps: f64, n: Option<f64>, ks: &[u32]) -> Result<TheoryPrediction, TheoryError> {
    alpha.validate()?;
    let d = limit_degree_model(alpha, eps)?;
    let m_c_over_n = m_crit(alpha, 1.0)?;
    let (xi, rho, rho_product) = if eps > 0.0 {
        let s = rho_solution(alpha, eps)?;
        (s.xi, s.rho, s.rho_product)
    } else {
        (1.0, 0.0, 0.0)
    };
    let slope = rho_slope(alpha)?;
    let critical_constant = limit_degree_model(alpha, 0.0)
        .ok()
        .and_then(|d0| critical_window_constant(&d0).ok());
    let (c_star, pittel) = match alpha {
        Alpha::Finite(a) if eps > 0.0 => {
            let c = (1.0 + eps) * a / (a + 1.0);
            (pittel_cstar(a, c).ok(), pittel_giant(a, c).ok())
        }
        _ => (None, None),
    };
    let m_over_n = m_c_over_n * (1.0 + eps);
    let (bnk_t, bnk_g) = match alpha {
        Alpha::Finite(1.0) => {
            let t = bnk_time(1.0, m_over_n)?;
            (Some(t), Some(bnk_giant(t)))
        }
        _ => (None, None),
    };
    let c_k = match alpha {
        Alpha::NegativeInteger(_) => Vec::new(),
        _ => ks
            .iter()
            .map(|&k| kcore_threshold(alpha, k))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(TheoryPrediction {
        alpha: alpha.to_string(),
        eps,
        n,
        m_c_over_n,
        m_c: n.map(|n| m_c_over_n * n),
        p_n: n.map(|n| p_edge(alpha, n, m_over_n * n)),
        p_limit: p_limit(alpha, eps),
        ed: d.mean(),
        mr_criterion: mr_criterion(&d),
        xi,
        rho,
        rho_product,
        rho_slope: slope,
        rho_linear: slope * eps.max(0.0),
        critical_constant,
        c_star,
        pittel_giant: pittel,
        bnk_t,
        bnk_giant: bnk_g,
        t_c: susceptibility_blowup(alpha).ok(),
        c_k,
    })
}
