//! Scalar bracketing solvers.

/// Bisection on `[lo, hi]` for a function with `f(lo) < 0 < f(hi)` or the
/// reverse; stops when the bracket is narrower than `xtol` (or cannot be
/// split further). Returns the final bracket.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some((lo, lo));
    }
    if fhi == 0.0 {
        return Some((hi, hi));
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    let lo_negative = flo < 0.0;
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some((mid, mid));
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// Bisection followed by Newton polish restricted to the final bracket.
/// `f` returns `(value, derivative)`.
pub fn bisect_newton<F>(f: F, lo: f64, hi: f64, xtol: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (a, b) = bisect(|x| f(x).0, lo, hi, xtol, 2000)?;
    let mut x = 0.5 * (a + b);
    for _ in 0..8 {
        let (v, d) = f(x);
        if v == 0.0 || d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - v / d;
        if !(next >= a && next <= b) {
            break;
        }
        if next == x {
            break;
        }
        x = next;
    }
    Some(x)
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let (a, b) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((0.5 * (a + b) - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn newton_polish_converges() {
        let x = bisect_newton(|x| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 1e-6).unwrap();
        assert!((x.cos() - x).abs() < 1e-15);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-13);
    }
}
