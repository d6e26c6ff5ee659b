use num_traits::Zero;

use super::arith::ln_abs;
use super::poly::IntPolynomial;
use super::roots::log_polar_roots;
use super::Estimate;
use crate::error::{Error, Result};

/// Coefficients above this many bits skip the squarefree split.
const SQUAREFREE_BITS: u64 = 4096;

fn log_mahler_squarefree(f: &IntPolynomial, tolerance: f64) -> Result<Estimate> {
    let lead = f.leading().expect("nonzero polynomial");
    let mut value = ln_abs(lead);
    let mut error = 0.0;
    if f.degree().unwrap_or(0) == 0 {
        return Ok(Estimate { value, error });
    }
    for (log_mod, _, rel) in log_polar_roots(f, tolerance * 1e-3)? {
        if log_mod > -rel {
            value += log_mod.max(0.0);
            error += rel.min(1.0);
        }
    }
    Ok(Estimate { value, error })
}

/// Logarithmic Mahler measure `log|lead| + sum log+ |root|` in nats.
///
/// Repeated factors are split off first (for moderately sized inputs) so
/// that root clusters do not limit the accuracy. Fails with a numeric
/// error when the a-posteriori error estimate exceeds `tolerance`.
pub fn mahler_measure(f: &IntPolynomial, tolerance: f64) -> Result<Estimate> {
    let est = mahler_measure_estimate(f, tolerance)?;
    if !(est.error <= tolerance) {
        return Err(Error::Numeric {
            message: "Mahler measure error estimate exceeds the tolerance".into(),
            residual: est.error,
        });
    }
    Ok(est)
}

/// As [`mahler_measure`], but returns the estimate whatever its error.
pub fn mahler_measure_estimate(f: &IntPolynomial, tolerance: f64) -> Result<Estimate> {
    if f.is_zero() {
        return Err(Error::invalid("Mahler measure of the zero polynomial"));
    }
    let bits = f.coeffs().iter().map(|c| c.bits()).max().unwrap_or(0);
    if f.degree() == Some(0) || bits > SQUAREFREE_BITS {
        return log_mahler_squarefree(f, tolerance);
    }
    let content = f.content()?;
    let mut total = Estimate {
        value: ln_abs(&content),
        error: 0.0,
    };
    for (part, mult) in f.squarefree_decomposition() {
        let e = log_mahler_squarefree(&part, tolerance)?;
        total.value += mult as f64 * e.value;
        total.error += mult as f64 * e.error;
    }
    debug_assert!(!content.is_zero());
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: &[i64]) -> f64 {
        mahler_measure(&IntPolynomial::from_i64(c), 1e-12).unwrap().value
    }

    #[test]
    fn examples() {
        assert!((m(&[-2, 1]) - 2f64.ln()).abs() < 1e-14);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m(&[-1, -1, 1]) - phi.ln()).abs() < 1e-14);
        assert!(m(&[1, 0, 1]).abs() < 1e-14);
    }

    #[test]
    fn repeated_roots_and_content() {
        // 4 (x - 3)^3 (x^2 + 1)
        let f = IntPolynomial::from_i64(&[-3, 1]);
        let g = &(&(&f * &f) * &f) * &IntPolynomial::from_i64(&[1, 0, 1]);
        let g = g.scale(&4.into());
        let v = mahler_measure(&g, 1e-12).unwrap();
        assert!((v.value - (4f64.ln() + 3.0 * 3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn lehmer() {
        let l = m(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!((l - 1.176280818259917_f64.ln()).abs() < 1e-12);
    }
}
