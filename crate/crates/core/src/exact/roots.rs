//! Simultaneous polynomial root finding (Aberth-Ehrlich).
//!
//! Integer polynomials whose coefficients span more than the `f64` range
//! are split along the Newton polygon of `log2 |a_i|` into windows of
//! roots with comparable modulus; each window is rescaled and solved on
//! its own. Initial guesses are deterministic (equally spaced on a circle
//! with a fixed angular offset), so results are reproducible bit for bit.

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::arith::scaled_f64;
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 2000;

/// Fixed angular offset of the initial circle, in radians.
const INITIAL_ANGLE: f64 = 0.4;

/// Slope gap (in bits) above which two Newton-polygon edges are solved
/// as separate windows.
const WINDOW_GAP_BITS: f64 = 64.0;

/// A root together with an inclusion-radius estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEstimate {
    pub root: Complex64,
    pub radius: f64,
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth-Ehrlich iteration on a polynomial with complex coefficients,
/// `coeffs[i]` multiplying `z^i`, leading coefficient nonzero.
pub fn aberth(coeffs: &[Complex64], tolerance: f64) -> Result<Vec<RootEstimate>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 || !lead.norm().is_finite() {
        return Err(Error::Numeric {
            message: "leading coefficient is zero or not finite".into(),
            residual: f64::NAN,
        });
    }
    if n == 1 {
        let r = -coeffs[0] / lead;
        return Ok(vec![RootEstimate { root: r, radius: 0.0 }]);
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // radius: geometric mean of root moduli when the constant term is
    // nonzero, Cauchy bound otherwise
    let a0 = monic[0].norm();
    let cauchy = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = if a0 > 0.0 {
        a0.powf(1.0 / n as f64).min(cauchy)
    } else {
        0.5 * cauchy
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + INITIAL_ANGLE;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    let eps = tolerance.max(4.0 * f64::EPSILON);
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(&monic, z[k]);
            if p.norm() == 0.0 {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::zero()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let w = if denom.norm() == 0.0 || !denom.norm().is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() <= eps * (1.0 + z[k].norm()) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // Weierstrass inclusion radii: n |p(z_k)| / |prod_{j != k} (z_k - z_j)|
    let mut out = Vec::with_capacity(n);
    let mut worst = 0.0f64;
    for k in 0..n {
        let (p, _) = horner(&monic, z[k]);
        let prod: Complex64 = (0..n)
            .filter(|&j| j != k)
            .map(|j| z[k] - z[j])
            .fold(Complex64::new(1.0, 0.0), |a, b| a * b);
        let w = if prod.norm() == 0.0 {
            p.norm().powf(1.0 / n as f64)
        } else {
            p.norm() / prod.norm()
        };
        let radius = n as f64 * w;
        worst = worst.max(radius / (1.0 + z[k].norm()));
        out.push(RootEstimate { root: z[k], radius });
    }
    let converged_all = done.iter().all(|&d| d);
    if !converged_all || !worst.is_finite() {
        // accept stalled iterations whose backward error is at rounding level
        let backward = z
            .iter()
            .map(|&zk| {
                let (p, _) = horner(&monic, zk);
                let scale: f64 = monic
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.norm() * zk.norm().powi(i as i32))
                    .sum();
                p.norm() / scale.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max);
        if !(backward <= 1e3 * f64::EPSILON) {
            return Err(Error::Numeric {
                message: format!("Aberth iteration did not converge in {MAX_ITERATIONS} steps"),
                residual: backward,
            });
        }
    }
    Ok(out)
}

/// log2 |c| for an integer coefficient (finite, c nonzero).
fn log2_abs(c: &num_bigint::BigInt) -> f64 {
    super::arith::ln_abs(c) / std::f64::consts::LN_2
}

/// Windows of the Newton polygon: index ranges `[lo, hi]` and a log2
/// scale at which the window's roots have modulus about one.
fn newton_windows(f: &IntPolynomial) -> Vec<(usize, usize, f64)> {
    let pts: Vec<(usize, f64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, log2_abs(c)))
        .collect();
    // upper convex hull
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (i1, l1) = hull[hull.len() - 2];
            let (i2, l2) = hull[hull.len() - 1];
            let cross = (i2 as f64 - i1 as f64) * (p.1 - l1) - (l2 - l1) * (p.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // edges: (lo, hi, slope); roots of modulus 2^(-slope)
    let edges: Vec<(usize, usize, f64)> = hull
        .windows(2)
        .map(|w| (w[0].0, w[1].0, (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64))
        .collect();
    let mut windows: Vec<(usize, usize, f64)> = Vec::new();
    let mut cur: Option<(usize, usize, f64, f64, usize)> = None; // lo, hi, weighted slope sum, last slope, count
    for (lo, hi, s) in edges {
        match cur.as_mut() {
            Some(c) if (c.3 - s).abs() < WINDOW_GAP_BITS => {
                c.1 = hi;
                c.2 += s * (hi - lo) as f64;
                c.3 = s;
                c.4 += hi - lo;
            }
            _ => {
                if let Some(c) = cur.take() {
                    windows.push((c.0, c.1, -c.2 / c.4 as f64));
                }
                cur = Some((lo, hi, s * (hi - lo) as f64, s, hi - lo));
            }
        }
    }
    if let Some(c) = cur {
        windows.push((c.0, c.1, -c.2 / c.4 as f64));
    }
    windows
}

/// Roots of an integer polynomial in log-polar form: `(log |r|, arg r)`
/// with an inclusion radius relative to `|r|`. Zero roots are reported with
/// `log |r| = -inf`. Works for coefficients far outside the `f64` range.
pub fn log_polar_roots(f: &IntPolynomial, tolerance: f64) -> Result<Vec<(f64, f64, f64)>> {
    let deg = f
        .degree()
        .ok_or_else(|| Error::invalid("roots of the zero polynomial"))?;
    let mut out = Vec::with_capacity(deg);
    let low = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    for _ in 0..low {
        out.push((f64::NEG_INFINITY, 0.0, 0.0));
    }
    for (lo, hi, scale_log2) in newton_windows(f) {
        // u = x / 2^scale ; coefficient of u^(k-lo) is a_k 2^(scale k)
        let top = (lo..=hi)
            .filter(|&k| !f.coeffs()[k].is_zero())
            .map(|k| log2_abs(&f.coeffs()[k]) + scale_log2 * k as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let coeffs: Vec<Complex64> = (lo..=hi)
            .map(|k| {
                let c = &f.coeffs()[k];
                if c.is_zero() {
                    return Complex64::zero();
                }
                let lg = log2_abs(c) + scale_log2 * k as f64 - top;
                let mag = if lg < -1070.0 { 0.0 } else { lg.exp2() };
                Complex64::new(if c.is_negative() { -mag } else { mag }, 0.0)
            })
            .collect();
        if coeffs[hi - lo].norm() == 0.0 {
            return Err(Error::Numeric {
                message: "Newton window lost its leading coefficient".into(),
                residual: f64::NAN,
            });
        }
        for est in aberth(&coeffs, tolerance)? {
            let m = est.root.norm();
            if m == 0.0 {
                out.push((f64::NEG_INFINITY, 0.0, est.radius));
                continue;
            }
            let log_mod = m.ln() + scale_log2 * std::f64::consts::LN_2;
            out.push((log_mod, est.root.arg(), est.radius / m));
        }
    }
    Ok(out)
}

/// All complex roots with multiplicity, sorted lexicographically by
/// `(re, im)`.
pub fn complex_roots(f: &IntPolynomial, tolerance: f64) -> Result<Vec<Complex64>> {
    let deg = f
        .degree()
        .ok_or_else(|| Error::invalid("roots of the zero polynomial"))?;
    if deg == 0 {
        return Err(Error::invalid("complex_roots needs degree >= 1"));
    }
    let small = f.coeffs().iter().all(|c| c.bits() < 900);
    let mut roots: Vec<Complex64> = if small {
        let low = f.coeffs().iter().take_while(|c| c.is_zero()).count();
        let coeffs: Vec<Complex64> = f.coeffs()[low..]
            .iter()
            .map(|c| Complex64::new(scaled_f64(c, 0), 0.0))
            .collect();
        let mut r = vec![Complex64::zero(); low];
        r.extend(aberth(&coeffs, tolerance)?.into_iter().map(|e| e.root));
        r
    } else {
        let mut r = Vec::with_capacity(deg);
        for (lm, arg, _) in log_polar_roots(f, tolerance)? {
            if lm > 700.0 {
                return Err(Error::capability("root modulus outside the floating-point range"));
            }
            r.push(if lm == f64::NEG_INFINITY {
                Complex64::zero()
            } else {
                Complex64::from_polar(lm.exp(), arg)
            });
        }
        r
    };
    sort_roots(&mut roots);
    Ok(roots)
}

pub(crate) fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn quadratic_examples() {
        let r = complex_roots(&IntPolynomial::from_i64(&[-1, 0, 1]), 1e-14).unwrap();
        assert!(close(r[0], Complex64::new(-1.0, 0.0), 1e-12));
        assert!(close(r[1], Complex64::new(1.0, 0.0), 1e-12));
        let r = complex_roots(&IntPolynomial::from_i64(&[-1, -1, 1]), 1e-14).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(r[0], Complex64::new(1.0 - phi, 0.0), 1e-12));
        assert!(close(r[1], Complex64::new(phi, 0.0), 1e-12));
    }

    #[test]
    fn zero_roots_with_multiplicity() {
        let r = complex_roots(&IntPolynomial::from_i64(&[0, 0, 0, 1]), 1e-14).unwrap();
        assert_eq!(r, vec![Complex64::zero(); 3]);
    }

    #[test]
    fn deterministic() {
        let f = IntPolynomial::from_i64(&[3, -1, 4, 1, -5, 9]);
        let a = complex_roots(&f, 1e-14).unwrap();
        let b = complex_roots(&f, 1e-14).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn huge_coefficients_split_into_windows() {
        // (x - 2^3000)(x - 3)(x + 1/2 scaled): 2x^3 ... use (x - 2^3000)(x - 3)(2x + 1)
        let big = BigInt::from(2).pow(3000);
        let f = IntPolynomial::new(vec![-big.clone(), BigInt::from(1)])
            * IntPolynomial::from_i64(&[-3, 1])
            * IntPolynomial::from_i64(&[1, 2]);
        let mut lp = log_polar_roots(&f, 1e-14).unwrap();
        lp.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert!((lp[0].0 - 0.5f64.ln()).abs() < 1e-12);
        assert!((lp[1].0 - 3f64.ln()).abs() < 1e-12);
        assert!((lp[2].0 - 3000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
