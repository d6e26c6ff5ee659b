//! Global canonical heights of rational points and of divisors on `P^1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::archplaces::{GreenEvaluator, DEFAULT_DEPTH};
use crate::dynmodel::{bad_reduction_primes, increment_bounds, MapModel};
use crate::error::{Error, Result};
use crate::exact::arith::{ln_abs, remove_factor, scaled_f64};
use crate::exact::form::HomogeneousForm;
use crate::exact::mahler::mahler_measure_estimate;
use crate::exact::resultant::sylvester_resultants_shared;
use crate::finiteplaces::{finite_local_height, rational_to_f64};
use crate::point::{normalize, ProjectivePoint};

/// Coordinates above this many bits end the exact phase of the orbit.
pub const EXACT_ORBIT_BITS: u64 = 4096;
pub const MAX_EXACT_STEPS: u32 = 64;

/// Largest coefficient size (bits) the pushforward chain may reach.
pub const PUSHFORWARD_BIT_BUDGET: u64 = 1 << 21;

/// Relative rounding allowance for the floating-point Green tail.
const ROUNDOFF: f64 = 1e-13;

/// A height in nats, split as `arch + sum c_p log p + unfactored`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightValue {
    pub value: f64,
    pub error_bound: f64,
    pub arch: f64,
    pub finite: BTreeMap<u64, BigRational>,
    /// Finite contribution of resultant factors that could not be split
    /// into primes.
    pub unfactored: f64,
    pub convention: Option<String>,
}

impl HeightValue {
    fn zero() -> Self {
        HeightValue {
            value: 0.0,
            error_bound: 0.0,
            arch: 0.0,
            finite: BTreeMap::new(),
            unfactored: 0.0,
            convention: None,
        }
    }

    pub fn finite_value(&self) -> f64 {
        self.finite
            .iter()
            .map(|(p, c)| rational_to_f64(c) * (*p as f64).ln())
            .sum::<f64>()
            + self.unfactored
    }

    /// `self + k * other`.
    fn add_scaled(&mut self, other: &HeightValue, k: u64) {
        let kf = k as f64;
        self.value += kf * other.value;
        self.error_bound += kf * other.error_bound;
        self.arch += kf * other.arch;
        self.unfactored += kf * other.unfactored;
        let kq = BigRational::from_integer(BigInt::from(k));
        for (p, c) in &other.finite {
            let e = self.finite.entry(*p).or_insert_with(BigRational::zero);
            *e += &kq * c;
        }
        self.finite.retain(|_, c| !c.is_zero());
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "value": format!("{:.15}", self.value),
            "error_bound": format!("{:.3e}", self.error_bound),
            "arch": format!("{:.15}", self.arch),
            "finite": self
                .finite
                .iter()
                .map(|(p, c)| serde_json::json!({"prime": p, "c": c.to_string()}))
                .collect::<Vec<_>>(),
        });
        if self.unfactored != 0.0 {
            v["unfactored"] = format!("{:.15}", self.unfactored).into();
        }
        if let Some(c) = &self.convention {
            v["convention"] = c.clone().into();
        }
        v
    }
}

/// `log max |x_i|` of the coprime integer representative.
pub fn naive_height(point: &ProjectivePoint) -> f64 {
    point.log_sup()
}

/// Floats proportional to `x` with sup norm 1.
fn unit_floats(x: &[BigInt]) -> Vec<Complex64> {
    let bits = x.iter().map(|c| c.bits()).max().unwrap_or(0);
    let e = bits.saturating_sub(60);
    let v: Vec<f64> = x.iter().map(|c| scaled_f64(c, e)).collect();
    let n = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    v.iter().map(|c| Complex64::new(c / n, 0.0)).collect()
}

/// `h(P)` for a rational point.
///
/// The orbit is followed exactly while coordinates stay below
/// [`EXACT_ORBIT_BITS`], then continued with the archimedean Green function.
/// Bad primes contribute their exact local heights; factors of the
/// resultant that could not be split contribute through the gcds of the
/// exact phase, with tail `log C / (d^K (d - 1))`.
pub fn canonical_height_point(model: &MapModel, point: &ProjectivePoint, target_error: f64) -> Result<HeightValue> {
    if point.dim() != model.n() {
        return Err(Error::DegreeMismatch(format!(
            "point in P^{} for a map of P^{}",
            point.dim(),
            model.n()
        )));
    }
    let d = model.degree();
    let df = d as f64;
    let report = bad_reduction_primes(model);
    let primes: Vec<u64> = report.bad_primes.iter().filter_map(|(p, _)| p.to_u64()).collect();
    let mut leftover: BigInt = report.cofactor.clone().map(BigInt::from).unwrap_or_else(BigInt::one);
    for (p, _) in report.bad_primes.iter().filter(|(p, _)| p.to_u64().is_none()) {
        leftover *= BigInt::from(p.clone());
    }
    let known_primes: Vec<BigInt> = primes.iter().map(|&p| BigInt::from(p)).collect();

    // exact phase: arch increments and the unfactored part of the gcds
    let mut x = point.coords().to_vec();
    let mut arch = ln_abs(x.iter().max_by_key(|c| c.magnitude()).unwrap());
    let mut unfactored = 0.0;
    let mut scale = 1.0;
    let mut k = 0;
    while k < MAX_EXACT_STEPS && x.iter().map(|c| c.bits()).max().unwrap() <= EXACT_ORBIT_BITS {
        let y = model.eval(&x);
        let sup_x = x.iter().map(ln_abs).fold(f64::NEG_INFINITY, f64::max);
        let sup_y = y.iter().map(ln_abs).fold(f64::NEG_INFINITY, f64::max);
        let (next, g) = normalize(y).expect("regular lift");
        scale /= df;
        arch += scale * (sup_y - df * sup_x);
        if !leftover.is_one() && !g.is_one() {
            let mut rest = g.clone();
            for p in &known_primes {
                remove_factor(&mut rest, p);
            }
            unfactored -= scale * ln_abs(&rest);
        }
        x = next;
        k += 1;
    }
    // Green tail from x_K
    let ev = GreenEvaluator::new(model);
    let y = unit_floats(&x);
    let mut depth = DEFAULT_DEPTH;
    let mut tail = ev.green(&y, depth);
    while scale * tail.tail_bound > target_error / 4.0 && depth < 200 {
        depth *= 2;
        tail = ev.green(&y, depth);
    }
    arch += scale * tail.value;
    let mut error = scale * (tail.tail_bound + ROUNDOFF * depth as f64 * (1.0 + tail.rate_bound)) + ROUNDOFF * arch.abs();
    if !leftover.is_one() {
        error += scale * ln_abs(&leftover) / (df - 1.0);
    }

    // bad primes
    let per_prime = if primes.is_empty() { 0.0 } else { target_error / (2.0 * primes.len() as f64) };
    let mut finite = BTreeMap::new();
    for &p in &primes {
        let lp = (p as f64).ln();
        let tgt = BigRational::from_float((per_prime / lp).max(1e-30)).unwrap();
        let h = finite_local_height(model, p, point, &tgt);
        let c = if h.exact {
            -h.lower_bound.clone()
        } else {
            error += rational_to_f64(&h.width()) / 2.0 * lp;
            -(&h.lower_bound + &h.upper_bound) / BigRational::from_integer(2.into())
        };
        if !c.is_zero() {
            finite.insert(p, c);
        }
    }
    let mut out = HeightValue {
        value: 0.0,
        error_bound: error,
        arch,
        finite,
        unfactored,
        convention: None,
    };
    out.value = out.arch + out.finite_value();
    Ok(out)
}

/// `phi_* D` for `D = div_0(F)`: the primitive binary form
/// `G(Y0, Y1) = Res_x(F, Y1 p0 - Y0 p1)`, obtained by evaluating at
/// `m + 1` points `(j : 1)` and interpolating. The result has positive
/// leading coefficient in `x`.
pub fn pushforward_divisor(model: &MapModel, f: &HomogeneousForm) -> Result<HomogeneousForm> {
    pushforward_with(model, f, None)
}

/// Pushforward whose content is removed prime by prime. For primitive `F`
/// the content of the image only involves primes of bad reduction, so
/// `content_primes` must list all of them.
fn pushforward_with(
    model: &MapModel,
    f: &HomogeneousForm,
    content_primes: Option<&[BigInt]>,
) -> Result<HomogeneousForm> {
    model.require_dim_one("pushforward of divisors")?;
    if f.num_vars() != 2 || f.is_zero() {
        return Err(Error::invalid("pushforward needs a nonzero binary form"));
    }
    let m = f.degree() as usize;
    if m == 0 {
        return Ok(HomogeneousForm::from_binary_i64(0, &[1]));
    }
    let (p0, p1) = (&model.lift()[0], &model.lift()[1]);
    let pencils: Vec<HomogeneousForm> = (0..=m as i64)
        .map(|j| p0.add(&p1.scale(&BigInt::from(-j))))
        .collect::<Result<_>>()?;
    let values = sylvester_resultants_shared(f, &pencils)?;
    let coeffs = interpolate(&values);
    let g = HomogeneousForm::from_binary_coeffs(m as u32, &coeffs);
    if g.is_zero() {
        return Err(Error::Numeric {
            message: "pushforward resultant vanished identically".into(),
            residual: 0.0,
        });
    }
    let g = match content_primes {
        Some(primes) => strip_primes(&g, primes),
        None => g.primitive_part()?,
    };
    let lead_negative = g.binary_coeffs().iter().rev().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
    Ok(if lead_negative { g.scale(&BigInt::from(-1)) } else { g })
}

/// Divides out the largest power of each prime dividing every coefficient.
fn strip_primes(g: &HomogeneousForm, primes: &[BigInt]) -> HomogeneousForm {
    let coeffs = g.binary_coeffs();
    let mut divisor = BigInt::one();
    for q in primes {
        let mut v = u32::MAX;
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            let mut e = 0;
            let mut x = c.clone();
            while e < v {
                let (quot, rem) = x.div_rem(q);
                if !rem.is_zero() {
                    break;
                }
                x = quot;
                e += 1;
            }
            v = v.min(e);
            if v == 0 {
                break;
            }
        }
        if v != u32::MAX {
            divisor *= q.pow(v);
        }
    }
    if divisor.is_one() {
        return g.clone();
    }
    g.map_coeffs(|c| c / &divisor)
}

/// Integer coefficients (by power of `t`) of the polynomial of degree
/// `<= m` taking `values[j]` at `t = j`: forward differences on the
/// falling-factorial basis, scaled by `m!` to stay in the integers.
fn interpolate(values: &[BigInt]) -> Vec<BigInt> {
    let n = values.len();
    let mut diff = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            diff[i] = &diff[i] - &diff[i - 1];
        }
    }
    let m = n.saturating_sub(1);
    let factorial = |k: usize| (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let scale = factorial(m);
    // sum diff[i] * (m! / i!) * t (t - 1) ... (t - i + 1)
    let mut coeffs = vec![BigInt::zero(); n];
    let mut basis = vec![BigInt::one()];
    for (i, c) in diff.iter().enumerate() {
        let w = c * (&scale / factorial(i));
        for (k, b) in basis.iter().enumerate() {
            coeffs[k] += &w * b;
        }
        let mut next = vec![BigInt::zero(); basis.len() + 1];
        for (k, b) in basis.iter().enumerate() {
            next[k + 1] += b;
            next[k] -= b * BigInt::from(i);
        }
        basis = next;
    }
    coeffs
        .into_iter()
        .map(|c| {
            debug_assert!((&c % &scale).is_zero());
            c / &scale
        })
        .collect()
}

/// Default number of pushforward steps, about 14 doublings of the degree.
pub fn default_pushforward_depth(d: u32) -> u32 {
    (14.0 / (d as f64).log2()).ceil() as u32
}

fn form_height(g: &HomogeneousForm) -> Result<(f64, f64)> {
    let poly = crate::dynmodel::dehomogenize(g);
    if poly.degree() == Some(0) {
        return Ok((ln_abs(&poly.coeff(0)), 0.0));
    }
    let est = mahler_measure_estimate(&poly, 1e-9)?;
    Ok((est.value, est.error))
}

/// `h(D)` for `D = div_0(F)` with multiplicity, as `d^-k M(phi^k_* F)` with
/// `M` the Mahler measure. The error bound is
/// `deg F * C / d^k` with `C` the certified bound on `|h - h_naive|`.
pub fn canonical_height_divisor(model: &MapModel, f: &HomogeneousForm, depth: u32) -> Result<HeightValue> {
    model.require_dim_one("divisor heights")?;
    if f.num_vars() != 2 || f.is_zero() {
        return Err(Error::invalid("divisor heights need a nonzero binary form"));
    }
    if !f.content()?.is_one() {
        return Err(Error::invalid("F must be primitive"));
    }
    let d = model.degree() as f64;
    let m = f.degree() as f64;
    let c = increment_bounds(model)?.height_difference() / (d - 1.0);
    let reduction = bad_reduction_primes(model);
    let primes: Option<Vec<BigInt>> = reduction
        .cofactor
        .is_none()
        .then(|| reduction.bad_primes.iter().map(|(p, _)| BigInt::from(p.clone())).collect());
    let mut g = f.clone();
    for k in 0..depth {
        if g.max_coeff_bits() * model.degree() as u64 > PUSHFORWARD_BIT_BUDGET {
            return Err(Error::Budget(format!(
                "pushforward step {} would exceed {PUSHFORWARD_BIT_BUDGET} coefficient bits",
                k + 1
            )));
        }
        g = pushforward_with(model, &g, primes.as_deref())?;
    }
    let (h, err) = form_height(&g)?;
    let scale = d.powi(-(depth as i32));
    let mut out = HeightValue::zero();
    out.value = scale * h;
    out.arch = out.value;
    out.error_bound = scale * (m * c + err) + ROUNDOFF * out.value.abs();
    out.convention = Some("sum over the points of D with multiplicity; not divided by deg F".into());
    Ok(out)
}

/// `sum mult * h(P)` over rational points.
pub fn canonical_height_divisor_split(
    model: &MapModel,
    points: &[(ProjectivePoint, usize)],
    target_error: f64,
) -> Result<HeightValue> {
    let total: usize = points.iter().map(|(_, m)| m).sum::<usize>().max(1);
    let each = target_error / total as f64;
    let parts: Vec<HeightValue> = points
        .par_iter()
        .map(|(p, _)| canonical_height_point(model, p, each))
        .collect::<Result<_>>()?;
    let mut out = HeightValue::zero();
    for ((_, mult), h) in points.iter().zip(&parts) {
        out.add_scaled(h, *mult as u64);
    }
    out.convention = Some("sum over the points of D with multiplicity; not divided by deg F".into());
    Ok(out)
}

/// `|h(phi(P)) - d h(P)|` and the combined error bound, for property checks.
pub fn functional_equation_gap(model: &MapModel, point: &ProjectivePoint, target_error: f64) -> Result<(f64, f64)> {
    let h = canonical_height_point(model, point, target_error)?;
    let image = crate::dynmodel::apply_map(model, point);
    let hi = canonical_height_point(model, &image, target_error)?;
    let d = model.degree() as f64;
    Ok(((hi.value - d * h.value).abs(), hi.error_bound + d * h.error_bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::divisor_points;
    use crate::exact::form::default_var_names;
    use crate::exact::parse::parse_binary_form;

    fn pt(s: &str) -> ProjectivePoint {
        s.parse().unwrap()
    }

    fn form(s: &str) -> HomogeneousForm {
        parse_binary_form(s, &default_var_names(2)).unwrap()
    }

    fn basilica() -> MapModel {
        MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap()
    }

    fn phi2() -> MapModel {
        MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap()
    }

    #[test]
    fn content_from_bad_primes_matches_gcd() {
        let model = MapModel::binary(&[3, 0, 1], &[3, 1, 0]).unwrap();
        let primes = [BigInt::from(3)];
        for model in [phi2(), model] {
            let ps: Vec<BigInt> = bad_reduction_primes(&model).small_primes().into_iter().map(BigInt::from).collect();
            let mut a = form("x^2 - 5*x*y + 6*y^2");
            let mut b = a.clone();
            for _ in 0..6 {
                a = pushforward_divisor(&model, &a).unwrap();
                b = pushforward_with(&model, &b, Some(&ps)).unwrap();
                assert_eq!(a, b);
            }
        }
        let g = HomogeneousForm::from_binary_i64(2, &[9, 27, 18]);
        assert_eq!(strip_primes(&g, &primes), HomogeneousForm::from_binary_i64(2, &[1, 3, 2]));
    }

    #[test]
    fn naive_heights() {
        assert!((naive_height(&pt("4:6")) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(naive_height(&pt("1:0")), 0.0);
        assert!((naive_height(&pt("5:7:1")) - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn point_heights() {
        let sq = MapModel::power_map(1, 2);
        let h = canonical_height_point(&sq, &pt("2:3"), 1e-10).unwrap();
        assert!((h.value - 3f64.ln()).abs() < 1e-12, "{}", h.value);
        let h = canonical_height_point(&basilica(), &pt("0:1"), 1e-10).unwrap();
        assert!(h.value.abs() < 1e-12);
        let h = canonical_height_point(&phi2(), &pt("1:0"), 1e-10).unwrap();
        assert!(h.value.abs() < 1e-12, "{}", h.value);
        assert!((h.arch - 2f64.ln()).abs() < 1e-12);
        assert_eq!(h.finite[&2], BigRational::from_integer((-1).into()));
        let cube = MapModel::power_map(2, 3);
        let h = canonical_height_point(&cube, &pt("5:7:1"), 1e-10).unwrap();
        assert!((h.value - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn functional_equation() {
        for p in ["1:1", "3:2", "-5:7", "1:0"] {
            let (gap, bound) = functional_equation_gap(&phi2(), &pt(p), 1e-9).unwrap();
            assert!(gap <= bound.max(1e-9), "{p}: {gap} > {bound}");
        }
    }

    #[test]
    fn pushforwards() {
        let sq = MapModel::power_map(1, 2);
        assert_eq!(pushforward_divisor(&sq, &form("x - 4*y")).unwrap(), form("x - 16*y"));
        assert_eq!(pushforward_divisor(&basilica(), &form("x - 2*y")).unwrap(), form("x - 3*y"));
        assert_eq!(pushforward_divisor(&basilica(), &form("y")).unwrap(), form("y"));
        let g = pushforward_divisor(&basilica(), &form("(x - 2*y)*(x + y)*(2*x - y)")).unwrap();
        let pts: Vec<String> = divisor_points(&g).unwrap().rational.iter().map(|(p, _)| p.to_string()).collect();
        assert_eq!(pts, vec!["0:1", "3:-4", "3:1"]);
    }

    #[test]
    fn interpolation() {
        // t^2 - 3t + 5 at 0, 1, 2
        let c = interpolate(&[5.into(), 3.into(), 3.into()]);
        assert_eq!(c, vec![BigInt::from(5), BigInt::from(-3), BigInt::from(1)]);
    }

    #[test]
    fn divisor_heights() {
        let sq = MapModel::power_map(1, 2);
        let h = canonical_height_divisor(&sq, &form("x^2 - x*y - y^2"), 3).unwrap();
        assert!((h.value - 0.481211825059603).abs() < 1e-9, "{}", h.value);
        let h = canonical_height_divisor(&sq, &form("(x - 2*y)*(x - 3*y)"), 2).unwrap();
        assert!((h.value - 6f64.ln()).abs() < 1e-9);
        let h = canonical_height_divisor(&basilica(), &form("x"), 8).unwrap();
        assert!(h.value.abs() <= h.error_bound);
    }

    #[test]
    fn split_oracle() {
        let sq = MapModel::power_map(1, 2);
        let h = canonical_height_divisor_split(&sq, &[(pt("2:1"), 1), (pt("3:1"), 1)], 1e-10).unwrap();
        assert!((h.value - 6f64.ln()).abs() < 1e-12);
        let h = canonical_height_divisor_split(&basilica(), &[(pt("0:1"), 1)], 1e-10).unwrap();
        assert!(h.value.abs() < 1e-12);
        let split = canonical_height_divisor_split(&phi2(), &[(pt("1:1"), 1)], 1e-10).unwrap();
        let push = canonical_height_divisor(&phi2(), &form("x - y"), 14).unwrap();
        assert!((split.value - push.value).abs() <= push.error_bound + split.error_bound);
        assert!((split.value - push.value).abs() < 1e-4, "{} {}", split.value, push.value);
    }
}
