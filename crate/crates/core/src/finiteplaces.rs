//! Local theory at a prime `p`: the valuation drop `S_v`, the local height
//! `h_p = lim S_v(P, p_k) / d^k`, p-adic roots and the finite term `E`.
//!
//! Local heights are computed on p-adic balls. A ball is a chart index
//! `j`, a center with `x_j = 1` known modulo `p^N`, and the precision `N`.
//! One step of the map sends every point of a ball to a new ball with the
//! same valuation drop, as long as the drop is smaller than the precision
//! certified by the Taylor expansion at the center. When a ball lands inside
//! an earlier one the drop sequence is eventually periodic and the limit
//! is an exact rational.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::divisor::divisor_points;
use crate::dynmodel::{bad_reduction_primes, MapModel};
use crate::error::{Error, Result};
use crate::exact::arith::{factor, is_prime_u64, mod_floor, mod_inverse, valuation_int, Valuation};
use crate::exact::form::HomogeneousForm;
use crate::exact::poly::IntPolynomial;
use crate::exact::resultant::monomials;
use crate::point::ProjectivePoint;

/// Residues are enumerated by brute force up to this prime.
pub const RESIDUE_ENUMERATION_BOUND: u64 = 2_000_000;

/// Steps beyond the certified depth spent looking for an orbit cycle.
const CYCLE_SEARCH_STEPS: u32 = 64;

fn pow_p(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn val(p: u64, x: &BigInt) -> Valuation {
    valuation_int(p, x)
}

/// `S_v(P)`: the valuation drop of the lift at a rational point.
pub fn s_v(model: &MapModel, p: u64, point: &ProjectivePoint) -> u64 {
    let v = model
        .eval(point.coords())
        .iter()
        .map(|c| val(p, c))
        .min()
        .unwrap();
    v.finite().expect("regular lift does not vanish") as u64
}

/// `S_v` from an arbitrary integer representative, with the full
/// definition `v(Phi(x)) - v(x^d)`.
pub fn s_v_representative(model: &MapModel, p: u64, x: &[BigInt]) -> Result<i64> {
    let vx = x.iter().map(|c| val(p, c)).min().unwrap();
    let vx = vx.finite().ok_or_else(|| Error::invalid("zero vector"))?;
    let vphi = model.eval(x).iter().map(|c| val(p, c)).min().unwrap();
    let vphi = vphi.finite().expect("regular lift does not vanish");
    Ok(vphi - model.degree() as i64 * vx)
}

/// `R_v`: the valuation of the resultant, an upper bound for `S_v` at
/// every point (the resultant times `T_i^D` lies in the ideal of the lift).
pub fn r_v_bound(model: &MapModel, p: u64) -> u64 {
    val(p, model.resultant()).finite().expect("nonzero resultant") as u64
}

/// A p-adic ball of points `x` with `x_chart = 1` and `x = center mod p^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Ball {
    chart: usize,
    center: Vec<BigInt>,
    prec: u32,
}

impl Ball {
    /// Normalizes a vector with a unit coordinate modulo `p^prec`.
    fn from_vector(v: &[BigInt], p: u64, prec: u32) -> Option<Ball> {
        let m = pow_p(p, prec);
        let pb = BigInt::from(p);
        let chart = v.iter().position(|c| !(c % &pb).is_zero())?;
        let inv = mod_inverse(&mod_floor(&v[chart], &m), &m)?;
        let center = v.iter().map(|c| mod_floor(&(c * &inv), &m)).collect();
        Some(Ball { chart, center, prec })
    }

    fn contains(&self, other: &Ball, p: u64) -> bool {
        if self.chart != other.chart || other.prec < self.prec {
            return false;
        }
        let m = pow_p(p, self.prec);
        self.center
            .iter()
            .zip(&other.center)
            .all(|(a, b)| mod_floor(&(a - b), &m).is_zero())
    }
}

/// The lift together with its Hasse derivatives in every chart.
struct BallMap<'a> {
    model: &'a MapModel,
    p: u64,
    /// per chart: (order, derivative of each lift entry)
    derivatives: Vec<Vec<(u32, Vec<HomogeneousForm>)>>,
}

impl<'a> BallMap<'a> {
    fn new(model: &'a MapModel, p: u64) -> Self {
        let nv = model.n() + 1;
        let d = model.degree();
        let derivatives = (0..nv)
            .map(|chart| {
                let mut out = Vec::new();
                for order in 1..=d {
                    for alpha in monomials(nv, order) {
                        if alpha[chart] != 0 {
                            continue;
                        }
                        let forms = model.lift().iter().map(|f| f.hasse_derivative(&alpha)).collect();
                        out.push((order, forms));
                    }
                }
                out
            })
            .collect();
        BallMap {
            model,
            p,
            derivatives,
        }
    }

    /// Image of a ball: the certified drop `S` and the image ball with
    /// precision capped at `cap`. `None` when the drop is not determined.
    fn step(&self, b: &Ball, cap: u32) -> Option<(u32, Ball)> {
        let p = self.p;
        let phi = self.model.eval(&b.center);
        let s = phi.iter().map(|c| val(p, c)).min().unwrap().finite()?;
        // Phi(center + p^N u) = Phi(center) mod p^P
        let mut prec = i64::MAX;
        for (order, forms) in &self.derivatives[b.chart] {
            let base = *order as i64 * b.prec as i64;
            if base >= prec {
                continue;
            }
            for f in forms {
                if let Some(v) = val(p, &f.eval(&b.center)).finite() {
                    prec = prec.min(base + v);
                }
            }
        }
        if prec == i64::MAX {
            prec = s + cap as i64 + 1;
        }
        if s >= prec {
            return None;
        }
        let new_prec = ((prec - s) as u32).min(cap);
        let ps = pow_p(p, s as u32);
        let v: Vec<BigInt> = phi.iter().map(|c| c / &ps).collect();
        Some((s as u32, Ball::from_vector(&v, p, new_prec)?))
    }
}

/// A local height in valuation units (multiply by `log p` for nats).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHeightEstimate {
    pub value: f64,
    pub lower_bound: BigRational,
    pub upper_bound: BigRational,
    pub depth: u32,
    pub exact: bool,
}

impl LocalHeightEstimate {
    fn exact(v: BigRational, depth: u32) -> Self {
        LocalHeightEstimate {
            value: rational_to_f64(&v),
            lower_bound: v.clone(),
            upper_bound: v,
            depth,
            exact: true,
        }
    }

    fn bounded(lower: BigRational, upper: BigRational, depth: u32) -> Self {
        let mid = (&lower + &upper) / BigRational::from_integer(2.into());
        LocalHeightEstimate {
            value: rational_to_f64(&mid),
            lower_bound: lower,
            upper_bound: upper,
            depth,
            exact: false,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.upper_bound - &self.lower_bound
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.exact.then_some(&self.lower_bound)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": format!("{:.15}", self.value),
            "lower_bound": self.lower_bound.to_string(),
            "upper_bound": self.upper_bound.to_string(),
            "depth": self.depth,
            "exact": self.exact,
        })
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let ln = crate::exact::arith::ln_abs(q.numer()) - crate::exact::arith::ln_abs(q.denom());
    let s = if q.is_negative() { -1.0 } else { 1.0 };
    s * ln.exp()
}

/// Drop sequence of a ball orbit, and the cycle start when one was found.
struct Orbit {
    drops: Vec<u32>,
    cycle: Option<usize>,
}

fn run_orbit(map: &BallMap, start: Ball, cap: u32, max_steps: u32, stop_at_cycle: bool) -> Orbit {
    let mut history = vec![start];
    let mut drops = Vec::new();
    for _ in 0..max_steps {
        let cur = history.last().unwrap();
        let Some((s, next)) = map.step(cur, cap) else {
            break;
        };
        drops.push(s);
        if stop_at_cycle {
            if let Some(i) = history.iter().position(|b| b.contains(&next, map.p)) {
                return Orbit {
                    drops,
                    cycle: Some(i),
                };
            }
        }
        history.push(next);
    }
    Orbit { drops, cycle: None }
}

fn partial_sum(drops: &[u32], d: u32) -> BigRational {
    let db = BigInt::from(d);
    let mut acc = BigRational::zero();
    let mut pow = db.clone();
    for &s in drops {
        acc += BigRational::new(BigInt::from(s), pow.clone());
        pow *= &db;
    }
    acc
}

/// Exact limit when drops `i..` repeat with period `drops.len() - i`.
fn periodic_limit(drops: &[u32], i: usize, d: u32) -> BigRational {
    let prefix = partial_sum(&drops[..i], d);
    let period = partial_sum(drops, d) - &prefix;
    let dl = BigRational::from_integer(num_traits::pow(BigInt::from(d), drops.len() - i));
    prefix + period * &dl / (dl - BigRational::one())
}

/// Smallest depth `K` with `R / (d^K (d - 1)) <= target`.
fn depth_for(r: u64, d: u32, target: &BigRational) -> u32 {
    if !target.is_positive() {
        return 2048;
    }
    let mut k = 0u32;
    let mut tail = BigRational::new(BigInt::from(r), BigInt::from(d - 1));
    let db = BigRational::from_integer(BigInt::from(d));
    while &tail > target && k < 4096 {
        tail /= &db;
        k += 1;
    }
    k
}

fn estimate_from_orbit(orbit: &Orbit, r: u64, d: u32) -> LocalHeightEstimate {
    let k = orbit.drops.len() as u32;
    if let Some(i) = orbit.cycle {
        return LocalHeightEstimate::exact(periodic_limit(&orbit.drops, i, d), k);
    }
    let lower = partial_sum(&orbit.drops, d);
    let tail = BigRational::new(
        BigInt::from(r),
        num_traits::pow(BigInt::from(d), k as usize) * BigInt::from(d - 1),
    );
    let upper = &lower + tail;
    LocalHeightEstimate::bounded(lower, upper, k)
}

/// The sequence `h_k = S_v(P, p_k) / d^k` for `k = 1..=k_max`, computed
/// along the orbit modulo a power of `p`; `p_k` is never expanded.
pub fn local_height_sequence(model: &MapModel, p: u64, point: &ProjectivePoint, k_max: u32) -> Vec<BigRational> {
    let r = r_v_bound(model, p);
    if r == 0 {
        return vec![BigRational::zero(); k_max as usize];
    }
    let w = (r as u32 + 1) + r as u32 * k_max + 1;
    let map = BallMap::new(model, p);
    let start = Ball::from_vector(point.coords(), p, w).expect("coprime coordinates");
    let orbit = run_orbit(&map, start, w, k_max, false);
    assert_eq!(orbit.drops.len(), k_max as usize, "precision suffices by construction");
    let d = model.degree();
    (1..=k_max as usize).map(|k| partial_sum(&orbit.drops[..k], d)).collect()
}

/// `h_p(P)` at a rational point, to within `target_error` (valuation
/// units), exact whenever the ball orbit closes up.
pub fn finite_local_height(
    model: &MapModel,
    p: u64,
    point: &ProjectivePoint,
    target_error: &BigRational,
) -> LocalHeightEstimate {
    let r = r_v_bound(model, p);
    if r == 0 {
        return LocalHeightEstimate::exact(BigRational::zero(), 0);
    }
    let d = model.degree();
    let need = depth_for(r, d, target_error);
    let map = BallMap::new(model, p);
    let limit = (r as u32 + 1) + r as u32 * (need + CYCLE_SEARCH_STEPS) + 1;
    let mut w = (2 * (r as u32 + 1) + 4).max(16).min(limit);
    let mut best: Option<LocalHeightEstimate> = None;
    loop {
        let start = Ball::from_vector(point.coords(), p, w).expect("coprime coordinates");
        let orbit = run_orbit(&map, start, w, need + CYCLE_SEARCH_STEPS, true);
        let est = estimate_from_orbit(&orbit, r, d);
        if est.exact {
            return est;
        }
        let done = orbit.drops.len() as u32 >= need;
        if best.as_ref().is_none_or(|b| est.depth > b.depth) {
            best = Some(est);
        }
        if done || w >= limit {
            return best.unwrap();
        }
        w = (w * 4).min(limit);
    }
}

/// `h_p` at a point known only modulo `p^precision` (for instance a
/// Hensel-lifted root). Fails when the precision runs out before the
/// certified depth is reached.
pub fn padic_local_height(
    model: &MapModel,
    p: u64,
    approx: &[BigInt],
    precision: u32,
    target_error: &BigRational,
) -> Result<LocalHeightEstimate> {
    let r = r_v_bound(model, p);
    if r == 0 {
        return Ok(LocalHeightEstimate::exact(BigRational::zero(), 0));
    }
    let d = model.degree();
    let need = depth_for(r, d, target_error);
    let map = BallMap::new(model, p);
    let start = Ball::from_vector(approx, p, precision)
        .ok_or_else(|| Error::invalid("p-adic point has no unit coordinate"))?;
    let orbit = run_orbit(&map, start, precision, need + CYCLE_SEARCH_STEPS, true);
    let est = estimate_from_orbit(&orbit, r, d);
    if est.exact || est.depth >= need {
        Ok(est)
    } else {
        Err(Error::Numeric {
            message: format!(
                "p-adic precision {precision} exhausted after {} of {need} steps at p = {p}",
                est.depth
            ),
            residual: rational_to_f64(&est.width()),
        })
    }
}

/// Simple p-adic roots of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct HenselRoots {
    pub precision: u32,
    /// Roots in `Z_p`, as integers in `[0, p^precision)`.
    pub roots: Vec<BigInt>,
    /// Roots of negative valuation, given as `w = 1/z` with `w = 0 mod p`.
    pub inverse_roots: Vec<BigInt>,
    /// Residues mod `p` that are multiple roots of the reduction (`None`
    /// stands for the residue at infinity).
    pub unsupported: Vec<Option<u64>>,
    /// Number of roots not accounted for: they lie outside `Q_p` or
    /// inside an unsupported residue class.
    pub missing: usize,
}

impl HenselRoots {
    pub fn is_complete(&self) -> bool {
        self.unsupported.is_empty() && self.missing == 0
    }
}

fn residue_roots(f: &IntPolynomial, p: u64) -> Result<Vec<u64>> {
    if p > RESIDUE_ENUMERATION_BOUND {
        return Err(Error::UnsupportedRootGeometry {
            prime: p,
            detail: format!("residue enumeration is limited to p <= {RESIDUE_ENUMERATION_BOUND}"),
        });
    }
    let pb = BigInt::from(p);
    let cs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| mod_floor(c, &pb).to_u64().unwrap())
        .collect();
    Ok((0..p)
        .filter(|&r| {
            let v = cs
                .iter()
                .rev()
                .fold(0u128, |acc, &c| (acc * r as u128 + c as u128) % p as u128);
            v == 0
        })
        .collect())
}

fn newton_lift(f: &IntPolynomial, df: &IntPolynomial, r: u64, p: u64, precision: u32) -> BigInt {
    let m = pow_p(p, precision);
    let mut x = BigInt::from(r);
    let mut k = 1u32;
    while k < precision {
        k = (2 * k).min(precision);
        let mk = pow_p(p, k);
        let inv = mod_inverse(&mod_floor(&df.eval(&x), &mk), &mk).expect("simple root");
        x = mod_floor(&(&x - f.eval(&x) * inv), &mk);
    }
    mod_floor(&x, &m)
}

/// Lifts every simple root of `f mod p` to a root modulo `p^precision`;
/// roots of negative valuation come from the reversed polynomial. Multiple
/// residues are flagged instead of silently dropped.
pub fn hensel_rational_roots(f: &IntPolynomial, p: u64, precision: u32) -> Result<HenselRoots> {
    if f.is_zero() {
        return Err(Error::invalid("Hensel lifting of the zero polynomial"));
    }
    if !is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let precision = precision.max(1);
    let f = f.primitive_part()?;
    let deg = f.degree().unwrap();
    let pb = BigInt::from(p);
    let df = f.derivative();
    let mut out = HenselRoots {
        precision,
        roots: Vec::new(),
        inverse_roots: Vec::new(),
        unsupported: Vec::new(),
        missing: 0,
    };
    if deg == 0 {
        return Ok(out);
    }
    for r in residue_roots(&f, p)? {
        if (df.eval(&BigInt::from(r)) % &pb).is_zero() {
            out.unsupported.push(Some(r));
        } else {
            out.roots.push(newton_lift(&f, &df, r, p, precision));
        }
    }
    // roots near infinity: w = 1/z with w = 0 mod p
    if (f.leading().unwrap() % &pb).is_zero() {
        let g = f.reversed();
        let dg = g.derivative();
        if (dg.eval(&BigInt::zero()) % &pb).is_zero() {
            out.unsupported.push(None);
        } else {
            out.inverse_roots.push(newton_lift(&g, &dg, 0, p, precision));
        }
    }
    out.missing = deg - out.roots.len() - out.inverse_roots.len();
    out.roots.sort();
    Ok(out)
}

/// How `E_finite` treats roots it cannot place p-adically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EMode {
    /// Fail with an unsupported-root-geometry error.
    Strict,
    /// Return the partial sum and mark the prime unresolved.
    Residual,
}

/// Contribution `c_p log p` of one prime.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTerm {
    pub prime: u64,
    pub c: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
    pub exact: bool,
    /// Set when part of the divisor could not be evaluated at this prime.
    pub unresolved: Option<String>,
}

impl PrimeTerm {
    pub fn error_bound(&self) -> f64 {
        let half = (&self.upper - &self.lower) / BigRational::from_integer(2.into());
        rational_to_f64(&half) * (self.prime as f64).ln()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "prime": self.prime,
            "c": self.c.to_string(),
            "exact": self.exact,
            "error_bound": format!("{:.3e}", self.error_bound()),
        })
    }
}

/// An exact combination `sum c_p log p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormalLogSum {
    /// Nonzero coefficients only.
    pub terms: BTreeMap<u64, BigRational>,
    pub error_bound: f64,
    pub details: Vec<PrimeTerm>,
}

impl FormalLogSum {
    pub fn value(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| rational_to_f64(c) * (*p as f64).ln())
            .sum::<f64>()
            + 0.0
    }

    pub fn is_resolved(&self) -> bool {
        self.details.iter().all(|t| t.unresolved.is_none())
    }

    pub fn unresolved_primes(&self) -> Vec<u64> {
        self.details
            .iter()
            .filter(|t| t.unresolved.is_some())
            .map(|t| t.prime)
            .collect()
    }

    pub fn coefficient(&self, p: u64) -> BigRational {
        self.terms.get(&p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": format!("{:.15}", self.value()),
            "error_bound": format!("{:.3e}", self.error_bound),
            "terms": self.details.iter().map(PrimeTerm::to_json).collect::<Vec<_>>(),
            "unresolved": self.unresolved_primes(),
        })
    }
}

/// Primes that can contribute to `E`: bad primes and primes dividing the
/// content of `F`.
pub fn relevant_primes(model: &MapModel, content: &BigInt) -> Result<Vec<u64>> {
    let report = bad_reduction_primes(model);
    if report.cofactor.is_some() {
        return Err(Error::capability("resultant could not be fully factored"));
    }
    let mut primes: Vec<u64> = Vec::new();
    for (p, _) in &report.bad_primes {
        primes.push(p.to_u64().ok_or_else(|| Error::capability("bad prime exceeds 64 bits"))?);
    }
    let cf = factor(content.magnitude(), 100_000, 1 << 20);
    if cf.cofactor.is_some() {
        return Err(Error::capability("content of F could not be fully factored"));
    }
    for (p, _) in cf.factors {
        primes.push(p.to_u64().ok_or_else(|| Error::capability("prime exceeds 64 bits"))?);
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// `E(F, finite)` on `P^1`: for each relevant prime,
/// `c_p = deg(F) h_p(infinity) - sum_{P in D} h_p(P) - v_p(F)`, which is
/// the sign that makes `h(D) = sum_arch + E + deg(F) h(infinity)` hold.
/// `target_error` is in nats for the whole sum.
pub fn e_finite(model: &MapModel, f: &HomogeneousForm, mode: EMode, target_error: f64) -> Result<FormalLogSum> {
    model.require_dim_one("E(F, finite)")?;
    let div = divisor_points(f)?;
    let primes = relevant_primes(model, &div.content)?;
    let m = div.degree;
    let infinity = ProjectivePoint::infinity(1);
    let d = model.degree();
    let mut out = FormalLogSum::default();
    let n_points = div.rational.len() + div.remainder.degree().unwrap_or(0) + 1;
    for &p in &primes {
        let lp = (p as f64).ln();
        let budget = target_error / (primes.len() as f64 * lp * (n_points as f64 + m as f64));
        let tgt = BigRational::from_float(budget.max(1e-300)).unwrap_or_else(|| BigRational::new(1.into(), 1000000.into()));
        let vf = BigRational::from_integer(BigInt::from(val(p, &div.content).finite().unwrap()));
        let mut lower = -vf.clone();
        let mut upper = -vf;
        let mut exact = true;
        let mut unresolved = None;
        let mut add = |est: &LocalHeightEstimate, coeff: i64| {
            let c = BigRational::from_integer(coeff.into());
            if coeff >= 0 {
                lower += &c * &est.lower_bound;
                upper += &c * &est.upper_bound;
            } else {
                lower += &c * &est.upper_bound;
                upper += &c * &est.lower_bound;
            }
            exact &= est.exact;
        };
        if r_v_bound(model, p) > 0 {
            let h_inf = finite_local_height(model, p, &infinity, &tgt);
            add(&h_inf, m as i64);
            for (pt, mult) in &div.rational {
                let h = finite_local_height(model, p, pt, &tgt);
                add(&h, -(*mult as i64));
            }
            if div.remainder.degree().unwrap_or(0) > 0 {
                let r = r_v_bound(model, p) as u32;
                let need = depth_for(r as u64, d, &tgt);
                let precision = (r + 1) + r * (need + CYCLE_SEARCH_STEPS) + 8;
                let mut problems = Vec::new();
                for (part, mult) in div.remainder.squarefree_decomposition() {
                    let roots = hensel_rational_roots(&part, p, precision)?;
                    if !roots.is_complete() {
                        problems.push(format!(
                            "{} root(s) of {} outside Q_p or in multiple residues",
                            part.degree().unwrap() - roots.roots.len() - roots.inverse_roots.len(),
                            part
                        ));
                    }
                    let vectors = roots
                        .roots
                        .iter()
                        .map(|z| vec![z.clone(), BigInt::one()])
                        .chain(roots.inverse_roots.iter().map(|w| vec![BigInt::one(), w.clone()]));
                    for v in vectors {
                        match padic_local_height(model, p, &v, precision, &tgt) {
                            Ok(h) => add(&h, -(mult as i64)),
                            Err(e) => problems.push(e.to_string()),
                        }
                    }
                }
                if !problems.is_empty() {
                    if mode == EMode::Strict {
                        return Err(Error::UnsupportedRootGeometry {
                            prime: p,
                            detail: problems.join("; "),
                        });
                    }
                    unresolved = Some(problems.join("; "));
                }
            }
        }
        let c = if exact {
            lower.clone()
        } else {
            (&lower + &upper) / BigRational::from_integer(2.into())
        };
        let term = PrimeTerm {
            prime: p,
            c: c.clone(),
            lower,
            upper,
            exact,
            unresolved,
        };
        out.error_bound += term.error_bound();
        if !c.is_zero() {
            out.terms.insert(p, c);
        }
        out.details.push(term);
    }
    Ok(out)
}
