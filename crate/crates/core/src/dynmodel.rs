//! Self-maps of `P^n` given by an integer lift, with reduction data.

use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::arith::{factor, gcd_all, ln_abs};
use crate::exact::form::{default_var_names, HomogeneousForm};
use crate::exact::parse::parse_form;
use crate::exact::poly::IntPolynomial;
use crate::exact::resultant::{macaulay_dimension, resultant, MACAULAY_MAX_DIM};
use crate::point::{normalize, ProjectivePoint};

/// Largest number of monomials per form that [`iterate_lift`] will build.
pub const MAX_ITERATE_TERMS: usize = 200_000;

/// Default prime bound for enumerating indeterminacy points.
pub const ENUMERATION_BOUND: u64 = 97;

/// Default number of iterates examined by [`check_negativity_conditions`].
pub const DEFAULT_NEGATIVITY_DEPTH: u32 = 4;

/// A degree-`d` self-map of `P^n` given by a validated integer lift.
#[derive(Debug, Clone, PartialEq)]
pub struct MapModel {
    n: usize,
    degree: u32,
    lift: Vec<HomogeneousForm>,
    variables: Vec<String>,
    resultant: BigInt,
}

/// Serialized model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: usize,
    pub degree: u32,
    pub variables: Vec<String>,
    pub lift: Vec<String>,
}

/// Dehomogenized first-chart polynomial `f(x, 1)` of a binary form.
pub(crate) fn dehomogenize(f: &HomogeneousForm) -> IntPolynomial {
    IntPolynomial::new(f.binary_coeffs())
}

/// Describes a common zero of two binary forms when it is rational.
fn common_zero_hint(f: &HomogeneousForm, g: &HomogeneousForm) -> String {
    let d = f.degree() as usize;
    let (pf, pg) = (dehomogenize(f), dehomogenize(g));
    let at_infinity = pf.degree().is_none_or(|e| e < d) && pg.degree().is_none_or(|e| e < g.degree() as usize);
    if at_infinity {
        return "common zero (1:0)".into();
    }
    let h = pf.gcd(&pg);
    if h.degree() == Some(1) {
        let p = ProjectivePoint::new(vec![-h.coeff(0), h.coeff(1)]).expect("nonzero");
        return format!("common zero ({p})");
    }
    format!("common factor {}", h.display_in("x"))
}

/// Validates a lift: `n + 1` forms in `n + 1` variables, one common degree
/// `d >= 2`, jointly primitive coefficients and nonzero resultant.
pub fn validate_model(lift: Vec<HomogeneousForm>, variables: Option<Vec<String>>) -> Result<MapModel> {
    if lift.len() < 2 {
        return Err(Error::invalid("a lift needs at least two forms"));
    }
    let nv = lift.len();
    let n = nv - 1;
    if let Some(f) = lift.iter().find(|f| f.num_vars() != nv) {
        return Err(Error::invalid(format!(
            "form in {} variables in a lift of {} forms",
            f.num_vars(),
            nv
        )));
    }
    let degree = lift[0].degree();
    if lift.iter().any(|f| f.degree() != degree) {
        let degs: Vec<String> = lift.iter().map(|f| f.degree().to_string()).collect();
        return Err(Error::DegreeMismatch(format!("lift degrees {}", degs.join(", "))));
    }
    if degree < 2 {
        return Err(Error::invalid("degree must be at least 2"));
    }
    let content = gcd_all(lift.iter().flat_map(|f| f.terms().values()));
    if content.is_zero() {
        return Err(Error::NotRegular("every form of the lift is zero".into()));
    }
    if !content.is_one() {
        return Err(Error::invalid(format!(
            "lift coefficients share the factor {content}; divide it out"
        )));
    }
    let variables = variables.unwrap_or_else(|| default_var_names(nv));
    if variables.len() != nv {
        return Err(Error::invalid(format!(
            "{} variable names for {} coordinates",
            variables.len(),
            nv
        )));
    }
    if n >= 2 && macaulay_dimension(nv, degree) > MACAULAY_MAX_DIM {
        return Err(Error::capability(format!(
            "resultant for n = {n}, d = {degree} exceeds the supported Macaulay size"
        )));
    }
    let res = resultant(&lift)?;
    if res.is_zero() {
        let hint = if n == 1 {
            common_zero_hint(&lift[0], &lift[1])
        } else {
            "the forms have a common projective zero".into()
        };
        return Err(Error::NotRegular(hint));
    }
    Ok(MapModel {
        n,
        degree,
        lift,
        variables,
        resultant: res,
    })
}

impl MapModel {
    /// Parses and validates a model from polynomial strings.
    pub fn from_strings(lift: &[&str], variables: Option<Vec<String>>) -> Result<Self> {
        let vars = variables.unwrap_or_else(|| default_var_names(lift.len()));
        let forms = lift
            .iter()
            .map(|s| parse_form(s, &vars))
            .collect::<Result<Vec<_>>>()?;
        validate_model(forms, Some(vars))
    }

    /// Binary model from coefficient lists (`c[i]` on `x^i y^(d-i)`).
    pub fn binary(p0: &[i64], p1: &[i64]) -> Result<Self> {
        let d = (p0.len().max(p1.len()) - 1) as u32;
        validate_model(
            vec![
                HomogeneousForm::from_binary_i64(d, p0),
                HomogeneousForm::from_binary_i64(d, p1),
            ],
            None,
        )
    }

    /// `(x_0^d : ... : x_n^d)`.
    pub fn power_map(n: usize, d: u32) -> Self {
        let lift = (0..=n)
            .map(|i| {
                let mut e = vec![0; n + 1];
                e[i] = d;
                HomogeneousForm::monomial(e, BigInt::one())
            })
            .collect();
        validate_model(lift, None).expect("power map is regular")
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        if file.lift.len() != file.n + 1 {
            return Err(Error::invalid(format!(
                "n = {} needs {} lift entries, found {}",
                file.n,
                file.n + 1,
                file.lift.len()
            )));
        }
        let lift: Vec<&str> = file.lift.iter().map(String::as_str).collect();
        let model = Self::from_strings(&lift, Some(file.variables.clone()))?;
        if model.degree != file.degree {
            return Err(Error::DegreeMismatch(format!(
                "declared degree {} but the lift has degree {}",
                file.degree, model.degree
            )));
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("model JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            n: self.n,
            degree: self.degree,
            variables: self.variables.clone(),
            lift: self.lift.iter().map(|f| f.display_with(&self.variables)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn lift(&self) -> &[HomogeneousForm] {
        &self.lift
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn resultant(&self) -> &BigInt {
        &self.resultant
    }

    pub(crate) fn require_dim_one(&self, what: &str) -> Result<()> {
        if self.n != 1 {
            return Err(Error::capability(format!("{what} is only available on P^1")));
        }
        Ok(())
    }

    /// The lift evaluated at an integer vector.
    pub fn eval(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.lift.iter().map(|f| f.eval(x)).collect()
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.lift.iter().map(|f| f.eval_complex(x)).collect()
    }

    /// Lift coefficients as floats, for the fast complex evaluator.
    pub(crate) fn float_lift(&self) -> Vec<Vec<(Vec<u32>, f64)>> {
        self.lift
            .iter()
            .map(|f| {
                f.terms()
                    .iter()
                    .map(|(e, c)| (e.clone(), c.to_f64().unwrap_or(f64::INFINITY)))
                    .collect()
            })
            .collect()
    }
}

/// Returns `p_k`, the `k`-th iterate of the lift, by repeated substitution
/// `p_{k,i} = p_{k-1,i}(p_0, ..., p_n)`.
pub fn iterate_lift(model: &MapModel, k: u32) -> Result<Vec<HomogeneousForm>> {
    iterate_lift_with_budget(model, k, MAX_ITERATE_TERMS)
}

/// [`iterate_lift`] with an explicit cap on the monomial count of `p_k`.
pub fn iterate_lift_with_budget(model: &MapModel, k: u32, max_terms: usize) -> Result<Vec<HomogeneousForm>> {
    if k == 0 {
        return Err(Error::invalid("iterate index must be positive"));
    }
    let deg = (model.degree as u128).checked_pow(k).filter(|&d| d < 1 << 40);
    let deg = deg.ok_or_else(|| Error::Budget(format!("degree {}^{k} is too large", model.degree)))?;
    // number of monomials of degree deg in n + 1 variables
    let mut terms: u128 = 1;
    for i in 1..=model.n as u128 {
        terms = terms.saturating_mul(deg + i) / i;
    }
    if terms > max_terms as u128 {
        return Err(Error::Budget(format!(
            "p_{k} could have {terms} monomials per form (budget {max_terms})"
        )));
    }
    let mut cur = model.lift.clone();
    for _ in 1..k {
        cur = cur
            .iter()
            .map(|f| f.compose(&model.lift))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(cur)
}

/// One step of the map on a rational point, renormalized.
pub fn apply_map(model: &MapModel, point: &ProjectivePoint) -> ProjectivePoint {
    apply_map_with_gcd(model, point).0
}

/// As [`apply_map`], also returning the gcd removed from `Phi(x)`.
pub fn apply_map_with_gcd(model: &MapModel, point: &ProjectivePoint) -> (ProjectivePoint, BigInt) {
    assert_eq!(point.dim(), model.n, "point dimension does not match the model");
    let (v, g) = normalize(model.eval(point.coords()))
        .expect("a regular lift does not vanish at a rational point");
    (ProjectivePoint::new(v).expect("nonzero"), g)
}

/// Factorization of the resultant and the resulting bad primes.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub resultant: BigInt,
    pub bad_primes: Vec<(BigUint, u32)>,
    /// Composite part that could not be factored within the budget.
    pub cofactor: Option<BigUint>,
    /// Indeterminacy points of the reduction, for enumerable primes.
    pub indeterminacy: Vec<(u64, Vec<Vec<u64>>)>,
}

impl ReductionReport {
    pub fn good_everywhere(&self) -> bool {
        self.bad_primes.is_empty() && self.cofactor.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "resultant": self.resultant.to_string(),
            "bad_primes": self.bad_primes.iter()
                .map(|(p, e)| serde_json::json!({"prime": p.to_string(), "multiplicity": e}))
                .collect::<Vec<_>>(),
            "cofactor": self.cofactor.as_ref().map(|c| c.to_string()),
            "indeterminacy": self.indeterminacy.iter()
                .map(|(p, pts)| serde_json::json!({"prime": p, "points": pts}))
                .collect::<Vec<_>>(),
        })
    }

    /// Bad primes that fit in a machine word.
    pub fn small_primes(&self) -> Vec<u64> {
        self.bad_primes.iter().filter_map(|(p, _)| p.to_u64()).collect()
    }
}

/// Factors the stored resultant: trial division to `trial_bound`, then
/// Pollard-Brent. Also enumerates indeterminacy points for primes up to
/// [`ENUMERATION_BOUND`] when `n <= 2`.
pub fn bad_reduction_primes(model: &MapModel) -> ReductionReport {
    bad_reduction_primes_with(model, 100_000, 1 << 20)
}

pub fn bad_reduction_primes_with(model: &MapModel, trial_bound: u64, rho_budget: u64) -> ReductionReport {
    let f = factor(model.resultant.magnitude(), trial_bound, rho_budget);
    let mut indeterminacy = Vec::new();
    if model.n <= 2 {
        for (p, _) in &f.factors {
            if let Some(p) = p.to_u64().filter(|&p| p <= ENUMERATION_BOUND) {
                let pts = indeterminacy_points_mod_p(model, p).expect("within bound");
                indeterminacy.push((p, pts));
            }
        }
    }
    ReductionReport {
        resultant: model.resultant.clone(),
        bad_primes: f.factors,
        cofactor: f.cofactor,
        indeterminacy,
    }
}

/// Points of `P^n(F_p)` where every reduced lift entry vanishes, each
/// normalized with first nonzero coordinate 1, in lexicographic order.
pub fn indeterminacy_points_mod_p(model: &MapModel, p: u64) -> Result<Vec<Vec<u64>>> {
    indeterminacy_points_with_bound(model, p, ENUMERATION_BOUND)
}

pub fn indeterminacy_points_with_bound(model: &MapModel, p: u64, bound: u64) -> Result<Vec<Vec<u64>>> {
    if !crate::exact::arith::is_prime_u64(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if p > bound {
        return Err(Error::capability(format!("p = {p} exceeds the enumeration bound {bound}")));
    }
    if model.n > 2 {
        return Err(Error::capability("enumeration is limited to n <= 2"));
    }
    let nv = model.n + 1;
    let mut out = Vec::new();
    // leading 1 at position `lead`, zeros before, free coordinates after
    for lead in 0..nv {
        let free = nv - lead - 1;
        let count = p.pow(free as u32);
        for idx in 0..count {
            let mut x = vec![0u64; nv];
            x[lead] = 1;
            let mut r = idx;
            for j in (lead + 1..nv).rev() {
                x[j] = r % p;
                r /= p;
            }
            if model.lift.iter().all(|f| f.eval_mod(&x, p) == 0) {
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// Outcome of [`check_negativity_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativityReport {
    pub holds: bool,
    /// Largest `k` for which the condition was checked and holds.
    pub verified_up_to: u32,
    pub first_failure: Option<u32>,
    /// True when the condition is proven for every `k` (monic case on `P^1`).
    pub all_k: bool,
}

fn restricted_units(forms: &[HomogeneousForm], n: usize) -> Result<bool> {
    let restricted: Vec<HomogeneousForm> = forms.iter().map(|f| f.restrict_to_zero(n)).collect();
    // n + 1 forms in n variables: drop an identically zero one if any,
    // otherwise every n-subset has to give a unit
    let subsets: Vec<Vec<HomogeneousForm>> = match restricted.iter().position(|f| f.is_zero()) {
        Some(i) => {
            let mut r = restricted.clone();
            r.remove(i);
            vec![r]
        }
        None => (0..restricted.len())
            .map(|skip| {
                restricted
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, f)| f.clone())
                    .collect()
            })
            .collect(),
    };
    for s in subsets {
        let r = resultant(&s)?;
        if r.abs() != BigInt::one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `p_k` restricted to `T_n = 0` has unit resultant for
/// `k = 1..=k_max`. On `P^1` with `p_1(1, 0) = 0` and a monic `p_0` the
/// condition propagates to every `k`, which is reported as `all_k`.
pub fn check_negativity_conditions(model: &MapModel, k_max: u32) -> Result<NegativityReport> {
    let n = model.n;
    if n == 1 {
        let d = model.degree as usize;
        let lead0 = model.lift[0].binary_coeffs()[d].clone();
        let lead1 = model.lift[1].binary_coeffs()[d].clone();
        if lead1.is_zero() {
            let unit = lead0.abs().is_one();
            return Ok(NegativityReport {
                holds: unit,
                verified_up_to: if unit { k_max } else { 0 },
                first_failure: (!unit).then_some(1),
                all_k: unit,
            });
        }
    }
    let mut cur = model.lift.clone();
    for k in 1..=k_max {
        if k > 1 {
            cur = iterate_lift(model, k)?;
        }
        if !restricted_units(&cur, n)? {
            return Ok(NegativityReport {
                holds: false,
                verified_up_to: k - 1,
                first_failure: Some(k),
                all_k: false,
            });
        }
    }
    Ok(NegativityReport {
        holds: true,
        verified_up_to: k_max,
        first_failure: None,
        all_k: false,
    })
}

/// Bounds for `log ||Phi(x)|| - d log ||x||` over all complex `x`, in the
/// sup norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementBounds {
    /// Lower bound, `log |Res| - log B`.
    pub lower: f64,
    /// Upper bound, `log max_i ||p_i||_1`.
    pub upper: f64,
    /// `log B`, so that the naive-height increment is at least `-log B`.
    pub log_b: f64,
}

impl IncrementBounds {
    /// Bound on `|h_canonical - h_naive|` at rational points.
    pub fn height_difference(&self) -> f64 {
        self.upper.max(self.log_b).max(0.0)
    }
}

/// Solves a square rational system exactly. `None` if singular.
fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Certified increment bounds on `P^1`, from the Bezout identities
/// `g_0 p_0 + g_1 p_1 = Res * x^(2d-1)` and the same with `y`.
pub fn increment_bounds(model: &MapModel) -> Result<IncrementBounds> {
    model.require_dim_one("certified increment bounds")?;
    let d = model.degree as usize;
    let c0 = model.lift[0].binary_coeffs();
    let c1 = model.lift[1].binary_coeffs();
    let zero = BigRational::zero();
    // unknowns: g_0 coefficients a_0..a_{d-1}, g_1 coefficients b_0..b_{d-1}
    let mut m = vec![vec![zero.clone(); 2 * d]; 2 * d];
    for k in 0..2 * d {
        for i in 0..d {
            if k >= i && k - i <= d {
                m[k][i] = BigRational::from_integer(c0[k - i].clone());
                m[k][d + i] = BigRational::from_integer(c1[k - i].clone());
            }
        }
    }
    let res = BigRational::from_integer(model.resultant.clone());
    let mut log_b = f64::NEG_INFINITY;
    for target in [0, 2 * d - 1] {
        let mut rhs = vec![zero.clone(); 2 * d];
        rhs[target] = res.clone();
        let u = solve_rational(m.clone(), rhs).expect("nonzero resultant");
        let l1 = u.iter().fold(BigRational::zero(), |acc, x| acc + x.abs());
        let lb = ln_abs(l1.numer()) - ln_abs(l1.denom());
        log_b = log_b.max(lb);
    }
    let upper = model
        .lift
        .iter()
        .map(|f| ln_abs(&f.l1_norm()))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(IncrementBounds {
        lower: ln_abs(&model.resultant) - log_b,
        upper,
        log_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(d: u32, c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::from_binary_i64(d, c)
    }

    #[test]
    fn validation_examples() {
        let m = MapModel::binary(&[0, 0, 1], &[1, 0, 0]).unwrap();
        assert_eq!(m.resultant(), &BigInt::one());
        match MapModel::binary(&[0, 0, 1], &[0, 1, 0]) {
            Err(Error::NotRegular(msg)) => assert!(msg.contains("(0:1)"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let m = MapModel::from_strings(&["x^2 + x*y", "y^2 + z*x + z*y", "z^2"], None).unwrap();
        assert_eq!(m.resultant().abs(), BigInt::one());
        assert!(matches!(
            validate_model(vec![bin(2, &[0, 0, 1]), bin(3, &[1, 0, 0, 0])], None),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(MapModel::binary(&[0, 0, 2], &[2, 0, 0]).is_err());
    }

    #[test]
    fn iterates() {
        let p = MapModel::power_map(1, 2);
        let it = iterate_lift(&p, 3).unwrap();
        assert_eq!(it[0], bin(8, &[0, 0, 0, 0, 0, 0, 0, 0, 1]));
        let m = MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap();
        let it = iterate_lift(&m, 2).unwrap();
        assert_eq!(it[0], bin(4, &[6, 0, 8, 0, 8]));
        assert_eq!(it[1], bin(4, &[8, 0, 0, 0, 0]));
        assert!(matches!(
            iterate_lift_with_budget(&m, 20, 1000),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn apply_examples() {
        let p = MapModel::power_map(1, 2);
        let pt = ProjectivePoint::from_i64(&[2, 3]).unwrap();
        assert_eq!(apply_map(&p, &pt).to_string(), "4:9");
        let m = MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap();
        let inf = ProjectivePoint::infinity(1);
        assert_eq!(apply_map(&m, &inf), inf);
        let b = MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap();
        let o = ProjectivePoint::from_i64(&[0, 1]).unwrap();
        assert_eq!(apply_map(&b, &o).to_string(), "1:-1");
    }

    #[test]
    fn reduction_examples() {
        let m = MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap();
        let r = bad_reduction_primes(&m);
        assert_eq!(r.bad_primes, vec![(BigUint::from(2u32), 4)]);
        let m = MapModel::from_strings(&["y^2 - 3*z^2", "x^2 - 3*y^2", "z*y"], None).unwrap();
        let r = bad_reduction_primes(&m);
        assert!(r.small_primes().contains(&3));
        assert_eq!(indeterminacy_points_mod_p(&m, 3).unwrap(), vec![vec![0, 0, 1]]);
        let m = MapModel::from_strings(&["3*y^2 - 5*z^2", "3*x^2 - 5*y^2", "z*y"], None).unwrap();
        let r = bad_reduction_primes(&m);
        assert!(r.small_primes().contains(&3) && r.small_primes().contains(&5));
        assert_eq!(indeterminacy_points_mod_p(&m, 3).unwrap(), vec![vec![1, 0, 0]]);
        assert_eq!(indeterminacy_points_mod_p(&m, 5).unwrap(), vec![vec![0, 0, 1]]);
        let p = MapModel::power_map(1, 2);
        assert!(indeterminacy_points_mod_p(&p, 5).unwrap().is_empty());
        assert!(indeterminacy_points_mod_p(&p, 101).is_err());
    }

    #[test]
    fn negativity_examples() {
        let m = MapModel::binary(&[1, 0, 1], &[1, 0, 0]).unwrap();
        let r = check_negativity_conditions(&m, 4).unwrap();
        assert!(r.holds && r.all_k);
        let m = MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap();
        let r = check_negativity_conditions(&m, 4).unwrap();
        assert_eq!(r.first_failure, Some(1));
        let p = MapModel::power_map(2, 2);
        let r = check_negativity_conditions(&p, 3).unwrap();
        assert!(r.holds && r.verified_up_to == 3);
    }

    #[test]
    fn json_round_trip() {
        let m = MapModel::from_strings(&["x^2 + x*y", "y^2 + z*x + z*y", "z^2"], None).unwrap();
        let back = MapModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert!(MapModel::from_json("{\"n\": 1}").is_err());
    }

    #[test]
    fn increment_bounds_hold_on_samples() {
        let m = MapModel::binary(&[3, -1, 2], &[1, 1, -2]).unwrap();
        let b = increment_bounds(&m).unwrap();
        for (a, c) in [(1.0, 0.0), (0.0, 1.0), (0.3, -1.0), (1.0, 0.77), (-0.5, 1.0)] {
            let v = m.eval_complex(&[Complex64::new(a, 0.0), Complex64::new(c, 0.0)]);
            let norm = v[0].norm().max(v[1].norm());
            let x = f64::max(f64::abs(a), f64::abs(c));
            let inc = norm.ln() - 2.0 * x.ln();
            assert!(inc >= b.lower - 1e-12 && inc <= b.upper + 1e-12, "{inc} {b:?}");
        }
    }
}
