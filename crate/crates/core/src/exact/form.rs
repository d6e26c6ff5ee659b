//! Sparse multivariate polynomials and homogeneous forms over the integers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::arith::{gcd_all, scaled_f64};
use crate::error::{Error, Result};

pub type Exponent = Vec<u32>;

/// Sparse multivariate polynomial, not necessarily homogeneous.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    num_vars: usize,
    terms: BTreeMap<Exponent, BigInt>,
}

impl SparsePoly {
    pub fn zero(num_vars: usize) -> Self {
        SparsePoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    pub fn variable(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<Exponent, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        SparsePoly {
            num_vars: self.num_vars,
            terms: acc,
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut out = Self::constant(self.num_vars, BigInt::one());
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Total degrees of the terms present, as (min, max).
    pub fn degree_range(&self) -> Option<(u32, u32)> {
        let degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let mut lo = u32::MAX;
        let mut hi = 0;
        let mut any = false;
        for d in degs {
            any = true;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        any.then_some((lo, hi))
    }

    /// Homogenizes with respect to the last variable, which must not occur.
    pub fn homogenize_last(&self, degree: u32) -> Result<HomogeneousForm> {
        let last = self.num_vars - 1;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[last] != 0 {
                return Err(Error::invalid(
                    "cannot homogenize: the homogenizing variable already occurs",
                ));
            }
            let d: u32 = e.iter().sum();
            if d > degree {
                return Err(Error::DegreeMismatch(format!(
                    "term of degree {d} exceeds {degree}"
                )));
            }
            let mut e = e.clone();
            e[last] = degree - d;
            terms.insert(e, c.clone());
        }
        HomogeneousForm::new(self.num_vars, degree, terms)
    }
}

/// A homogeneous form of fixed degree in `num_vars` variables with
/// integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Exponent, BigInt>,
}

impl HomogeneousForm {
    pub fn new(num_vars: usize, degree: u32, terms: BTreeMap<Exponent, BigInt>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::invalid("a form needs at least one variable"));
        }
        let mut clean = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::invalid(format!(
                    "exponent vector of length {} in a form with {num_vars} variables",
                    e.len()
                )));
            }
            let d: u32 = e.iter().sum();
            if d != degree {
                return Err(Error::DegreeMismatch(format!(
                    "term of degree {d} in a form of degree {degree}"
                )));
            }
            if !c.is_zero() {
                clean.insert(e, c);
            }
        }
        Ok(HomogeneousForm {
            num_vars,
            degree,
            terms: clean,
        })
    }

    pub fn zero(num_vars: usize, degree: u32) -> Self {
        HomogeneousForm {
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exponent: Exponent, c: BigInt) -> Self {
        let degree = exponent.iter().sum();
        let num_vars = exponent.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        HomogeneousForm {
            num_vars,
            degree,
            terms,
        }
    }

    /// Checks a sparse polynomial for homogeneity.
    pub fn from_sparse(p: &SparsePoly) -> Result<Self> {
        match p.degree_range() {
            None => Ok(Self::zero(p.num_vars(), 0)),
            Some((lo, hi)) if lo == hi => Self::new(p.num_vars(), hi, p.terms().clone()),
            Some((lo, hi)) => Err(Error::DegreeMismatch(format!(
                "polynomial is not homogeneous (term degrees {lo}..{hi})"
            ))),
        }
    }

    pub fn to_sparse(&self) -> SparsePoly {
        let mut p = SparsePoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    /// Binary form `sum_i coeffs[i] x^i y^(degree - i)`.
    pub fn from_binary_coeffs(degree: u32, coeffs: &[BigInt]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![i as u32, degree - i as u32], c.clone());
            }
        }
        HomogeneousForm {
            num_vars: 2,
            degree,
            terms,
        }
    }

    pub fn from_binary_i64(degree: u32, coeffs: &[i64]) -> Self {
        let c: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_binary_coeffs(degree, &c)
    }

    /// For a binary form: `out[i]` is the coefficient of `x^i y^(degree-i)`.
    pub fn binary_coeffs(&self) -> Vec<BigInt> {
        assert_eq!(self.num_vars, 2, "binary_coeffs on a non-binary form");
        let mut out = vec![BigInt::zero(); self.degree as usize + 1];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        out
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::invalid("content of the zero form"));
        }
        Ok(gcd_all(self.terms.values()))
    }

    pub fn primitive_part(&self) -> Result<Self> {
        let c = self.content()?;
        Ok(self.map_coeffs(|x| x / &c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&BigInt) -> BigInt) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        HomogeneousForm {
            num_vars: self.num_vars,
            degree: self.degree,
            terms,
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        self.map_coeffs(|c| c * k)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree || self.num_vars != other.num_vars {
            return Err(Error::DegreeMismatch("adding forms of different shape".into()));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert_with(BigInt::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(HomogeneousForm {
            num_vars: self.num_vars,
            degree: self.degree,
            terms,
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let p = self.to_sparse().mul(&other.to_sparse());
        HomogeneousForm {
            num_vars: self.num_vars,
            degree: self.degree + other.degree,
            terms: p.terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let p = self.to_sparse().pow(k);
        HomogeneousForm {
            num_vars: self.num_vars,
            degree: self.degree * k,
            terms: p.terms,
        }
    }

    /// Substitutes `subs[i]` for variable `i`. All substituted forms must
    /// share a degree `e`; the result has degree `degree * e`.
    pub fn compose(&self, subs: &[HomogeneousForm]) -> Result<Self> {
        if subs.len() != self.num_vars {
            return Err(Error::invalid("compose: wrong number of substitutions"));
        }
        let e = subs[0].degree;
        if subs.iter().any(|s| s.degree != e) {
            return Err(Error::DegreeMismatch("compose: substitutions differ in degree".into()));
        }
        let nv = subs[0].num_vars;
        let mut cache: Vec<Vec<SparsePoly>> = subs
            .iter()
            .map(|s| vec![SparsePoly::constant(nv, BigInt::one()), s.to_sparse()])
            .collect();
        let mut acc = SparsePoly::zero(nv);
        for (exp, c) in &self.terms {
            let mut term = SparsePoly::constant(nv, c.clone());
            for (i, &k) in exp.iter().enumerate() {
                let powers = &mut cache[i];
                while powers.len() <= k as usize {
                    let next = powers.last().unwrap().mul(&powers[1]);
                    powers.push(next);
                }
                term = term.mul(&powers[k as usize]);
            }
            acc = acc.add(&term);
        }
        Ok(HomogeneousForm {
            num_vars: nv,
            degree: self.degree * e,
            terms: acc.terms,
        })
    }

    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        let maxe = self.degree as usize;
        let powers: Vec<Vec<BigInt>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(maxe + 1);
                v.push(BigInt::one());
                for k in 1..=maxe {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        self.terms.iter().fold(BigInt::zero(), |acc, (e, c)| {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[i][k as usize];
                }
            }
            acc + t
        })
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (e, c)| {
            let mut t = Complex64::new(scaled_f64(c, 0), 0.0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powu(k);
                }
            }
            acc + t
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms.iter().fold(0.0, |acc, (e, c)| {
            let mut t = scaled_f64(c, 0);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powi(k as i32);
                }
            }
            acc + t
        })
    }

    /// Evaluation modulo a small prime.
    pub fn eval_mod(&self, x: &[u64], p: u64) -> u64 {
        let pb = BigInt::from(p);
        let mut acc: u64 = 0;
        for (e, c) in &self.terms {
            let cm = super::arith::mod_floor(c, &pb);
            let mut t: u128 = u64::try_from(&cm).unwrap() as u128;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * x[i] as u128 % p as u128;
                }
            }
            acc = ((acc as u128 + t) % p as u128) as u64;
        }
        acc
    }

    /// Sets variable `var` to zero and drops it, leaving a form in one fewer
    /// variable.
    pub fn restrict_to_zero(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] == 0)
            .map(|(e, c)| {
                let mut e = e.clone();
                e.remove(var);
                (e, c.clone())
            })
            .collect();
        HomogeneousForm {
            num_vars: self.num_vars - 1,
            degree: self.degree,
            terms,
        }
    }

    /// Hasse derivative `(1/alpha!) d^alpha f`, which has integer
    /// coefficients. Returns the zero form of the right degree when
    /// `|alpha| > degree`.
    pub fn hasse_derivative(&self, alpha: &[u32]) -> Self {
        let order: u32 = alpha.iter().sum();
        if order > self.degree {
            return Self::zero(self.num_vars, 0);
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().zip(alpha).any(|(a, b)| a < b) {
                continue;
            }
            let mut coef = c.clone();
            for (a, b) in e.iter().zip(alpha) {
                coef *= binomial(*a, *b);
            }
            let ne: Exponent = e.iter().zip(alpha).map(|(a, b)| a - b).collect();
            terms.insert(ne, coef);
        }
        HomogeneousForm {
            num_vars: self.num_vars,
            degree: self.degree - order,
            terms,
        }
    }

    /// Largest coefficient bit length.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn display_with(&self, vars: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        vars[i].clone()
                    } else {
                        format!("{}^{}", vars[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", mag, mono.join("*")));
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Default variable names: `x, y` for binary forms, `x, y, z` for ternary,
/// `t0, t1, ...` otherwise.
pub fn default_var_names(n: usize) -> Vec<String> {
    match n {
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (0..n).map(|i| format!("t{i}")).collect(),
    }
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_var_names(self.num_vars)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(deg: u32, c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::from_binary_i64(deg, c)
    }

    #[test]
    fn content_examples() {
        // 6x^2 + 9y^2
        assert_eq!(bin(2, &[9, 0, 6]).content().unwrap(), BigInt::from(3));
        // x^2 - y^2
        assert_eq!(bin(2, &[-1, 0, 1]).content().unwrap(), BigInt::from(1));
        // 8x^4 + 8x^2y^2 + 6y^4
        assert_eq!(bin(4, &[6, 0, 8, 0, 8]).content().unwrap(), BigInt::from(2));
        assert!(HomogeneousForm::zero(2, 3).content().is_err());
    }

    #[test]
    fn rejects_inhomogeneous_terms() {
        let mut t = BTreeMap::new();
        t.insert(vec![2, 0], BigInt::one());
        t.insert(vec![0, 1], BigInt::one());
        assert!(HomogeneousForm::new(2, 2, t).is_err());
    }

    #[test]
    fn compose_squares() {
        let x2 = bin(2, &[0, 0, 1]);
        let y2 = bin(2, &[1, 0, 0]);
        let c = x2.compose(&[x2.clone(), y2.clone()]).unwrap();
        assert_eq!(c, bin(4, &[0, 0, 0, 0, 1]));
    }

    #[test]
    fn hasse_derivatives_are_integral() {
        // f = x^3 + 2 x y^2 ; (1/2) d^2/dx^2 f = 3x
        let f = bin(3, &[0, 2, 0, 1]);
        let h = f.hasse_derivative(&[2, 0]);
        assert_eq!(h, bin(1, &[0, 3]));
        let h = f.hasse_derivative(&[1, 1]);
        assert_eq!(h, bin(1, &[4, 0]));
    }

    #[test]
    fn eval_and_mod() {
        let f = bin(2, &[1, 0, 2]); // 2x^2 + y^2
        assert_eq!(f.eval(&[BigInt::from(3), BigInt::from(2)]), BigInt::from(22));
        assert_eq!(f.eval_mod(&[3, 2], 5), 2);
        assert!((f.eval_f64(&[3.0, 2.0]) - 22.0).abs() < 1e-12);
    }

    #[test]
    fn restriction() {
        // y^2 - 3 z^2 restricted to z = 0 is y^2
        let mut t = BTreeMap::new();
        t.insert(vec![0, 2, 0], BigInt::one());
        t.insert(vec![0, 0, 2], BigInt::from(-3));
        let f = HomogeneousForm::new(3, 2, t).unwrap();
        let r = f.restrict_to_zero(2);
        assert_eq!(r, bin(2, &[1, 0, 0]));
    }
}
