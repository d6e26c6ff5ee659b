use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arith::{gcd_all, scaled_f64};
use super::form::HomogeneousForm;
use crate::error::{Error, Result};

/// Univariate polynomial with arbitrary-precision integer coefficients.
/// `coeffs[i]` is the coefficient of `x^i`; trailing zeros are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// Monic product of `(x - r)` over the given integer roots.
    pub fn from_roots(roots: &[BigInt]) -> Self {
        roots.iter().fold(Self::constant(BigInt::one()), |acc, r| {
            acc * Self::new(vec![-r.clone(), BigInt::one()])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let cs = self.to_f64();
        cs.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients converted to `f64` (may overflow to infinity).
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| scaled_f64(c, 0)).collect()
    }

    /// gcd of the coefficients (positive). Rejects the zero polynomial.
    pub fn content(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Err(Error::invalid("content of the zero polynomial"));
        }
        Ok(gcd_all(&self.coeffs))
    }

    /// `self / content(self)`, normalized to a positive leading coefficient.
    pub fn primitive_part(&self) -> Result<Self> {
        let c = self.content()?;
        let sign = if self.leading().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let d = c * sign;
        Ok(Self::new(self.coeffs.iter().map(|x| x / &d).collect()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `x^deg * f(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division; `None` when `divisor` does not divide `self` in Z[x].
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let nd = self.degree().unwrap();
        if nd < dd {
            return None;
        }
        let lead = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for i in (0..=nd - dd).rev() {
            let (q, r) = rem[i + dd].div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Homogenizes to a binary form of degree `total` in `(x, y)`:
    /// `F(x, y) = y^total f(x / y)`.
    pub fn homogenize(&self, total: u32) -> Result<HomogeneousForm> {
        if let Some(d) = self.degree() {
            if d > total as usize {
                return Err(Error::DegreeMismatch(format!(
                    "degree {d} exceeds homogenizing degree {total}"
                )));
            }
        }
        Ok(HomogeneousForm::from_binary_coeffs(total, &self.coeffs))
    }

    /// Pseudo-remainder: `lead(g)^(deg f - deg g + 1) f mod g`.
    pub fn pseudo_rem(&self, g: &Self) -> Self {
        let dg = match g.degree() {
            Some(d) => d,
            None => return self.clone(),
        };
        let lead = g.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        while r.len() > dg && !r.is_empty() {
            let dr = r.len() - 1;
            let c = r[dr].clone();
            for x in r.iter_mut() {
                *x *= &lead;
            }
            for (j, gc) in g.coeffs.iter().enumerate() {
                r[dr - dg + j] -= &c * gc;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Primitive gcd in Z[x] with positive leading coefficient (primitive
    /// pseudo-remainder sequence). `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part().unwrap_or_else(|_| Self::zero());
        }
        if other.is_zero() {
            return self.primitive_part().unwrap();
        }
        let mut a = self.primitive_part().unwrap();
        let mut b = other.primitive_part().unwrap();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part().unwrap() };
        }
        a
    }

    /// Squarefree decomposition (Yun): primitive squarefree factors `f_i`
    /// with multiplicities, so that `f = c * prod f_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().is_none_or(|d| d == 0) {
            return out;
        }
        let f = self.primitive_part().unwrap();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_exact(&a).expect("gcd divides f");
        let mut c = df.div_exact(&a).expect("gcd divides f'");
        let mut d = c.clone() - b.derivative();
        let mut i = 1;
        while b.degree().is_some_and(|deg| deg > 0) {
            let ai = b.gcd(&d);
            b = b.div_exact(&ai).expect("gcd divides b");
            c = d.div_exact(&ai).expect("gcd divides d");
            d = c.clone() - b.derivative();
            if ai.degree().is_some_and(|deg| deg > 0) {
                out.push((ai, i));
            }
            i += 1;
        }
        out
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl Add for IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_degree() {
        let p = IntPolynomial::from_i64(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(IntPolynomial::from_i64(&[0, 0]).degree(), None);
    }

    #[test]
    fn content_and_primitive() {
        let p = IntPolynomial::from_i64(&[-6, 0, -9]);
        assert_eq!(p.content().unwrap(), BigInt::from(3));
        assert_eq!(p.primitive_part().unwrap(), IntPolynomial::from_i64(&[2, 0, 3]));
        assert!(IntPolynomial::zero().content().is_err());
    }

    #[test]
    fn exact_division() {
        let f = IntPolynomial::from_i64(&[6, -5, 1]);
        let g = IntPolynomial::from_i64(&[-2, 1]);
        assert_eq!(f.div_exact(&g).unwrap(), IntPolynomial::from_i64(&[-3, 1]));
        assert!(f.div_exact(&IntPolynomial::from_i64(&[1, 1])).is_none());
        let h = IntPolynomial::from_i64(&[-1, 2]);
        assert!(f.div_exact(&h).is_none());
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = IntPolynomial::from_i64(&[-1, 1]);
        let b = IntPolynomial::from_i64(&[2, 3]);
        let c = IntPolynomial::from_i64(&[1, 0, 1]);
        let f = &(&a * &a) * &b;
        let g = &(&a * &b) * &c;
        assert_eq!(f.gcd(&g), (&a * &b).primitive_part().unwrap());
        let h = &(&f * &a) * &c;
        let sq = h.squarefree_decomposition();
        assert_eq!(
            sq,
            vec![
                ((&b * &c).primitive_part().unwrap(), 1),
                (a.clone(), 3)
            ]
        );
    }

    #[test]
    fn display() {
        let p = IntPolynomial::from_i64(&[-1, -1, 1]);
        assert_eq!(p.to_string(), "x^2 - x - 1");
        assert_eq!(IntPolynomial::from_i64(&[0, -3]).display_in("t"), "-3*t");
    }
}
