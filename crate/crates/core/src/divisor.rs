//! Zero divisors of binary forms: rational points with multiplicity plus
//! the part without rational roots.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::form::HomogeneousForm;
use crate::exact::poly::IntPolynomial;
use crate::exact::roots::complex_roots;
use crate::point::ProjectivePoint;

/// `div_0(F)` split into rational points and an irrational remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisorPoints {
    /// Content of `F`.
    pub content: BigInt,
    /// Rational points with multiplicity, sorted.
    pub rational: Vec<(ProjectivePoint, usize)>,
    /// Primitive polynomial in `z = x/y` with no rational root (possibly
    /// constant 1), whose roots are the remaining points of the divisor.
    pub remainder: IntPolynomial,
    /// Degree of `F`.
    pub degree: u32,
}

impl DivisorPoints {
    pub fn all_rational(&self) -> bool {
        self.remainder.degree() == Some(0)
    }
}

/// Rational roots of a squarefree primitive polynomial, found by rounding
/// complex roots to `k / lead` and checking exactly.
fn rational_roots(q: &IntPolynomial) -> Result<(Vec<ProjectivePoint>, IntPolynomial)> {
    let mut rest = q.clone();
    let mut found = Vec::new();
    if q.degree().unwrap_or(0) == 0 {
        return Ok((found, rest));
    }
    let lead = q.leading().unwrap().clone();
    let lead_f = lead.to_f64().unwrap_or(f64::INFINITY);
    for r in complex_roots(q, 1e-14)? {
        if r.im.abs() > 1e-6 * (1.0 + r.re.abs()) {
            continue;
        }
        let k = (r.re * lead_f).round();
        if !k.is_finite() || k.abs() > 9.0e15 {
            continue;
        }
        let k = BigInt::from(k as i64);
        // q(k / lead) = 0  <=>  q_hom(k, lead) = 0
        let hom = q.homogenize(q.degree().unwrap() as u32)?;
        if hom.eval(&[k.clone(), lead.clone()]).is_zero() {
            let pt = ProjectivePoint::new(vec![k.clone(), lead.clone()])?;
            if found.contains(&pt) {
                continue;
            }
            let c = pt.coords();
            let lin = IntPolynomial::new(vec![-c[0].clone(), c[1].clone()]);
            rest = rest.div_exact(&lin).expect("rational root factor divides");
            found.push(pt);
        }
    }
    Ok((found, rest))
}

/// Splits `div_0(F)` for a nonzero binary form `F`.
pub fn divisor_points(f: &HomogeneousForm) -> Result<DivisorPoints> {
    if f.num_vars() != 2 {
        return Err(Error::invalid("divisors are supported on P^1 only"));
    }
    if f.is_zero() {
        return Err(Error::invalid("the zero form has no divisor"));
    }
    let m = f.degree();
    let content = f.content()?;
    let coeffs = f.binary_coeffs();
    // F = y^k G with G(1, 0) != 0: the point (1:0) with multiplicity k
    let k = m as usize - (0..=m as usize).rev().find(|&i| !coeffs[i].is_zero()).unwrap();
    let mut rational = Vec::new();
    if k > 0 {
        rational.push((ProjectivePoint::infinity(1), k));
    }
    let g = IntPolynomial::new(coeffs).primitive_part()?;
    let mut remainder = IntPolynomial::constant(BigInt::one());
    for (part, mult) in g.squarefree_decomposition() {
        let (pts, rest) = rational_roots(&part)?;
        for p in pts {
            rational.push((p, mult));
        }
        for _ in 0..mult {
            remainder = &remainder * &rest;
        }
    }
    rational.sort();
    Ok(DivisorPoints {
        content,
        rational,
        remainder: remainder.primitive_part()?,
        degree: m,
    })
}
