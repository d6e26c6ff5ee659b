use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::arith::gcd_all;

/// A rational point of `P^n` stored as coprime integers whose first
/// nonzero coordinate is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<BigInt>,
}

/// Divides out the gcd and fixes the sign. Returns the normalized vector
/// together with the positive gcd that was removed (`None` for the zero
/// vector).
pub fn normalize(mut v: Vec<BigInt>) -> Option<(Vec<BigInt>, BigInt)> {
    let g = gcd_all(&v);
    if g.is_zero() {
        return None;
    }
    let neg = v.iter().find(|c| !c.is_zero()).unwrap().is_negative();
    let g_signed = if neg { -g.clone() } else { g.clone() };
    for c in v.iter_mut() {
        *c = &*c / &g_signed;
    }
    Some((v, g))
}

impl ProjectivePoint {
    pub fn new(coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("a projective point needs at least two coordinates"));
        }
        let (coords, _) =
            normalize(coords).ok_or_else(|| Error::invalid("the zero vector is not a point"))?;
        Ok(ProjectivePoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clears denominators of rational coordinates.
    pub fn from_rationals(coords: &[BigRational]) -> Result<Self> {
        let l = coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        Self::new(
            coords
                .iter()
                .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect(),
        )
    }

    /// The affine point `(a : 1)` of `P^1`.
    pub fn affine(a: &BigRational) -> Self {
        Self::from_rationals(&[a.clone(), BigRational::one()]).expect("nonzero")
    }

    /// `(1 : 0 : ... : 0)`, the point at infinity for the first affine chart.
    pub fn infinity(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::one();
        ProjectivePoint { coords: c }
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Projective dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// `log max |x_i|` of the normalized representative.
    pub fn log_sup(&self) -> f64 {
        self.coords
            .iter()
            .map(crate::exact::arith::ln_abs)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(":"))
    }
}

impl FromStr for ProjectivePoint {
    type Err = Error;

    /// Parses `a:b[:c...]`; coordinates are integers or fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(':')
            .map(|part| {
                let t = part.trim();
                t.parse::<BigRational>()
                    .map_err(|_| Error::invalid(format!("bad coordinate '{t}' in point '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rationals(&coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let p = ProjectivePoint::from_i64(&[4, 6]).unwrap();
        assert_eq!(p.to_string(), "2:3");
        let p = ProjectivePoint::from_i64(&[0, -2, 4]).unwrap();
        assert_eq!(p.to_string(), "0:1:-2");
        let p = ProjectivePoint::from_i64(&[-1, 1]).unwrap();
        assert_eq!(p.to_string(), "1:-1");
        assert!(ProjectivePoint::from_i64(&[0, 0]).is_err());
    }

    #[test]
    fn parse() {
        let p: ProjectivePoint = "1/2 : 3".parse().unwrap();
        assert_eq!(p.to_string(), "1:6");
        assert!("1:x".parse::<ProjectivePoint>().is_err());
        assert!("5".parse::<ProjectivePoint>().is_err());
    }
}
