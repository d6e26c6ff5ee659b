//! Integer arithmetic helpers: valuations, primality and factorization.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A p-adic valuation value. `Infinite` is the valuation of zero and
/// compares greater than every finite value, so `min` folds are total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

/// A place of the rational numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl Place {
    /// Builds a finite place, checking primality of `p`.
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime_u64(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::invalid(format!("{p} is not prime")))
        }
    }

    /// `log N(v)`: `log p` at a finite place, zero at infinity.
    pub fn log_norm(&self) -> f64 {
        match self {
            Place::Archimedean => 0.0,
            Place::Finite(p) => (*p as f64).ln(),
        }
    }
}

/// Exponent of `p` in the nonzero integer `x`, `Infinite` for zero.
pub fn valuation_int(p: u64, x: &BigInt) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        x = q;
        v += 1;
    }
}

/// Exponent of `p` in the rational `x` (numerator minus denominator).
pub fn valuation(p: u64, x: &BigRational) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let num = valuation_int(p, x.numer()).finite().unwrap_or(0);
    let den = valuation_int(p, x.denom()).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

/// Minimum valuation over the entries of a vector.
pub fn vector_valuation<'a, I>(p: u64, xs: I) -> Valuation
where
    I: IntoIterator<Item = &'a BigInt>,
{
    xs.into_iter()
        .map(|x| valuation_int(p, x))
        .min()
        .unwrap_or(Valuation::Infinite)
}

/// Strips all factors of `p` from `x`, returning the exponent removed.
pub(crate) fn remove_factor(x: &mut BigInt, p: &BigInt) -> u32 {
    let mut e = 0;
    if x.is_zero() {
        return 0;
    }
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        *x = q;
        e += 1;
    }
}

/// gcd of a list of integers; zero for an empty or all-zero list.
pub fn gcd_all<'a, I>(xs: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigInt>,
{
    let mut g = BigInt::zero();
    for x in xs {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    g
}

/// Natural log of the absolute value of a (possibly huge) integer.
pub fn ln_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `x / 2^e` as an `f64`, for scaling big integers into floating range.
pub(crate) fn scaled_f64(x: &BigInt, e: u64) -> f64 {
    if e == 0 {
        return x.to_f64().unwrap_or(f64::INFINITY);
    }
    let bits = x.bits();
    if bits <= e.saturating_sub(1100) {
        return 0.0;
    }
    // keep ~64 significant bits before the final conversion
    let keep = bits.saturating_sub(64);
    let shift = keep.min(e);
    let head = (x >> shift).to_f64().unwrap_or(0.0);
    head * 2f64.powi(-((e - shift) as i32))
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality test for 64-bit integers. Trial division below
/// 10^6, Miller-Rabin with the first twelve prime bases above (exact for
/// every `u64`).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 1_000_000 {
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        return true;
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in SMALL_PRIMES.iter() {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Probable-prime test for big integers (Miller-Rabin, fixed bases).
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return false;
    }
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0;
    while (&d % &two).is_zero() {
        d >>= 1;
        s += 1;
    }
    'outer: for &a in SMALL_PRIMES.iter() {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Result of [`factor`]: prime powers plus whatever could not be split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(BigUint, u32)>,
    /// Composite cofactor left over when the budget ran out.
    pub cofactor: Option<BigUint>,
}

/// Pollard-Brent rho. Returns a nontrivial factor of the odd composite
/// `n`, or `None` when `budget` iterations are exhausted.
fn pollard_brent(n: &BigUint, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let mut spent = 0u64;
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g == one {
                ys = y.clone();
                let steps = 128.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += steps;
                spent += steps;
                if spent > budget {
                    return None;
                }
            }
            r *= 2;
        }
        if &g == n {
            // backtrack one step at a time
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

/// Factors `n` by trial division up to `trial_bound`, then Pollard-Brent
/// with `rho_budget` iterations per split. Anything left unsplit is
/// returned in `cofactor`.
pub fn factor(n: &BigUint, trial_bound: u64, rho_budget: u64) -> Factorization {
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    let mut m = n.clone();
    if m.is_zero() {
        return Factorization {
            factors,
            cofactor: Some(m),
        };
    }
    let mut p = 2u64;
    while p <= trial_bound && !m.is_one() {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut cofactor = None;
    let mut stack = vec![m];
    let mut big: Vec<BigUint> = Vec::new();
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime(&x) {
            big.push(x);
            continue;
        }
        match pollard_brent(&x, rho_budget) {
            Some(f) => {
                let g = &x / &f;
                stack.push(f);
                stack.push(g);
            }
            None => {
                cofactor = Some(match cofactor {
                    None => x,
                    Some(c) => c * x,
                });
            }
        }
    }
    big.sort();
    for q in big {
        match factors.iter_mut().find(|(f, _)| *f == q) {
            Some(entry) => entry.1 += 1,
            None => factors.push((q, 1)),
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Factorization { factors, cofactor }
}

/// `x mod m` in `[0, m)`.
pub(crate) fn mod_floor(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x % m;
    if r.sign() == Sign::Minus {
        r + m
    } else {
        r
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(mod_floor(&e.x, m))
    } else if (-&e.gcd).is_one() {
        Some(mod_floor(&(-e.x), m))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::ToBigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(2, &q(12, 1)), Valuation::Finite(2));
        assert_eq!(valuation(3, &q(5, 9)), Valuation::Finite(-2));
        assert_eq!(valuation(7, &q(10, 1)), Valuation::Finite(0));
        assert_eq!(valuation(5, &q(0, 1)), Valuation::Infinite);
    }

    #[test]
    fn infinite_is_top() {
        assert!(Valuation::Finite(i64::MAX) < Valuation::Infinite);
        let zero = BigInt::zero();
        let eight = 8.to_bigint().unwrap();
        assert_eq!(vector_valuation(2, [&zero, &eight]), Valuation::Finite(3));
        assert_eq!(vector_valuation(2, [&zero, &zero]), Valuation::Infinite);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
        assert!(Place::finite(9).is_err());
        assert_eq!(Place::finite(7).unwrap(), Place::Finite(7));
    }

    #[test]
    fn factor_with_rho_fallback() {
        // two primes just above the trial bound
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64) * BigUint::from(48u32);
        let f = factor(&n, 1000, 1_000_000);
        assert_eq!(f.cofactor, None);
        let expected: Vec<(BigUint, u32)> = vec![
            (2u32.into(), 4),
            (3u32.into(), 1),
            (1_000_003u64.into(), 1),
            (1_000_033u64.into(), 1),
        ];
        assert_eq!(f.factors, expected);
    }

    #[test]
    fn ln_abs_large() {
        let x = BigInt::from(3).pow(2000);
        assert!((ln_abs(&x) - 2000.0 * 3f64.ln()).abs() < 1e-9);
        assert!((ln_abs(&BigInt::from(-20)) - 20f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn inverse_mod() {
        let m = BigInt::from(343);
        let inv = mod_inverse(&BigInt::from(6), &m).unwrap();
        assert_eq!(mod_floor(&(inv * 6), &m), BigInt::one());
        assert!(mod_inverse(&BigInt::from(14), &m).is_none());
    }
}
