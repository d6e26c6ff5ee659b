//! Resultants of homogeneous forms.
//!
//! Binary forms use the Sylvester determinant. Square systems of `n + 1`
//! forms in `n + 1` variables use Macaulay's construction: the determinant
//! of the degree-`D` Macaulay matrix divided by the determinant of its
//! minor on the monomials that are reducible in two or more variables,
//! with `D = (n + 1)(d - 1) + 1`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::form::HomogeneousForm;
use crate::error::{Error, Result};

/// Largest Macaulay matrix dimension we are willing to build.
pub const MACAULAY_MAX_DIM: usize = 400;

/// Determinant by fraction-free (Bareiss) elimination. Exact.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
        for row in m.iter_mut().skip(k + 1) {
            row[k] = BigInt::zero();
        }
    }
    sign * &m[n - 1][n - 1]
}

/// Coefficients of a binary form in decreasing powers of the first variable.
fn decreasing(f: &HomogeneousForm) -> Vec<BigInt> {
    let mut c = f.binary_coeffs();
    c.reverse();
    c
}

/// Sylvester matrix of two binary forms (decreasing powers of `x`).
pub fn sylvester_matrix(f: &HomogeneousForm, g: &HomogeneousForm) -> Vec<Vec<BigInt>> {
    let a = f.degree() as usize;
    let b = g.degree() as usize;
    let n = a + b;
    let fc = decreasing(f);
    let gc = decreasing(g);
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..b {
        for (j, c) in fc.iter().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..a {
        for (j, c) in gc.iter().enumerate() {
            m[b + i][i + j] = c.clone();
        }
    }
    m
}

/// Homogeneous resultant of two binary forms. Zero exactly when the forms
/// share a projective root over the algebraic closure.
pub fn sylvester_resultant(f: &HomogeneousForm, g: &HomogeneousForm) -> Result<BigInt> {
    if f.num_vars() != 2 || g.num_vars() != 2 {
        return Err(Error::invalid("sylvester_resultant expects binary forms"));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(BigInt::zero());
    }
    Ok(determinant(sylvester_matrix(f, g)))
}

/// `Res(f, g)` for several binary forms `g` of one degree. Expands the
/// Sylvester determinant along the rows of `f`, so the minors of `f` are
/// computed once and only small determinants are redone per `g`. Fast when
/// `f` has large coefficients and the `g` have small ones.
pub fn sylvester_resultants_shared(f: &HomogeneousForm, gs: &[HomogeneousForm]) -> Result<Vec<BigInt>> {
    let Some(b) = gs.first().map(|g| g.degree() as usize) else {
        return Ok(Vec::new());
    };
    if gs.iter().any(|g| g.degree() as usize != b) {
        return Err(Error::invalid("sylvester_resultants_shared needs forms of one degree"));
    }
    let a = f.degree() as usize;
    if a == 0 || b == 0 || f.is_zero() {
        return gs.iter().map(|g| sylvester_resultant(f, g)).collect();
    }
    let n = a + b;
    let fc = decreasing(f);
    let mut subsets = Vec::new();
    combinations(n, b, 0, &mut Vec::with_capacity(b), &mut subsets);
    // (sign, minor of the f rows on S, complement of S); zero minors dropped
    let f_minors: Vec<(bool, BigInt, Vec<usize>)> = subsets
        .into_iter()
        .filter_map(|cols| {
            let block: Vec<Vec<BigInt>> = (0..b)
                .map(|i| {
                    cols.iter()
                        .map(|&c| if c >= i && c - i <= a { fc[c - i].clone() } else { BigInt::zero() })
                        .collect()
                })
                .collect();
            let minor = determinant(block);
            if minor.is_zero() {
                return None;
            }
            let parity = (0..b).sum::<usize>() + cols.iter().sum::<usize>();
            let rest: Vec<usize> = (0..n).filter(|c| !cols.contains(c)).collect();
            Some((parity % 2 == 1, minor, rest))
        })
        .collect();
    Ok(gs
        .iter()
        .map(|g| {
            if g.is_zero() {
                return BigInt::zero();
            }
            let gc = decreasing(g);
            let mut total = BigInt::zero();
            for (negative, minor, rest) in &f_minors {
                let block: Vec<Vec<BigInt>> = (0..a)
                    .map(|i| {
                        rest.iter()
                            .map(|&c| if c >= i && c - i <= b { gc[c - i].clone() } else { BigInt::zero() })
                            .collect()
                    })
                    .collect();
                let cofactor = determinant(block);
                if cofactor.is_zero() {
                    continue;
                }
                let term = minor * cofactor;
                if *negative {
                    total -= term;
                } else {
                    total += term;
                }
            }
            total
        })
        .collect())
}

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for c in start..n {
        if n - c < k - cur.len() {
            break;
        }
        cur.push(c);
        combinations(n, k, c + 1, cur, out);
        cur.pop();
    }
}

/// Exponent vectors of total degree `deg` in `nv` variables, in
/// lexicographically decreasing order.
pub fn monomials(nv: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(nv: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == nv - 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=deg).rev() {
            prefix.push(k);
            rec(nv, deg - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nv == 0 {
        return out;
    }
    rec(nv, deg, &mut Vec::with_capacity(nv), &mut out);
    out
}

/// Dimension of the Macaulay matrix for `n + 1` forms of degree `d`.
pub fn macaulay_dimension(num_vars: usize, d: u32) -> usize {
    let big_d = num_vars as u64 * (d as u64 - 1) + 1;
    // C(D + n, n) with n = num_vars - 1
    let n = num_vars as u64 - 1;
    let mut r: u128 = 1;
    for i in 0..n {
        r = r * (big_d + n - i) as u128 / (i + 1) as u128;
    }
    r.min(usize::MAX as u128) as usize
}

/// Macaulay matrix and distinguished minor for a given variable order.
/// `order[k]` is the variable tested k-th when assigning a monomial to a
/// form.
fn macaulay_quotient(forms: &[HomogeneousForm], order: &[usize]) -> (BigInt, BigInt) {
    let nv = forms.len();
    let d = forms[0].degree();
    let big_d = nv as u32 * (d - 1) + 1;
    let mons = monomials(nv, big_d);
    let index: std::collections::HashMap<&Vec<u32>, usize> =
        mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = mons.len();
    let mut mat = vec![vec![BigInt::zero(); n]; n];
    let mut nonreduced = Vec::new();
    for (r, m) in mons.iter().enumerate() {
        let big: Vec<usize> = order.iter().copied().filter(|&v| m[v] >= d).collect();
        let var = big[0];
        if big.len() >= 2 {
            nonreduced.push(r);
        }
        let mut shift = m.clone();
        shift[var] -= d;
        for (e, c) in forms[var].terms() {
            let col: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
            mat[r][index[&col]] = c.clone();
        }
    }
    let minor: Vec<Vec<BigInt>> = nonreduced
        .iter()
        .map(|&r| nonreduced.iter().map(|&c| mat[r][c].clone()).collect())
        .collect();
    (determinant(mat), determinant(minor))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    // identity first, then the rest in a fixed order
    out.sort();
    out
}

/// Resultant of `n + 1` forms of a common degree `d >= 1` in `n + 1`
/// variables. Zero exactly when they have a common projective zero over
/// the algebraic closure.
///
/// When the distinguished minor is singular for the natural variable
/// order, the construction is retried with the variable orders in
/// lexicographic permutation order; if every order is singular the result
/// is [`Error::Indeterminate`].
pub fn macaulay_resultant(forms: &[HomogeneousForm]) -> Result<BigInt> {
    let nv = forms.len();
    if nv == 0 {
        return Err(Error::invalid("macaulay_resultant of an empty system"));
    }
    if forms.iter().any(|f| f.num_vars() != nv) {
        return Err(Error::invalid(format!(
            "macaulay_resultant needs {nv} forms in {nv} variables"
        )));
    }
    let d = forms[0].degree();
    if forms.iter().any(|f| f.degree() != d) {
        return Err(Error::DegreeMismatch(
            "macaulay_resultant requires a common degree".into(),
        ));
    }
    if forms.iter().any(|f| f.is_zero()) {
        return Ok(BigInt::zero());
    }
    if nv == 1 {
        return Ok(forms[0].coeff(&[d]));
    }
    if d == 0 {
        return Err(Error::invalid("macaulay_resultant needs degree >= 1"));
    }
    if nv == 2 {
        return sylvester_resultant(&forms[0], &forms[1]);
    }
    let dim = macaulay_dimension(nv, d);
    if dim > MACAULAY_MAX_DIM {
        return Err(Error::capability(format!(
            "Macaulay matrix of dimension {dim} for {nv} forms of degree {d} (limit {MACAULAY_MAX_DIM})"
        )));
    }
    let mut both_zero = false;
    for order in permutations(nv) {
        let (num, den) = macaulay_quotient(forms, &order);
        if den.is_zero() {
            if num.is_zero() {
                both_zero = true;
            }
            continue;
        }
        let (q, r) = num_integer::Integer::div_rem(&num, &den);
        if !r.is_zero() {
            return Err(Error::Indeterminate(
                "Macaulay quotient is not exact".into(),
            ));
        }
        return Ok(q);
    }
    Err(Error::Indeterminate(if both_zero {
        "Macaulay determinant and every distinguished minor vanish".into()
    } else {
        "every distinguished minor vanishes".into()
    }))
}

/// Resultant of `n + 1` forms in `n + 1` variables, dispatching to the
/// Sylvester or Macaulay construction.
pub fn resultant(forms: &[HomogeneousForm]) -> Result<BigInt> {
    match forms {
        [f, g] if f.num_vars() == 2 && g.num_vars() == 2 => sylvester_resultant(f, g),
        _ => macaulay_resultant(forms),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn bin(deg: u32, c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::from_binary_i64(deg, c)
    }

    fn ternary(deg: u32, terms: &[([u32; 3], i64)]) -> HomogeneousForm {
        let t: BTreeMap<Vec<u32>, BigInt> =
            terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))).collect();
        HomogeneousForm::new(3, deg, t).unwrap()
    }

    #[test]
    fn shared_resultants_match_sylvester() {
        let f = HomogeneousForm::from_binary_i64(3, &[7, -123456789, 5, 987654321]);
        let gs: Vec<HomogeneousForm> = (0..4)
            .map(|j| HomogeneousForm::from_binary_i64(2, &[1 - j, 2 * j, 3 + j]))
            .collect();
        let shared = sylvester_resultants_shared(&f, &gs).unwrap();
        for (g, r) in gs.iter().zip(&shared) {
            assert_eq!(*r, sylvester_resultant(&f, g).unwrap());
        }
        let lin = [HomogeneousForm::from_binary_i64(1, &[2, -1])];
        assert_eq!(
            sylvester_resultants_shared(&f, &lin).unwrap()[0],
            sylvester_resultant(&f, &lin[0]).unwrap()
        );
    }

    #[test]
    fn determinant_small() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(7), BigInt::from(4)],
        ];
        assert_eq!(determinant(m), BigInt::from(1));
        let m = vec![
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(0), BigInt::from(5)],
        ];
        assert_eq!(determinant(m), BigInt::from(-5));
    }

    #[test]
    fn sylvester_examples() {
        // (x^2, y^2) -> 1
        assert_eq!(sylvester_resultant(&bin(2, &[0, 0, 1]), &bin(2, &[1, 0, 0])).unwrap(), BigInt::from(1));
        // (2x^2 + y^2, 2y^2) -> 16
        assert_eq!(sylvester_resultant(&bin(2, &[1, 0, 2]), &bin(2, &[2, 0, 0])).unwrap(), BigInt::from(16));
        // (x^2 - y^2, y^2) -> 1
        assert_eq!(sylvester_resultant(&bin(2, &[-1, 0, 1]), &bin(2, &[1, 0, 0])).unwrap(), BigInt::from(1));
        // common root (0:1)
        assert!(sylvester_resultant(&bin(2, &[0, 0, 1]), &bin(2, &[0, 1, 0])).unwrap().is_zero());
    }

    #[test]
    fn macaulay_examples() {
        let x2 = ternary(2, &[([2, 0, 0], 1)]);
        let y2 = ternary(2, &[([0, 2, 0], 1)]);
        let z2 = ternary(2, &[([0, 0, 2], 1)]);
        let xy = ternary(2, &[([1, 1, 0], 1)]);
        assert_eq!(macaulay_resultant(&[x2.clone(), y2.clone(), z2.clone()]).unwrap(), BigInt::from(1));
        assert!(macaulay_resultant(&[x2.clone(), y2.clone(), xy]).unwrap().is_zero());
        // (x^2 + xy, y^2 + zx + zy, z^2): good reduction everywhere
        let f0 = ternary(2, &[([2, 0, 0], 1), ([1, 1, 0], 1)]);
        let f1 = ternary(2, &[([0, 2, 0], 1), ([1, 0, 1], 1), ([0, 1, 1], 1)]);
        let r = macaulay_resultant(&[f0, f1, z2]).unwrap();
        assert_eq!(r.magnitude(), &num_bigint::BigUint::from(1u32));
    }

    #[test]
    fn macaulay_dimension_table() {
        assert_eq!(macaulay_dimension(3, 2), 15);
        assert_eq!(macaulay_dimension(3, 4), 66);
        assert_eq!(monomials(3, 4).len(), 15);
    }

    #[test]
    fn scaling_a_form_scales_the_resultant() {
        // Res is homogeneous of degree d^n in the coefficients of each form
        let f0 = ternary(2, &[([2, 0, 0], 1), ([0, 1, 1], 2)]);
        let f1 = ternary(2, &[([0, 2, 0], 1), ([1, 0, 1], -1)]);
        let f2 = ternary(2, &[([0, 0, 2], 1), ([1, 1, 0], 3)]);
        let r = macaulay_resultant(&[f0.clone(), f1.clone(), f2.clone()]).unwrap();
        let r3 = macaulay_resultant(&[f0.scale(&BigInt::from(3)), f1, f2]).unwrap();
        assert_eq!(r3, r * BigInt::from(81));
    }
}
