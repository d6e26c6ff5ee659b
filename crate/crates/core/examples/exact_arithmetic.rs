//! Parsing, resultants, complex roots and Mahler measures.

use arithdyn::exact::form::default_var_names;
use arithdyn::exact::{complex_roots, mahler_measure, parse_binary_form, parse_form, resultant, IntPolynomial};

fn main() -> arithdyn::Result<()> {
    let xy = default_var_names(2);
    let f = parse_binary_form("x^2 - x*y - y^2", &xy)?;
    let g = parse_binary_form("x^3 - 2*y^3", &xy)?;
    println!("Res(F, G) = {}", resultant(&[f, g])?);

    let xyz = default_var_names(3);
    let lift: Vec<_> = ["y^2 - 3*z^2", "x^2 - 3*y^2", "z*y"]
        .iter()
        .map(|s| parse_form(s, &xyz))
        .collect::<Result<_, _>>()?;
    println!("Macaulay resultant of a P^2 lift = {}", resultant(&lift)?);

    let lehmer = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
    let m = mahler_measure(&lehmer, 1e-12)?;
    println!("log M(Lehmer) = {:.12} +- {:.1e}", m.value, m.error);

    for z in complex_roots(&IntPolynomial::from_i64(&[-1, -1, 1]), 1e-14)? {
        println!("root {:.12} {:+.12}i", z.re, z.im);
    }
    Ok(())
}
