//! Both sides of the generalized Mahler formula, the difference form and
//! the inequality under the negativity conditions.

use arithdyn::exact::form::default_var_names;
use arithdyn::exact::parse_binary_form;
use arithdyn::mahler::{corollary_check, inequality_check, mahler_report, MahlerConfig};
use arithdyn::MapModel;

fn main() -> arithdyn::Result<()> {
    let xy = default_var_names(2);
    let form = |s: &str| parse_binary_form(s, &xy);
    let cfg = MahlerConfig::default();

    let square = MapModel::power_map(1, 2);
    println!("z^2, golden pair\n{}", mahler_report(&square, &form("x^2 - x*y - y^2")?, &cfg)?.table());

    let phi2 = MapModel::binary(&[1, 0, 2], &[2, 0, 0])?;
    println!("(2x^2 + y^2 : 2y^2), F = x - y\n{}", mahler_report(&phi2, &form("x - y")?, &cfg)?.table());

    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    let c = corollary_check(&basilica, &form("x - 3*y")?, &form("y")?, &cfg)?;
    println!("difference form\n{}", c.table());

    let monic = MapModel::binary(&[3, 0, 1], &[3, 0, 0])?;
    let r = inequality_check(&monic, &form("x")?, &cfg)?;
    println!("inequality: h(D) = {:.8} <= {:.8}: {} (E = {:.8})", r.lhs, r.arch, r.holds, r.e_value);
    Ok(())
}
