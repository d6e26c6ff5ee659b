//! The finite correction E(F) as an exact combination of logs of primes.

use arithdyn::exact::form::default_var_names;
use arithdyn::exact::parse_binary_form;
use arithdyn::finiteplaces::{e_finite, EMode};
use arithdyn::MapModel;

fn main() -> arithdyn::Result<()> {
    let xy = default_var_names(2);
    for p in [2i64, 3, 5] {
        let model = MapModel::binary(&[1, 0, p], &[p, 0, 0])?;
        let e = e_finite(&model, &parse_binary_form("x - y", &xy)?, EMode::Strict, 1e-12)?;
        println!("p = {p}: E = {} log {p}", e.coefficient(p as u64));
    }
    // roots of x^2 - 2 lie in Q_7 but not in Q_3
    let model = MapModel::binary(&[1, 0, 21], &[21, 0, 0])?;
    let f = parse_binary_form("x^2 - 2*y^2", &xy)?;
    let e = e_finite(&model, &f, EMode::Residual, 1e-9)?;
    println!("{}", serde_json::to_string_pretty(&e.to_json()).unwrap());
    match e_finite(&model, &f, EMode::Strict, 1e-9) {
        Err(err) => println!("strict mode: {err}"),
        Ok(_) => println!("strict mode resolved every prime"),
    }
    Ok(())
}
