//! Validating lifts, bad primes, indeterminacy mod p and the negativity
//! conditions.

use arithdyn::dynmodel::{bad_reduction_primes, check_negativity_conditions, increment_bounds};
use arithdyn::MapModel;

fn main() -> arithdyn::Result<()> {
    for lift in [
        ["x^2 + x*y", "y^2 + z*x + z*y", "z^2"],
        ["y^2 - 3*z^2", "x^2 - 3*y^2", "z*y"],
        ["3*y^2 - 5*z^2", "3*x^2 - 5*y^2", "z*y"],
    ] {
        let model = MapModel::from_strings(&lift, None)?;
        let report = bad_reduction_primes(&model);
        println!("{:?}: resultant {}", lift, model.resultant());
        for (p, pts) in &report.indeterminacy {
            println!("  bad at {p}, common zeros mod {p}: {pts:?}");
        }
        let neg = check_negativity_conditions(&model, 3)?;
        println!("  negativity conditions hold up to k = {}", neg.verified_up_to);
    }

    match MapModel::from_strings(&["x^2", "x*y"], None) {
        Err(e) => println!("(x^2, x*y) rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    let b = increment_bounds(&basilica)?;
    println!("basilica: |h - h_naive| <= {:.4}", b.height_difference());
    println!("{}", basilica.to_json());
    Ok(())
}
