//! Preimage trees, integrals against the equilibrium measure and the
//! invariance check.

use arithdyn::equilibrium::{build_tree, default_base_point, integrate_log, invariance_check};
use arithdyn::exact::form::default_var_names;
use arithdyn::exact::parse_binary_form;
use arithdyn::MapModel;

fn main() -> arithdyn::Result<()> {
    let xy = default_var_names(2);
    let square = MapModel::power_map(1, 2);
    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    for (name, model) in [("z^2", &square), ("z^2 - 1", &basilica)] {
        let tree = build_tree(model, &default_base_point(), 12, 0)?;
        println!("{name}: {} leaves, image error {:.1e}", tree.leaves().len(), tree.max_image_error(model));
        for f in ["x - 2*y", "x", "x - 3*y"] {
            let e = integrate_log(&tree, &parse_binary_form(f, &xy)?)?;
            println!("  int log|{f}| dmu = {:.10} +- {:.1e}", e.value, e.spread);
        }
        let chk = invariance_check(model, &tree, &parse_binary_form("x - 3*y", &xy)?)?;
        println!("  invariance: {:.10} vs {:.10}", chk.direct, chk.pulled_back);
    }
    Ok(())
}
