//! Heights of divisors: the pushforward chain against the per-point sum.

use arithdyn::divisor::divisor_points;
use arithdyn::exact::form::default_var_names;
use arithdyn::exact::parse_binary_form;
use arithdyn::heights::{canonical_height_divisor, canonical_height_divisor_split, pushforward_divisor};
use arithdyn::MapModel;

fn main() -> arithdyn::Result<()> {
    let xy = default_var_names(2);
    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    let f = parse_binary_form("(x - 2*y)*(2*x + y)", &xy)?;
    let g = pushforward_divisor(&basilica, &f)?;
    println!("phi_* div({}) = div({})", f.display_with(&xy), g.display_with(&xy));

    let via_push = canonical_height_divisor(&basilica, &f, 12)?;
    let split = canonical_height_divisor_split(&basilica, &divisor_points(&f)?.rational, 1e-12)?;
    println!("pushforward {:.10} +- {:.1e}", via_push.value, via_push.error_bound);
    println!("per point   {:.10} +- {:.1e}", split.value, split.error_bound);

    let square = MapModel::power_map(1, 2);
    let golden = parse_binary_form("x^2 - x*y - y^2", &xy)?;
    println!("golden pair under z^2: {:.12}", canonical_height_divisor(&square, &golden, 4)?.value);
    Ok(())
}
