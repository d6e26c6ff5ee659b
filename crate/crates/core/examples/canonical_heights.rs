//! Canonical heights of rational points, split into archimedean and
//! finite parts.

use arithdyn::dynmodel::apply_map;
use arithdyn::heights::{canonical_height_point, naive_height};
use arithdyn::{MapModel, ProjectivePoint};

fn main() -> arithdyn::Result<()> {
    let model = MapModel::binary(&[1, 0, 2], &[2, 0, 0])?;
    for s in ["1:0", "1:1", "3:2", "-5:7"] {
        let p: ProjectivePoint = s.parse()?;
        let h = canonical_height_point(&model, &p, 1e-12)?;
        let hi = canonical_height_point(&model, &apply_map(&model, &p), 1e-12)?;
        println!(
            "({s}): h = {:.12} (naive {:.4}), arch {:.12}, finite {:?}, h(phi P) - 2 h(P) = {:.1e}",
            h.value,
            naive_height(&p),
            h.arch,
            h.finite.iter().map(|(p, c)| format!("{c} log {p}")).collect::<Vec<_>>(),
            hi.value - 2.0 * h.value
        );
    }
    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    let h = canonical_height_point(&basilica, &"0:1".parse()?, 1e-12)?;
    println!("basilica, periodic (0:1): h = {:.1e}", h.value);
    println!("{}", h.to_json());
    Ok(())
}
