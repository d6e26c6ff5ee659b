//! Local heights at a finite prime: the increasing sequence `h_k` and its
//! exact limit.

use arithdyn::finiteplaces::{finite_local_height, local_height_sequence, r_v_bound, s_v};
use arithdyn::{MapModel, ProjectivePoint};
use num_rational::BigRational;

fn main() -> arithdyn::Result<()> {
    let model = MapModel::binary(&[1, 0, 2], &[2, 0, 0])?;
    let target = BigRational::new(1.into(), 1_000_000.into());
    for s in ["1:0", "1:1", "3:2", "1:4"] {
        let p: ProjectivePoint = s.parse()?;
        let seq: Vec<String> = local_height_sequence(&model, 2, &p, 5).iter().map(|q| q.to_string()).collect();
        let h = finite_local_height(&model, 2, &p, &target);
        println!(
            "({s}): S_2 = {}, h_k = [{}], limit {}",
            s_v(&model, 2, &p),
            seq.join(", "),
            h.exact_value().map_or(format!("~{}", h.value), |q| q.to_string())
        );
    }
    println!("R_2 = {}", r_v_bound(&model, 2));
    Ok(())
}
