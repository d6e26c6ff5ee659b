//! The archimedean escape rate, the canonical metric and a CSV grid.

use arithdyn::archplaces::{canonical_metric_norm, convergence_report, green_grid, green_value, write_grid_csv, GridSpec};
use arithdyn::MapModel;
use num_complex::Complex64;

fn main() -> arithdyn::Result<()> {
    let c = |re: f64| Complex64::new(re, 0.0);
    let basilica = MapModel::binary(&[-1, 0, 1], &[1, 0, 0])?;
    let g = green_value(&basilica, &[c(3.0), c(1.0)], 40);
    println!("G(3, 1) = {:.15} (tail <= {:.1e})", g.value, g.tail_bound);
    println!("|T_0|(3 : 1) = {:.12}", canonical_metric_norm(&basilica, &[c(1.0), c(0.0)], &[c(3.0), c(1.0)], 40));

    let cheb = MapModel::binary(&[-2, 0, 1], &[1, 0, 0])?;
    let pts: Vec<Vec<Complex64>> = (0..8).map(|i| vec![c(-1.7 + 0.45 * i as f64), c(1.0)]).collect();
    let r = convergence_report(&cheb, &pts, 30);
    println!("Chebyshev increments shrink by {:.4} per step (1/d = {})", r.ratio, r.expected);

    let spec = GridSpec { re_min: -2.0, re_max: 2.0, im_min: -1.0, im_max: 1.0, nx: 5, ny: 3 };
    let rows = green_grid(&basilica, &spec, 30)?;
    write_grid_csv(&mut std::io::stdout(), &rows)?;
    Ok(())
}
