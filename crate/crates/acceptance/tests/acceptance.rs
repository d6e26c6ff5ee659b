//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::time::{Duration, Instant};

use arithdyn::divisor::divisor_points;
use arithdyn::dynmodel::{apply_map, bad_reduction_primes};
use arithdyn::equilibrium::{affine, build_tree, default_base_point, integrate_log, invariance_check};
use arithdyn::exact::form::{default_var_names, HomogeneousForm};
use arithdyn::exact::parse_binary_form;
use arithdyn::finiteplaces::{e_finite, finite_local_height, local_height_sequence, r_v_bound, s_v, EMode};
use arithdyn::heights::{
    canonical_height_divisor, canonical_height_divisor_split, canonical_height_point, default_pushforward_depth,
    naive_height, pushforward_divisor,
};
use arithdyn::mahler::{mahler_report, MahlerConfig, DEFAULT_TREE_DEPTH};
use arithdyn::{MapModel, ProjectivePoint};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn form(s: &str) -> HomogeneousForm {
    parse_binary_form(s, &default_var_names(2)).unwrap()
}

fn pt(s: &str) -> ProjectivePoint {
    s.parse().unwrap()
}

fn random_model(rng: &mut ChaCha8Rng, good_reduction: bool) -> MapModel {
    loop {
        let mut c = || -> Vec<i64> { (0..3).map(|_| rng.gen_range(-3..=3)).collect() };
        let (p0, p1) = (c(), c());
        if let Ok(m) = MapModel::binary(&p0, &p1) {
            let unit = m.resultant().magnitude().is_one();
            if !good_reduction || unit {
                return m;
            }
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, bound: i64) -> ProjectivePoint {
    loop {
        let (a, b) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if let Ok(p) = ProjectivePoint::from_i64(&[a, b]) {
            return p;
        }
    }
}

/// `prod (x - r_i y)` for rational roots `r_i = num / den`, primitive.
fn split_form(roots: &[(i64, i64)]) -> HomogeneousForm {
    let mut f = HomogeneousForm::from_binary_i64(0, &[1]);
    for &(num, den) in roots {
        f = f.mul(&HomogeneousForm::from_binary_i64(1, &[-num, den]));
    }
    f.primitive_part().unwrap()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let square = MapModel::power_map(1, 2);
    let f = form("x^2 - x*y - y^2");
    let oracle = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let h = canonical_height_divisor(&square, &f, 4).unwrap();
    let tree = build_tree(&square, &default_base_point(), 12, 0).unwrap();
    let m = integrate_log(&tree, &f).unwrap();
    let elapsed = t.elapsed();
    let ok = (h.value - 0.481212).abs() <= 1e-6 && (h.value - oracle).abs() < 1e-12 && (m.value - h.value).abs() <= 2e-3;
    outcome(
        ok && elapsed < Duration::from_secs(10),
        format!(
            "h = {:.9}, integral(depth 12) = {:.9}, |diff| = {:.2e}, {:.2?}",
            h.value,
            m.value,
            (m.value - h.value).abs(),
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2i64, 3, 5] {
        let t = Instant::now();
        let model = MapModel::binary(&[1, 0, p], &[p, 0, 0]).unwrap();
        let f = form("x - y");
        let e = e_finite(&model, &f, EMode::Strict, 1e-12).unwrap();
        let c = e.coefficient(p as u64);
        let exact = e.details.iter().all(|d| d.exact);
        let report = mahler_report(&model, &f, &MahlerConfig::default()).unwrap();
        let elapsed = t.elapsed();
        let c_is_one = exact && c == BigRational::one();
        let residual_ok = report.residual.abs() <= report.budget && report.budget <= 5e-3;
        ok &= c_is_one && residual_ok && elapsed < Duration::from_secs(30);
        parts.push(format!(
            "p={p}: c_p = {c} (required 1), residual {:.1e} <= budget {:.1e}: {residual_ok}",
            report.residual, report.budget
        ));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let cases: [(&[&str], Vec<(u64, Vec<Vec<u64>>)>); 3] = [
        (&["x^2 + x*y", "y^2 + z*x + z*y", "z^2"], vec![]),
        (&["y^2 - 3*z^2", "x^2 - 3*y^2", "z*y"], vec![(3, vec![vec![0, 0, 1]])]),
        (
            &["3*y^2 - 5*z^2", "3*x^2 - 5*y^2", "z*y"],
            vec![(3, vec![vec![1, 0, 0]]), (5, vec![vec![0, 0, 1]])],
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (lift, expected) in cases {
        let s = Instant::now();
        let model = MapModel::from_strings(lift, None).unwrap();
        let report = bad_reduction_primes(&model);
        let good = report.indeterminacy == expected && report.cofactor.is_none();
        let primes: Vec<u64> = expected.iter().map(|(p, _)| *p).collect();
        ok &= good && report.small_primes() == primes && s.elapsed() < Duration::from_secs(5);
        parts.push(format!("bad primes {:?}", report.small_primes()));
    }
    outcome(ok, format!("{} ({:.2?})", parts.join(", "), t.elapsed()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = 2u32;
    let mut monotone = true;
    let mut bounded = true;
    let mut literal_violations = 0;
    let mut corrected_violations = 0;
    let target = BigRational::new(BigInt::one(), BigInt::from(1u64 << 40));
    for _ in 0..50 {
        let model = loop {
            let m = random_model(&mut rng, false);
            if !bad_reduction_primes(&m).small_primes().is_empty() && bad_reduction_primes(&m).cofactor.is_none() {
                break m;
            }
        };
        let primes = bad_reduction_primes(&model).small_primes();
        let p = primes[rng.gen_range(0..primes.len())];
        let point = random_point(&mut rng, 20);
        let r = r_v_bound(&model, p);
        let seq = local_height_sequence(&model, p, &point, 10);
        let cap = BigRational::new(BigInt::from(r), BigInt::from(d - 1));
        monotone &= seq.windows(2).all(|w| w[0] <= w[1]) && seq[0] >= BigRational::zero();
        bounded &= seq.iter().all(|h| *h <= cap);
        let h = finite_local_height(&model, p, &point, &target);
        let hi = finite_local_height(&model, p, &apply_map(&model, &point), &target);
        let df = BigRational::from_integer(BigInt::from(d));
        let slack = hi.width() + &df * h.width();
        let gap = |shift: BigRational| {
            let mid = &hi.lower_bound - &df * &h.lower_bound + shift;
            if mid < BigRational::zero() {
                -mid
            } else {
                mid
            }
        };
        if gap(BigRational::zero()) > slack {
            literal_violations += 1;
        }
        let s = BigRational::from_integer(BigInt::from(s_v(&model, p, &point)));
        if gap(s) > slack {
            corrected_violations += 1;
        }
    }
    outcome(
        monotone && bounded && literal_violations == 0,
        format!(
            "monotone {monotone}, h_k <= R/(d-1) {bounded}, |h(phi P) - d h(P)| outside bounds on {literal_violations}/50 \
             (with the S_v(P) term: {corrected_violations}/50)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let square = MapModel::power_map(1, 2);
    let mut worst_power: f64 = 0.0;
    for _ in 0..100 {
        let p = random_point(&mut rng, 1_000_000);
        let h = canonical_height_point(&square, &p, 1e-12).unwrap();
        worst_power = worst_power.max((h.value - naive_height(&p)).abs());
    }
    let mut fe_ok = true;
    let mut worst_gap: f64 = 0.0;
    let mut worst_bound: f64 = 0.0;
    for _ in 0..5 {
        let model = random_model(&mut rng, true);
        for _ in 0..10 {
            let p = random_point(&mut rng, 50);
            let h = canonical_height_point(&model, &p, 1e-9).unwrap();
            let hi = canonical_height_point(&model, &apply_map(&model, &p), 1e-9).unwrap();
            let gap = (hi.value - 2.0 * h.value).abs();
            let bound = hi.error_bound + 2.0 * h.error_bound;
            worst_gap = worst_gap.max(gap);
            worst_bound = worst_bound.max(bound);
            fe_ok &= gap <= bound && bound <= 1e-6;
        }
    }
    let periodic = [
        (MapModel::power_map(1, 2), vec!["0:1", "1:1", "-1:1", "1:0"]),
        (MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap(), vec!["0:1", "-1:1", "1:0"]),
        (MapModel::binary(&[-2, 0, 1], &[1, 0, 0]).unwrap(), vec!["2:1", "-1:1", "0:1", "-2:1"]),
        (MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap(), vec!["1:0"]),
    ];
    let mut worst_periodic: f64 = 0.0;
    for (m, pts) in &periodic {
        for s in pts {
            worst_periodic = worst_periodic.max(canonical_height_point(m, &pt(s), 1e-12).unwrap().value.abs());
        }
    }
    outcome(
        worst_power <= 1e-12 && fe_ok && worst_periodic <= 1e-9,
        format!(
            "power map |h - h_naive| <= {worst_power:.1e}; functional equation gap {worst_gap:.1e} within bounds <= {worst_bound:.1e}; periodic h <= {worst_periodic:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let models = [MapModel::power_map(1, 2),
        MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap(),
        MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap(),
        MapModel::binary(&[-2, 0, 1], &[1, 0, 0]).unwrap(),
        MapModel::binary(&[1, 1, 1], &[0, 1, 2]).unwrap()];
    let mut worst: f64 = 0.0;
    let mut worst_roots: f64 = 0.0;
    for i in 0..20 {
        let model = &models[i % models.len()];
        let deg = rng.gen_range(1..=3);
        let roots: Vec<(i64, i64)> = (0..deg).map(|_| (rng.gen_range(-9..=9), rng.gen_range(1..=3))).collect();
        let f = split_form(&roots);
        let pts = divisor_points(&f).unwrap().rational;
        let push = canonical_height_divisor(model, &f, 16).unwrap();
        let split = canonical_height_divisor_split(model, &pts, 1e-10).unwrap();
        worst = worst.max((push.value - split.value).abs());

        let g = pushforward_divisor(model, &f).unwrap();
        let mut image: Vec<Complex64> = pts
            .iter()
            .flat_map(|(p, m)| {
                let q = apply_map(model, p);
                let c = q.coords();
                let z = if c[1].is_zero() {
                    Complex64::new(f64::INFINITY, 0.0)
                } else {
                    Complex64::new(num_traits::ToPrimitive::to_f64(&BigRational::new(c[0].clone(), c[1].clone())).unwrap(), 0.0)
                };
                std::iter::repeat_n(z, *m)
            })
            .collect();
        let mut got: Vec<Complex64> = divisor_points(&g)
            .unwrap()
            .rational
            .iter()
            .flat_map(|(p, m)| {
                let c = p.coords();
                let w = [
                    Complex64::new(num_traits::ToPrimitive::to_f64(&c[0]).unwrap(), 0.0),
                    Complex64::new(num_traits::ToPrimitive::to_f64(&c[1]).unwrap(), 0.0),
                ];
                std::iter::repeat_n(affine(&w), *m)
            })
            .collect();
        let key = |z: &Complex64| z.re;
        image.sort_by(|a, b| key(a).total_cmp(&key(b)));
        got.sort_by(|a, b| key(a).total_cmp(&key(b)));
        if image.len() != got.len() || g.degree() != f.degree() {
            worst_roots = f64::INFINITY;
        } else {
            for (a, b) in image.iter().zip(&got) {
                let e = if a.re.is_infinite() && b.re.is_infinite() { 0.0 } else { (a - b).norm() };
                worst_roots = worst_roots.max(e);
            }
        }
    }
    outcome(
        worst <= 1e-4 && worst_roots <= 1e-8,
        format!("max |pushforward - split| = {worst:.1e}; max root mismatch {worst_roots:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let cases: Vec<(MapModel, &str)> = vec![
        (MapModel::power_map(1, 2), "x - 2*y"),
        (MapModel::power_map(1, 2), "3*x + y"),
        (MapModel::power_map(1, 3), "x - 2*y"),
        (MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap(), "x - 3*y"),
        (MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap(), "x^2 + y^2"),
        (MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap(), "x - y"),
        (MapModel::binary(&[-2, 0, 1], &[1, 0, 0]).unwrap(), "x - 5*y"),
        (MapModel::binary(&[1, 1, 1], &[0, 1, 2]).unwrap(), "x + 2*y"),
        (MapModel::binary(&[1, 0, 2], &[2, 0, 0]).unwrap(), "7"),
        (MapModel::binary(&[1, 3, 0], &[1, 0, 1]).unwrap(), "x - 4*y"),
    ];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (m, g) in &cases {
        let tree = build_tree(m, &default_base_point(), 10, 0).unwrap();
        let chk = invariance_check(m, &tree, &form(g)).unwrap();
        ok &= chk.agrees(3.0);
        worst = worst.max(chk.difference() / chk.spread);
    }
    let tree = build_tree(&MapModel::power_map(1, 2), &default_base_point(), 10, 0).unwrap();
    let mut args: Vec<f64> = tree
        .leaves()
        .iter()
        .map(|n| (affine(&n.point).arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI))
        .collect();
    args.sort_by(f64::total_cmp);
    let n = args.len() as f64;
    let ks = args
        .iter()
        .enumerate()
        .map(|(i, &u)| (u - i as f64 / n).abs().max(((i + 1) as f64 / n - u).abs()))
        .fold(0.0, f64::max);
    outcome(
        ok && ks <= 0.05,
        format!("invariance worst |diff|/spread = {worst:.2}; KS distance {ks:.4}"),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = MahlerConfig::default();
    let deeper = MahlerConfig {
        tree_depth: DEFAULT_TREE_DEPTH + 1,
        pushforward_depth: Some(2 * default_pushforward_depth(2)),
        ..MahlerConfig::default()
    };
    let mut passed = 0;
    let mut worst_budget: f64 = 0.0;
    let mut deeper_passed = 0;
    let mut monotone = true;
    let mut failures = Vec::new();
    for i in 0..20 {
        let model = random_model(&mut rng, false);
        let k = rng.gen_range(1..=2);
        let roots: Vec<(i64, i64)> = (0..k).map(|_| (rng.gen_range(-5..=5), 1)).collect();
        let f = split_form(&roots);
        let r = mahler_report(&model, &f, &cfg).unwrap();
        let r2 = mahler_report(&model, &f, &deeper).unwrap();
        worst_budget = worst_budget.max(r.budget);
        deeper_passed += r2.passes as usize;
        if r.passes && r.budget <= 5e-3 {
            passed += 1;
        } else {
            monotone &= r2.residual.abs() <= r.residual.abs();
            failures.push(format!("#{i} residual {:.1e} budget {:.1e}", r.residual, r.budget));
        }
    }
    let elapsed = t.elapsed();
    outcome(
        passed == 20 && elapsed < Duration::from_secs(300) && monotone,
        format!(
            "{passed}/20 pass, worst budget {worst_budget:.1e}, {deeper_passed}/20 pass at doubled depths, {elapsed:.2?}{}",
            if failures.is_empty() { String::new() } else { format!("; failing: {}", failures.join(", ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("classical Mahler measure", criterion_1),
        ("E value for (p x^2 + y^2, p y^2)", criterion_2),
        ("reduction examples on P^2", criterion_3),
        ("local-height laws", criterion_4),
        ("canonical-height laws", criterion_5),
        ("divisor-height oracle equivalence", criterion_6),
        ("measure invariance", criterion_7),
        ("randomized Mahler suite", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
