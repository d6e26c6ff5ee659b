//! The equilibrium measure of a map of `P^1`, realized as the limit of
//! uniform measures on iterated preimage fibers.
//!
//! Integrals use the affine integrand `log |F(z, 1)|`, which is the one
//! appearing in the Mahler formula together with the term
//! `deg F * h(infinity)`.

use std::io::Write;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynmodel::MapModel;
use crate::error::{Error, Result};
use crate::exact::form::HomogeneousForm;
use crate::exact::roots::aberth;

/// Maximum number of nodes on a single level.
pub const NODE_CAP: usize = 1 << 16;

pub const ROOT_TOLERANCE: f64 = 1e-14;

/// Chordal distance under which two fiber points are merged into one
/// point with multiplicity.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

/// Leaves where `|F| < SINGULAR_EPS * ||F||_1` (sup-normalized), below the
/// rounding noise of evaluating `F`, count as sitting on a zero of `F`.
pub const SINGULAR_EPS: f64 = 8.0 * f64::EPSILON;

/// Floor for reported spreads, so that agreement checks never demand
/// more than double precision delivers.
pub const SPREAD_FLOOR: f64 = 1e-12;

pub fn default_base_point() -> [Complex64; 2] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.8)]
}

/// Scales so that the larger coordinate has modulus 1.
pub fn sup_normalize(w: [Complex64; 2]) -> [Complex64; 2] {
    let n = w[0].norm().max(w[1].norm());
    [w[0] / n, w[1] / n]
}

/// Chordal distance between two points of `P^1`.
pub fn chordal(a: &[Complex64; 2], b: &[Complex64; 2]) -> f64 {
    let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
    let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
    (a[0] * b[1] - a[1] * b[0]).norm() / (na * nb)
}

/// Affine coordinate `x / y`, infinite at `(1:0)`.
pub fn affine(w: &[Complex64; 2]) -> Complex64 {
    if w[1].is_zero() {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        w[0] / w[1]
    }
}

/// Float coefficients of the pencil `w1 p0 - w0 p1`, by power of `x`.
struct Pencil {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Pencil {
    fn new(model: &MapModel) -> Self {
        let f = |h: &HomogeneousForm| {
            h.binary_coeffs()
                .iter()
                .map(|c| crate::exact::arith::scaled_f64(c, 0))
                .collect::<Vec<f64>>()
        };
        Pencil {
            a: f(&model.lift()[0]),
            b: f(&model.lift()[1]),
        }
    }

    fn fiber(&self, w: &[Complex64; 2], tolerance: f64) -> Result<Vec<([Complex64; 2], u64)>> {
        let d = self.a.len() - 1;
        let q: Vec<Complex64> = self.a.iter().zip(&self.b).map(|(a, b)| w[1] * a - w[0] * b).collect();
        let scale = q.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tiny = |c: &Complex64| c.norm() <= 1e-15 * scale;
        let top = (0..=d).rev().find(|&i| !tiny(&q[i])).ok_or_else(|| Error::Numeric {
            message: "degenerate pencil".into(),
            residual: scale,
        })?;
        let low = (0..=top).find(|&i| !tiny(&q[i])).unwrap();
        let mut pts: Vec<[Complex64; 2]> = Vec::with_capacity(d);
        let one = Complex64::new(1.0, 0.0);
        pts.extend(std::iter::repeat_n([one, Complex64::zero()], d - top));
        pts.extend(std::iter::repeat_n([Complex64::zero(), one], low));
        for r in aberth(&q[low..=top], tolerance)? {
            pts.push(sup_normalize([r.root, one]));
        }
        let mut out: Vec<([Complex64; 2], u64)> = Vec::new();
        for p in pts {
            match out.iter_mut().find(|(q, _)| chordal(q, &p) < CLUSTER_TOLERANCE) {
                Some(e) => e.1 += 1,
                None => out.push((p, 1)),
            }
        }
        out.sort_by(|x, y| {
            let (zx, zy) = (affine(&x.0), affine(&y.0));
            zx.re.total_cmp(&zy.re).then(zx.im.total_cmp(&zy.im))
        });
        Ok(out)
    }
}

/// The `d` preimages of `w` with multiplicity, sup-normalized.
pub fn preimage_fiber(model: &MapModel, w: &[Complex64; 2], tolerance: f64) -> Result<Vec<([Complex64; 2], u64)>> {
    model.require_dim_one("preimage fibers")?;
    Pencil::new(model).fiber(&sup_normalize(*w), tolerance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Sup-normalized coordinates.
    pub point: [Complex64; 2],
    pub mult: u64,
    /// Index of the image node on the previous level.
    pub parent: usize,
}

#[derive(Debug, Clone)]
pub struct PreimageTree {
    pub degree: u32,
    pub base: [Complex64; 2],
    pub seed: u64,
    pub levels: Vec<Vec<Node>>,
}

fn distinct_count(points: &[[Complex64; 2]]) -> usize {
    let mut seen: Vec<[Complex64; 2]> = Vec::new();
    for p in points {
        if !seen.iter().any(|q| chordal(p, q) < CLUSTER_TOLERANCE) {
            seen.push(*p);
        }
    }
    seen.len()
}

/// Full preimage tree of `z0` to `depth` levels. The seed rotates the
/// order of every fiber and has no other effect.
///
/// `z0` is rejected as exceptional when levels 0 to 2 contain at most two
/// distinct points.
pub fn build_tree(model: &MapModel, z0: &[Complex64; 2], depth: u32, seed: u64) -> Result<PreimageTree> {
    model.require_dim_one("the preimage tree")?;
    let pencil = Pencil::new(model);
    let d = model.degree() as usize;
    let base = sup_normalize(*z0);
    if !(base[0].norm().is_finite() && base[1].norm().is_finite()) {
        return Err(Error::invalid("base point must be a finite nonzero vector"));
    }
    let mut levels = vec![vec![Node {
        point: base,
        mult: 1,
        parent: 0,
    }]];
    for k in 0..depth.max(2) as usize {
        let prev = &levels[k];
        if k < depth as usize && prev.len() * d > NODE_CAP {
            return Err(Error::Budget(format!(
                "level {} would exceed the node cap of {NODE_CAP}",
                k + 1
            )));
        }
        let next: Vec<Vec<Node>> = prev
            .par_iter()
            .enumerate()
            .map(|(i, node)| {
                let mut fib = pencil.fiber(&node.point, ROOT_TOLERANCE)?;
                if !fib.is_empty() {
                    let s = (seed % fib.len() as u64) as usize;
                    fib.rotate_left(s);
                }
                Ok(fib
                    .into_iter()
                    .map(|(p, m)| Node {
                        point: p,
                        mult: m * node.mult,
                        parent: i,
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        levels.push(next.concat());
        if k == 1 {
            let early: Vec<[Complex64; 2]> = levels.iter().flatten().map(|n| n.point).collect();
            if distinct_count(&early) <= 2 {
                return Err(Error::invalid(format!(
                    "base point {} is exceptional: its backward orbit is finite",
                    format_point(&base)
                )));
            }
        }
    }
    levels.truncate(depth as usize + 1);
    Ok(PreimageTree {
        degree: model.degree(),
        base,
        seed,
        levels,
    })
}

fn format_point(w: &[Complex64; 2]) -> String {
    let z = affine(w);
    if z.re.is_infinite() {
        "(1:0)".into()
    } else {
        format!("({}{:+}i)", z.re, z.im)
    }
}

impl PreimageTree {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn leaves(&self) -> &[Node] {
        self.levels.last().unwrap()
    }

    /// Sum of multiplicities on level `k`; always `d^k`.
    pub fn level_weight(&self, k: usize) -> u64 {
        self.levels[k].iter().map(|n| n.mult).sum()
    }

    /// Largest chordal distance between the image of a node and its
    /// parent.
    pub fn max_image_error(&self, model: &MapModel) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.levels.len() {
            for n in &self.levels[k] {
                let y = model.eval_complex(&n.point);
                let parent = self.levels[k - 1][n.parent].point;
                worst = worst.max(chordal(&[y[0], y[1]], &parent));
            }
        }
        worst
    }

    /// CSV rows `level,re,im,mult` with the affine coordinate.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "level,re,im,mult")?;
        for (k, level) in self.levels.iter().enumerate() {
            for n in level {
                let z = affine(&n.point);
                writeln!(out, "{k},{},{},{}", z.re, if z.re.is_infinite() { 0.0 } else { z.im }, n.mult)?;
            }
        }
        Ok(())
    }
}

/// `log |F(z, 1)|` at a sup-normalized point, or `None` on (or numerically
/// on) a zero of `F` or at infinity.
fn affine_log(f: &FloatForm, w: &[Complex64; 2]) -> Option<f64> {
    if w[1].norm() < SINGULAR_EPS {
        return if f.degree == 0 { Some(f.eval(w).norm().ln()) } else { None };
    }
    let v = f.eval(w).norm();
    if v < SINGULAR_EPS * f.l1 {
        return None;
    }
    Some(v.ln() - f.degree as f64 * w[1].norm().ln())
}

struct FloatForm {
    coeffs: Vec<f64>,
    degree: u32,
    l1: f64,
}

impl FloatForm {
    fn new(f: &HomogeneousForm) -> Self {
        let coeffs: Vec<f64> = f
            .binary_coeffs()
            .iter()
            .map(|c| crate::exact::arith::scaled_f64(c, 0))
            .collect();
        let l1 = coeffs.iter().map(|c| c.abs()).sum();
        FloatForm {
            coeffs,
            degree: f.degree(),
            l1,
        }
    }

    fn eval(&self, w: &[Complex64; 2]) -> Complex64 {
        let m = self.degree as usize;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| w[0].powu(i as u32) * w[1].powu((m - i) as u32) * c)
            .sum()
    }
}

/// `d^-k * sum mult * log |F(z, 1)|` on one level. Singular leaves are
/// replaced by the level mean of the others; returns the estimate and the
/// number of singular leaves.
fn level_estimate(f: &FloatForm, level: &[Node], image: Option<&MapModel>) -> (f64, usize) {
    let mut sum = 0.0;
    let mut w_ok = 0.0;
    let mut singular = 0;
    for n in level {
        let p = match image {
            Some(m) => {
                let y = m.eval_complex(&n.point);
                sup_normalize([y[0], y[1]])
            }
            None => n.point,
        };
        match affine_log(f, &p) {
            Some(l) => {
                sum += n.mult as f64 * l;
                w_ok += n.mult as f64;
            }
            None => singular += 1,
        }
    }
    let value = if w_ok > 0.0 { sum / w_ok } else { f64::NAN };
    (value, singular)
}

/// An integral against the equilibrium measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Largest deviation of the last three level estimates from `value`.
    pub spread: f64,
    /// Estimate on each level `0..=depth`.
    pub levels: Vec<f64>,
    /// Leaves on the deepest level treated as sitting on a zero of `F`.
    pub singular_leaves: usize,
}

fn assemble(levels: Vec<f64>, singular_leaves: usize) -> MeasureEstimate {
    let k = levels.len() - 1;
    let value = if singular_leaves > 0 && k >= 1 {
        (levels[k] + levels[k - 1]) / 2.0
    } else {
        levels[k]
    };
    let spread = levels[k.saturating_sub(2)..]
        .iter()
        .map(|l| (l - value).abs())
        .fold(SPREAD_FLOOR, f64::max);
    MeasureEstimate {
        value,
        spread,
        levels,
        singular_leaves,
    }
}

impl MeasureEstimate {
    /// Level-by-level difference `self - other` of two integrals on the
    /// same tree, with its own spread.
    pub fn difference(&self, other: &MeasureEstimate) -> MeasureEstimate {
        let levels = self.levels.iter().zip(&other.levels).map(|(a, b)| a - b).collect();
        assemble(levels, self.singular_leaves + other.singular_leaves)
    }
}

/// `integral log |F(z, 1)| dmu` from the leaves of the tree. Leaves on a
/// zero of `F` are left out of the average and, when present on the
/// deepest level, the result averages the two deepest levels.
pub fn integrate_log(tree: &PreimageTree, f: &HomogeneousForm) -> Result<MeasureEstimate> {
    if f.num_vars() != 2 {
        return Err(Error::invalid("integrate_log needs a binary form"));
    }
    if f.is_zero() {
        return Err(Error::invalid("log |F| is undefined for F = 0"));
    }
    let ff = FloatForm::new(f);
    let mut levels = Vec::with_capacity(tree.levels.len());
    let mut singular = 0;
    for level in &tree.levels {
        let (v, s) = level_estimate(&ff, level, None);
        levels.push(v);
        singular = s;
    }
    Ok(assemble(levels, singular))
}

/// Invariance of the measure under the map. `direct` is the deepest-level
/// estimate of `integral log |G(z, 1)| dmu`; `pulled_back` estimates
/// `integral log |G(Phi(z, 1))| dmu - m integral log |p_1(z, 1)| dmu`, which
/// is the same integral after the change of variables `w = phi(z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub direct: f64,
    pub pulled_back: f64,
    pub spread: f64,
}

impl InvarianceCheck {
    pub fn difference(&self) -> f64 {
        (self.direct - self.pulled_back).abs()
    }

    pub fn agrees(&self, factor: f64) -> bool {
        self.difference() <= factor * self.spread
    }
}

/// Base point of the second tree used by [`invariance_check`].
fn alternate_base(base: &[Complex64; 2]) -> [Complex64; 2] {
    let first = sup_normalize([Complex64::new(1.0, 0.0), Complex64::new(-0.7, 0.4)]);
    if chordal(&first, base) > 1e-3 {
        first
    } else {
        sup_normalize([Complex64::new(0.3, -0.9), Complex64::new(1.0, 0.0)])
    }
}

/// Compares the level-k estimate from `tree` with the level-(k-1) estimate
/// of the pulled-back integrand on a second tree over a different base
/// point. On one tree the pullback at level k-1 would just repeat level
/// k-2, so the second tree is what makes the comparison informative.
pub fn invariance_check(model: &MapModel, tree: &PreimageTree, g: &HomogeneousForm) -> Result<InvarianceCheck> {
    model.require_dim_one("invariance check")?;
    if tree.depth() < 2 {
        return Err(Error::invalid("invariance check needs tree depth >= 2"));
    }
    let direct = integrate_log(tree, g)?;
    let other = build_tree(model, &alternate_base(&tree.base), tree.depth() - 1, tree.seed.wrapping_add(1))?;
    let composed = g.compose(model.lift())?;
    let pole_term = model.lift()[1].pow(g.degree());
    let pulled = integrate_log(&other, &composed)?.difference(&integrate_log(&other, &pole_term)?);
    Ok(InvarianceCheck {
        direct: direct.value,
        pulled_back: pulled.value,
        spread: direct.spread + pulled.spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::form::default_var_names;
    use crate::exact::parse::parse_binary_form;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn form(s: &str) -> HomogeneousForm {
        parse_binary_form(s, &default_var_names(2)).unwrap()
    }

    fn basilica() -> MapModel {
        MapModel::binary(&[-1, 0, 1], &[1, 0, 0]).unwrap()
    }

    fn affine_points(f: &[([Complex64; 2], u64)]) -> Vec<(Complex64, u64)> {
        f.iter().map(|(p, m)| (affine(p), *m)).collect()
    }

    #[test]
    fn fibers() {
        let sq = MapModel::power_map(1, 2);
        let f = affine_points(&preimage_fiber(&sq, &[c(4.0, 0.0), c(1.0, 0.0)], 1e-14).unwrap());
        assert_eq!(f.len(), 2);
        assert!((f[0].0 - c(-2.0, 0.0)).norm() < 1e-12 && (f[1].0 - c(2.0, 0.0)).norm() < 1e-12);
        let f = affine_points(&preimage_fiber(&basilica(), &[c(3.0, 0.0), c(1.0, 0.0)], 1e-14).unwrap());
        assert!((f[0].0 - c(-2.0, 0.0)).norm() < 1e-12 && (f[1].0 - c(2.0, 0.0)).norm() < 1e-12);
        let f = preimage_fiber(&sq, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-14).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 2);
        assert!(affine(&f[0].0).re.is_infinite());
    }

    #[test]
    fn trees() {
        let sq = MapModel::power_map(1, 2);
        let t = build_tree(&sq, &[c(0.6, 0.8), c(1.0, 0.0)], 6, 0).unwrap();
        for n in t.leaves() {
            let z = affine(&n.point);
            assert!((z.norm() - 1.0).abs() < 1e-12);
            assert!((z.powu(64) - c(0.6, 0.8)).norm() < 1e-10);
        }
        assert!(build_tree(&sq, &[c(0.0, 0.0), c(1.0, 0.0)], 4, 0).is_err());
        let t = build_tree(&basilica(), &[c(2.0, 1.0), c(1.0, 0.0)], 10, 0).unwrap();
        assert_eq!(t.level_weight(10), 1024);
        assert_eq!(t.leaves().len(), 1024);
        assert!(t.max_image_error(&basilica()) < 1e-8);
    }

    #[test]
    fn jensen_integrals() {
        let sq = MapModel::power_map(1, 2);
        let t = build_tree(&sq, &default_base_point(), 12, 0).unwrap();
        let e = integrate_log(&t, &form("x - 2*y")).unwrap();
        assert!((e.value - 2f64.ln()).abs() < 1e-6, "{}", e.value);
        // the root 1/2 is inside the circle, so only the leading coefficient
        // counts; level k sees log 2 + log |1/2^(2^k) - z0| / 2^k
        let e = integrate_log(&t, &form("2*x - y")).unwrap();
        let z0 = affine(&t.base);
        assert!((e.value - 2f64.ln() - z0.norm().ln() / 4096.0).abs() < 1e-12, "{}", e.value);
        assert!((e.value - 2f64.ln()).abs() <= e.spread);
        let e = integrate_log(&t, &form("x - y")).unwrap();
        assert!(e.value.abs() < 1e-3, "{}", e.value);
    }

    #[test]
    fn basilica_potential() {
        // sum over the level-k preimages of log |z - a| is log |phi^k(a) - z0|
        let t = build_tree(&basilica(), &default_base_point(), 12, 0).unwrap();
        let z0 = affine(&t.base);
        let e = integrate_log(&t, &form("x")).unwrap();
        let mut a = c(0.0, 0.0);
        for k in 0..=12usize {
            let oracle = (a - z0).norm().ln() / 2f64.powi(k as i32);
            assert!((e.levels[k] - oracle).abs() < 1e-9, "level {k}");
            a = a * a - 1.0;
        }
        assert!(e.value.abs() <= e.spread.max(1e-3));
    }

    #[test]
    fn invariance() {
        let sq = MapModel::power_map(1, 2);
        let t = build_tree(&sq, &default_base_point(), 10, 3).unwrap();
        let chk = invariance_check(&sq, &t, &form("x - 2*y")).unwrap();
        assert!((chk.direct - 2f64.ln()).abs() < 1e-6);
        assert!((chk.pulled_back - 2f64.ln()).abs() < 1e-6);
        let chk = invariance_check(&sq, &t, &HomogeneousForm::from_binary_i64(0, &[5])).unwrap();
        assert!((chk.direct - 5f64.ln()).abs() < 1e-12 && (chk.pulled_back - 5f64.ln()).abs() < 1e-12);
        let b = basilica();
        let t = build_tree(&b, &default_base_point(), 10, 0).unwrap();
        let chk = invariance_check(&b, &t, &form("x - 3*y")).unwrap();
        assert!(chk.agrees(3.0), "{chk:?}");
    }

    #[test]
    fn seed_only_reorders() {
        let b = basilica();
        let t0 = build_tree(&b, &default_base_point(), 6, 0).unwrap();
        let t1 = build_tree(&b, &default_base_point(), 6, 1).unwrap();
        let v0 = integrate_log(&t0, &form("x - 3*y")).unwrap().value;
        let v1 = integrate_log(&t1, &form("x - 3*y")).unwrap().value;
        assert!((v0 - v1).abs() < 1e-12);
    }

    #[test]
    fn csv_dump() {
        let t = build_tree(&MapModel::power_map(1, 2), &default_base_point(), 2, 0).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("level,re,im,mult\n0,"));
        assert_eq!(s.lines().count(), 1 + 1 + 2 + 4);
    }
}
