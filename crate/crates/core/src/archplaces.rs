//! Archimedean local theory: the homogeneous escape rate
//! `G(x) = lim d^-k log ||Phi^k(x)||` in the sup norm.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynmodel::{increment_bounds, MapModel};
use crate::error::Result;

pub const DEFAULT_DEPTH: u32 = 30;

/// `G` at a point, with the geometric tail information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenValue {
    pub value: f64,
    pub depth: u32,
    /// Largest observed `|log ||Phi(x_j)|| |` for `j >= 1`, times `1/d`, so
    /// that `|g_(k+1) - g_k| <= rate_bound / d^k`.
    pub rate_bound: f64,
    /// Bound on `|G - g_depth|`; certified on `P^1`, estimated otherwise.
    pub tail_bound: f64,
    pub certified: bool,
}

/// Floating-point evaluator for the lift, reused across many points.
#[derive(Debug, Clone)]
pub struct GreenEvaluator {
    d: u32,
    /// per lift entry: (exponents, coefficient)
    terms: Vec<Vec<(Vec<u32>, f64)>>,
    /// Certified range of `log ||Phi(y)||` for `||y|| = 1`, when known.
    increment_range: Option<(f64, f64)>,
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl GreenEvaluator {
    pub fn new(model: &MapModel) -> Self {
        let increment_range = increment_bounds(model).ok().map(|b| (b.lower, b.upper));
        GreenEvaluator {
            d: model.degree(),
            terms: model.float_lift(),
            increment_range,
        }
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.terms
            .iter()
            .map(|ts| {
                ts.iter()
                    .map(|(e, c)| {
                        e.iter()
                            .zip(x)
                            .fold(Complex64::new(*c, 0.0), |acc, (&k, z)| if k == 0 { acc } else { acc * z.powu(k) })
                    })
                    .sum()
            })
            .collect()
    }

    /// One normalized step: `(Phi(x) / ||Phi(x)||, log ||Phi(x)||)`.
    pub fn step(&self, x: &[Complex64]) -> (Vec<Complex64>, f64) {
        let y = self.eval(x);
        let n = sup_norm(&y);
        (y.iter().map(|z| z / n).collect(), n.ln())
    }

    /// The per-step logs `log ||Phi(x_j)||`, `j = 0..depth`.
    pub fn increments(&self, x: &[Complex64], depth: u32) -> Vec<f64> {
        let mut cur = x.to_vec();
        let mut out = Vec::with_capacity(depth as usize);
        for _ in 0..depth {
            let (next, l) = self.step(&cur);
            out.push(l);
            cur = next;
        }
        out
    }

    pub fn green(&self, x: &[Complex64], depth: u32) -> GreenValue {
        let d = self.d as f64;
        let logs = self.increments(x, depth);
        let mut value = 0.0;
        let mut scale = 1.0;
        for l in &logs {
            scale /= d;
            value += scale * l;
        }
        let observed = logs.iter().skip(1).map(|l| l.abs()).fold(0.0, f64::max);
        let rate_bound = observed / d;
        let tail_scale = d.powi(-(depth as i32)) / (d - 1.0);
        let (tail_bound, certified) = match self.increment_range {
            Some((lo, hi)) => (lo.abs().max(hi.abs()) * tail_scale, true),
            None => (observed * tail_scale, false),
        };
        GreenValue {
            value,
            depth,
            rate_bound,
            tail_bound,
            certified,
        }
    }
}

/// `G(x)` at depth `depth`. For `||x|| = 1` this is the archimedean local
/// height `lambda_inf(x)`; in general `G(x) = lambda_inf(x/||x||) + log ||x||`.
pub fn green_value(model: &MapModel, x: &[Complex64], depth: u32) -> GreenValue {
    GreenEvaluator::new(model).green(x, depth)
}

/// `|sum lambda_i a_i| / exp(G(a))`, the canonical metric of the section
/// `lambda_0 T_0 + ... + lambda_n T_n` at `a`.
pub fn canonical_metric_norm(model: &MapModel, lambda: &[Complex64], a: &[Complex64], depth: u32) -> f64 {
    let s: Complex64 = lambda.iter().zip(a).map(|(l, x)| l * x).sum();
    s.norm() / green_value(model, a, depth).value.exp()
}

/// Observed convergence of `g_k` over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `max_x |g_(k+1)(x) - g_k(x)|` for `k = 0..depth`.
    pub increments: Vec<f64>,
    /// Fitted geometric ratio of the increments (0 when they vanish).
    pub ratio: f64,
    pub expected: f64,
    pub within_expected: bool,
}

pub const RATIO_SLACK: f64 = 0.05;

pub fn convergence_report(model: &MapModel, points: &[Vec<Complex64>], depth: u32) -> ConvergenceReport {
    let ev = GreenEvaluator::new(model);
    let d = ev.d as f64;
    let mut inc = vec![0.0f64; depth as usize];
    for x in points {
        let mut scale = 1.0;
        for (k, l) in ev.increments(x, depth).iter().enumerate() {
            scale /= d;
            inc[k] = inc[k].max((scale * l).abs());
        }
    }
    // least-squares slope of log increment over the second half
    let pts: Vec<(f64, f64)> = inc
        .iter()
        .enumerate()
        .skip(depth as usize / 2)
        .filter(|(_, &v)| v > 1e-300)
        .map(|(k, &v)| (k as f64, v.ln()))
        .collect();
    let ratio = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    } else {
        0.0
    };
    let expected = 1.0 / d;
    ConvergenceReport {
        increments: inc,
        ratio,
        expected,
        within_expected: ratio <= expected + RATIO_SLACK,
    }
}

/// A rectangle sampled row by row (imaginary part outer, real part inner).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// `G(z, 1)` on a grid of the affine chart of `P^1`, row-major.
pub fn green_grid(model: &MapModel, spec: &GridSpec, depth: u32) -> Result<Vec<(f64, f64, f64)>> {
    model.require_dim_one("the Green grid")?;
    let ev = GreenEvaluator::new(model);
    Ok((0..spec.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let im = axis(spec.im_min, spec.im_max, spec.ny, j);
            let ev = &ev;
            (0..spec.nx).map(move |i| {
                let re = axis(spec.re_min, spec.re_max, spec.nx, i);
                let g = ev.green(&[Complex64::new(re, im), Complex64::new(1.0, 0.0)], depth);
                (re, im, g.value)
            })
        })
        .collect())
}

/// Writes grid rows as CSV with header `re,im,green`.
pub fn write_grid_csv<W: Write>(out: &mut W, rows: &[(f64, f64, f64)]) -> std::io::Result<()> {
    writeln!(out, "re,im,green")?;
    for (re, im, g) in rows {
        writeln!(out, "{re},{im},{g}")?;
    }
    Ok(())
}
