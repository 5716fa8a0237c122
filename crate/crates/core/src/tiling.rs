//! Grid verification of weak tilings `1_R * μ = 1_{R^c}`.

use rayon::prelude::*;
use serde::Serialize;

use num_traits::Zero;

use crate::measure::{eval_convolution, Component, MeasureSpec};
use crate::rational::{from_f64_vec, QVec};
use crate::region::Region;
use crate::spectra::GridSpec;

/// Default margin as a fraction of the diameter.
pub const DEFAULT_MARGIN_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Atom,
    Fiber,
}

/// Part of `supp μ` inside `Δ(R)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportViolation {
    pub kind: ViolationKind,
    /// Atom position, or the point-axis coordinates of the fiber.
    pub position: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakTilingReport {
    pub pass: bool,
    pub max_residual_inside: f64,
    pub max_residual_outside: f64,
    pub worst_inside: Option<Vec<f64>>,
    pub worst_outside: Option<Vec<f64>>,
    pub support_violations: Vec<SupportViolation>,
    pub grid: GridSpec,
    pub margin: f64,
    pub tol: f64,
    pub points_evaluated: usize,
    pub points_excluded: usize,
    /// Points where a finite atom list does not reach far enough.
    pub points_outside_window: usize,
}

/// Grid covering `Δ(R)` plus one diameter around the center of `R`.
pub fn default_grid(region: &Region, points_per_axis: usize) -> crate::Result<GridSpec> {
    let c = region.center_f64();
    let w = 2.0 * region.diameter();
    GridSpec::new(c.iter().map(|x| x - w).collect(), c.iter().map(|x| x + w).collect(), points_per_axis)
}

fn exact_or_rounded(exact: &Option<QVec>, approx: &[f64]) -> Option<QVec> {
    exact.clone().or_else(|| from_f64_vec(approx).ok())
}

/// Atoms and product fibers of `μ` lying in `Δ(R)`.
pub fn support_violations(region: &Region, mu: &MeasureSpec) -> Vec<SupportViolation> {
    let d = region.dim();
    let reach = region.diameter() * (1.0 + 1e-9);
    let mut out = Vec::new();
    for a in mu.atoms_in_ball(&vec![0.0; d], reach) {
        if exact_or_rounded(&a.exact, &a.position).is_some_and(|t| region.in_delta(&t)) {
            out.push(SupportViolation { kind: ViolationKind::Atom, position: a.position.clone() });
        }
    }
    for comp in &mu.components {
        if let Component::ProductLebesgue { point_axes, point_set, exclude_origin, .. } = comp {
            let zero = vec![0.0; point_axes.len()];
            let pts: Vec<(Option<QVec>, Vec<f64>)> = match point_set.exact_points_in_ball(&zero, reach) {
                Some(ps) => ps.into_iter().map(|p| (Some(p.clone()), crate::rational::to_f64_vec(&p))).collect(),
                None => point_set.points_in_ball(&zero, reach).into_iter().map(|p| (None, p)).collect(),
            };
            for (exact, approx) in pts {
                let Some(p) = exact_or_rounded(&exact, &approx) else { continue };
                if *exclude_origin && p.iter().all(Zero::is_zero) {
                    continue;
                }
                if region.delta_meets_fiber(point_axes, &p) {
                    out.push(SupportViolation { kind: ViolationKind::Fiber, position: approx });
                }
            }
        }
    }
    out
}

/// True if `x` is within `margin` of a discontinuity of `1_R * μ` or `1_R`.
fn near_discontinuity(region: &Region, mu: &MeasureSpec, x: &[f64], margin: f64, center: &[f64], radius: f64) -> bool {
    if region.near_boundary(x, margin) {
        return true;
    }
    let shifted: Vec<f64> = x.iter().zip(center).map(|(a, b)| a - b).collect();
    for a in mu.atoms_in_ball(&shifted, radius + margin) {
        let y: Vec<f64> = x.iter().zip(&a.position).map(|(u, v)| u - v).collect();
        if region.near_boundary(&y, margin) {
            return true;
        }
    }
    for comp in &mu.components {
        if let Component::ProductLebesgue { point_axes, point_set, .. } = comp {
            let xv: Vec<f64> = point_axes.iter().map(|&i| x[i]).collect();
            let cv: Vec<f64> = point_axes.iter().map(|&i| shifted[i]).collect();
            for p in point_set.points_in_ball(&cv, radius + margin) {
                let v: Vec<f64> = xv.iter().zip(&p).map(|(a, b)| a - b).collect();
                if region.section_near_jump(point_axes, &v, margin) {
                    return true;
                }
            }
        }
    }
    false
}

enum Sample {
    Excluded,
    OutsideWindow,
    Inside(f64),
    Outside(f64),
}

/// Evaluates `1_R * μ` on the grid away from discontinuities and compares it
/// with `1_{R^c}`. Finite atom lists are trusted on `[-window, window]^d`.
pub fn weak_tiling_verify(region: &Region, mu: &MeasureSpec, grid: &GridSpec, tol: f64, margin: f64, window: f64) -> WeakTilingReport {
    let center = region.center_f64();
    let (lo, hi) = region.bounding_box();
    let radius = lo
        .iter()
        .zip(&hi)
        .zip(&center)
        .map(|((a, b), c)| (c - a).abs().max((b - c).abs()).powi(2))
        .sum::<f64>()
        .sqrt()
        * (1.0 + 1e-9);
    let samples: Vec<(Vec<f64>, Sample)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.point(i);
            if near_discontinuity(region, mu, &x, margin, &center, radius) {
                return (x, Sample::Excluded);
            }
            let s = match eval_convolution(region, mu, &x, window) {
                Err(_) => Sample::OutsideWindow,
                Ok(v) if region.contains_f64(&x) => Sample::Inside(v.abs()),
                Ok(v) => Sample::Outside((v - 1.0).abs()),
            };
            (x, s)
        })
        .collect();
    let mut rep = WeakTilingReport {
        pass: false,
        max_residual_inside: 0.0,
        max_residual_outside: 0.0,
        worst_inside: None,
        worst_outside: None,
        support_violations: support_violations(region, mu),
        grid: grid.clone(),
        margin,
        tol,
        points_evaluated: 0,
        points_excluded: 0,
        points_outside_window: 0,
    };
    for (x, s) in samples {
        match s {
            Sample::Excluded => rep.points_excluded += 1,
            Sample::OutsideWindow => rep.points_outside_window += 1,
            Sample::Inside(r) => {
                rep.points_evaluated += 1;
                if rep.worst_inside.is_none() || r > rep.max_residual_inside {
                    rep.max_residual_inside = r;
                    rep.worst_inside = Some(x);
                }
            }
            Sample::Outside(r) => {
                rep.points_evaluated += 1;
                if rep.worst_outside.is_none() || r > rep.max_residual_outside {
                    rep.max_residual_outside = r;
                    rep.worst_outside = Some(x);
                }
            }
        }
    }
    rep.pass = rep.points_evaluated > 0
        && rep.max_residual_inside <= tol
        && rep.max_residual_outside <= tol
        && rep.support_violations.is_empty();
    rep
}
