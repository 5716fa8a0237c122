//! Spectrum verification: orthogonality of exponentials, truncated
//! completeness sums and the lattice tiling criterion.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::ft_indicator;
use crate::json::ser_q;
use crate::lattice::Lattice;
use crate::pointset::{exact_differences, parabolic_in_ball, parabolic_window, PointSet, WindowShape};
use crate::rational::{to_f64, to_f64_vec, Q};
use crate::region::Region;

/// `L*`, with basis the inverse transpose of the basis of `L`.
pub fn dual_lattice(l: &Lattice) -> Lattice {
    l.dual()
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub difference: Vec<f64>,
    pub abs_ft: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub pass: bool,
    pub radius: f64,
    pub tol: f64,
    pub differences_checked: usize,
    pub max_abs_ft: f64,
    pub violations: Vec<Violation>,
}

fn nonzero_differences(set: &PointSet, radius: f64) -> Vec<Vec<f64>> {
    if let Some(exact) = exact_differences(set, radius) {
        return exact.into_iter().filter(|t| t.iter().any(|x| !x.is_zero())).map(|t| to_f64_vec(&t)).collect();
    }
    let PointSet::ParabolicCube { alpha } = set else { unreachable!() };
    // Differences of window points, keyed by their integer indices so that
    // identical differences are generated once.
    let pts = parabolic_window(*alpha, WindowShape::Cube, radius);
    let mut keys: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
    for &(n, m) in &pts {
        for (n2, m2) in parabolic_in_ball(*alpha, &[n as f64, (n * n) as f64 * alpha + m as f64], radius) {
            if (n2, m2) != (n, m) {
                keys.insert((n, n2 - n, m2 - m));
            }
        }
    }
    keys.into_iter()
        .map(|(n, h, k)| vec![h as f64, (h * (2 * n + h)) as f64 * alpha + k as f64])
        .collect()
}

/// Tests `Λ - Λ ⊂ Z(R) ∪ {0}` on all differences of length at most
/// `radius`.
pub fn orthogonality_check(region: &Region, set: &PointSet, radius: f64, tol: f64) -> Result<OrthogonalityReport> {
    if set.dim() != region.dim() {
        return Err(Error::malformed("point set and region dimensions differ"));
    }
    let diffs = nonzero_differences(set, radius);
    if diffs.is_empty() && set.points_in_ball(&vec![0.0; set.dim()], radius).is_empty() {
        return Err(Error::WindowEmpty);
    }
    let values: Vec<(f64, f64)> = diffs
        .par_iter()
        .map(|t| {
            let v = ft_indicator(region, t);
            (v.value.norm(), v.abs_error_bound)
        })
        .collect();
    let mut violations = Vec::new();
    let mut max_abs_ft = 0.0f64;
    for (t, (abs, bound)) in diffs.iter().zip(&values) {
        max_abs_ft = max_abs_ft.max(*abs);
        if *abs > tol + bound {
            violations.push(Violation { difference: t.clone(), abs_ft: *abs });
        }
    }
    Ok(OrthogonalityReport {
        pass: violations.is_empty(),
        radius,
        tol,
        differences_checked: diffs.len(),
        max_abs_ft,
        violations,
    })
}

/// Regular sample grid: `n` points per axis at `lower + (upper - lower) i / n`,
/// `i = 0..n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points_per_axis: usize) -> Result<GridSpec> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::malformed("grid bounds must have equal positive dimension"));
        }
        if points_per_axis < 2 {
            return Err(Error::malformed("grid needs at least 2 points per axis"));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(Error::malformed("grid requires lower < upper on every axis"));
        }
        Ok(GridSpec { lower, upper, points_per_axis })
    }

    /// Symmetric cube `[-w, w)^d`.
    pub fn cube(d: usize, w: f64, points_per_axis: usize) -> Result<GridSpec> {
        GridSpec::new(vec![-w; d], vec![w; d], points_per_axis)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let n = self.points_per_axis;
        (0..self.dim())
            .map(|i| {
                let k = index % n;
                index /= n;
                self.lower[i] + (self.upper[i] - self.lower[i]) * k as f64 / n as f64
            })
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonality: Option<OrthogonalityReport>,
    pub completeness_residual: f64,
    pub worst_point: Vec<f64>,
    pub truncation_radius: f64,
    pub grid: GridSpec,
    /// Fewest points of the set entering any truncated sum.
    pub min_points_in_sum: usize,
    /// Largest contribution of the outer shell `R_t/2 < |x - λ| <= R_t`; for
    /// `|t|^{-2}` decay it matches the discarded tail.
    pub tail_estimate: f64,
    pub tail_note: String,
    pub warnings: Vec<String>,
}

/// Minimum number of points that should enter each truncated sum.
pub const MIN_POINTS_IN_SUM: usize = 1000;

/// `max_x |Σ_{|λ - x| <= R_t} f(x - λ) - 1|` over the grid, with
/// `f = m(R)^{-2} |1̂_R|²`.
pub fn completeness_residual(region: &Region, set: &PointSet, grid: &GridSpec, truncation: f64) -> Result<SpectrumReport> {
    if set.dim() != region.dim() || grid.dim() != region.dim() {
        return Err(Error::malformed("point set, grid and region dimensions differ"));
    }
    let m = to_f64(&region.measure());
    let center: Vec<f64> = grid.lower.iter().zip(&grid.upper).map(|(a, b)| (a + b) / 2.0).collect();
    let half_diag = grid.lower.iter().zip(&grid.upper).map(|(a, b)| (b - a) * (b - a) / 4.0).sum::<f64>().sqrt();
    let pts = set.points_in_ball(&center, truncation + half_diag);
    let results: Vec<(f64, usize, f64)> = grid
        .points()
        .par_iter()
        .map(|x| {
            let mut sum = 0.0;
            let mut shell = 0.0;
            let mut count = 0;
            let t2 = truncation * truncation;
            for p in &pts {
                let t: Vec<f64> = x.iter().zip(p).map(|(a, b)| a - b).collect();
                let r2: f64 = t.iter().map(|v| v * v).sum();
                if r2 > t2 {
                    continue;
                }
                count += 1;
                let f = ft_indicator(region, &t).value.norm_sqr() / (m * m);
                sum += f;
                if 4.0 * r2 > t2 {
                    shell += f;
                }
            }
            ((sum - 1.0).abs(), count, shell)
        })
        .collect();
    let points = grid.points();
    let (mut worst, mut worst_i) = (0.0f64, 0);
    for (i, r) in results.iter().enumerate() {
        if r.0 > worst {
            worst = r.0;
            worst_i = i;
        }
    }
    let min_points = results.iter().map(|r| r.1).min().unwrap_or(0);
    let tail = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if min_points < MIN_POINTS_IN_SUM {
        warnings.push(format!("only {min_points} points enter some truncated sum (want at least {MIN_POINTS_IN_SUM})"));
    }
    Ok(SpectrumReport {
        orthogonality: None,
        completeness_residual: worst,
        worst_point: points[worst_i].clone(),
        truncation_radius: truncation,
        grid: grid.clone(),
        min_points_in_sum: min_points,
        tail_estimate: tail,
        tail_note: "heuristic: finite grid and truncated sums corroborate or refute completeness but do not certify it"
            .into(),
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeTilingReport {
    pub pass: bool,
    #[serde(serialize_with = "ser_q")]
    pub measure: Q,
    #[serde(serialize_with = "ser_q")]
    pub covolume: Q,
    pub volume_matches: bool,
    pub dual_vectors_checked: usize,
    pub max_abs_ft: f64,
    pub tol: f64,
    pub nonzero_at: Vec<Vec<f64>>,
}

/// `R + L` tiles iff `m(R) = |det L|` and `1̂_R` vanishes on `L* \ {0}`;
/// the second condition is tested on the `n_dual` shortest dual vectors.
pub fn lattice_tiling_check(region: &Region, l: &Lattice, n_dual: usize, tol: f64) -> LatticeTilingReport {
    let measure = region.measure();
    let covolume = l.covolume();
    let volume_matches = (&measure - &covolume).abs().is_zero();
    let duals: Vec<Vec<f64>> = l.dual().shortest_nonzero(n_dual.max(1)).iter().map(|v| to_f64_vec(v)).collect();
    let values: Vec<(f64, f64)> = duals
        .par_iter()
        .map(|t| {
            let v = ft_indicator(region, t);
            (v.value.norm(), v.abs_error_bound)
        })
        .collect();
    let mut nonzero_at = Vec::new();
    let mut max_abs_ft = 0.0f64;
    for (t, (abs, bound)) in duals.iter().zip(&values) {
        max_abs_ft = max_abs_ft.max(*abs);
        if *abs > tol + bound {
            nonzero_at.push(t.clone());
        }
    }
    LatticeTilingReport {
        pass: volume_matches && nonzero_at.is_empty(),
        measure,
        covolume,
        volume_matches,
        dual_vectors_checked: duals.len(),
        max_abs_ft,
        tol,
        nonzero_at,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cube;
    use crate::rational::{q, qf, qvec};
    use crate::region::{AxisBox, BoxUnion};

    fn unit_interval() -> Region {
        Region::Boxes(BoxUnion::new(vec![AxisBox::new(vec![qf(-1, 2)], vec![qf(1, 2)]).unwrap()]).unwrap())
    }

    #[test]
    fn cube_orthogonality() {
        let r = Region::Polytope(cube(2, qf(1, 2)));
        let rep = orthogonality_check(&r, &PointSet::Lattice(Lattice::integer(2)), 3.0, 1e-8).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.differences_checked, 28);
        let half = PointSet::Lattice(Lattice::scaled_integer(2, qf(1, 2)));
        let rep = orthogonality_check(&r, &half, 3.0, 1e-8).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn sinc_squared_partial_sums() {
        // Oracle: Σ_{|k - x| <= R} sinc²(x - k) summed directly.
        let grid = GridSpec::new(vec![0.0], vec![1.0], 11).unwrap();
        let rep = completeness_residual(&unit_interval(), &PointSet::Lattice(Lattice::integer(1)), &grid, 200.0).unwrap();
        let mut worst = 0.0f64;
        for x in grid.points() {
            let x = x[0];
            let s: f64 = (-201i64..=202)
                .filter(|&k| (x - k as f64).abs() <= 200.0)
                .map(|k| {
                    let u = std::f64::consts::PI * (x - k as f64);
                    if u == 0.0 {
                        1.0
                    } else {
                        (u.sin() / u).powi(2)
                    }
                })
                .sum();
            worst = worst.max((s - 1.0).abs());
        }
        assert!((rep.completeness_residual - worst).abs() < 1e-12);
        assert!(rep.completeness_residual < 1e-2);
    }

    #[test]
    fn lattice_tiling() {
        let r = Region::Polytope(cube(3, qf(1, 2)));
        assert!(lattice_tiling_check(&r, &Lattice::integer(3), 50, 1e-8).pass);
        let rep = lattice_tiling_check(&r, &Lattice::scaled_integer(3, q(2)), 50, 1e-8);
        assert!(!rep.pass && !rep.volume_matches);
        let shear = Lattice::new(vec![qvec(&[1, 0, 0]), vec![qf(1, 2), q(1), q(0)], qvec(&[0, 0, 1])]).unwrap();
        assert!(lattice_tiling_check(&r, &shear, 50, 1e-8).pass);
    }

    #[test]
    fn grid_points() {
        let g = GridSpec::new(vec![0.0, -1.0], vec![1.0, 1.0], 4).unwrap();
        assert_eq!(g.len(), 16);
        assert_eq!(g.point(5), vec![0.25, -0.5]);
        assert!(GridSpec::new(vec![0.0], vec![1.0], 1).is_err());
    }
}
