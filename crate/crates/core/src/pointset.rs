//! Countable point sets used as spectrum and tiling candidates.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::rational::{from_f64, norm2, sub, to_f64_vec, QVec, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowShape {
    /// Half-open cube `[-r, r)^d`.
    Cube,
    /// Open ball `|x| < r`.
    Ball,
}

impl WindowShape {
    pub fn contains_f64(self, x: &[f64], r: f64) -> bool {
        match self {
            WindowShape::Cube => x.iter().all(|&c| -r <= c && c < r),
            WindowShape::Ball => x.iter().map(|c| c * c).sum::<f64>() < r * r,
        }
    }

    pub fn contains(self, x: &[Q], r: &Q) -> bool {
        match self {
            WindowShape::Cube => x.iter().all(|c| &-r.clone() <= c && c < r),
            WindowShape::Ball => norm2(x) < r * r,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSet {
    Explicit(Vec<QVec>),
    Lattice(Lattice),
    /// `⋃_j (L + o_j)`.
    Periodic { lattice: Lattice, offsets: Vec<QVec> },
    /// `{(n, n²α + m) : n, m ∈ Z}` in the plane.
    ParabolicCube { alpha: f64 },
}

impl PointSet {
    pub fn explicit(points: Vec<QVec>) -> Result<PointSet> {
        let Some(first) = points.first() else {
            return Err(Error::malformed("explicit point set is empty"));
        };
        let d = first.len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::malformed("points have inconsistent dimensions"));
        }
        let distinct: BTreeSet<&QVec> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::malformed("explicit point set has repeated points"));
        }
        Ok(PointSet::Explicit(points))
    }

    pub fn periodic(lattice: Lattice, offsets: Vec<QVec>) -> Result<PointSet> {
        if offsets.is_empty() {
            return Err(Error::malformed("periodic set needs at least one offset"));
        }
        if offsets.iter().any(|o| o.len() != lattice.dim()) {
            return Err(Error::malformed("offset dimension differs from the lattice"));
        }
        let reduced: BTreeSet<QVec> = offsets.iter().map(|o| lattice.reduce(o)).collect();
        if reduced.len() != offsets.len() {
            return Err(Error::malformed("offsets are not distinct modulo the lattice"));
        }
        Ok(PointSet::Periodic { lattice, offsets })
    }

    pub fn parabolic_cube(alpha: f64) -> Result<PointSet> {
        if !alpha.is_finite() {
            return Err(Error::malformed("alpha must be finite"));
        }
        Ok(PointSet::ParabolicCube { alpha })
    }

    pub fn dim(&self) -> usize {
        match self {
            PointSet::Explicit(p) => p[0].len(),
            PointSet::Lattice(l) => l.dim(),
            PointSet::Periodic { lattice, .. } => lattice.dim(),
            PointSet::ParabolicCube { .. } => 2,
        }
    }

    /// Lattice and cosets describing the set, treating a lattice as a single
    /// coset of itself.
    pub fn cosets(&self) -> Option<(&Lattice, Vec<QVec>)> {
        match self {
            PointSet::Lattice(l) => Some((l, vec![vec![Q::zero(); l.dim()]])),
            PointSet::Periodic { lattice, offsets } => Some((lattice, offsets.clone())),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, PointSet::ParabolicCube { .. })
    }

    /// Points in the closed ball `|x - center| <= r`, exactly. `None` for
    /// sets with irrational coordinates.
    pub fn exact_points_in_ball(&self, center: &[f64], r: f64) -> Option<Vec<QVec>> {
        let r2 = r * r * (1.0 + 1e-12);
        let close = |p: &QVec| {
            to_f64_vec(p).iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2
        };
        match self {
            PointSet::Explicit(pts) => Some(pts.iter().filter(|p| close(p)).cloned().collect()),
            PointSet::Lattice(_) | PointSet::Periodic { .. } => {
                let (l, offsets) = self.cosets()?;
                let mut out = Vec::new();
                for o in &offsets {
                    let of = to_f64_vec(o);
                    let shifted: Vec<f64> = center.iter().zip(&of).map(|(c, x)| c - x).collect();
                    for c in l.coefficients_in_ball(&shifted, r) {
                        let p = crate::rational::add(&l.point(&c), o);
                        if close(&p) {
                            out.push(p);
                        }
                    }
                }
                out.sort();
                Some(out)
            }
            PointSet::ParabolicCube { .. } => None,
        }
    }

    /// Points in the closed ball, in floating point.
    pub fn points_in_ball(&self, center: &[f64], r: f64) -> Vec<Vec<f64>> {
        match self {
            PointSet::ParabolicCube { alpha } => parabolic_in_ball(*alpha, center, r)
                .into_iter()
                .map(|(n, m)| parabolic_point(*alpha, n, m).to_vec())
                .collect(),
            _ => self.exact_points_in_ball(center, r).unwrap().iter().map(|p| to_f64_vec(p)).collect(),
        }
    }

    /// Exact points of the window `shape(r)` for rational sets.
    pub fn exact_window(&self, shape: WindowShape, r: f64) -> Option<Vec<QVec>> {
        let rq = from_f64(r).ok()?;
        let reach = r * (self.dim() as f64).sqrt();
        let zero = vec![0.0; self.dim()];
        Some(self.exact_points_in_ball(&zero, reach)?.into_iter().filter(|p| shape.contains(p, &rq)).collect())
    }
}

pub(crate) fn parabolic_point(alpha: f64, n: i64, m: i64) -> [f64; 2] {
    [n as f64, ((n * n) as f64) * alpha + m as f64]
}

/// Index pairs `(n, m)` of points within distance `r` of `center`.
pub(crate) fn parabolic_in_ball(alpha: f64, center: &[f64], r: f64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let n_lo = (center[0] - r).ceil() as i64;
    let n_hi = (center[0] + r).floor() as i64;
    for n in n_lo..=n_hi {
        let dx = n as f64 - center[0];
        let rem = r * r - dx * dx;
        if rem < 0.0 {
            continue;
        }
        let h = rem.sqrt();
        let base = ((n * n) as f64) * alpha;
        let m_lo = (center[1] - h - base).ceil() as i64 - 1;
        let m_hi = (center[1] + h - base).floor() as i64 + 1;
        for m in m_lo..=m_hi {
            let p = parabolic_point(alpha, n, m);
            if (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) <= r * r {
                out.push((n, m));
            }
        }
    }
    out
}

/// Index pairs `(n, m)` of points in the window `shape(r)`.
pub(crate) fn parabolic_window(alpha: f64, shape: WindowShape, r: f64) -> Vec<(i64, i64)> {
    match shape {
        WindowShape::Ball => parabolic_in_ball(alpha, &[0.0, 0.0], r)
            .into_iter()
            .filter(|&(n, m)| shape.contains_f64(&parabolic_point(alpha, n, m), r))
            .collect(),
        WindowShape::Cube => {
            let mut out = Vec::new();
            let n_lo = (-r).ceil() as i64;
            for n in n_lo.. {
                if n as f64 >= r {
                    break;
                }
                let base = ((n * n) as f64) * alpha;
                let m_lo = (-r - base).ceil() as i64 - 1;
                let m_hi = (r - base).ceil() as i64 + 1;
                for m in m_lo..=m_hi {
                    if shape.contains_f64(&parabolic_point(alpha, n, m), r) {
                        out.push((n, m));
                    }
                }
            }
            out
        }
    }
}

/// Exact difference set `{a - b : a, b ∈ Λ, |a - b| <= r}` of a rational
/// set; for explicit sets all pairs of the list are used.
pub fn exact_differences(set: &PointSet, r: f64) -> Option<Vec<QVec>> {
    let zero = vec![0.0; set.dim()];
    let mut out: BTreeSet<QVec> = BTreeSet::new();
    match set {
        PointSet::Explicit(pts) => {
            let r2 = r * r * (1.0 + 1e-12);
            for a in pts {
                for b in pts {
                    let t = sub(a, b);
                    if to_f64_vec(&t).iter().map(|x| x * x).sum::<f64>() <= r2 {
                        out.insert(t);
                    }
                }
            }
        }
        PointSet::Lattice(_) | PointSet::Periodic { .. } => {
            let (l, offsets) = set.cosets()?;
            let mut shifts: BTreeSet<QVec> = BTreeSet::new();
            for a in &offsets {
                for b in &offsets {
                    shifts.insert(sub(a, b));
                }
            }
            for s in shifts {
                let coset = PointSet::Periodic { lattice: l.clone(), offsets: vec![s] };
                out.extend(coset.exact_points_in_ball(&zero, r)?);
            }
        }
        PointSet::ParabolicCube { .. } => return None,
    }
    Some(out.into_iter().collect())
}
