//! Positive, locally finite measures built from atomic, periodic,
//! product-Lebesgue and uniform pieces.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::pointset::PointSet;
use crate::rational::{add, from_f64, to_f64, to_f64_vec, QVec, Q};
use crate::region::Region;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub position: Vec<f64>,
    /// Exact position when known.
    pub exact: Option<QVec>,
    pub weight: f64,
}

impl Atom {
    pub fn exact(position: QVec, weight: f64) -> Atom {
        Atom { position: to_f64_vec(&position), exact: Some(position), weight }
    }

    pub fn approximate(position: Vec<f64>, weight: f64) -> Atom {
        Atom { position, exact: None, weight }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    Atoms(Vec<Atom>),
    /// `Σ_j w_j δ_{L + o_j}`, optionally without the atom at the origin.
    LatticeAtoms { lattice: Lattice, offsets: Vec<QVec>, weights: Vec<f64>, exclude_origin: bool },
    /// `δ_P × (density · m)`: atoms of `P` on the coordinates `point_axes`
    /// times Lebesgue measure on the remaining coordinates.
    ProductLebesgue { point_axes: Vec<usize>, point_set: PointSet, density: f64, exclude_origin: bool },
    Uniform { density: f64 },
}

impl Component {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Component::Atoms(a) => a.first().map(|x| x.position.len()),
            Component::LatticeAtoms { lattice, .. } => Some(lattice.dim()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |w: f64, what: &str| {
            if w.is_finite() && w > 0.0 {
                Ok(())
            } else {
                Err(Error::malformed(format!("{what} must be positive and finite, got {w}")))
            }
        };
        match self {
            Component::Atoms(atoms) => {
                let d = atoms.first().map(|a| a.position.len()).unwrap_or(0);
                for a in atoms {
                    positive(a.weight, "atom weight")?;
                    if a.position.len() != d {
                        return Err(Error::malformed("atoms have inconsistent dimensions"));
                    }
                }
            }
            Component::LatticeAtoms { lattice, offsets, weights, .. } => {
                if offsets.len() != weights.len() || offsets.is_empty() {
                    return Err(Error::malformed("lattice atoms need one weight per offset"));
                }
                for w in weights {
                    positive(*w, "lattice atom weight")?;
                }
                PointSet::periodic(lattice.clone(), offsets.clone())?;
            }
            Component::ProductLebesgue { point_axes, point_set, density, .. } => {
                positive(*density, "density")?;
                let distinct: BTreeSet<&usize> = point_axes.iter().collect();
                if point_axes.is_empty() || distinct.len() != point_axes.len() {
                    return Err(Error::malformed("point axes must be distinct and nonempty"));
                }
                if point_set.dim() != point_axes.len() {
                    return Err(Error::malformed("point set dimension must equal the number of point axes"));
                }
            }
            Component::Uniform { density } => positive(*density, "density")?,
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    pub components: Vec<Component>,
}

/// Unit-ball masses are sampled on this many points per axis of `[-5, 5]^d`.
pub const TRANSLATION_BOUND_GRID: usize = 10;

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

fn circumradius(region: &Region) -> (Vec<f64>, f64) {
    let c = region.center_f64();
    let (lo, hi) = region.bounding_box();
    let r = lo
        .iter()
        .zip(&hi)
        .zip(&c)
        .map(|((a, b), m)| (m - a).abs().max((b - m).abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    (c, r * (1.0 + 1e-9) + 1e-12)
}

fn is_zero_point(l: &Lattice, coeffs: &[i64], offset: &QVec, approx: &[f64]) -> bool {
    approx.iter().all(|x| x.abs() < 1e-6) && add(&l.point(coeffs), offset).iter().all(Zero::is_zero)
}

/// Lattice atom positions `L + o_j` within distance `r` of `center`.
fn lattice_points(l: &Lattice, offsets: &[QVec], exclude_origin: bool, center: &[f64], r: f64) -> Vec<(usize, Vec<f64>, QVec)> {
    let mut out = Vec::new();
    for (j, o) in offsets.iter().enumerate() {
        let of = to_f64_vec(o);
        let shifted: Vec<f64> = center.iter().zip(&of).map(|(c, x)| c - x).collect();
        for c in l.coefficients_in_ball(&shifted, r) {
            let exact = add(&l.point(&c), o);
            let approx = to_f64_vec(&exact);
            if exclude_origin && is_zero_point(l, &c, o, &approx) {
                continue;
            }
            out.push((j, approx, exact));
        }
    }
    out
}

impl MeasureSpec {
    pub fn new(components: Vec<Component>) -> Result<MeasureSpec> {
        if components.is_empty() {
            return Err(Error::malformed("measure has no components"));
        }
        for c in &components {
            c.validate()?;
        }
        let dims: BTreeSet<usize> = components.iter().filter_map(Component::dim).collect();
        if dims.len() > 1 {
            return Err(Error::malformed("components have inconsistent dimensions"));
        }
        Ok(MeasureSpec { components })
    }

    pub fn dim(&self) -> Option<usize> {
        self.components.iter().find_map(Component::dim)
    }

    /// Atoms (from atomic and lattice components) in the closed ball, sorted
    /// by position.
    pub fn atoms_in_ball(&self, center: &[f64], r: f64) -> Vec<Atom> {
        let mut out = Vec::new();
        let r2 = r * r * (1.0 + 1e-12);
        for c in &self.components {
            match c {
                Component::Atoms(atoms) => out.extend(
                    atoms
                        .iter()
                        .filter(|a| a.position.iter().zip(center).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() <= r2)
                        .cloned(),
                ),
                Component::LatticeAtoms { lattice, offsets, weights, exclude_origin } => {
                    for (j, _, exact) in lattice_points(lattice, offsets, *exclude_origin, center, r) {
                        out.push(Atom::exact(exact, weights[j]));
                    }
                }
                _ => {}
            }
        }
        out.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// True if the measure has a component that is not atomic.
    pub fn has_continuous_part(&self) -> bool {
        self.components
            .iter()
            .any(|c| matches!(c, Component::ProductLebesgue { .. } | Component::Uniform { .. }))
    }

    /// Largest mass of a unit ball centered on a grid over `[-5, 5]^d`.
    pub fn translation_bound(&self, d: usize) -> f64 {
        let n = TRANSLATION_BOUND_GRID;
        let total = n.pow(d as u32);
        let mut best = 0.0f64;
        for idx in 0..total {
            let mut k = idx;
            let c: Vec<f64> = (0..d)
                .map(|_| {
                    let i = k % n;
                    k /= n;
                    -5.0 + 10.0 * i as f64 / (n - 1) as f64
                })
                .collect();
            best = best.max(self.unit_ball_mass(&c));
        }
        best
    }

    fn unit_ball_mass(&self, c: &[f64]) -> f64 {
        let d = c.len();
        let mut m = 0.0;
        for comp in &self.components {
            match comp {
                Component::Atoms(_) | Component::LatticeAtoms { .. } => {}
                Component::ProductLebesgue { point_axes, point_set, density, exclude_origin } => {
                    let cv: Vec<f64> = point_axes.iter().map(|&i| c[i]).collect();
                    let w = d - point_axes.len();
                    for p in point_set.points_in_ball(&cv, 1.0) {
                        if *exclude_origin && p.iter().all(|x| *x == 0.0) {
                            continue;
                        }
                        let r2 = 1.0 - p.iter().zip(&cv).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
                        if r2 > 0.0 {
                            m += density * unit_ball_volume(w) * r2.powf(w as f64 / 2.0);
                        }
                    }
                }
                Component::Uniform { density } => m += density * unit_ball_volume(d),
            }
        }
        m + self.atoms_in_ball(c, 1.0).iter().map(|a| a.weight).sum::<f64>()
    }
}

/// `(1_R * μ)(x) = μ(x - R)`.
///
/// Finite atom lists are taken to describe `μ` only on `[-window, window]^d`,
/// so `x - R` must lie inside that box.
pub fn eval_convolution(region: &Region, mu: &MeasureSpec, x: &[f64], window: f64) -> Result<f64> {
    Ok(convolution_terms(region, mu, x, window)?.iter().sum())
}

/// Per-component values of the convolution at `x`.
pub fn convolution_terms(region: &Region, mu: &MeasureSpec, x: &[f64], window: f64) -> Result<Vec<f64>> {
    let d = region.dim();
    if x.len() != d {
        return Err(Error::malformed("evaluation point has the wrong dimension"));
    }
    if let Some(md) = mu.dim() {
        if md != d {
            return Err(Error::malformed("measure and region dimensions differ"));
        }
    }
    let (center, radius) = circumradius(region);
    let shifted_center: Vec<f64> = x.iter().zip(&center).map(|(a, b)| a - b).collect();
    let in_region = |t: &[f64]| {
        let y: Vec<f64> = x.iter().zip(t).map(|(a, b)| a - b).collect();
        region.contains_f64(&y)
    };
    let mut out = Vec::with_capacity(mu.components.len());
    for comp in &mu.components {
        let v = match comp {
            Component::Atoms(atoms) => {
                let (lo, hi) = region.bounding_box();
                if (0..d).any(|i| x[i] - hi[i] < -window || x[i] - lo[i] > window) {
                    return Err(Error::WindowTooSmall(format!(
                        "x - R leaves [-{window}, {window}]^{d} at x = {x:?}"
                    )));
                }
                atoms.iter().filter(|a| in_region(&a.position)).map(|a| a.weight).sum()
            }
            Component::LatticeAtoms { lattice, offsets, weights, exclude_origin } => {
                lattice_points(lattice, offsets, *exclude_origin, &shifted_center, radius)
                    .into_iter()
                    .filter(|(_, t, _)| in_region(t))
                    .map(|(j, _, _)| weights[j])
                    .sum()
            }
            Component::ProductLebesgue { point_axes, point_set, density, exclude_origin } => {
                if point_axes.iter().any(|&i| i >= d) {
                    return Err(Error::malformed("point axis out of range"));
                }
                let cv: Vec<f64> = point_axes.iter().map(|&i| shifted_center[i]).collect();
                let xv: Vec<Q> = point_axes.iter().map(|&i| from_f64(x[i])).collect::<Result<_>>()?;
                let pts: Vec<QVec> = match point_set.exact_points_in_ball(&cv, radius) {
                    Some(p) => p,
                    None => point_set
                        .points_in_ball(&cv, radius)
                        .iter()
                        .map(|p| p.iter().map(|&v| from_f64(v)).collect::<Result<QVec>>())
                        .collect::<Result<_>>()?,
                };
                let mut s = Q::zero();
                for p in pts {
                    if *exclude_origin && p.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let vals: Vec<Q> = xv.iter().zip(&p).map(|(a, b)| a - b).collect();
                    s += region.section_measure(point_axes, &vals);
                }
                density * to_f64(&s)
            }
            Component::Uniform { density } => density * to_f64(&region.measure()),
        };
        out.push(v);
    }
    Ok(out)
}
