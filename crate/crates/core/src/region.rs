//! Bounded regions: a convex polytope or a finite union of boxes.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Halfspace, Polytope};
use crate::rational::{to_f64, to_f64_vec, QVec, Q};

/// Closed axis-aligned box `[min, max]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisBox {
    pub min: QVec,
    pub max: QVec,
}

impl AxisBox {
    pub fn new(min: QVec, max: QVec) -> Result<AxisBox> {
        if min.is_empty() || min.len() != max.len() {
            return Err(Error::malformed("box corners must have the same positive dimension"));
        }
        if min.iter().zip(&max).any(|(a, b)| a >= b) {
            return Err(Error::malformed("box must satisfy min < max on every axis"));
        }
        Ok(AxisBox { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn volume(&self) -> Q {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    /// Volume of `self ∩ (other + t)`.
    pub fn overlap(&self, other: &AxisBox, t: &[Q]) -> Q {
        let mut v = Q::from_integer(1.into());
        for i in 0..self.dim() {
            let lo = (&self.min[i]).max(&(&other.min[i] + &t[i])).clone();
            let hi = (&self.max[i]).min(&(&other.max[i] + &t[i])).clone();
            if hi <= lo {
                return Q::zero();
            }
            v *= hi - lo;
        }
        v
    }

    /// Signed sup-norm distance to the boundary: negative inside.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| (to_f64(&self.min[i]) - x[i]).max(x[i] - to_f64(&self.max[i])))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Boxes with pairwise disjoint interiors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxUnion {
    boxes: Vec<AxisBox>,
}

impl BoxUnion {
    pub fn new(boxes: Vec<AxisBox>) -> Result<BoxUnion> {
        let Some(first) = boxes.first() else {
            return Err(Error::malformed("box union needs at least one box"));
        };
        let d = first.dim();
        if boxes.iter().any(|b| b.dim() != d) {
            return Err(Error::malformed("boxes have inconsistent dimensions"));
        }
        let zero = vec![Q::zero(); d];
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].overlap(&boxes[j], &zero).is_positive() {
                    return Err(Error::malformed(format!("boxes {i} and {j} overlap")));
                }
            }
        }
        Ok(BoxUnion { boxes })
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn dim(&self) -> usize {
        self.boxes[0].dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Polytope(Polytope),
    Boxes(BoxUnion),
}

impl From<Polytope> for Region {
    fn from(p: Polytope) -> Self {
        Region::Polytope(p)
    }
}

impl From<BoxUnion> for Region {
    fn from(b: BoxUnion) -> Self {
        Region::Boxes(b)
    }
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Polytope(p) => p.dim(),
            Region::Boxes(b) => b.dim(),
        }
    }

    pub fn measure(&self) -> Q {
        match self {
            Region::Polytope(p) => p.volume(),
            Region::Boxes(b) => b.boxes.iter().map(AxisBox::volume).sum(),
        }
    }

    /// Signed gauge: nonpositive on the region, and small in absolute value
    /// exactly near its boundary (up to shared internal box faces).
    pub fn boundary_gauge(&self, x: &[f64]) -> f64 {
        match self {
            Region::Polytope(p) => p.boundary_gauge(x),
            Region::Boxes(b) => b.boxes.iter().map(|bx| bx.gauge(x)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains_f64(&self, x: &[f64]) -> bool {
        self.boundary_gauge(x) <= 0.0
    }

    /// True when `x` is within `margin` of the boundary of the region or of
    /// any constituent box.
    pub fn near_boundary(&self, x: &[f64], margin: f64) -> bool {
        match self {
            Region::Polytope(p) => p.boundary_gauge(x).abs() < margin,
            Region::Boxes(b) => b.boxes.iter().any(|bx| bx.gauge(x).abs() < margin),
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Polytope(p) => p.bounding_box(),
            Region::Boxes(b) => {
                let d = b.dim();
                let lo = (0..d)
                    .map(|i| b.boxes.iter().map(|bx| to_f64(&bx.min[i])).fold(f64::INFINITY, f64::min))
                    .collect();
                let hi = (0..d)
                    .map(|i| b.boxes.iter().map(|bx| to_f64(&bx.max[i])).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                (lo, hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Region::Polytope(p) => p.diameter(),
            Region::Boxes(_) => {
                let (lo, hi) = self.bounding_box();
                lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
            }
        }
    }

    /// Exact `m(R ∩ (R + t))`.
    pub fn overlap_volume(&self, t: &[Q]) -> Q {
        match self {
            Region::Polytope(p) => p.overlap_volume(t),
            Region::Boxes(b) => {
                let mut total = Q::zero();
                for x in &b.boxes {
                    for y in &b.boxes {
                        total += x.overlap(y, t);
                    }
                }
                total
            }
        }
    }

    /// Whether `t` is in `Δ(R)`, the set of shifts with positive overlap.
    pub fn in_delta(&self, t: &[Q]) -> bool {
        match self {
            Region::Polytope(p) => p.in_open_difference_body(t),
            Region::Boxes(_) => self.overlap_volume(t).is_positive(),
        }
    }

    /// Measure, over the remaining axes, of the section of the region where
    /// the coordinates `fixed_axes` take the given values.
    pub fn section_measure(&self, fixed_axes: &[usize], values: &[Q]) -> Q {
        let d = self.dim();
        let free: Vec<usize> = (0..d).filter(|i| !fixed_axes.contains(i)).collect();
        match self {
            Region::Boxes(b) => b
                .boxes
                .iter()
                .filter(|bx| fixed_axes.iter().zip(values).all(|(&a, v)| &bx.min[a] <= v && v <= &bx.max[a]))
                .map(|bx| free.iter().map(|&i| &bx.max[i] - &bx.min[i]).product::<Q>())
                .sum(),
            Region::Polytope(p) => {
                let restricted: Vec<Halfspace> = p
                    .halfspaces()
                    .iter()
                    .map(|h| {
                        let shift: Q = fixed_axes.iter().zip(values).map(|(&a, v)| &h.normal[a] * v).sum();
                        Halfspace::new(free.iter().map(|&i| h.normal[i].clone()).collect(), &h.offset - shift)
                    })
                    .collect();
                if free.is_empty() {
                    return if restricted.iter().all(|h| !h.offset.is_negative()) { Q::from_integer(1.into()) } else { Q::zero() };
                }
                if free.len() == 1 {
                    return interval_length(&restricted);
                }
                // Constraints with zero normal are either vacuous or make the
                // section empty.
                if restricted.iter().any(|h| h.normal.iter().all(Zero::is_zero) && h.offset.is_negative()) {
                    return Q::zero();
                }
                let live: Vec<Halfspace> =
                    restricted.into_iter().filter(|h| h.normal.iter().any(|x| !x.is_zero())).collect();
                Polytope::from_halfspaces(live).map(|s| s.volume()).unwrap_or_else(|_| Q::zero())
            }
        }
    }

    /// True when the section measure over `fixed_axes` may jump within
    /// sup-distance `margin` of `v`.
    pub fn section_near_jump(&self, fixed_axes: &[usize], v: &[f64], margin: f64) -> bool {
        match self {
            Region::Boxes(b) => b.boxes.iter().any(|bx| {
                let near_face = fixed_axes.iter().zip(v).any(|(&a, &x)| {
                    (x - to_f64(&bx.min[a])).abs() < margin || (x - to_f64(&bx.max[a])).abs() < margin
                });
                let in_slab = fixed_axes
                    .iter()
                    .zip(v)
                    .all(|(&a, &x)| to_f64(&bx.min[a]) - margin < x && x < to_f64(&bx.max[a]) + margin);
                near_face && in_slab
            }),
            Region::Polytope(_) => {
                // Sections of a convex body vary continuously over the interior
                // of its projection, so jumps sit where the section vanishes.
                let k = fixed_axes.len();
                let mut seen_zero = false;
                let mut seen_positive = false;
                for idx in 0..3usize.pow(k as u32) {
                    let mut j = idx;
                    let mut pt = Vec::with_capacity(k);
                    for &x in v {
                        let s = (j % 3) as f64 - 1.0;
                        j /= 3;
                        match Q::from_float(x + s * margin) {
                            Some(q) => pt.push(q),
                            None => return true,
                        }
                    }
                    if self.section_measure(fixed_axes, &pt).is_positive() {
                        seen_positive = true;
                    } else {
                        seen_zero = true;
                    }
                }
                seen_zero && seen_positive
            }
        }
    }

    /// Whether the fiber `{x : x_V = p}` over the coordinates `fixed_axes`
    /// meets `Δ(R)` in a set of positive measure.
    pub fn delta_meets_fiber(&self, fixed_axes: &[usize], p: &[Q]) -> bool {
        match self {
            Region::Boxes(b) => b.boxes.iter().any(|bi| {
                b.boxes.iter().any(|bj| {
                    fixed_axes.iter().zip(p).all(|(&a, x)| {
                        &(&bi.min[a] - &bj.max[a]) < x && x < &(&bi.max[a] - &bj.min[a])
                    })
                })
            }),
            Region::Polytope(poly) => {
                let d = poly.dim();
                if fixed_axes.len() == d {
                    let mut t = vec![Q::zero(); d];
                    for (&a, x) in fixed_axes.iter().zip(p) {
                        t[a] = x.clone();
                    }
                    return poly.in_open_difference_body(&t);
                }
                let diff = poly.difference_body();
                let free: Vec<usize> = (0..d).filter(|i| !fixed_axes.contains(i)).collect();
                // The open body meets the fiber iff the closed section is
                // full-dimensional and every facet parallel to the fiber holds strictly.
                let vertical_ok = diff.halfspaces().iter().all(|h| {
                    if free.iter().any(|&i| !h.normal[i].is_zero()) {
                        return true;
                    }
                    let lhs: Q = fixed_axes.iter().zip(p).map(|(&a, x)| &h.normal[a] * x).sum();
                    lhs < h.offset
                });
                vertical_ok && Region::Polytope(diff.clone()).section_measure(fixed_axes, p).is_positive()
            }
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Region::Polytope(p) => Some(p),
            Region::Boxes(_) => None,
        }
    }

    pub fn as_boxes(&self) -> Option<&BoxUnion> {
        match self {
            Region::Boxes(b) => Some(b),
            Region::Polytope(_) => None,
        }
    }

    pub fn center_f64(&self) -> Vec<f64> {
        match self {
            Region::Polytope(p) => to_f64_vec(&p.vertex_centroid()),
            Region::Boxes(_) => {
                let (lo, hi) = self.bounding_box();
                lo.iter().zip(&hi).map(|(a, b)| (a + b) / 2.0).collect()
            }
        }
    }
}

/// Length of `{w in R : a w <= b}` for a family of 1-D constraints.
fn interval_length(constraints: &[Halfspace]) -> Q {
    let mut lo: Option<Q> = None;
    let mut hi: Option<Q> = None;
    for h in constraints {
        let a = &h.normal[0];
        if a.is_zero() {
            if h.offset.is_negative() {
                return Q::zero();
            }
            continue;
        }
        let bound = &h.offset / a;
        if a.is_positive() {
            hi = Some(match hi {
                Some(x) if x <= bound => x,
                _ => bound,
            });
        } else {
            lo = Some(match lo {
                Some(x) if x >= bound => x,
                _ => bound,
            });
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if h > l => h - l,
        _ => Q::zero(),
    }
}
