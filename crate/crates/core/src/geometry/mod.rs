//! Convex polytopes with exact rational vertex and halfspace descriptions.

mod faces;
mod symmetry;

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::dd::{extreme_rays, DdError};
use crate::error::{Error, Result};
use crate::rational::{self, common_denominator, dot, q, sub, to_f64, to_f64_vec, QMatrix, QVec, Q};

pub use faces::{Face, FaceLattice};
pub use symmetry::SymmetryReport;

/// Inequality `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: Q,
}

impl Halfspace {
    pub fn new(normal: QVec, offset: Q) -> Self {
        Halfspace { normal, offset }
    }

    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }
}

/// Input description accepted by [`Polytope::build`].
#[derive(Clone, Debug)]
pub enum PolytopeSpec {
    Vertices(Vec<QVec>),
    Halfspaces(Vec<Halfspace>),
}

/// A simplex of the fan triangulation in floating point, with `|det|` of its
/// edge matrix (`d!` times its volume).
#[derive(Clone, Debug)]
pub struct Simplex {
    pub vertices: Vec<Vec<f64>>,
    pub abs_det: f64,
}

/// Full-dimensional convex polytope in `R^d`.
///
/// Vertices are extreme and sorted lexicographically; halfspaces are the
/// facet inequalities with primitive integer normals, ordered by the sorted
/// vertex-index set of their facet. Derived structures are computed on first
/// use and cached.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<QVec>,
    halfspaces: Vec<Halfspace>,
    facet_vertices: Vec<Vec<usize>>,
    index: HashMap<QVec, usize>,
    lattice: OnceLock<FaceLattice>,
    triangulation: OnceLock<(Vec<Vec<usize>>, Q)>,
    float_simplices: OnceLock<Vec<Simplex>>,
    difference: OnceLock<Box<Polytope>>,
    unit_halfspaces: OnceLock<Vec<(Vec<f64>, f64)>>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let den = Q::from_integer(common_denominator(row));
    row.iter().map(|x| (x * &den).to_integer()).collect()
}

impl Polytope {
    pub fn build(spec: PolytopeSpec) -> Result<Polytope> {
        match spec {
            PolytopeSpec::Vertices(v) => Self::from_vertices(v),
            PolytopeSpec::Halfspaces(h) => Self::from_halfspaces(h),
        }
    }

    /// Convex hull of a finite point set.
    pub fn from_vertices(points: Vec<QVec>) -> Result<Polytope> {
        let Some(first) = points.first() else {
            return Err(Error::malformed("no vertices given"));
        };
        let d = first.len();
        if d == 0 {
            return Err(Error::malformed("dimension must be at least 1"));
        }
        if points.iter().any(|p| p.len() != d) {
            return Err(Error::malformed("vertices have inconsistent dimensions"));
        }
        let mut points = points;
        points.sort();
        points.dedup();
        if points.len() < d + 1 {
            return Err(Error::NotFullDimensional(format!(
                "{} distinct points cannot span R^{d}",
                points.len()
            )));
        }
        let rows: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| {
                let mut row = vec![Q::one()];
                row.extend(p.iter().map(|x| -x));
                integer_row(&row)
            })
            .collect();
        let rays = match extreme_rays(&rows, d + 1) {
            Ok(r) => r,
            Err(DdError::NotPointed) => {
                return Err(Error::NotFullDimensional("affine hull of the vertices is a proper subspace".into()))
            }
        };
        let halfspaces: Vec<Halfspace> = rays
            .into_iter()
            .map(|r| Halfspace {
                offset: Q::from_integer(r[0].clone()),
                normal: r[1..].iter().map(|x| Q::from_integer(x.clone())).collect(),
            })
            .filter(|h| h.normal.iter().any(|x| !x.is_zero()))
            .collect();

        // Keep only points that are vertices: tight constraints of rank d.
        let extreme: Vec<QVec> = points
            .into_iter()
            .filter(|p| {
                let tight: Vec<QVec> =
                    halfspaces.iter().filter(|h| h.slack(p).is_zero()).map(|h| h.normal.clone()).collect();
                rational::rank(&tight) == d
            })
            .collect();
        Ok(Self::assemble(d, extreme, halfspaces))
    }

    /// Bounded intersection of halfspaces.
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Result<Polytope> {
        let vertices = vertices_of_halfspaces(&halfspaces)?;
        Self::from_vertices(vertices)
    }

    fn assemble(dim: usize, vertices: Vec<QVec>, halfspaces: Vec<Halfspace>) -> Polytope {
        let mut facets: Vec<(Vec<usize>, Halfspace)> = halfspaces
            .into_iter()
            .map(|h| {
                let on: Vec<usize> = (0..vertices.len()).filter(|&i| h.slack(&vertices[i]).is_zero()).collect();
                (on, h)
            })
            .collect();
        facets.sort_by(|a, b| a.0.cmp(&b.0));
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Polytope {
            dim,
            vertices,
            facet_vertices: facets.iter().map(|f| f.0.clone()).collect(),
            halfspaces: facets.into_iter().map(|f| f.1).collect(),
            index,
            lattice: OnceLock::new(),
            triangulation: OnceLock::new(),
            float_simplices: OnceLock::new(),
            difference: OnceLock::new(),
            unit_halfspaces: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Vertex indices of facet `i` (aligned with `halfspaces()[i]`).
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.facet_vertices[i]
    }

    pub fn num_facets(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn vertex_index(&self, v: &[Q]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn vertex_centroid(&self) -> QVec {
        rational::centroid(&self.vertices)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.halfspaces.iter().all(|h| !h.slack(x).is_negative())
    }

    /// Floating-point membership test (closed).
    pub fn contains_f64(&self, x: &[f64]) -> bool {
        self.boundary_gauge(x) <= 0.0
    }

    /// `max_i (a_i.x - b_i)/|a_i|`: negative inside, positive outside, and
    /// small in absolute value only near the boundary.
    pub fn boundary_gauge(&self, x: &[f64]) -> f64 {
        let unit = self.unit_halfspaces.get_or_init(|| {
            self.float_halfspaces()
                .into_iter()
                .map(|(a, b)| {
                    let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                    (a.iter().map(|v| v / n).collect(), b / n)
                })
                .collect()
        });
        unit.iter()
            .map(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn float_halfspaces(&self) -> Vec<(Vec<f64>, f64)> {
        self.halfspaces.iter().map(|h| (to_f64_vec(&h.normal), to_f64(&h.offset))).collect()
    }

    pub fn float_vertices(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| to_f64_vec(v)).collect()
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let fv = self.float_vertices();
        let lo = (0..self.dim).map(|i| fv.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..self.dim).map(|i| fv.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let fv = self.float_vertices();
        let mut best = 0.0f64;
        for a in &fv {
            for b in &fv {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                best = best.max(d2);
            }
        }
        best.sqrt()
    }

    pub fn face_lattice(&self) -> &FaceLattice {
        self.lattice.get_or_init(|| FaceLattice::compute(self))
    }

    /// Fan triangulation: each facet is triangulated by pulling from its
    /// lowest-index vertex (recursively through its faces) and coned to the
    /// vertex centroid. Returned simplices index into `vertices()`, with the
    /// centroid as an implicit first vertex.
    fn triangulation(&self) -> &(Vec<Vec<usize>>, Q) {
        self.triangulation.get_or_init(|| {
            let lattice = self.face_lattice();
            let mut simplices = Vec::new();
            for f in lattice.facets() {
                simplices.extend(lattice.pulling_triangulation(f));
            }
            let c = self.vertex_centroid();
            let mut total = Q::zero();
            for s in &simplices {
                let rows: Vec<QVec> = s.iter().map(|&i| sub(&self.vertices[i], &c)).collect();
                total += QMatrix::from_rows(&rows).determinant().abs();
            }
            let fact = (1..=self.dim as i64).fold(Q::one(), |acc, k| acc * q(k));
            (simplices, total / fact)
        })
    }

    /// Exact Lebesgue measure.
    pub fn volume(&self) -> Q {
        self.triangulation().1.clone()
    }

    pub fn simplices(&self) -> &[Simplex] {
        self.float_simplices.get_or_init(|| {
            let c = self.vertex_centroid();
            self.triangulation()
                .0
                .iter()
                .map(|s| {
                    let rows: Vec<QVec> = s.iter().map(|&i| sub(&self.vertices[i], &c)).collect();
                    let abs_det = to_f64(&QMatrix::from_rows(&rows).determinant().abs());
                    let mut vertices = vec![to_f64_vec(&c)];
                    vertices.extend(s.iter().map(|&i| to_f64_vec(&self.vertices[i])));
                    Simplex { vertices, abs_det }
                })
                .collect()
        })
    }

    pub fn translate(&self, t: &[Q]) -> Polytope {
        let vs = self.vertices.iter().map(|v| rational::add(v, t)).collect();
        Polytope::from_vertices(vs).expect("translate of a valid polytope")
    }

    /// Image under `x -> m x + t`; `m` must be invertible.
    pub fn affine_image(&self, m: &QMatrix, t: &[Q]) -> Result<Polytope> {
        let vs = self.vertices.iter().map(|v| rational::add(&m.mul_vec(v), t)).collect();
        Polytope::from_vertices(vs)
    }

    /// Difference body `P - P`, whose interior is the set of shifts with
    /// positive overlap.
    pub fn difference_body(&self) -> &Polytope {
        self.difference.get_or_init(|| {
            let mut pts = Vec::with_capacity(self.vertices.len() * self.vertices.len());
            for a in &self.vertices {
                for b in &self.vertices {
                    pts.push(sub(a, b));
                }
            }
            Box::new(Polytope::from_vertices(pts).expect("difference body of a full-dimensional polytope"))
        })
    }

    /// Exact volume of `P ∩ (P + t)`.
    pub fn overlap_volume(&self, t: &[Q]) -> Q {
        let mut hs = self.halfspaces.clone();
        hs.extend(
            self.halfspaces
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), &h.offset + dot(&h.normal, t))),
        );
        match Polytope::from_halfspaces(hs) {
            Ok(p) => p.volume(),
            Err(_) => Q::zero(),
        }
    }

    /// True iff `t` lies in the open difference body.
    pub fn in_open_difference_body(&self, t: &[Q]) -> bool {
        self.difference_body().halfspaces.iter().all(|h| h.slack(t).is_positive())
    }
}

/// Vertices of a bounded, full-dimensional intersection of halfspaces.
pub fn vertices_of_halfspaces(halfspaces: &[Halfspace]) -> Result<Vec<QVec>> {
    let Some(first) = halfspaces.first() else {
        return Err(Error::Unbounded);
    };
    let d = first.normal.len();
    if d == 0 || halfspaces.iter().any(|h| h.normal.len() != d) {
        return Err(Error::malformed("halfspace normals have inconsistent dimensions"));
    }
    let mut rows: Vec<Vec<BigInt>> = halfspaces
        .iter()
        .map(|h| {
            let mut row = vec![h.offset.clone()];
            row.extend(h.normal.iter().map(|x| -x));
            integer_row(&row)
        })
        .collect();
    let mut homog = vec![BigInt::one()];
    homog.extend(std::iter::repeat_n(BigInt::zero(), d));
    rows.push(homog);
    let rays = extreme_rays(&rows, d + 1).map_err(|_| Error::Unbounded)?;
    let mut vertices = Vec::new();
    let mut directions = 0;
    for r in rays {
        if r[0].is_zero() {
            directions += 1;
            continue;
        }
        let s = Q::from_integer(r[0].clone());
        vertices.push(r[1..].iter().map(|x| Q::from_integer(x.clone()) / &s).collect::<QVec>());
    }
    if vertices.is_empty() {
        return Err(Error::NotFullDimensional("halfspaces have empty intersection".into()));
    }
    if directions > 0 {
        return Err(Error::Unbounded);
    }
    Ok(vertices)
}

/// Axis-aligned cube `[-s, s]^d` scaled by `s`.
pub fn cube(d: usize, half_side: Q) -> Polytope {
    let mut pts = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        pts.push(
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { half_side.clone() } else { -half_side.clone() })
                .collect(),
        );
    }
    Polytope::from_vertices(pts).expect("cube")
}
