use super::Polytope;
use crate::rational::{centroid, q, sub, QVec, Q};

/// Central symmetry of a polytope and of each of its facets.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub body_center: Option<QVec>,
    /// Per facet: its center when the facet is centrally symmetric.
    pub facet_centers: Vec<Option<QVec>>,
    /// Per facet: `tau_i` with `F_i = -F_i + tau_i`, measured with the body
    /// center as origin. Present when both the body and the facet are
    /// centrally symmetric.
    pub facet_pair_vectors: Vec<Option<QVec>>,
    /// Per facet: index of the opposite facet when the body is symmetric.
    pub opposite_facet: Vec<Option<usize>>,
}

impl SymmetryReport {
    pub fn facets_symmetric(&self) -> bool {
        self.facet_centers.iter().all(Option::is_some)
    }

    pub fn asymmetric_facets(&self) -> Vec<usize> {
        self.facet_centers.iter().enumerate().filter(|(_, c)| c.is_none()).map(|(i, _)| i).collect()
    }
}

impl Polytope {
    /// Indices of `2 c - v` for each listed vertex, sorted; `None` if some
    /// reflected point is not a vertex.
    pub fn reflect_vertices(&self, indices: &[usize], center: &[Q]) -> Option<Vec<usize>> {
        let two = q(2);
        let mut out = indices
            .iter()
            .map(|&i| {
                let r: QVec = center.iter().zip(&self.vertices()[i]).map(|(c, v)| &two * c - v).collect();
                self.vertex_index(&r)
            })
            .collect::<Option<Vec<usize>>>()?;
        out.sort_unstable();
        Some(out)
    }

    fn symmetric_center_of(&self, indices: &[usize]) -> Option<QVec> {
        let pts: Vec<QVec> = indices.iter().map(|&i| self.vertices()[i].clone()).collect();
        let c = centroid(&pts);
        (self.reflect_vertices(indices, &c)? == indices).then_some(c)
    }

    /// The point `x` with `-P + x = P - x`, if any. It is necessarily the
    /// vertex centroid.
    pub fn center_of_symmetry(&self) -> Option<QVec> {
        let all: Vec<usize> = (0..self.vertices().len()).collect();
        self.symmetric_center_of(&all)
    }

    /// Reflection through a point of a facet's affine hull preserves that
    /// hull, so the facet test is done in ambient coordinates.
    pub fn facet_symmetry(&self) -> SymmetryReport {
        let body_center = self.center_of_symmetry();
        let n = self.num_facets();
        let facet_centers: Vec<Option<QVec>> = (0..n).map(|i| self.symmetric_center_of(self.facet_vertices(i))).collect();
        let facet_pair_vectors = facet_centers
            .iter()
            .map(|fc| match (fc, &body_center) {
                (Some(fc), Some(c)) => Some(sub(fc, c).iter().map(|x| x * q(2)).collect()),
                _ => None,
            })
            .collect();
        let opposite_facet = (0..n)
            .map(|i| {
                let c = body_center.as_ref()?;
                let refl = self.reflect_vertices(self.facet_vertices(i), c)?;
                (0..n).find(|&j| self.facet_vertices(j) == refl.as_slice())
            })
            .collect();
        SymmetryReport { body_center, facet_centers, facet_pair_vectors, opposite_facet }
    }
}
