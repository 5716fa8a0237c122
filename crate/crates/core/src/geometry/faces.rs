use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use super::Polytope;
use crate::rational::{affine_rank, QVec, Q};

/// A proper nonempty face, identified by the parent vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    /// Sum of the normals of all facets containing the face; its support set
    /// on the parent is exactly this face.
    pub supporting_normal: QVec,
    /// Facets (indices into the parent's halfspaces) containing the face.
    pub facets: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    dim: usize,
    faces_by_dim: BTreeMap<usize, Vec<Face>>,
    /// Entry `i` lists the two facets meeting at subfacet `i`.
    incidence: Vec<(usize, usize)>,
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub(crate) fn is_subset(small: &[usize], big: &[usize]) -> bool {
    intersect(small, big).len() == small.len()
}

impl FaceLattice {
    /// Every face is an intersection of facets, so the closure of the facet
    /// vertex sets under pairwise intersection enumerates the whole lattice.
    pub(crate) fn compute(p: &Polytope) -> FaceLattice {
        let d = p.dim();
        let facet_sets: Vec<Vec<usize>> = (0..p.num_facets()).map(|i| p.facet_vertices(i).to_vec()).collect();
        let mut seen: BTreeSet<Vec<usize>> = facet_sets.iter().cloned().collect();
        let mut queue: VecDeque<Vec<usize>> = facet_sets.iter().cloned().collect();
        while let Some(s) = queue.pop_front() {
            for f in &facet_sets {
                let i = intersect(&s, f);
                if !i.is_empty() && i.len() < s.len() && seen.insert(i.clone()) {
                    queue.push_back(i);
                }
            }
        }
        let mut faces_by_dim: BTreeMap<usize, Vec<Face>> = BTreeMap::new();
        for s in seen {
            let pts: Vec<&QVec> = s.iter().map(|&i| &p.vertices()[i]).collect();
            let dim = affine_rank(&pts);
            let facets: Vec<usize> = (0..facet_sets.len()).filter(|&f| is_subset(&s, &facet_sets[f])).collect();
            let mut normal = vec![Q::zero(); d];
            for &f in &facets {
                for (acc, x) in normal.iter_mut().zip(&p.halfspaces()[f].normal) {
                    *acc += x;
                }
            }
            faces_by_dim.entry(dim).or_default().push(Face { dim, vertex_indices: s, supporting_normal: normal, facets });
        }
        // Facets keep the parent's halfspace order.
        if let Some(top) = faces_by_dim.get_mut(&(d - 1)) {
            top.sort_by_key(|f| f.facets[0]);
        }
        let incidence = if d >= 2 {
            faces_by_dim
                .get(&(d - 2))
                .map(|subs| {
                    subs.iter()
                        .map(|g| {
                            assert_eq!(g.facets.len(), 2, "subfacet must lie in exactly two facets");
                            (g.facets[0], g.facets[1])
                        })
                        .collect()
                })
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        FaceLattice { dim: d, faces_by_dim, incidence }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self, k: usize) -> &[Face] {
        self.faces_by_dim.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn faces_by_dim(&self) -> &BTreeMap<usize, Vec<Face>> {
        &self.faces_by_dim
    }

    pub fn facets(&self) -> &[Face] {
        self.faces(self.dim - 1)
    }

    /// Faces of dimension `d - 2`; empty for `d = 1`.
    pub fn subfacets(&self) -> &[Face] {
        if self.dim < 2 {
            &[]
        } else {
            self.faces(self.dim - 2)
        }
    }

    pub fn incidence(&self) -> &[(usize, usize)] {
        &self.incidence
    }

    /// Face counts `f_0, ..., f_{d-1}`.
    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.dim).map(|k| self.faces(k).len()).collect()
    }

    /// Index of the subfacet with this exact vertex set.
    pub fn subfacet_index(&self, vertex_indices: &[usize]) -> Option<usize> {
        self.subfacets().iter().position(|g| g.vertex_indices == vertex_indices)
    }

    /// Simplices (as vertex-index lists) of the pulling triangulation of a
    /// face: cone from its lowest vertex over the triangulated faces of
    /// codimension one that miss that vertex.
    pub fn pulling_triangulation(&self, face: &Face) -> Vec<Vec<usize>> {
        if face.dim == 0 {
            return vec![face.vertex_indices.clone()];
        }
        let apex = face.vertex_indices[0];
        let mut out = Vec::new();
        for g in self.faces(face.dim - 1) {
            if g.vertex_indices.contains(&apex) || !is_subset(&g.vertex_indices, &face.vertex_indices) {
                continue;
            }
            for mut s in self.pulling_triangulation(g) {
                s.insert(0, apex);
                out.push(s);
            }
        }
        out
    }
}
