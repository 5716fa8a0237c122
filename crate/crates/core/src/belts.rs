//! Belts of centrally symmetric polytopes and the Venkov–McMullen test.

use std::collections::HashMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Polytope, SymmetryReport};
use crate::json::{ser_opt_qvec, ser_qvecs};
use crate::lattice::Lattice;
use crate::rational::{centroid, neg, sub, sublattice_hnfs, QMatrix, QVec, Q};
use crate::region::Region;
use crate::spectra::lattice_tiling_check;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// A translate of the generator.
    Parallel,
    /// A translate of the reflected generator `-G`.
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectingSubfacet {
    pub subfacet: usize,
    pub orientation: Orientation,
}

/// Cyclic facet sequence generated by a subfacet. Entry `i` of
/// `connecting_subfacets` is the subfacet shared by `facets[i]` and
/// `facets[i + 1]` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Belt {
    pub generator: usize,
    pub facets: Vec<usize>,
    pub connecting_subfacets: Vec<ConnectingSubfacet>,
}

impl Belt {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// The facet cycle rotated to start at its smallest index and oriented
    /// so that the second entry is smaller than the last.
    pub fn canonical_facets(&self) -> Vec<usize> {
        let n = self.facets.len();
        let start = (0..n).min_by_key(|&i| self.facets[i]).unwrap_or(0);
        let fwd: Vec<usize> = (0..n).map(|k| self.facets[(start + k) % n]).collect();
        let bwd: Vec<usize> = (0..n).map(|k| self.facets[(start + n - k) % n]).collect();
        fwd.min(bwd)
    }

    /// Subfacets met by the walk, sorted.
    pub fn subfacet_class(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.connecting_subfacets.iter().map(|c| c.subfacet).collect();
        s.sort_unstable();
        s
    }
}

fn centered_shape(p: &Polytope, indices: &[usize]) -> Vec<QVec> {
    let pts: Vec<QVec> = indices.iter().map(|&i| p.vertices()[i].clone()).collect();
    let c = centroid(&pts);
    let mut out: Vec<QVec> = pts.iter().map(|v| sub(v, &c)).collect();
    out.sort();
    out
}

struct Walker<'a> {
    p: &'a Polytope,
    facet_centers: Vec<QVec>,
    subfacet_lookup: HashMap<Vec<usize>, usize>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a Polytope, sym: &SymmetryReport) -> Result<Self> {
        if sym.body_center.is_none() {
            return Err(Error::PreconditionFailed("polytope is not centrally symmetric".into()));
        }
        if !sym.facets_symmetric() {
            return Err(Error::PreconditionFailed(format!(
                "facets {:?} are not centrally symmetric",
                sym.asymmetric_facets()
            )));
        }
        let subfacet_lookup = p
            .face_lattice()
            .subfacets()
            .iter()
            .enumerate()
            .map(|(i, g)| (g.vertex_indices.clone(), i))
            .collect();
        let facet_centers = sym.facet_centers.iter().map(|c| c.clone().unwrap()).collect();
        Ok(Walker { p, facet_centers, subfacet_lookup })
    }

    fn walk(&self, generator: usize, first: usize) -> Result<Belt> {
        let lattice = self.p.face_lattice();
        let subfacets = lattice.subfacets();
        let incidence = lattice.incidence();
        let g0 = subfacets
            .get(generator)
            .ok_or_else(|| Error::malformed(format!("no subfacet with index {generator}")))?;
        let (a, b) = incidence[generator];
        let second = if first == a {
            b
        } else if first == b {
            a
        } else {
            return Err(Error::malformed(format!("facet {first} does not contain subfacet {generator}")));
        };
        let shape = centered_shape(self.p, &g0.vertex_indices);
        let mut reversed: Vec<QVec> = shape.iter().map(|v| neg(v)).collect();
        reversed.sort();
        let tag = |g: usize| {
            if centered_shape(self.p, &subfacets[g].vertex_indices) == shape {
                Orientation::Parallel
            } else {
                debug_assert_eq!(centered_shape(self.p, &subfacets[g].vertex_indices), reversed);
                Orientation::Reversed
            }
        };

        let mut facets = vec![first];
        let mut connecting = vec![ConnectingSubfacet { subfacet: generator, orientation: Orientation::Parallel }];
        let (mut current, mut g) = (second, generator);
        let limit = self.p.num_facets() + 1;
        while current != first {
            if facets.len() > limit {
                return Err(Error::ConstructionFailed("belt walk did not close".into()));
            }
            facets.push(current);
            let reflected = self
                .p
                .reflect_vertices(&subfacets[g].vertex_indices, &self.facet_centers[current])
                .and_then(|vs| self.subfacet_lookup.get(&vs).copied())
                .ok_or_else(|| Error::ConstructionFailed("reflected subfacet is not a face".into()))?;
            let (x, y) = incidence[reflected];
            let next = if x == current { y } else { x };
            connecting.push(ConnectingSubfacet { subfacet: reflected, orientation: tag(reflected) });
            g = reflected;
            current = next;
        }
        Ok(Belt { generator, facets, connecting_subfacets: connecting })
    }
}

/// The belt generated by subfacet `generator`, walked from the first of its
/// two facets.
pub fn belt_of(p: &Polytope, generator: usize) -> Result<Belt> {
    let sym = p.facet_symmetry();
    let w = Walker::new(p, &sym)?;
    let first = p
        .face_lattice()
        .incidence()
        .get(generator)
        .ok_or_else(|| Error::malformed(format!("no subfacet with index {generator}")))?
        .0;
    w.walk(generator, first)
}

/// Same as [`belt_of`] but starting from a chosen facet containing the
/// generator, which fixes the walk direction.
pub fn belt_from(p: &Polytope, generator: usize, first_facet: usize) -> Result<Belt> {
    let sym = p.facet_symmetry();
    Walker::new(p, &sym)?.walk(generator, first_facet)
}

fn belts_with(p: &Polytope, sym: &SymmetryReport) -> Result<Vec<Belt>> {
    let w = Walker::new(p, sym)?;
    let incidence = p.face_lattice().incidence();
    let mut covered = vec![false; incidence.len()];
    let mut out = Vec::new();
    for g in 0..incidence.len() {
        if covered[g] {
            continue;
        }
        let belt = w.walk(g, incidence[g].0)?;
        for c in &belt.connecting_subfacets {
            covered[c.subfacet] = true;
        }
        out.push(belt);
    }
    Ok(out)
}

/// One belt per class of subfacets; each class is generated by its
/// lowest-index member.
pub fn all_belts(p: &Polytope) -> Result<Vec<Belt>> {
    belts_with(p, &p.facet_symmetry())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Condition {
    #[serde(rename = "ii")]
    CentrallySymmetric,
    #[serde(rename = "iii")]
    SymmetricFacets,
    #[serde(rename = "iv")]
    BeltLengths,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Tiles,
    Fails,
}

#[derive(Clone, Debug, Serialize)]
pub struct BeltSummary {
    pub length: usize,
    #[serde(serialize_with = "ser_qvecs")]
    pub generator: Vec<QVec>,
    pub generator_index: usize,
    pub facets: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VmReport {
    pub is_polytope: bool,
    pub symmetric: bool,
    #[serde(serialize_with = "ser_opt_qvec")]
    pub center: Option<QVec>,
    pub facets_symmetric: bool,
    pub asymmetric_facets: Vec<usize>,
    pub belts: Vec<BeltSummary>,
    pub belts_ok: bool,
    pub verdict: Verdict,
    pub failed_conditions: Vec<Condition>,
    #[serde(skip)]
    pub symmetry: SymmetryReport,
}

/// Evaluates conditions (ii)–(iv). Belts are only walked when the first two
/// hold.
pub fn vm_check(p: &Polytope) -> VmReport {
    let sym = p.facet_symmetry();
    let symmetric = sym.body_center.is_some();
    let facets_symmetric = sym.facets_symmetric();
    let mut failed = Vec::new();
    if !symmetric {
        failed.push(Condition::CentrallySymmetric);
    }
    if !facets_symmetric {
        failed.push(Condition::SymmetricFacets);
    }
    let mut belts = Vec::new();
    let mut belts_ok = false;
    if failed.is_empty() {
        let found = belts_with(p, &sym).expect("preconditions checked");
        let subfacets = p.face_lattice().subfacets();
        belts_ok = found.iter().all(|b| b.len() == 4 || b.len() == 6);
        belts = found
            .iter()
            .map(|b| BeltSummary {
                length: b.len(),
                generator: subfacets[b.generator].vertex_indices.iter().map(|&i| p.vertices()[i].clone()).collect(),
                generator_index: b.generator,
                facets: b.facets.clone(),
            })
            .collect();
        if !belts_ok {
            failed.push(Condition::BeltLengths);
        }
    }
    VmReport {
        is_polytope: true,
        symmetric,
        center: sym.body_center.clone(),
        facets_symmetric,
        asymmetric_facets: sym.asymmetric_facets(),
        belts,
        belts_ok,
        verdict: if failed.is_empty() { Verdict::Tiles } else { Verdict::Fails },
        failed_conditions: failed,
        symmetry: sym,
    }
}

/// Tolerance and dual-vector count used to verify lattice candidates.
pub const LATTICE_CHECK_DUALS: usize = 100;
pub const LATTICE_CHECK_TOL: f64 = 1e-8;

/// A lattice of translations along which `p` tiles.
///
/// The integer span of the facet pair vectors is tried first. When its
/// covolume exceeds the volume by an integer factor `k`, every superlattice
/// of index `k` is tried in turn. Each candidate must pass
/// [`lattice_tiling_check`].
pub fn construct_tiling_lattice(p: &Polytope, report: &VmReport) -> Result<Lattice> {
    if report.verdict != Verdict::Tiles {
        return Err(Error::PreconditionFailed("polytope does not satisfy the belt conditions".into()));
    }
    let d = p.dim();
    let taus: Vec<QVec> = report.symmetry.facet_pair_vectors.iter().flatten().cloned().collect();
    let span = Lattice::span(&taus, d).map_err(|_| Error::ConstructionFailed("facet vectors do not span".into()))?;
    let region = Region::Polytope(p.clone());
    let vol = p.volume();
    let ratio = span.covolume() / &vol;
    if !ratio.is_integer() || ratio.is_zero() {
        return Err(Error::ConstructionFailed(format!(
            "covolume of the facet-vector lattice is {} times the volume",
            ratio
        )));
    }
    let index: u64 = ratio
        .to_integer()
        .try_into()
        .map_err(|_| Error::ConstructionFailed("superlattice index too large".into()))?;
    let candidates: Vec<Lattice> = if index == 1 {
        vec![span]
    } else {
        let dual_basis = span.dual().basis().clone();
        sublattice_hnfs(d, index)
            .into_iter()
            .map(|h| {
                let hm = QMatrix::from_columns(
                    &h.iter().map(|c| c.iter().map(|&x| Q::from_integer(x.into())).collect()).collect::<Vec<QVec>>(),
                );
                Lattice::new(dual_basis.mul(&hm).columns()).expect("full rank").dual()
            })
            .collect()
    };
    candidates
        .into_iter()
        .find(|l| lattice_tiling_check(&region, l, LATTICE_CHECK_DUALS, LATTICE_CHECK_TOL).pass)
        .ok_or_else(|| Error::ConstructionFailed("no candidate lattice passed verification".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cube;
    use crate::rational::{q, qf, qvec};

    fn prism(base: &[[i64; 2]]) -> Polytope {
        let mut pts = Vec::new();
        for z in [qf(-1, 2), qf(1, 2)] {
            for v in base {
                pts.push(vec![q(v[0]), q(v[1]), z.clone()]);
            }
        }
        Polytope::from_vertices(pts).unwrap()
    }

    const HEXAGON: [[i64; 2]; 6] = [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]];
    const OCTAGON: [[i64; 2]; 8] = [[1, 2], [2, 1], [2, -1], [1, -2], [-1, -2], [-2, -1], [-2, 1], [-1, 2]];

    /// Facets containing an edge parallel to `dir`, counted directly.
    fn zone_size(p: &Polytope, dir: &QVec) -> usize {
        let fl = p.face_lattice();
        let parallel = |e: &[usize]| {
            let u = sub(&p.vertices()[e[1]], &p.vertices()[e[0]]);
            crate::rational::rank(&[u, dir.clone()]) == 1
        };
        (0..p.num_facets())
            .filter(|&f| {
                fl.faces(1).iter().any(|e| {
                    e.vertex_indices.iter().all(|v| p.facet_vertices(f).contains(v))
                        && parallel(&e.vertex_indices)
                })
            })
            .count()
    }

    #[test]
    fn cube_has_three_belts_of_four() {
        let c = cube(3, qf(1, 2));
        let belts = all_belts(&c).unwrap();
        assert_eq!(belts.len(), 3);
        assert!(belts.iter().all(|b| b.len() == 4));
        let classes: usize = belts.iter().map(|b| b.subfacet_class().len()).sum();
        assert_eq!(classes, 12);
    }

    #[test]
    fn hexagon_single_belt() {
        let h = Polytope::from_vertices(HEXAGON.iter().map(|v| qvec(v)).collect()).unwrap();
        let belts = all_belts(&h).unwrap();
        assert_eq!(belts.len(), 1);
        assert_eq!(belts[0].len(), 6);
    }

    #[test]
    fn prism_belts_match_zone_counts() {
        for (base, expect) in [(&HEXAGON[..], 6), (&OCTAGON[..], 8)] {
            let p = prism(base);
            let fl = p.face_lattice();
            let vertical = (0..fl.subfacets().len())
                .find(|&g| {
                    let e = &fl.subfacets()[g].vertex_indices;
                    let u = sub(&p.vertices()[e[1]], &p.vertices()[e[0]]);
                    u[0].is_zero() && u[1].is_zero()
                })
                .unwrap();
            let belt = belt_of(&p, vertical).unwrap();
            assert_eq!(belt.len(), expect);
            assert_eq!(zone_size(&p, &qvec(&[0, 0, 1])), expect);
        }
    }

    #[test]
    fn opposite_facets_are_half_a_belt_apart() {
        let p = prism(&HEXAGON);
        let rep = p.facet_symmetry();
        for b in all_belts(&p).unwrap() {
            let m = b.len() / 2;
            assert_eq!(b.len() % 2, 0);
            for i in 0..b.len() {
                assert_eq!(rep.opposite_facet[b.facets[i]], Some(b.facets[(i + m) % b.len()]));
            }
        }
    }

    #[test]
    fn direction_does_not_change_belt() {
        let p = prism(&OCTAGON);
        let inc = p.face_lattice().incidence().to_vec();
        for (g, (a, b)) in inc.into_iter().enumerate() {
            let x = belt_from(&p, g, a).unwrap();
            let y = belt_from(&p, g, b).unwrap();
            assert_eq!(x.canonical_facets(), y.canonical_facets());
            assert_eq!(x.subfacet_class(), y.subfacet_class());
        }
    }

    #[test]
    fn verdicts() {
        assert_eq!(vm_check(&cube(3, qf(1, 2))).verdict, Verdict::Tiles);
        let tri = Polytope::from_vertices(vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]).unwrap();
        let r = vm_check(&tri);
        assert_eq!(r.failed_conditions, vec![Condition::CentrallySymmetric]);
        let r = vm_check(&prism(&OCTAGON));
        assert_eq!(r.failed_conditions, vec![Condition::BeltLengths]);
        assert!(r.belts.iter().any(|b| b.length == 8));
        assert!(matches!(belt_of(&tri, 0), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn tiling_lattices() {
        let c = cube(2, qf(1, 2));
        let l = construct_tiling_lattice(&c, &vm_check(&c)).unwrap();
        assert_eq!(l.covolume(), q(1));
        assert!(l.contains(&qvec(&[1, 0])) && l.contains(&qvec(&[0, 1])));
        let h = Polytope::from_vertices(HEXAGON.iter().map(|v| qvec(v)).collect()).unwrap();
        let l = construct_tiling_lattice(&h, &vm_check(&h)).unwrap();
        assert_eq!(l.covolume(), q(3));
        let oct = prism(&OCTAGON);
        assert!(matches!(construct_tiling_lattice(&oct, &vm_check(&oct)), Err(Error::PreconditionFailed(_))));
    }
}
