//! Bounded complement components of box unions, which certify
//! non-spectrality.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::json::{ser_q, ser_qvecs};
use crate::rational::{sub, QVec, Q};
use crate::region::{AxisBox, BoxUnion, Region};

pub const HOLE_SAMPLES: usize = 1000;
pub const HOLE_SEED: u64 = 0x5eed;
/// Sample points are dyadic with this many bits below the unit.
const SAMPLE_BITS: u32 = 20;

#[derive(Clone, Debug, Serialize)]
pub struct HoleBox {
    #[serde(serialize_with = "crate::json::ser_qvec")]
    pub min: QVec,
    #[serde(serialize_with = "crate::json::ser_qvec")]
    pub max: QVec,
}

/// A set `S` with `m(S) > 0` and `m(S ∩ Ω) = 0` such that every translate of
/// `Ω` meeting `S` also meets `Ω`, the last condition checked on samples.
#[derive(Clone, Debug, Serialize)]
pub struct NonSpectralityCertificate {
    pub witness: Vec<HoleBox>,
    #[serde(serialize_with = "ser_q")]
    pub witness_measure: Q,
    #[serde(serialize_with = "ser_q")]
    pub overlap_with_region: Q,
    /// Bounded complement components found, as cell counts.
    pub component_sizes: Vec<usize>,
    pub samples: usize,
    /// Samples whose translate met `S` in positive measure.
    pub applicable_samples: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_qvecs")]
    pub sample_translations: Vec<QVec>,
}

impl NonSpectralityCertificate {
    pub fn witness_union(&self) -> BoxUnion {
        BoxUnion::new(self.witness.iter().map(|b| AxisBox::new(b.min.clone(), b.max.clone()).unwrap()).collect()).unwrap()
    }
}

/// Cells of the grid spanned by all box coordinates, padded by one cell on
/// each side.
struct CellGrid {
    coords: Vec<Vec<Q>>,
    shape: Vec<usize>,
}

impl CellGrid {
    fn new(b: &BoxUnion) -> CellGrid {
        let d = b.dim();
        let coords: Vec<Vec<Q>> = (0..d)
            .map(|i| {
                let mut set: BTreeSet<Q> = BTreeSet::new();
                for bx in b.boxes() {
                    set.insert(bx.min[i].clone());
                    set.insert(bx.max[i].clone());
                }
                let mut v: Vec<Q> = set.into_iter().collect();
                let one = Q::from_integer(1.into());
                v.insert(0, &v[0] - &one);
                let last = v.last().unwrap() + &one;
                v.push(last);
                v
            })
            .collect();
        let shape = coords.iter().map(|c| c.len() - 1).collect();
        CellGrid { coords, shape }
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).rev().fold(0, |acc, (i, n)| acc * n + i)
    }

    fn multi(&self, mut k: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|n| {
                let i = k % n;
                k /= n;
                i
            })
            .collect()
    }

    fn cell(&self, idx: &[usize]) -> AxisBox {
        let min = idx.iter().enumerate().map(|(a, &i)| self.coords[a][i].clone()).collect();
        let max = idx.iter().enumerate().map(|(a, &i)| self.coords[a][i + 1].clone()).collect();
        AxisBox { min, max }
    }
}

/// Cells of the bounded components of `R^d \ Ω`, grouped by component.
pub fn bounded_components(b: &BoxUnion) -> Vec<Vec<AxisBox>> {
    let g = CellGrid::new(b);
    let d = b.dim();
    let n = g.len();
    let covered: Vec<bool> = (0..n)
        .map(|k| {
            let c = g.cell(&g.multi(k));
            b.boxes().iter().any(|bx| (0..d).all(|i| bx.min[i] <= c.min[i] && c.max[i] <= bx.max[i]))
        })
        .collect();
    // 0 = unvisited, otherwise component label; label 1 is the unbounded one.
    let mut label = vec![0usize; n];
    let mut next = 1;
    let mut comps: Vec<Vec<AxisBox>> = Vec::new();
    for start in 0..n {
        if covered[start] || label[start] != 0 {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        label[start] = next;
        let mut cells = Vec::new();
        while let Some(k) = queue.pop_front() {
            let idx = g.multi(k);
            cells.push(g.cell(&idx));
            for a in 0..d {
                for step in [-1i64, 1] {
                    let j = idx[a] as i64 + step;
                    if j < 0 || j >= g.shape[a] as i64 {
                        continue;
                    }
                    let mut nb = idx.clone();
                    nb[a] = j as usize;
                    let kk = g.index(&nb);
                    if !covered[kk] && label[kk] == 0 {
                        label[kk] = next;
                        queue.push_back(kk);
                    }
                }
            }
        }
        // The first unvisited cell in index order is the padding corner.
        if next > 1 {
            comps.push(cells);
        }
        next += 1;
    }
    comps
}

fn union_overlap(a: &[AxisBox], b: &[AxisBox], t: &[Q]) -> Q {
    let mut s = Q::zero();
    for x in a {
        for y in b {
            s += x.overlap(y, t);
        }
    }
    s
}

fn random_point(boxes: &[AxisBox], rng: &mut ChaCha8Rng) -> QVec {
    let total: Q = boxes.iter().map(AxisBox::volume).sum();
    let scale = BigInt::from(1u64 << SAMPLE_BITS);
    let u = Q::new(BigInt::from(rng.gen_range(0..(1u64 << SAMPLE_BITS))), scale.clone()) * &total;
    let mut acc = Q::zero();
    let mut chosen = &boxes[boxes.len() - 1];
    for bx in boxes {
        acc += bx.volume();
        if u < acc {
            chosen = bx;
            break;
        }
    }
    (0..chosen.dim())
        .map(|i| {
            let f = Q::new(BigInt::from(rng.gen_range(0..=(1u64 << SAMPLE_BITS))), scale.clone());
            &chosen.min[i] + f * (&chosen.max[i] - &chosen.min[i])
        })
        .collect()
}

/// Looks for a bounded hole `S` of `Ω`. The covering condition is sampled
/// with `x = s - ω` for random `s ∈ S`, `ω ∈ Ω`; any translate meeting `S`
/// but not `Ω` aborts certification.
pub fn hole_detector(region: &Region) -> Option<NonSpectralityCertificate> {
    hole_detector_with(region.as_boxes()?, HOLE_SAMPLES, HOLE_SEED)
}

pub fn hole_detector_with(b: &BoxUnion, samples: usize, seed: u64) -> Option<NonSpectralityCertificate> {
    let comps = bounded_components(b);
    if comps.is_empty() {
        return None;
    }
    let component_sizes = comps.iter().map(Vec::len).collect();
    let s: Vec<AxisBox> = comps.into_iter().flatten().collect();
    let omega = b.boxes();
    let zero = vec![Q::zero(); b.dim()];
    let witness_measure: Q = s.iter().map(AxisBox::volume).sum();
    let overlap_with_region = union_overlap(&s, omega, &zero);
    if !witness_measure.is_positive() || overlap_with_region.is_positive() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut applicable = 0;
    let mut shown = Vec::new();
    for _ in 0..samples {
        let x = sub(&random_point(&s, &mut rng), &random_point(omega, &mut rng));
        // m((Ω + x) ∩ S) and m((Ω + x) ∩ Ω).
        if !union_overlap(&s, omega, &x).is_positive() {
            continue;
        }
        applicable += 1;
        if !union_overlap(omega, omega, &x).is_positive() {
            return None;
        }
        if shown.len() < 5 {
            shown.push(x);
        }
    }
    Some(NonSpectralityCertificate {
        witness: s.into_iter().map(|c| HoleBox { min: c.min, max: c.max }).collect(),
        witness_measure,
        overlap_with_region,
        component_sizes,
        samples,
        applicable_samples: applicable,
        seed,
        sample_translations: shown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qvec};

    fn boxes(spec: &[([i64; 2], [i64; 2])]) -> BoxUnion {
        BoxUnion::new(spec.iter().map(|(a, b)| AxisBox::new(qvec(a), qvec(b)).unwrap()).collect()).unwrap()
    }

    #[test]
    fn ring_has_center_hole() {
        let ring = boxes(&[([0, 0], [3, 1]), ([0, 2], [3, 3]), ([0, 1], [1, 2]), ([2, 1], [3, 2])]);
        let cert = hole_detector(&Region::Boxes(ring)).unwrap();
        assert_eq!(cert.witness.len(), 1);
        assert_eq!(cert.witness[0].min, qvec(&[1, 1]));
        assert_eq!(cert.witness_measure, q(1));
        assert!(cert.applicable_samples > 0);
    }

    #[test]
    fn solid_and_open_shapes_have_none() {
        assert!(hole_detector(&Region::Boxes(boxes(&[([0, 0], [2, 1])]))).is_none());
        // A U shape: the notch touches the outside.
        let u = boxes(&[([0, 0], [3, 1]), ([0, 1], [1, 3]), ([2, 1], [3, 3])]);
        assert!(bounded_components(&u).is_empty());
    }

    #[test]
    fn corner_contact_does_not_close_a_hole() {
        // Two diagonal squares leave every complement cell reachable.
        let diag = boxes(&[([0, 0], [1, 1]), ([1, 1], [2, 2])]);
        assert!(bounded_components(&diag).is_empty());
    }
}
