#![allow(dead_code)]

use spectile_core::rational::{q, qf, qvec};
use spectile_core::{AxisBox, BoxUnion, Lattice, PointSet, Polytope, QVec, Region};

pub const HEXAGON: [[i64; 2]; 6] = [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]];
/// Octagon with the face structure of the regular one and rational vertices.
pub const OCTAGON: [[i64; 2]; 8] = [[1, 2], [2, 1], [2, -1], [1, -2], [-1, -2], [-2, -1], [-2, 1], [-1, 2]];

pub fn polygon(vs: &[[i64; 2]]) -> Polytope {
    Polytope::from_vertices(vs.iter().map(|v| qvec(v)).collect()).unwrap()
}

pub fn hexagon() -> Polytope {
    polygon(&HEXAGON)
}

pub fn prism(base: &[[i64; 2]]) -> Polytope {
    let mut pts = Vec::new();
    for z in [qf(-1, 2), qf(1, 2)] {
        for v in base {
            pts.push(vec![q(v[0]), q(v[1]), z.clone()]);
        }
    }
    Polytope::from_vertices(pts).unwrap()
}

pub fn octagon_prism() -> Polytope {
    prism(&OCTAGON)
}

pub fn triangular_prism() -> Polytope {
    prism(&[[0, 0], [1, 0], [0, 1]])
}

/// Permutations of `(0, ±1, ±2)`.
pub fn truncated_octahedron() -> Polytope {
    let mut pts = Vec::new();
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        for s1 in [-1, 1] {
            for s2 in [-1, 1] {
                let base = [0, s1, 2 * s2];
                pts.push(qvec(&[base[perm[0]], base[perm[1]], base[perm[2]]]));
            }
        }
    }
    Polytope::from_vertices(pts).unwrap()
}

pub fn boxes(spec: &[(&[i64], &[i64])]) -> BoxUnion {
    BoxUnion::new(spec.iter().map(|(a, b)| AxisBox::new(qvec(a), qvec(b)).unwrap()).collect()).unwrap()
}

pub fn rboxes(spec: &[(QVec, QVec)]) -> Region {
    Region::Boxes(BoxUnion::new(spec.iter().map(|(a, b)| AxisBox::new(a.clone(), b.clone()).unwrap()).collect()).unwrap())
}

/// `[0, 1/2] ∪ [1, 3/2]`.
pub fn two_intervals() -> Region {
    rboxes(&[(vec![q(0)], vec![qf(1, 2)]), (vec![q(1)], vec![qf(3, 2)])])
}

/// `2Z ∪ (2Z + 1/2)`.
pub fn two_cosets() -> PointSet {
    PointSet::periodic(Lattice::scaled_integer(1, q(2)), vec![vec![q(0)], vec![qf(1, 2)]]).unwrap()
}

/// A ring of five boxes around an L-shaped hole.
pub fn ring_with_hole() -> Region {
    Region::Boxes(boxes(&[
        (&[1, 1], &[6, 2]),
        (&[1, 2], &[2, 4]),
        (&[5, 2], &[6, 5]),
        (&[2, 4], &[5, 5]),
        (&[2, 3], &[3, 4]),
    ]))
}

/// Random integer points in `[-5, 5]^d`, resampled until full-dimensional.
pub fn random_polytope(rng: &mut impl rand::Rng, d: usize) -> Polytope {
    loop {
        let n = rng.gen_range(d + 1..=d + 5);
        let pts: Vec<QVec> = (0..n).map(|_| (0..d).map(|_| q(rng.gen_range(-5..=5))).collect()).collect();
        if let Ok(p) = Polytope::from_vertices(pts) {
            return p;
        }
    }
}
