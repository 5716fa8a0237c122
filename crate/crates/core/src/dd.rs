//! Double-description conversion between generators and inequalities of a
//! pointed polyhedral cone, in exact integer arithmetic.
//!
//! Both polytope conversions reduce to the same problem: list the extreme rays
//! of `{y : A y >= 0}` for an integer matrix `A` of full column rank.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::{make_primitive, rank, Q};

#[derive(Clone, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<BigInt>,
    zeros: Bits,
}

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Failure modes of the extreme-ray computation.
#[derive(Debug, PartialEq, Eq)]
pub enum DdError {
    /// The constraint matrix has rank below the ambient dimension.
    NotPointed,
}

/// Extreme rays of `{y in R^n : row . y >= 0 for every row}` as primitive
/// integer vectors. Requires the rows to span `R^n`.
pub fn extreme_rays(rows: &[Vec<BigInt>], n: usize) -> Result<Vec<Vec<BigInt>>, DdError> {
    let m = rows.len();
    // Pick n independent rows for the initial simplicial cone.
    let qrows: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    let mut basis_rows: Vec<usize> = Vec::with_capacity(n);
    let mut chosen: Vec<Vec<Q>> = Vec::with_capacity(n);
    for (i, r) in qrows.iter().enumerate() {
        chosen.push(r.clone());
        if rank(&chosen) == chosen.len() {
            basis_rows.push(i);
            if basis_rows.len() == n {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    if basis_rows.len() < n {
        return Err(DdError::NotPointed);
    }
    let sub = crate::rational::QMatrix::from_rows(&chosen);
    let inv = sub.inverse().expect("independent rows");
    let mut rays: Vec<Ray> = (0..n)
        .map(|j| {
            let col = inv.column(j);
            let coords = crate::rational::primitive_integer(&col);
            let mut zeros = Bits::new(m);
            for (k, &row) in basis_rows.iter().enumerate() {
                if k != j {
                    zeros.set(row);
                }
            }
            Ray { coords, zeros }
        })
        .collect();

    let mut processed = vec![false; m];
    for &r in &basis_rows {
        processed[r] = true;
    }
    for i in 0..m {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let row = &rows[i];
        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let negs: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if negs.is_empty() {
            for (k, v) in values.iter().enumerate() {
                if v.is_zero() {
                    rays[k].zeros.set(i);
                }
            }
            continue;
        }
        let mut fresh: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &negs {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < n {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !common.subset_of(&r.zeros));
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vq = &values[q];
                let coords: Vec<BigInt> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(cq, cp)| vp * cq - vq * cp)
                    .collect();
                let coords = make_primitive(coords);
                let mut zeros = common;
                zeros.set(i);
                fresh.push(Ray { coords, zeros });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                r.zeros.set(i);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.coords).collect();
    out.sort();
    out.dedup();
    Ok(out)
}
