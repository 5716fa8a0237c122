//! Full-rank lattices with exact rational bases.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, format_rational, norm2, rational_span_basis, to_f64, QMatrix, QVec, Q};

/// Lattice `B Z^d`; the columns of `B` are the generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    basis: QMatrix,
    determinant: Q,
}

impl Lattice {
    /// Lattice spanned by `d` linearly independent generators.
    pub fn new(generators: Vec<QVec>) -> Result<Lattice> {
        let d = generators.len();
        if d == 0 || generators.iter().any(|g| g.len() != d) {
            return Err(Error::malformed(format!("lattice basis must be {d} vectors of length {d}")));
        }
        let basis = QMatrix::from_columns(&generators);
        let determinant = basis.determinant();
        if determinant.is_zero() {
            return Err(Error::malformed("lattice basis is singular"));
        }
        Ok(Lattice { basis, determinant })
    }

    pub fn integer(d: usize) -> Lattice {
        Lattice::new((0..d).map(|i| (0..d).map(|j| rational::q((i == j) as i64)).collect()).collect()).unwrap()
    }

    pub fn scaled_integer(d: usize, s: Q) -> Lattice {
        Lattice::new(
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { s.clone() } else { Q::zero() }).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Integer span of arbitrary rational generators; fails unless they span
    /// `R^d`.
    pub fn span(generators: &[QVec], d: usize) -> Result<Lattice> {
        let basis = rational_span_basis(generators, d)
            .ok_or_else(|| Error::malformed("generators do not span a full-rank lattice"))?;
        Lattice::new(basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.size()
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn generators(&self) -> Vec<QVec> {
        self.basis.columns()
    }

    pub fn determinant(&self) -> &Q {
        &self.determinant
    }

    /// Covolume `|det B|`.
    pub fn covolume(&self) -> Q {
        self.determinant.abs()
    }

    /// `L* = {y : <x, y> in Z for all x in L}`, basis `B^{-T}`.
    pub fn dual(&self) -> Lattice {
        let inv_t = self.basis.inverse().expect("nonsingular").transpose();
        let determinant = inv_t.determinant();
        Lattice { basis: inv_t, determinant }
    }

    pub fn point(&self, coeffs: &[i64]) -> QVec {
        let c: QVec = coeffs.iter().map(|&x| rational::q(x)).collect();
        self.basis.mul_vec(&c)
    }

    /// Coordinates of `x` in the generator basis.
    pub fn coordinates(&self, x: &[Q]) -> QVec {
        self.basis.inverse().expect("nonsingular").mul_vec(x)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.coordinates(x).iter().all(|c| c.is_integer())
    }

    /// Canonical representative of `x` modulo the lattice (coordinates in
    /// `[0, 1)`).
    pub fn reduce(&self, x: &[Q]) -> QVec {
        let frac: QVec = self.coordinates(x).iter().map(|c| c - c.floor()).collect();
        self.basis.mul_vec(&frac)
    }

    fn float_basis(&self) -> Vec<Vec<f64>> {
        self.basis.to_f64()
    }

    /// Integer coefficient vectors whose lattice points lie within distance
    /// `r` of `center` (closed ball).
    pub fn coefficients_in_ball(&self, center: &[f64], r: f64) -> Vec<Vec<i64>> {
        let d = self.dim();
        let b = self.float_basis();
        let inv = self.basis.inverse().expect("nonsingular").to_f64();
        let c0: Vec<f64> = (0..d).map(|i| (0..d).map(|j| inv[i][j] * center[j]).sum()).collect();
        let widths: Vec<f64> = (0..d).map(|i| r * inv[i].iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
        let lo: Vec<i64> = (0..d).map(|i| (c0[i] - widths[i] - 1e-9).ceil() as i64).collect();
        let hi: Vec<i64> = (0..d).map(|i| (c0[i] + widths[i] + 1e-9).floor() as i64).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut c = lo.clone();
        let r2 = r * r * (1.0 + 1e-12) + 1e-300;
        loop {
            let mut dist2 = 0.0;
            for i in 0..d {
                let x: f64 = (0..d).map(|j| b[i][j] * c[j] as f64).sum();
                dist2 += (x - center[i]) * (x - center[i]);
            }
            if dist2 <= r2 {
                out.push(c.clone());
            }
            let mut k = 0;
            loop {
                if k == d {
                    return out;
                }
                c[k] += 1;
                if c[k] <= hi[k] {
                    break;
                }
                c[k] = lo[k];
                k += 1;
            }
        }
    }

    /// The `n` shortest nonzero vectors, ordered by exact squared norm and
    /// then lexicographically by coordinates.
    pub fn shortest_nonzero(&self, n: usize) -> Vec<QVec> {
        let d = self.dim();
        let inv = self.basis.inverse().expect("nonsingular").to_f64();
        let frob: f64 = inv.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let mut k: i64 = 1;
        loop {
            let mut candidates: Vec<(Q, QVec)> = Vec::new();
            let mut c = vec![-k; d];
            loop {
                if c.iter().any(|&x| x != 0) {
                    let v = self.point(&c);
                    candidates.push((norm2(&v), v));
                }
                let mut i = 0;
                while i < d {
                    c[i] += 1;
                    if c[i] <= k {
                        break;
                    }
                    c[i] = -k;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
            candidates.sort();
            if candidates.len() >= n {
                let radius = to_f64(&candidates[n - 1].0).sqrt();
                // ||c||_inf <= ||B^{-1}||_F |Bc|, so the box of half-width
                // `needed` holds every vector at least as short.
                let needed = (radius * frob * (1.0 + 1e-9)).ceil() as i64;
                if needed <= k {
                    return candidates.into_iter().take(n).map(|(_, v)| v).collect();
                }
                k = needed;
            } else {
                k *= 2;
            }
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.generators().iter().map(|g| g.iter().map(format_rational).collect()).collect()
    }
}
