//! Exact rational scalars, vectors and small dense matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;
/// Exact rational vector.
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: fall back to a scaled quotient.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_f64_vec(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::MalformedInput(format!("non-finite number {x}")))
}

pub fn from_f64_vec(v: &[f64]) -> Result<QVec> {
    v.iter().map(|&x| from_f64(x)).collect()
}

/// Parses an integer, a `p/q` fraction, or a finite decimal (optionally with
/// exponent) into an exact rational. Decimals are read digit-for-digit, so
/// `"0.1"` is exactly 1/10.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::MalformedInput(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::MalformedInput(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Q::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// `p/q` or `p` for integers.
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> QVec {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn norm2(a: &[Q]) -> Q {
    dot(a, a)
}

pub fn centroid(points: &[QVec]) -> QVec {
    let d = points[0].len();
    let n = q(points.len() as i64);
    (0..d)
        .map(|i| points.iter().fold(Q::zero(), |acc, p| acc + &p[i]) / &n)
        .collect()
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[Q]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Scales a nonzero vector to the primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect();
    make_primitive(ints)
}

pub fn make_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Rank of a list of row vectors (exact Gaussian elimination).
pub fn rank(rows: &[QVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<QVec> = rows.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..cols {
                let delta = &f * &m[r][j];
                m[i][j] -= delta;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a nonempty point set.
pub fn affine_rank(points: &[&QVec]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let rows: Vec<QVec> = points[1..].iter().map(|p| sub(p, base)).collect();
    rank(&rows)
}

/// Dense square rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    n: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn from_rows(rows: &[QVec]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        QMatrix { n, data: rows.iter().flatten().cloned().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[QVec]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Q::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Q::one();
        }
        QMatrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> QVec {
        self.data[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn column(&self, j: usize) -> QVec {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<QVec> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.get(j, i).clone());
            }
        }
        QMatrix { n, data }
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push((0..n).fold(Q::zero(), |acc, k| acc + self.get(i, k) * other.get(k, j)));
            }
        }
        QMatrix { n, data }
    }

    pub fn mul_vec(&self, v: &[Q]) -> QVec {
        (0..self.n)
            .map(|i| (0..self.n).fold(Q::zero(), |acc, k| acc + self.get(i, k) * &v[k]))
            .collect()
    }

    pub fn determinant(&self) -> Q {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r * n + c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                for j in 0..n {
                    m.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = m[c * n + c].clone();
            det *= &pivot;
            for r in c + 1..n {
                if m[r * n + c].is_zero() {
                    continue;
                }
                let f = &m[r * n + c] / &pivot;
                for j in c..n {
                    let delta = &f * &m[c * n + j];
                    m[r * n + j] -= delta;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = QMatrix::identity(n).data;
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r * n + c].is_zero())?;
            if p != c {
                for j in 0..n {
                    a.swap(c * n + j, p * n + j);
                    inv.swap(c * n + j, p * n + j);
                }
            }
            let pivot = a[c * n + c].clone();
            for j in 0..n {
                a[c * n + j] /= &pivot;
                inv[c * n + j] /= &pivot;
            }
            for r in 0..n {
                if r == c || a[r * n + c].is_zero() {
                    continue;
                }
                let f = a[r * n + c].clone();
                for j in 0..n {
                    let da = &f * &a[c * n + j];
                    a[r * n + j] -= da;
                    let di = &f * &inv[c * n + j];
                    inv[r * n + j] -= di;
                }
            }
        }
        Some(QMatrix { n, data: inv })
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| to_f64_vec(&self.row(i))).collect()
    }
}

/// Column-style Hermite normal form of the integer span of `gens` (each of
/// length `d`): returns `d` columns forming a lower-triangular basis with
/// positive diagonal and off-diagonal entries reduced into `[0, h_ii)` to the
/// left of each pivot. Returns `None` if the span has rank < `d`.
pub fn hermite_basis(gens: &[Vec<BigInt>], d: usize) -> Option<Vec<Vec<BigInt>>> {
    // Work on rows = generators; reduce to echelon form with integer row ops.
    let mut rows: Vec<Vec<BigInt>> = gens.iter().filter(|g| g.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    for c in 0..d {
        // Euclid on column c among remaining rows.
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let pivot = *nonzero.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            let prow = rows[pivot].clone();
            for &i in &nonzero {
                if i == pivot {
                    continue;
                }
                let f = rows[i][c].div_floor(&prow[c]);
                for j in 0..d {
                    let delta = &f * &prow[j];
                    rows[i][j] -= delta;
                }
            }
        }
        let idx = (0..rows.len()).find(|&i| !rows[i][c].is_zero())?;
        let mut prow = rows.swap_remove(idx);
        if prow[c].is_negative() {
            for x in prow.iter_mut() {
                *x = -x.clone();
            }
        }
        basis.push(prow);
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    // basis[c] has zeros before column c; reduce entries below the diagonal.
    for c in 0..d {
        for r in c + 1..d {
            let diag = basis[r][r].clone();
            let f = basis[c][r].div_floor(&diag);
            if !f.is_zero() {
                let br = basis[r].clone();
                for j in 0..d {
                    let delta = &f * &br[j];
                    basis[c][j] -= delta;
                }
            }
        }
    }
    Some(basis)
}

/// Basis (as vectors) of the integer span of rational generators.
pub fn rational_span_basis(gens: &[QVec], d: usize) -> Option<Vec<QVec>> {
    let den = gens.iter().fold(BigInt::one(), |acc, g| acc.lcm(&common_denominator(g)));
    let scale = Q::from_integer(den.clone());
    let ints: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.iter().map(|x| (x * &scale).to_integer()).collect())
        .collect();
    let hb = hermite_basis(&ints, d)?;
    Some(
        hb.into_iter()
            .map(|v| v.into_iter().map(|x| Q::new(x, den.clone())).collect())
            .collect(),
    )
}

/// All column-HNF integer matrices with determinant `index` (each gives one
/// sublattice of `Z^d` of that index). Columns are returned as vectors.
pub fn sublattice_hnfs(d: usize, index: u64) -> Vec<Vec<Vec<i64>>> {
    fn diagonals(d: usize, index: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == d - 1 {
            let mut full = prefix.clone();
            full.push(index);
            out.push(full);
            return;
        }
        for k in 1..=index {
            if index.is_multiple_of(k) {
                prefix.push(k);
                diagonals(d, index / k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut diags = Vec::new();
    if d == 0 {
        return Vec::new();
    }
    diagonals(d, index, &mut Vec::new(), &mut diags);
    let mut out = Vec::new();
    for diag in diags {
        // Free entries: column j, row i > j, in [0, diag[i]).
        let slots: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |i| (i, j))).collect();
        let mut counters = vec![0u64; slots.len()];
        loop {
            let mut cols = vec![vec![0i64; d]; d];
            for j in 0..d {
                cols[j][j] = diag[j] as i64;
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                cols[j][i] = counters[s] as i64;
            }
            out.push(cols);
            let mut s = 0;
            loop {
                if s == slots.len() {
                    break;
                }
                counters[s] += 1;
                if counters[s] < diag[slots[s].0] {
                    break;
                }
                counters[s] = 0;
                s += 1;
            }
            if s == slots.len() {
                break;
            }
        }
    }
    out
}
