//! Fourier transform `∫_R e^{-2πi<t,x>} dx` of region indicators.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::Simplex;
use crate::rational::to_f64;
use crate::region::Region;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FtValue {
    pub value: Complex64,
    /// Heuristic bound on floating-point evaluation error.
    pub abs_error_bound: f64,
}

const EPS: f64 = f64::EPSILON;

/// Estimated cancellation error of the explicit divided-difference sum
/// beyond which the matrix exponential is used instead.
const EXPLICIT_MAX_ERROR: f64 = 1e-13;

/// `exp[w_0, ..., w_n]` by the explicit formula, with an error estimate.
fn divided_difference_explicit(w: &[Complex64]) -> Option<(Complex64, f64)> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (j, &wj) in w.iter().enumerate() {
        let mut denom = Complex64::new(1.0, 0.0);
        for (k, &wk) in w.iter().enumerate() {
            if k != j {
                denom *= wj - wk;
            }
        }
        if denom.norm() == 0.0 {
            return None;
        }
        let term = wj.exp() / denom;
        mag += term.norm();
        sum += term;
    }
    Some((sum, 4.0 * (w.len() as f64) * EPS * mag))
}

type Mat = Vec<Vec<Complex64>>;

fn mat_mul_upper(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in i..n {
            let aik = a[i][k];
            for j in k..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// `exp[w_0, ..., w_n]` as the corner entry of the exponential of the
/// bidiagonal matrix with diagonal `w` and unit superdiagonal, by Taylor
/// series and squaring. Stable for coincident nodes.
fn divided_difference_matrix(w: &[Complex64]) -> (Complex64, f64) {
    let n = w.len();
    let scale = w.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let s = (scale / 0.25).log2().ceil().max(0.0) as i32;
    let f = 0.5f64.powi(s);
    // `f D + N` is similar to `f (D + N)` via `S = diag(f^i)`; keeping the
    // unit superdiagonal avoids tiny entries in the series.
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        a[i][i] = w[i] * f;
        if i + 1 < n {
            a[i][i + 1] = Complex64::new(1.0, 0.0);
        }
    }
    let mut sum = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut term = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        sum[i][i] = Complex64::new(1.0, 0.0);
        term[i][i] = Complex64::new(1.0, 0.0);
    }
    // Entries of A^k/k! decay like 0.25^k up to polynomial factors.
    for k in 1..=(30 + n) {
        term = mat_mul_upper(&term, &a);
        let inv = 1.0 / k as f64;
        let mut biggest = 0.0f64;
        for row in term.iter_mut() {
            for x in row.iter_mut() {
                *x *= inv;
                biggest = biggest.max(x.norm());
            }
        }
        for i in 0..n {
            for j in i..n {
                sum[i][j] += term[i][j];
            }
        }
        if biggest < 1e-18 && k > n {
            break;
        }
    }
    let mut e = sum;
    for i in 0..n {
        for j in i..n {
            e[i][j] *= f.powi(j as i32 - i as i32);
        }
    }
    for _ in 0..s {
        e = mat_mul_upper(&e, &e);
    }
    let value = e[0][n - 1];
    let bound = 16.0 * EPS * (s as f64 + n as f64 + 2.0) * n as f64;
    (value, bound)
}

/// `∫_S e^{-2πi<t,x>} dx` over a simplex.
pub fn ft_simplex(s: &Simplex, t: &[f64]) -> FtValue {
    let phase = |v: &[f64]| -2.0 * PI * v.iter().zip(t).map(|(a, b)| a * b).sum::<f64>();
    let p0 = phase(&s.vertices[0]);
    let w: Vec<Complex64> = s.vertices.iter().map(|v| Complex64::new(0.0, phase(v) - p0)).collect();
    let (dd, err) = match divided_difference_explicit(&w) {
        Some((v, e)) if e <= EXPLICIT_MAX_ERROR => (v, e),
        _ => divided_difference_matrix(&w),
    };
    let rot = Complex64::from_polar(1.0, p0);
    FtValue { value: rot * dd * s.abs_det, abs_error_bound: (err + 4.0 * EPS * dd.norm()) * s.abs_det }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `∫_a^b e^{-2πi t x} dx`.
fn ft_interval(a: f64, b: f64, t: f64) -> Complex64 {
    let w = b - a;
    Complex64::from_polar(w * sinc(PI * t * w), -PI * t * (a + b))
}

pub fn ft_indicator(region: &Region, t: &[f64]) -> FtValue {
    assert_eq!(t.len(), region.dim(), "frequency has the wrong dimension");
    match region {
        Region::Polytope(p) => {
            let mut value = Complex64::new(0.0, 0.0);
            let mut bound = 0.0;
            for s in p.simplices() {
                let v = ft_simplex(s, t);
                value += v.value;
                bound += v.abs_error_bound;
            }
            FtValue { value, abs_error_bound: bound + 4.0 * EPS * value.norm() }
        }
        Region::Boxes(b) => {
            let d = t.len();
            let mut value = Complex64::new(0.0, 0.0);
            let mut mass = 0.0;
            for bx in b.boxes() {
                let mut v = Complex64::new(1.0, 0.0);
                let mut m = 1.0;
                for i in 0..d {
                    let (lo, hi) = (to_f64(&bx.min[i]), to_f64(&bx.max[i]));
                    v *= ft_interval(lo, hi, t[i]);
                    m *= hi - lo;
                }
                value += v;
                mass += m;
            }
            let bound = 8.0 * EPS * (d as f64 + 2.0) * mass * (1.0 + t.iter().map(|x| x.abs()).sum::<f64>());
            FtValue { value, abs_error_bound: bound }
        }
    }
}

/// Transform at many frequencies, in parallel.
pub fn ft_indicator_many(region: &Region, ts: &[Vec<f64>]) -> Vec<FtValue> {
    ts.par_iter().map(|t| ft_indicator(region, t)).collect()
}

/// `|ft(t)| <= tol + abs_error_bound`.
pub fn is_ft_zero(region: &Region, t: &[f64], tol: f64) -> bool {
    let v = ft_indicator(region, t);
    v.value.norm() <= tol + v.abs_error_bound
}
