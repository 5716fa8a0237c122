//! Finite-window autocorrelation measures, diffraction of periodic measures
//! and checks of the properties an autocorrelation of a spectrum must have.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::ft_indicator;
use crate::lattice::Lattice;
use crate::measure::{Atom, Component, MeasureSpec};
use crate::pointset::{parabolic_in_ball, parabolic_point, PointSet, WindowShape};
use crate::rational::{dot, from_f64, hermite_basis, sub, to_f64, to_f64_vec, QVec, Q};
use crate::region::Region;

/// Atoms closer than this (in every coordinate) are merged when positions
/// are only known in floating point.
pub const SNAP: f64 = 1e-9;

fn exact_atoms(weights: BTreeMap<QVec, Q>) -> MeasureSpec {
    let atoms = weights.into_iter().filter(|(_, w)| w.is_positive()).map(|(p, w)| Atom::exact(p, to_f64(&w))).collect();
    MeasureSpec { components: vec![Component::Atoms(atoms)] }
}

/// Coset weights `w_c = Σ_{j: o_i - o_j ≡ c} n_j / |Λ_r|` of the window
/// average of a periodic set, keyed by reduced coset representative.
fn periodic_coset_weights(l: &Lattice, offsets: &[QVec], shape: WindowShape, r: f64) -> Result<BTreeMap<QVec, Q>> {
    let counts: Vec<usize> = offsets
        .iter()
        .map(|o| {
            PointSet::Periodic { lattice: l.clone(), offsets: vec![o.clone()] }
                .exact_window(shape, r)
                .map(|w| w.len())
                .ok_or_else(|| Error::malformed("window radius must be finite"))
        })
        .collect::<Result<_>>()?;
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::WindowEmpty);
    }
    let total = Q::from_integer(BigInt::from(total));
    let mut weights: BTreeMap<QVec, Q> = BTreeMap::new();
    for (j, oj) in offsets.iter().enumerate() {
        if counts[j] == 0 {
            continue;
        }
        for oi in offsets {
            let c = l.reduce(&sub(oi, oj));
            *weights.entry(c).or_insert_with(Q::zero) += Q::from_integer(BigInt::from(counts[j])) / &total;
        }
    }
    Ok(weights)
}

/// The window average `|Λ_r|^{-1} δ_Λ * δ_{-Λ_r}` of a periodic set in its
/// periodic form `Σ_c w_c δ_{L + c}`.
pub fn autocorrelation_periodic(set: &PointSet, r: f64, shape: WindowShape) -> Result<MeasureSpec> {
    let (l, offsets) = set.cosets().ok_or_else(|| Error::NotPeriodic("point set is not lattice-periodic".into()))?;
    let weights = periodic_coset_weights(l, &offsets, shape, r)?;
    let (offsets, weights): (Vec<QVec>, Vec<f64>) =
        weights.into_iter().filter(|(_, w)| w.is_positive()).map(|(c, w)| (c, to_f64(&w))).unzip();
    MeasureSpec::new(vec![Component::LatticeAtoms { lattice: l.clone(), offsets, weights, exclude_origin: false }])
}

/// The window average `ν_r = |Λ_r|^{-1} Σ_{λ ∈ Λ_r} δ_{Λ - λ}` restricted to
/// the closed ball of radius `reporting_radius`, as a list of atoms sorted by
/// position. Coinciding atoms are merged exactly for rational sets.
pub fn autocorrelation_window(set: &PointSet, r: f64, shape: WindowShape, reporting_radius: f64) -> Result<MeasureSpec> {
    let d = set.dim();
    let zero = vec![0.0; d];
    match set {
        PointSet::Lattice(_) | PointSet::Periodic { .. } => {
            let (l, offsets) = set.cosets().unwrap();
            let coset_weights = periodic_coset_weights(l, &offsets, shape, r)?;
            let mut weights: BTreeMap<QVec, Q> = BTreeMap::new();
            for (c, w) in coset_weights {
                let coset = PointSet::Periodic { lattice: l.clone(), offsets: vec![c] };
                for p in coset.exact_points_in_ball(&zero, reporting_radius).unwrap() {
                    *weights.entry(p).or_insert_with(Q::zero) += &w;
                }
            }
            Ok(exact_atoms(weights))
        }
        PointSet::Explicit(points) => {
            let window = set.exact_window(shape, r).unwrap();
            if window.is_empty() {
                return Err(Error::WindowEmpty);
            }
            let n = Q::from_integer(BigInt::from(window.len()));
            let r2 = reporting_radius * reporting_radius * (1.0 + 1e-12);
            let mut weights: BTreeMap<QVec, Q> = BTreeMap::new();
            for a in &window {
                for b in points {
                    let t = sub(b, a);
                    if to_f64_vec(&t).iter().map(|x| x * x).sum::<f64>() <= r2 {
                        *weights.entry(t).or_insert_with(Q::zero) += Q::one() / &n;
                    }
                }
            }
            Ok(exact_atoms(weights))
        }
        PointSet::ParabolicCube { alpha } => parabolic_autocorrelation(*alpha, r, shape, reporting_radius),
    }
}

/// For `Λ = {(n, n²α + m)}` the difference `(n', m') - (n, m)` is
/// `(h, h(2n + h)α + k)` with `h = n' - n`, `k = m' - m`, independent of `m`.
/// So the atoms for every window point with first index `n` are the same, and
/// each is weighted by the number of such points.
fn parabolic_autocorrelation(alpha: f64, r: f64, shape: WindowShape, reporting_radius: f64) -> Result<MeasureSpec> {
    let n_lo = (-r).floor() as i64 - 1;
    let n_hi = r.ceil() as i64 + 1;
    let per_n: Vec<(i64, u64)> = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| {
            let base = ((n * n) as f64) * alpha;
            let (m_lo, m_hi) = ((-r - base).floor() as i64 - 1, (r - base).ceil() as i64 + 1);
            let c = (m_lo..=m_hi).filter(|&m| shape.contains_f64(&parabolic_point(alpha, n, m), r)).count();
            (n, c as u64)
        })
        .filter(|&(_, c)| c > 0)
        .collect();
    let total: u64 = per_n.iter().map(|p| p.1).sum();
    if total == 0 {
        return Err(Error::WindowEmpty);
    }
    let counts: HashMap<(i64, i64, i64), u64> = per_n
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<(i64, i64, i64), u64>, &(n, c)| {
            let origin = parabolic_point(alpha, n, 0);
            for (n2, k) in parabolic_in_ball(alpha, &origin, reporting_radius) {
                let h = n2 - n;
                // On the line h = 0 the atom does not depend on n.
                let key = if h == 0 { (0, 0, k) } else { (n, h, k) };
                *acc.entry(key).or_insert(0) += c;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let mut atoms: Vec<(Vec<f64>, Option<QVec>, u64)> = counts
        .into_iter()
        .map(|((n, h, k), c)| {
            if h == 0 {
                (vec![0.0, k as f64], Some(vec![Q::zero(), Q::from_integer(k.into())]), c)
            } else {
                (vec![h as f64, (h * (2 * n + h)) as f64 * alpha + k as f64], None, c)
            }
        })
        .collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Snap floating positions that agree to within SNAP.
    let mut merged: Vec<(Vec<f64>, Option<QVec>, u64)> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if let Some(last) = merged.last_mut() {
            if last.0.iter().zip(&a.0).all(|(x, y)| (x - y).abs() < SNAP) {
                last.2 += a.2;
                continue;
            }
        }
        merged.push(a);
    }
    let atoms = merged
        .into_iter()
        .map(|(p, exact, c)| Atom { position: p, exact, weight: c as f64 / total as f64 })
        .collect();
    Ok(MeasureSpec { components: vec![Component::Atoms(atoms)] })
}

/// Largest change of any atom weight between consecutive window radii.
pub fn convergence_diagnostic(set: &PointSet, radii: &[f64], shape: WindowShape, reporting_radius: f64) -> Result<Vec<f64>> {
    let key = |a: &Atom| -> Vec<i64> { a.position.iter().map(|x| (x / SNAP).round() as i64).collect() };
    let mut maps = Vec::with_capacity(radii.len());
    for &r in radii {
        let m = autocorrelation_window(set, r, shape, reporting_radius)?;
        let Component::Atoms(atoms) = &m.components[0] else { unreachable!() };
        maps.push(atoms.iter().map(|a| (key(a), a.weight)).collect::<BTreeMap<_, _>>());
    }
    Ok(maps
        .windows(2)
        .map(|w| {
            let mut worst = 0.0f64;
            for (k, v) in &w[0] {
                worst = worst.max((v - w[1].get(k).copied().unwrap_or(0.0)).abs());
            }
            for (k, v) in &w[1] {
                if !w[0].contains_key(k) {
                    worst = worst.max(*v);
                }
            }
            worst
        })
        .collect())
}

/// Tolerances for accepting a Fourier coefficient as a positive real.
pub const IMAG_TOL: f64 = 1e-9;
pub const ZERO_WEIGHT_TOL: f64 = 1e-12;

/// Fourier transform of `γ = Σ_j w_j δ_{L + o_j}`:
/// `γ̂ = Σ_{k ∈ L*} c(k) δ_k` with `c(k) = |det L|^{-1} Σ_j w_j e^{-2πi<k, o_j>}`.
/// `c` is periodic modulo `M*` where `M` is generated by `L` and the
/// offsets, so the result is returned as atoms on cosets of `M*`.
pub fn diffraction_periodic(gamma: &MeasureSpec) -> Result<MeasureSpec> {
    let mut lattice: Option<&Lattice> = None;
    let mut pattern: BTreeMap<QVec, f64> = BTreeMap::new();
    for comp in &gamma.components {
        match comp {
            Component::LatticeAtoms { lattice: l, offsets, weights, exclude_origin } => {
                if *exclude_origin {
                    return Err(Error::NotPeriodic("lattice atoms exclude the origin".into()));
                }
                match lattice {
                    Some(prev) if prev != l => {
                        return Err(Error::NotPeriodic("lattice components use different lattices".into()))
                    }
                    _ => lattice = Some(l),
                }
                for (o, w) in offsets.iter().zip(weights) {
                    *pattern.entry(l.reduce(o)).or_insert(0.0) += w;
                }
            }
            Component::Atoms(a) if a.is_empty() => {}
            Component::Atoms(_) => return Err(Error::NotPeriodic("finite atom lists are not periodic".into())),
            _ => return Err(Error::NotPeriodic("measure has a continuous part".into())),
        }
    }
    let l = lattice.ok_or_else(|| Error::NotPeriodic("no lattice component".into()))?;
    let d = l.dim();
    let mut gens = l.generators();
    gens.extend(pattern.keys().cloned());
    let m = Lattice::span(&gens, d)?;
    let l_dual = l.dual();
    let m_dual = m.dual();
    // Coordinates of M* in the basis of L* are integers.
    let inv = l_dual.basis().inverse().expect("nonsingular");
    let coords: Vec<Vec<BigInt>> =
        m_dual.generators().iter().map(|g| inv.mul_vec(g).into_iter().map(|x| x.to_integer()).collect()).collect();
    let h = hermite_basis(&coords, d).expect("full rank");
    let diag: Vec<i64> = (0..d).map(|i| i64::try_from(&h[i][i]).expect("index fits in i64")).collect();
    let covolume = to_f64(&l.covolume());
    let mut offsets = Vec::new();
    let mut weights = Vec::new();
    let mut a = vec![0i64; d];
    loop {
        let k = l_dual.point(&a);
        let mut c = Complex64::new(0.0, 0.0);
        for (o, w) in &pattern {
            let phase = dot(&k, o);
            let frac = to_f64(&(&phase - phase.floor()));
            c += Complex64::from_polar(*w, -2.0 * std::f64::consts::PI * frac);
        }
        c /= covolume;
        if c.im.abs() > IMAG_TOL || c.re < -IMAG_TOL {
            return Err(Error::NotPositiveDefinite { position: to_f64_vec(&k), value: format!("{c}") });
        }
        if c.re > ZERO_WEIGHT_TOL {
            offsets.push(k);
            weights.push(c.re);
        }
        let mut i = 0;
        while i < d {
            a[i] += 1;
            if a[i] < diag[i] {
                break;
            }
            a[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    MeasureSpec::new(vec![Component::LatticeAtoms { lattice: m_dual, offsets, weights, exclude_origin: false }])
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AutocorrPropertyReport {
    pub pass: bool,
    pub reporting_radius: f64,
    pub tol: f64,
    pub zero_tol: f64,
    /// Radius around the origin free of zeros of the transform.
    pub origin_gap: f64,
    pub translation_bound: f64,
    pub checks: Vec<PropertyCheck>,
    /// Atoms `t ≠ 0` where the transform of the region does not vanish.
    pub nonzero_atoms: Vec<Vec<f64>>,
}

/// Checks positivity, zeros of `1̂_R` at every nonzero atom, a unit atom at
/// the origin isolated by the zero-free radius, diffraction equal to
/// `m(R) δ_0` on `Δ(R)` (periodic `γ` only), and a finite translation bound.
pub fn autocorr_property_check(gamma: &MeasureSpec, region: &Region, tol: f64, zero_tol: f64, reporting_radius: f64) -> AutocorrPropertyReport {
    let d = region.dim();
    let origin = vec![0.0; d];
    let atoms = gamma.atoms_in_ball(&origin, reporting_radius);
    let mut checks = Vec::new();

    let positive = gamma.components.iter().all(|c| match c {
        Component::Atoms(a) => a.iter().all(|x| x.weight > 0.0),
        Component::LatticeAtoms { weights, .. } => weights.iter().all(|w| *w > 0.0),
        Component::ProductLebesgue { density, .. } | Component::Uniform { density } => *density > 0.0,
    });
    checks.push(PropertyCheck { name: "positive", pass: positive, detail: "all weights and densities positive".into() });

    let is_origin = |a: &Atom| match &a.exact {
        Some(e) => e.iter().all(Zero::is_zero),
        None => a.position.iter().all(|x| x.abs() < SNAP),
    };
    let nonzero: Vec<&Atom> = atoms.iter().filter(|a| !is_origin(a)).collect();
    let failures: Vec<Vec<f64>> = nonzero
        .par_iter()
        .filter(|a| {
            let v = ft_indicator(region, &a.position);
            v.value.norm() > zero_tol + v.abs_error_bound
        })
        .map(|a| a.position.clone())
        .collect();
    checks.push(PropertyCheck {
        name: "zeros",
        pass: failures.is_empty(),
        detail: format!("{} nonzero atoms checked, {} outside the zero set", nonzero.len(), failures.len()),
    });

    let (center, _) = (region.center_f64(), ());
    let (lo, hi) = region.bounding_box();
    let rho = lo
        .iter()
        .zip(&hi)
        .zip(&center)
        .map(|((a, b), c)| (c - a).abs().max((b - c).abs()).powi(2))
        .sum::<f64>()
        .sqrt();
    let gap = 1.0 / (4.0 * rho);
    let origin_weight: f64 = atoms.iter().filter(|a| is_origin(a)).map(|a| a.weight).sum();
    let intruders = nonzero.iter().filter(|a| a.position.iter().map(|x| x * x).sum::<f64>().sqrt() < gap).count();
    checks.push(PropertyCheck {
        name: "unit_origin",
        pass: (origin_weight - 1.0).abs() <= tol && intruders == 0,
        detail: format!("origin weight {origin_weight}, {intruders} other atoms within {gap}"),
    });

    match diffraction_periodic(gamma) {
        Ok(hat) => {
            let m = to_f64(&region.measure());
            let reach = region.diameter() * 1.0001;
            let mut bad = Vec::new();
            let mut zero_mass = 0.0;
            for a in hat.atoms_in_ball(&origin, reach) {
                let exact = match &a.exact {
                    Some(e) => e.clone(),
                    None => match a.position.iter().map(|&x| from_f64(x)).collect::<Result<QVec>>() {
                        Ok(e) => e,
                        Err(_) => continue,
                    },
                };
                if !region.in_delta(&exact) {
                    continue;
                }
                if exact.iter().all(Zero::is_zero) {
                    zero_mass += a.weight;
                } else if a.weight > tol {
                    bad.push(a.position.clone());
                }
            }
            checks.push(PropertyCheck {
                name: "diffraction_on_delta",
                pass: bad.is_empty() && (zero_mass - m).abs() <= tol,
                detail: format!("mass {zero_mass} at the origin (measure {m}), {} other atoms in the difference set", bad.len()),
            });
        }
        Err(e) => checks.push(PropertyCheck {
            name: "diffraction_on_delta",
            pass: true,
            detail: format!("not evaluated: {e}"),
        }),
    }

    let bound = gamma.translation_bound(d);
    checks.push(PropertyCheck {
        name: "translation_bounded",
        pass: bound.is_finite(),
        detail: format!("largest unit-ball mass on the sample grid is {bound}"),
    });

    AutocorrPropertyReport {
        pass: checks.iter().all(|c| c.pass),
        reporting_radius,
        tol,
        zero_tol,
        origin_gap: gap,
        translation_bound: bound,
        checks,
        nonzero_atoms: failures,
    }
}
