//! End-to-end acceptance checks, one stderr line per criterion.
//! `cargo test -p spectile-core --test acceptance`

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use spectile_core::autocorr::{autocorrelation_periodic, diffraction_periodic};
use spectile_core::belts::{all_belts, belt_from};
use spectile_core::holes::bounded_components;
use spectile_core::rational::{from_f64_vec, q, qf, qvec, sub, to_f64, to_f64_vec};
use spectile_core::tiling::default_grid;
use spectile_core::*;

type Failures = Vec<String>;

macro_rules! check {
    ($f:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $f.push(format!($($msg)+));
        }
    };
}

fn run(id: u32, name: &str, budget: Option<Duration>, body: impl FnOnce(&mut Failures)) -> bool {
    let start = Instant::now();
    let mut failures = Vec::new();
    if let Err(e) = catch_unwind(AssertUnwindSafe(|| body(&mut failures))) {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        failures.push(format!("panic: {}", msg.unwrap_or_default()));
    }
    let elapsed = start.elapsed();
    if let Some(b) = budget {
        check!(failures, elapsed <= b, "took {:.2?}, budget {:.0?}", elapsed, b);
    }
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let budget = budget.map(|b| format!(", budget {b:.0?}")).unwrap_or_default();
    // Written to the handle directly so the lines show without --nocapture.
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {id} {name}: {status} ({elapsed:.2?}{budget})");
    for f in &failures {
        let _ = writeln!(err, "    {f}");
    }
    failures.is_empty()
}

fn belt_lengths(p: &Polytope) -> Vec<usize> {
    let mut v: Vec<usize> = vm_check(p).belts.iter().map(|b| b.length).collect();
    v.sort();
    v.dedup();
    v
}

fn venkov_mcmullen(f: &mut Failures) {
    for d in 2..=4 {
        let r = vm_check(&cube(d, qf(1, 2)));
        check!(f, r.verdict == Verdict::Tiles, "cube d={d}: {:?}", r.failed_conditions);
    }
    let r = vm_check(&hexagon());
    check!(f, r.verdict == Verdict::Tiles && r.belts.len() == 1 && r.belts[0].length == 6, "hexagon: {:?}", r.belts.len());
    let r = vm_check(&octagon_prism());
    check!(f, r.failed_conditions == vec![Condition::BeltLengths], "octagon prism failed {:?}", r.failed_conditions);
    check!(f, r.belts.iter().any(|b| b.length == 8), "octagon prism has no belt of length 8");
    let r = vm_check(&triangular_prism());
    check!(
        f,
        r.verdict == Verdict::Fails
            && r.failed_conditions.iter().all(|c| matches!(c, Condition::CentrallySymmetric | Condition::SymmetricFacets))
            && !r.failed_conditions.is_empty(),
        "triangular prism: {:?}",
        r.failed_conditions
    );
    let t = truncated_octahedron();
    let r = vm_check(&t);
    check!(f, r.verdict == Verdict::Tiles, "truncated octahedron: {:?}", r.failed_conditions);
    let lengths = belt_lengths(&t);
    check!(f, lengths.iter().all(|l| *l == 4 || *l == 6), "truncated octahedron belt lengths {lengths:?}");
    // Six zones of six facets each, counted by edge directions.
    check!(f, vm_check(&t).belts.len() == 6, "truncated octahedron has {} belts", vm_check(&t).belts.len());
}

fn lattice_and_spectrum(f: &mut Failures) {
    for d in 2..=3 {
        let r = Region::Polytope(cube(d, qf(1, 2)));
        let z = Lattice::integer(d);
        let o = orthogonality_check(&r, &PointSet::Lattice(z.clone()), 5.0, 1e-8).unwrap();
        check!(f, o.pass, "cube d={d} orthogonality: max |ft| {}", o.max_abs_ft);
        let t = lattice_tiling_check(&r, &z, 100, 1e-8);
        check!(f, t.pass, "cube d={d} lattice tiling check failed");
    }
    for (name, p) in [("hexagon", hexagon()), ("truncated octahedron", truncated_octahedron())] {
        match construct_tiling_lattice(&p, &vm_check(&p)) {
            Ok(l) => {
                check!(f, l.covolume() == p.volume(), "{name}: covolume {} vs volume {}", l.covolume(), p.volume());
                let rep = lattice_tiling_check(&Region::Polytope(p.clone()), &l, 100, 1e-8);
                check!(f, rep.dual_vectors_checked == 100, "{name}: {} dual vectors", rep.dual_vectors_checked);
                check!(f, rep.max_abs_ft <= 1e-8, "{name}: max |ft| on duals {}", rep.max_abs_ft);
            }
            Err(e) => f.push(format!("{name}: {e}")),
        }
    }
}

fn without_point(set: &PointSet, reach: f64, removed: &QVec) -> PointSet {
    let pts: Vec<QVec> = set
        .exact_points_in_ball(&vec![0.0; set.dim()], reach)
        .unwrap()
        .into_iter()
        .filter(|p| p != removed)
        .collect();
    PointSet::explicit(pts).unwrap()
}

fn completeness(f: &mut Failures) {
    let interval = rboxes(&[(vec![qf(-1, 2)], vec![qf(1, 2)])]);
    let z = PointSet::Lattice(Lattice::integer(1));
    let grid = GridSpec::new(vec![-0.5], vec![0.5], 101).unwrap();
    let rep = completeness_residual(&interval, &z, &grid, 500.0).unwrap();
    check!(f, rep.completeness_residual <= 1e-2, "interval residual {}", rep.completeness_residual);

    let grid2 = GridSpec::new(vec![0.0], vec![2.0], 101).unwrap();
    let rep = completeness_residual(&two_intervals(), &two_cosets(), &grid2, 500.0).unwrap();
    check!(f, rep.completeness_residual <= 1e-2, "two-interval residual {}", rep.completeness_residual);

    for (name, region, set, g) in [("Z", &interval, &z, &grid), ("2Z ∪ 2Z+1/2", &two_intervals(), &two_cosets(), &grid2)] {
        let holed = without_point(set, 520.0, &vec![q(0)]);
        let rep = completeness_residual(region, &holed, g, 500.0).unwrap();
        check!(f, rep.completeness_residual > 0.5, "{name} minus 0: residual {}", rep.completeness_residual);
        check!(f, rep.worst_point[0].abs() < 0.05, "{name} minus 0: worst point {:?}", rep.worst_point);
    }
}

fn example_two_cosets(f: &mut Failures) {
    let mut previous: Option<Vec<(Vec<f64>, f64)>> = None;
    for r in [4.0, 8.0] {
        let nu = autocorrelation_window(&two_cosets(), r, WindowShape::Cube, 10.0).unwrap();
        let atoms: Vec<(Vec<f64>, f64)> = nu.atoms_in_ball(&[0.0], 10.0).iter().map(|a| (a.position.clone(), a.weight)).collect();
        let mut expected_count = 0;
        for k in -20i64..=20 {
            let w = (PI * k as f64 / 4.0).cos().powi(2);
            let found = atoms.iter().find(|(p, _)| p[0] == k as f64 / 2.0);
            match found {
                Some((_, got)) => check!(f, (got - w).abs() <= 1e-12, "window {r}: weight at {} is {got}, want {w}", k as f64 / 2.0),
                None => check!(f, w < 1e-12, "window {r}: missing atom at {}", k as f64 / 2.0),
            }
            if w > 1e-12 {
                expected_count += 1;
            }
        }
        check!(f, atoms.len() == expected_count, "window {r}: {} atoms, want {expected_count}", atoms.len());
        if let Some(prev) = &previous {
            check!(f, prev == &atoms, "windows 4 and 8 differ");
        }
        previous = Some(atoms);
    }
    let gamma = autocorrelation_periodic(&two_cosets(), 4.0, WindowShape::Cube).unwrap();
    let hat = diffraction_periodic(&gamma).unwrap();
    let a = gamma.atoms_in_ball(&[0.0], 10.0);
    let b = hat.atoms_in_ball(&[0.0], 10.0);
    check!(f, a.len() == b.len(), "γ has {} atoms, γ̂ has {}", a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        check!(
            f,
            x.exact == y.exact && (x.weight - y.weight).abs() <= 1e-10,
            "γ̂ ≠ γ at {:?}: {} vs {}",
            x.position,
            x.weight,
            y.weight
        );
    }
}

fn parabolic_mass_on_line(atoms: &[Atom], h: f64) -> f64 {
    atoms.iter().filter(|a| a.position[0] == h && a.position[1].abs() <= 1.0).map(|a| a.weight).sum()
}

fn example_parabolic(f: &mut Failures) {
    let set = PointSet::parabolic_cube(std::f64::consts::SQRT_2).unwrap();
    let nu = autocorrelation_window(&set, 500.0, WindowShape::Cube, 2.5).unwrap();
    let atoms = nu.atoms_in_ball(&[0.0, 0.0], 2.5);
    let line0: Vec<&Atom> = atoms.iter().filter(|a| a.position[0] == 0.0).collect();
    let ks: Vec<i64> = line0.iter().map(|a| to_f64(&a.exact.as_ref().unwrap()[1]) as i64).collect();
    check!(f, ks == vec![-2, -1, 0, 1, 2], "line h=0 atoms at {ks:?}");
    check!(f, line0.iter().all(|a| a.weight == 1.0), "line h=0 weights not exactly 1");
    check!(f, line0.iter().all(|a| a.exact.as_ref().unwrap()[0] == q(0)), "line h=0 atoms are not exact");
    for h in [1.0, 2.0] {
        let m = parabolic_mass_on_line(&atoms, h);
        check!(f, (m - 2.0).abs() <= 0.05, "line h={h}: mass {m} on |y| <= 1");
    }
}

fn weak_tilings(f: &mut Failures) {
    for d in [2, 3] {
        let r = Region::Polytope(cube(d, qf(1, 2)));
        let mu = MeasureSpec::new(vec![Component::LatticeAtoms {
            lattice: Lattice::integer(d),
            offsets: vec![vec![q(0); d]],
            weights: vec![1.0],
            exclude_origin: true,
        }])
        .unwrap();
        let grid = default_grid(&r, if d == 2 { 60 } else { 20 }).unwrap();
        let rep = weak_tiling_verify(&r, &mu, &grid, 1e-12, 1e-3 * r.diameter(), f64::INFINITY);
        check!(f, rep.pass, "cube d={d}: residuals {} / {}", rep.max_residual_inside, rep.max_residual_outside);
        check!(f, rep.support_violations.is_empty(), "cube d={d}: support violations {:?}", rep.support_violations);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..5 {
        let p = random_polytope(&mut rng, 2 + i % 2);
        let d = p.dim();
        let density = 1.0 / to_f64(&p.volume());
        let mu = MeasureSpec::new(vec![Component::Uniform { density }]).unwrap();
        let r = Region::Polytope(p);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let v = eval_convolution(&r, &mu, &x, 100.0).unwrap();
            check!(f, (v - 1.0).abs() <= 1e-12, "uniform measure on polytope {i}: value {v} at {x:?}");
        }
    }

    // μ = γ̂ - δ_0 for the parabolic set: atoms (k, 0), k ≠ 0, plus lines y = k ≠ 0.
    let square = rboxes(&[(qvec(&[0, 0]), qvec(&[1, 1]))]);
    let atoms = (-10i64..=10).filter(|&k| k != 0).map(|k| Atom::exact(qvec(&[k, 0]), 1.0)).collect();
    let mu = MeasureSpec::new(vec![
        Component::Atoms(atoms),
        Component::ProductLebesgue {
            point_axes: vec![1],
            point_set: PointSet::Lattice(Lattice::integer(1)),
            density: 1.0,
            exclude_origin: true,
        },
    ])
    .unwrap();
    let grid = default_grid(&square, 50).unwrap();
    let rep = weak_tiling_verify(&square, &mu, &grid, 1e-6, 1e-3 * square.diameter(), 10.0);
    check!(f, rep.pass, "parabolic μ: {:?}", (rep.max_residual_inside, rep.max_residual_outside, rep.support_violations.len()));
    check!(f, rep.points_outside_window == 0, "parabolic μ: {} points outside the atom window", rep.points_outside_window);

    // The two-interval μ = γ̂ - δ_0 with weights cos²(πk/4) at k/2.
    let mu = MeasureSpec::new(vec![Component::LatticeAtoms {
        lattice: Lattice::scaled_integer(1, q(2)),
        offsets: vec![vec![q(0)], vec![qf(1, 2)], vec![qf(3, 2)]],
        weights: vec![1.0, 0.5, 0.5],
        exclude_origin: true,
    }])
    .unwrap();
    let omega = two_intervals();
    let rep = weak_tiling_verify(&omega, &mu, &default_grid(&omega, 400).unwrap(), 1e-10, 1e-3 * omega.diameter(), f64::INFINITY);
    check!(f, rep.pass, "two intervals: {:?}", (rep.max_residual_inside, rep.max_residual_outside, rep.support_violations.len()));
}

fn holes(f: &mut Failures) {
    match hole_detector(&ring_with_hole()) {
        Some(cert) => {
            check!(f, !cert.witness.is_empty(), "empty witness");
            check!(f, cert.witness_measure == q(5), "hole measure {}", cert.witness_measure);
            check!(f, cert.applicable_samples > 0, "no sample met the hole");
        }
        None => f.push("ring with a hole: no certificate".into()),
    }
    check!(f, hole_detector(&rboxes(&[(qvec(&[0, 0]), qvec(&[3, 2]))])).is_none(), "solid rectangle certified");
    check!(f, bounded_components(&boxes(&[(&[0, 0], &[2, 1]), (&[0, 1], &[1, 3])])).is_empty(), "L shape has a hole");
}

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            ((1.0 - x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Transform of a polygon by Duffy-mapped tensor quadrature on a fan.
fn quadrature_ft(p: &Polytope, t: &[f64]) -> Complex64 {
    let vs = p.float_vertices();
    let c: Vec<f64> = (0..2).map(|i| vs.iter().map(|v| v[i]).sum::<f64>() / vs.len() as f64).collect();
    let mut ring = vs.clone();
    ring.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).partial_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])).unwrap());
    let gl = gauss_legendre(128);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1..ring.len() - 1 {
        let (a, b, cc) = (&ring[0], &ring[k], &ring[k + 1]);
        let det = ((b[0] - a[0]) * (cc[1] - b[1]) - (b[1] - a[1]) * (cc[0] - b[0])).abs();
        for &(s, ws) in &gl {
            for &(w, ww) in &gl {
                let x = a[0] + s * (b[0] - a[0]) + s * w * (cc[0] - b[0]);
                let y = a[1] + s * (b[1] - a[1]) + s * w * (cc[1] - b[1]);
                total += Complex64::from_polar(ws * ww * s * det, -2.0 * PI * (t[0] * x + t[1] * y));
            }
        }
    }
    total
}

fn symmetric_polytope(rng: &mut ChaCha8Rng, d: usize) -> Polytope {
    let p = random_polytope(rng, d);
    let mut pts: Vec<QVec> = p.vertices().to_vec();
    pts.extend(p.vertices().iter().map(|v| v.iter().map(|x| -x).collect::<QVec>()));
    Polytope::from_vertices(pts).unwrap()
}

fn property_suites(f: &mut Failures) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let d = 2 + case % 2;
        let p = random_polytope(&mut rng, d);
        let r = Region::Polytope(p.clone());
        let t: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let minus: Vec<f64> = t.iter().map(|x| -x).collect();
        let (a, b) = (ft_indicator(&r, &t).value, ft_indicator(&r, &minus).value);
        check!(f, (a - b.conj()).norm() <= 1e-12, "case {case}: conjugate symmetry {a} vs {b}");
        let s = Region::Polytope(symmetric_polytope(&mut rng, d));
        let v = ft_indicator(&s, &t);
        check!(f, v.value.im.abs() <= 1e-11, "case {case}: symmetric body has imaginary part {}", v.value.im);
        if d == 2 {
            let u: Vec<f64> = t.iter().map(|x| x / 2.0).collect();
            let (got, oracle) = (ft_indicator(&r, &u).value, quadrature_ft(&p, &u));
            check!(f, (got - oracle).norm() <= 1e-9, "case {case}: quadrature {oracle} vs {got}");
        }
        let zero = ft_indicator(&r, &vec![0.0; d]).value;
        check!(f, (zero.re - to_f64(&p.volume())).abs() <= 1e-11, "case {case}: ft(0) {zero} vs volume");
    }

    for case in 0..20 {
        let d = 1 + case % 3;
        let p = random_polytope(&mut rng, d);
        let diff = p.difference_body();
        let pairs: Vec<QVec> = p.vertices().iter().flat_map(|a| p.vertices().iter().map(move |b| sub(a, b))).collect();
        for v in diff.vertices() {
            check!(f, pairs.contains(v), "case {case}: vertex {:?} of P - P is not a difference", to_f64_vec(v));
        }
        for h in diff.halfspaces() {
            let best = pairs.iter().map(|x| spectile_core::rational::dot(&h.normal, x)).max().unwrap();
            check!(f, best == h.offset, "case {case}: support value differs");
        }
        for _ in 0..10 {
            let t: Vec<f64> = (0..d).map(|_| rng.gen_range(-12.0..12.0)).collect();
            let t = from_f64_vec(&t).unwrap();
            let overlap = p.overlap_volume(&t) > q(0);
            check!(f, overlap == p.in_open_difference_body(&t), "case {case}: Δ and P - P disagree at {:?}", to_f64_vec(&t));
        }
    }

    let suite = [
        cube(2, qf(1, 2)),
        cube(3, qf(1, 2)),
        cube(4, qf(1, 2)),
        hexagon(),
        prism(&HEXAGON),
        octagon_prism(),
        truncated_octahedron(),
    ];
    for (i, p) in suite.iter().enumerate() {
        let fl = p.face_lattice();
        let belts = all_belts(p).unwrap();
        for b in &belts {
            let class = b.subfacet_class();
            for &g in &class {
                let (x, y) = fl.incidence()[g];
                for start in [x, y] {
                    let other = belt_from(p, g, start).unwrap();
                    check!(f, other.canonical_facets() == b.canonical_facets(), "polytope {i}: belt depends on the start");
                    check!(f, other.subfacet_class() == class, "polytope {i}: subfacet class depends on the start");
                }
            }
        }
        let covered: usize = belts.iter().map(|b| b.subfacet_class().len()).sum();
        check!(f, covered == fl.subfacets().len(), "polytope {i}: belts cover {covered} of {} subfacets", fl.subfacets().len());
    }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        run(1, "belt conditions", Some(s(5)), venkov_mcmullen),
        run(2, "lattices and spectra", Some(s(10)), lattice_and_spectrum),
        run(3, "completeness residual", Some(s(30)), completeness),
        run(4, "two-coset autocorrelation", Some(s(1)), example_two_cosets),
        run(5, "parabolic autocorrelation", Some(s(60)), example_parabolic),
        run(6, "weak tilings", Some(s(30)), weak_tilings),
        run(7, "hole detector", Some(s(5)), holes),
        run(8, "property suites", None, property_suites),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
