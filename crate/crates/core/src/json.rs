//! JSON input formats and serialization helpers. Rationals are read from
//! integers, finite decimals or `"p/q"` strings and written as strings.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{Halfspace, Polytope, PolytopeSpec};
use crate::lattice::Lattice;
use crate::measure::{Atom, Component, MeasureSpec};
use crate::pointset::PointSet;
use crate::rational::{format_rational, parse_rational, to_f64, QVec, Q};
use crate::region::{AxisBox, BoxUnion, Region};

pub fn ser_q<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn qvec_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

pub fn ser_qvec<S: Serializer>(v: &QVec, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&format_rational(x))?;
    }
    seq.end()
}

pub fn ser_qvecs<S: Serializer>(vs: &[QVec], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(vs.len()))?;
    for v in vs {
        seq.serialize_element(&qvec_strings(v))?;
    }
    seq.end()
}

pub fn ser_opt_qvec<S: Serializer>(v: &Option<QVec>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_qvec(v, s),
        None => s.serialize_none(),
    }
}

/// A rational read from a JSON number or string.
#[derive(Clone, Debug)]
struct Rat(Q);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(Rat(Q::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat(Q::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
                // The shortest decimal that round-trips is what the user wrote.
                parse_rational(&v.to_string()).map(Rat).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
                parse_rational(v).map(Rat).map_err(|_| E::custom(format!("not a rational number: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn rats(v: Vec<Rat>) -> QVec {
    v.into_iter().map(|r| r.0).collect()
}

fn rat_rows(v: Vec<Vec<Rat>>) -> Vec<QVec> {
    v.into_iter().map(rats).collect()
}

/// `"sqrt2"` or a number.
#[derive(Clone, Copy, Debug)]
struct Alpha(f64);

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Alpha;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"sqrt2\" or a number")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Alpha, E> {
                Ok(Alpha(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Alpha, E> {
                Ok(Alpha(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Alpha, E> {
                Ok(Alpha(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Alpha, E> {
                if v == "sqrt2" {
                    return Ok(Alpha(std::f64::consts::SQRT_2));
                }
                parse_rational(v).map(|q| Alpha(to_f64(&q))).map_err(|_| E::custom(format!("unknown alpha {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Deserialize)]
struct RawHalfspace {
    normal: Vec<Rat>,
    offset: Rat,
}

#[derive(Deserialize)]
struct RawBox {
    min: Vec<Rat>,
    max: Vec<Rat>,
}

#[derive(Deserialize)]
struct RawRegion {
    dim: Option<usize>,
    vertices: Option<Vec<Vec<Rat>>>,
    halfspaces: Option<Vec<RawHalfspace>>,
    boxes: Option<Vec<RawBox>>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RawPointSet {
    Lattice { basis: Vec<Vec<Rat>> },
    Periodic { basis: Vec<Vec<Rat>>, offsets: Vec<Vec<Rat>> },
    Explicit { points: Vec<Vec<Rat>> },
    ParabolicCube { alpha: Alpha },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RawComponent {
    Atoms {
        points: Vec<Vec<Rat>>,
        weights: Vec<Rat>,
    },
    LatticeAtoms {
        basis: Vec<Vec<Rat>>,
        offsets: Vec<Vec<Rat>>,
        weights: Vec<Rat>,
        #[serde(default)]
        exclude_origin: bool,
    },
    ProductLebesgue {
        point_axes: Vec<usize>,
        point_set: RawPointSet,
        density: Rat,
        #[serde(default)]
        exclude_origin: bool,
    },
    Uniform {
        density: Rat,
    },
}

#[derive(Deserialize)]
struct RawMeasure {
    components: Vec<RawComponent>,
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Json { .. } => e,
        Error::MalformedInput(m) => Error::Json { path: path.into(), message: m },
        other => Error::Json { path: path.into(), message: other.to_string() },
    }
}

fn decode<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Json { path: if path.is_empty() { ".".into() } else { path }, message: e.into_inner().to_string() }
    })
}

fn check_dims(rows: &[QVec], d: Option<usize>, field: &str) -> Result<()> {
    let want = d.or_else(|| rows.first().map(Vec::len));
    for (i, r) in rows.iter().enumerate() {
        if Some(r.len()) != want {
            return Err(Error::Json { path: format!("{field}[{i}]"), message: "wrong number of coordinates".into() });
        }
    }
    Ok(())
}

fn region_from_raw(raw: RawRegion) -> Result<Region> {
    match (raw.vertices, raw.halfspaces, raw.boxes) {
        (Some(v), None, None) => {
            let v = rat_rows(v);
            check_dims(&v, raw.dim, "vertices")?;
            Ok(Region::Polytope(Polytope::build(PolytopeSpec::Vertices(v)).map_err(|e| at("vertices", e))?))
        }
        (None, Some(h), None) => {
            let hs: Vec<Halfspace> = h.into_iter().map(|h| Halfspace::new(rats(h.normal), h.offset.0)).collect();
            let normals: Vec<QVec> = hs.iter().map(|h| h.normal.clone()).collect();
            check_dims(&normals, raw.dim, "halfspaces")?;
            Ok(Region::Polytope(Polytope::build(PolytopeSpec::Halfspaces(hs)).map_err(|e| at("halfspaces", e))?))
        }
        (None, None, Some(b)) => {
            let mut boxes = Vec::with_capacity(b.len());
            for (i, b) in b.into_iter().enumerate() {
                let (min, max) = (rats(b.min), rats(b.max));
                if raw.dim.is_some_and(|d| d != min.len()) {
                    return Err(Error::Json { path: format!("boxes[{i}]"), message: "wrong number of coordinates".into() });
                }
                boxes.push(AxisBox::new(min, max).map_err(|e| at(&format!("boxes[{i}]"), e))?);
            }
            Ok(Region::Boxes(BoxUnion::new(boxes).map_err(|e| at("boxes", e))?))
        }
        _ => Err(Error::Json {
            path: ".".into(),
            message: "expected exactly one of \"vertices\", \"halfspaces\" or \"boxes\"".into(),
        }),
    }
}

pub fn parse_region(text: &str) -> Result<Region> {
    region_from_raw(decode(text)?)
}

pub fn parse_polytope(text: &str) -> Result<Polytope> {
    match parse_region(text)? {
        Region::Polytope(p) => Ok(p),
        Region::Boxes(_) => Err(Error::Json { path: "boxes".into(), message: "expected a polytope".into() }),
    }
}

fn lattice_from_rows(basis: Vec<Vec<Rat>>, path: &str) -> Result<Lattice> {
    let basis = rat_rows(basis);
    check_dims(&basis, None, path)?;
    Lattice::new(basis).map_err(|e| at(path, e))
}

fn point_set_from_raw(raw: RawPointSet, prefix: &str) -> Result<PointSet> {
    let p = |f: &str| if prefix.is_empty() { f.to_string() } else { format!("{prefix}.{f}") };
    match raw {
        RawPointSet::Lattice { basis } => Ok(PointSet::Lattice(lattice_from_rows(basis, &p("basis"))?)),
        RawPointSet::Periodic { basis, offsets } => {
            let l = lattice_from_rows(basis, &p("basis"))?;
            let offsets = rat_rows(offsets);
            check_dims(&offsets, Some(l.dim()), &p("offsets"))?;
            PointSet::periodic(l, offsets).map_err(|e| at(&p("offsets"), e))
        }
        RawPointSet::Explicit { points } => {
            let points = rat_rows(points);
            check_dims(&points, None, &p("points"))?;
            PointSet::explicit(points).map_err(|e| at(&p("points"), e))
        }
        RawPointSet::ParabolicCube { alpha } => PointSet::parabolic_cube(alpha.0).map_err(|e| at(&p("alpha"), e)),
    }
}

pub fn parse_point_set(text: &str) -> Result<PointSet> {
    point_set_from_raw(decode(text)?, "")
}

fn component_from_raw(raw: RawComponent, i: usize) -> Result<Component> {
    let p = |f: &str| format!("components[{i}].{f}");
    let comp = match raw {
        RawComponent::Atoms { points, weights } => {
            if points.len() != weights.len() {
                return Err(Error::Json { path: p("weights"), message: "one weight per point is required".into() });
            }
            let points = rat_rows(points);
            check_dims(&points, None, &p("points"))?;
            Component::Atoms(points.into_iter().zip(weights).map(|(x, w)| Atom::exact(x, to_f64(&w.0))).collect())
        }
        RawComponent::LatticeAtoms { basis, offsets, weights, exclude_origin } => {
            let lattice = lattice_from_rows(basis, &p("basis"))?;
            let offsets = rat_rows(offsets);
            check_dims(&offsets, Some(lattice.dim()), &p("offsets"))?;
            Component::LatticeAtoms {
                lattice,
                offsets,
                weights: weights.iter().map(|w| to_f64(&w.0)).collect(),
                exclude_origin,
            }
        }
        RawComponent::ProductLebesgue { point_axes, point_set, density, exclude_origin } => Component::ProductLebesgue {
            point_axes,
            point_set: point_set_from_raw(point_set, &p("point_set"))?,
            density: to_f64(&density.0),
            exclude_origin,
        },
        RawComponent::Uniform { density } => Component::Uniform { density: to_f64(&density.0) },
    };
    MeasureSpec::new(vec![comp.clone()]).map_err(|e| at(&format!("components[{i}]"), e))?;
    Ok(comp)
}

pub fn parse_measure(text: &str) -> Result<MeasureSpec> {
    let raw: RawMeasure = decode(text)?;
    let comps = raw.components.into_iter().enumerate().map(|(i, c)| component_from_raw(c, i)).collect::<Result<_>>()?;
    MeasureSpec::new(comps).map_err(|e| at("components", e))
}

fn f64_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn atom_position_json(a: &Atom) -> Value {
    match &a.exact {
        Some(e) => json!(qvec_strings(e)),
        None => Value::Array(a.position.iter().map(|&x| f64_or_null(x)).collect()),
    }
}

pub fn point_set_json(s: &PointSet) -> Value {
    match s {
        PointSet::Explicit(p) => json!({"type": "explicit", "points": p.iter().map(|x| qvec_strings(x)).collect::<Vec<_>>()}),
        PointSet::Lattice(l) => json!({"type": "lattice", "basis": l.to_strings()}),
        PointSet::Periodic { lattice, offsets } => json!({
            "type": "periodic",
            "basis": lattice.to_strings(),
            "offsets": offsets.iter().map(|x| qvec_strings(x)).collect::<Vec<_>>(),
        }),
        PointSet::ParabolicCube { alpha } => json!({"type": "parabolic_cube", "alpha": f64_or_null(*alpha)}),
    }
}

/// JSON form of a measure, readable by [`parse_measure`].
pub fn measure_json(m: &MeasureSpec) -> Value {
    let comps: Vec<Value> = m
        .components
        .iter()
        .map(|c| match c {
            Component::Atoms(atoms) => json!({
                "type": "atoms",
                "points": atoms.iter().map(atom_position_json).collect::<Vec<_>>(),
                "weights": atoms.iter().map(|a| f64_or_null(a.weight)).collect::<Vec<_>>(),
            }),
            Component::LatticeAtoms { lattice, offsets, weights, exclude_origin } => json!({
                "type": "lattice_atoms",
                "basis": lattice.to_strings(),
                "offsets": offsets.iter().map(|x| qvec_strings(x)).collect::<Vec<_>>(),
                "weights": weights.iter().map(|&w| f64_or_null(w)).collect::<Vec<_>>(),
                "exclude_origin": exclude_origin,
            }),
            Component::ProductLebesgue { point_axes, point_set, density, exclude_origin } => json!({
                "type": "product_lebesgue",
                "point_axes": point_axes,
                "point_set": point_set_json(point_set),
                "density": f64_or_null(*density),
                "exclude_origin": exclude_origin,
            }),
            Component::Uniform { density } => json!({"type": "uniform", "density": f64_or_null(*density)}),
        })
        .collect();
    json!({ "components": comps })
}
