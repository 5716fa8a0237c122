//! `spectile`: tiling, spectrum and diffraction checks on JSON inputs.
//!
//! Exit codes: 0 when the checked property holds, 1 when it fails, 2 for
//! malformed input or usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spectile_core::autocorr::autocorrelation_periodic;
use spectile_core::belts::{LATTICE_CHECK_DUALS, LATTICE_CHECK_TOL};
use spectile_core::json::{atom_position_json, measure_json, parse_measure, parse_point_set, parse_polytope, parse_region};
use spectile_core::tiling::{default_grid, DEFAULT_MARGIN_FRACTION};
use spectile_core::{
    autocorr_property_check, autocorrelation_window, completeness_residual, construct_tiling_lattice,
    diffraction_periodic, ft_indicator, hole_detector, lattice_tiling_check, orthogonality_check, vm_check,
    weak_tiling_verify, Atom, Component, Error, GridSpec, MeasureSpec, Region, Verdict, WindowShape,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "spectile", version, about = "Tiling, spectrum and diffraction checks for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(clap::Args, Debug, Clone)]
struct Options {
    /// Residual tolerance (default depends on the command).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Threshold below which |ft| counts as zero.
    #[arg(long, global = true, default_value_t = 1e-8)]
    zero_tol: f64,
    /// Grid points per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Window half-width: grid extent, or averaging radius for `autocorr`.
    #[arg(long, global = true)]
    window: Option<f64>,
    /// Excluded distance around discontinuities (default 1e-3 * diameter).
    #[arg(long, global = true)]
    margin: Option<f64>,
    /// Truncation radius of the completeness sums.
    #[arg(long, global = true, default_value_t = 500.0)]
    truncation: f64,
    /// Reporting radius for atoms and differences.
    #[arg(long, global = true, default_value_t = 10.0)]
    radius: f64,
    #[arg(long, global = true, value_enum, default_value_t = Shape::Cube)]
    shape: Shape,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Shape {
    Cube,
    Ball,
}

impl From<Shape> for WindowShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Cube => WindowShape::Cube,
            Shape::Ball => WindowShape::Ball,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Belt conditions of a polytope.
    Analyze { polytope: PathBuf },
    /// Construct and verify a tiling lattice.
    TileLattice { polytope: PathBuf },
    /// Orthogonality and completeness of a spectrum candidate.
    SpectrumCheck { region: PathBuf, point_set: PathBuf },
    /// Check `1_R * μ = 1_{R^c}` on a grid.
    WeakTileVerify { region: PathBuf, measure: PathBuf },
    /// Window-averaged autocorrelation, with property checks given a region.
    Autocorr {
        point_set: PathBuf,
        #[arg(long)]
        region: Option<PathBuf>,
    },
    /// Fourier transform of a periodic atomic measure.
    Diffraction { measure: PathBuf },
    /// Look for a bounded hole certifying non-spectrality.
    Holes { region: PathBuf },
    /// Evaluate the transform of a region indicator.
    Ft {
        region: PathBuf,
        /// Frequency as comma-separated coordinates; repeatable.
        #[arg(long = "t", required = true, allow_hyphen_values = true)]
        t: Vec<String>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

type CliResult<T> = Result<T, CliError>;

struct Output {
    body: String,
    pass: bool,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn input_error(path: &Path, e: Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> spectile_core::Result<T>) -> CliResult<T> {
    parse(&read(path)?).map_err(|e| input_error(path, e))
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Input(format!("--{name} must be positive, got {v}")))
    }
}

fn envelope(command: &str, parameters: Value, report: Value) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "report": report,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn atoms_csv(atoms: &[Atom]) -> String {
    let d = atoms.first().map(|a| a.position.len()).unwrap_or(0);
    let mut s: String = (0..d).map(|i| format!("x{i},")).collect();
    s.push_str("weight\n");
    for a in atoms {
        for x in &a.position {
            s.push_str(&format!("{x:?},"));
        }
        s.push_str(&format!("{:?}\n", a.weight));
    }
    s
}

fn atoms_json(atoms: &[Atom]) -> Value {
    Value::Array(atoms.iter().map(|a| json!({"position": atom_position_json(a), "weight": a.weight})).collect())
}

fn require_json(opts: &Options, command: &str) -> CliResult<()> {
    if opts.format == Format::Csv {
        return Err(CliError::Input(format!("--format csv is not available for {command}")));
    }
    Ok(())
}

fn grid_points(opts: &Options, d: usize, default_1d: usize, default_nd: usize) -> CliResult<usize> {
    let n = opts.grid.unwrap_or(if d == 1 { default_1d } else { default_nd });
    if n < 2 {
        return Err(CliError::Input(format!("--grid must be at least 2, got {n}")));
    }
    Ok(n)
}

fn analyze(opts: &Options, path: &Path) -> CliResult<Output> {
    require_json(opts, "analyze")?;
    let p = load(path, parse_polytope)?;
    let rep = vm_check(&p);
    let pass = rep.verdict == Verdict::Tiles;
    Ok(Output { body: envelope("analyze", json!({}), to_value(&rep)), pass })
}

fn tile_lattice(opts: &Options, path: &Path) -> CliResult<Output> {
    require_json(opts, "tile-lattice")?;
    let p = load(path, parse_polytope)?;
    let vm = vm_check(&p);
    let tol = positive("tol", opts.tol.unwrap_or(LATTICE_CHECK_TOL))?;
    let params = json!({"tol": tol, "dual_vectors": LATTICE_CHECK_DUALS});
    let (report, pass) = match construct_tiling_lattice(&p, &vm) {
        Ok(l) => {
            let check = lattice_tiling_check(&Region::Polytope(p), &l, LATTICE_CHECK_DUALS, tol);
            let pass = check.pass;
            (json!({"verdict": vm.verdict, "basis": l.to_strings(), "check": to_value(&check)}), pass)
        }
        Err(e @ (Error::PreconditionFailed(_) | Error::ConstructionFailed(_))) => {
            (json!({"verdict": vm.verdict, "failed_conditions": vm.failed_conditions, "error": e.to_string()}), false)
        }
        Err(e) => return Err(input_error(path, e)),
    };
    Ok(Output { body: envelope("tile-lattice", params, report), pass })
}

fn spectrum_check(opts: &Options, region_path: &Path, set_path: &Path) -> CliResult<Output> {
    require_json(opts, "spectrum-check")?;
    let region = load(region_path, parse_region)?;
    let set = load(set_path, parse_point_set)?;
    let d = region.dim();
    if set.dim() != d {
        return Err(CliError::Input(format!("{}: dimension {} differs from the region's {d}", set_path.display(), set.dim())));
    }
    let tol = positive("tol", opts.tol.unwrap_or(1e-2))?;
    let radius = positive("radius", opts.radius)?;
    let truncation = positive("truncation", opts.truncation)?;
    let n = grid_points(opts, d, 101, 11)?;
    let grid = match opts.window {
        Some(w) => GridSpec::cube(d, positive("window", w)?, n),
        None => {
            let (lo, hi) = region.bounding_box();
            GridSpec::new(lo, hi, n)
        }
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let orth = orthogonality_check(&region, &set, radius, opts.zero_tol).map_err(|e| CliError::Input(e.to_string()))?;
    let mut rep = completeness_residual(&region, &set, &grid, truncation).map_err(|e| CliError::Input(e.to_string()))?;
    let pass = orth.pass && rep.completeness_residual <= tol;
    rep.orthogonality = Some(orth);
    let params = json!({"tol": tol, "zero_tol": opts.zero_tol, "radius": radius, "truncation": truncation, "grid": n});
    Ok(Output { body: envelope("spectrum-check", params, json!({"pass": pass, "spectrum": to_value(&rep)})), pass })
}

/// Sup-norm extent of finite atom lists, which describe the measure only there.
fn atom_list_window(mu: &MeasureSpec) -> f64 {
    let mut w: Option<f64> = None;
    for c in &mu.components {
        if let Component::Atoms(atoms) = c {
            let ext = atoms.iter().flat_map(|a| a.position.iter().map(|x| x.abs())).fold(0.0, f64::max);
            w = Some(w.map_or(ext, |v: f64| v.max(ext)));
        }
    }
    w.unwrap_or(f64::INFINITY)
}

fn weak_tile(opts: &Options, region_path: &Path, measure_path: &Path) -> CliResult<Output> {
    require_json(opts, "weak-tile-verify")?;
    let region = load(region_path, parse_region)?;
    let mu = load(measure_path, parse_measure)?;
    let d = region.dim();
    if mu.dim().is_some_and(|m| m != d) {
        return Err(CliError::Input(format!("{}: measure dimension differs from the region's {d}", measure_path.display())));
    }
    let tol = positive("tol", opts.tol.unwrap_or(1e-9))?;
    let margin = positive("margin", opts.margin.unwrap_or(DEFAULT_MARGIN_FRACTION * region.diameter()))?;
    let n = grid_points(opts, d, 400, 50)?;
    let grid = match opts.window {
        Some(w) => {
            let w = positive("window", w)?;
            let c = region.center_f64();
            GridSpec::new(c.iter().map(|x| x - w).collect(), c.iter().map(|x| x + w).collect(), n)
        }
        None => default_grid(&region, n),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    let atom_window = atom_list_window(&mu);
    let rep = weak_tiling_verify(&region, &mu, &grid, tol, margin, atom_window);
    let params = json!({"tol": tol, "margin": margin, "grid": n, "atom_window": if atom_window.is_finite() { json!(atom_window) } else { Value::Null }});
    Ok(Output { body: envelope("weak-tile-verify", params, to_value(&rep)), pass: rep.pass })
}

fn autocorr(opts: &Options, set_path: &Path, region_path: Option<&Path>) -> CliResult<Output> {
    let set = load(set_path, parse_point_set)?;
    let window = positive("window", opts.window.unwrap_or(8.0))?;
    let radius = positive("radius", opts.radius)?;
    let shape: WindowShape = opts.shape.into();
    let nu = autocorrelation_window(&set, window, shape, radius).map_err(|e| input_error(set_path, e))?;
    let atoms = nu.atoms_in_ball(&vec![0.0; set.dim()], radius);
    let tol = positive("tol", opts.tol.unwrap_or(1e-9))?;
    let mut pass = true;
    let mut property = Value::Null;
    if let Some(rp) = region_path {
        let region = load(rp, parse_region)?;
        if region.dim() != set.dim() {
            return Err(CliError::Input(format!("{}: dimension differs from the point set", rp.display())));
        }
        // The periodic form lets the diffraction check run.
        let gamma = match set.cosets() {
            Some(_) => autocorrelation_periodic(&set, window, shape).map_err(|e| input_error(set_path, e))?,
            None => nu.clone(),
        };
        let rep = autocorr_property_check(&gamma, &region, tol, opts.zero_tol, radius);
        pass = rep.pass;
        property = to_value(&rep);
    }
    if opts.format == Format::Csv {
        return Ok(Output { body: atoms_csv(&atoms), pass });
    }
    let params = json!({"window": window, "shape": opts.shape, "radius": radius, "tol": tol, "zero_tol": opts.zero_tol});
    let mut report = json!({"atoms": atoms_json(&atoms)});
    if region_path.is_some() {
        report["properties"] = property;
    }
    Ok(Output { body: envelope("autocorr", params, report), pass })
}

fn diffraction(opts: &Options, path: &Path) -> CliResult<Output> {
    let gamma = load(path, parse_measure)?;
    let radius = positive("radius", opts.radius)?;
    let params = json!({"radius": radius});
    match diffraction_periodic(&gamma) {
        Ok(hat) => {
            let d = gamma.dim().unwrap_or(1);
            let atoms = hat.atoms_in_ball(&vec![0.0; d], radius);
            if opts.format == Format::Csv {
                return Ok(Output { body: atoms_csv(&atoms), pass: true });
            }
            let report = json!({"pass": true, "measure": measure_json(&hat), "atoms": atoms_json(&atoms)});
            Ok(Output { body: envelope("diffraction", params, report), pass: true })
        }
        Err(Error::NotPositiveDefinite { position, value }) => {
            require_json(opts, "a failed diffraction")?;
            let report = json!({"pass": false, "error": "not positive definite", "position": position, "value": value});
            Ok(Output { body: envelope("diffraction", params, report), pass: false })
        }
        Err(e) => Err(input_error(path, e)),
    }
}

fn holes(opts: &Options, path: &Path) -> CliResult<Output> {
    require_json(opts, "holes")?;
    let region = load(path, parse_region)?;
    if region.as_boxes().is_none() {
        return Err(CliError::Input(format!("{}: holes needs a box union (\"boxes\")", path.display())));
    }
    let cert = hole_detector(&region);
    let pass = cert.is_some();
    let report = json!({"certificate_found": pass, "certificate": cert.map(|c| to_value(&c))});
    Ok(Output { body: envelope("holes", json!({}), report), pass })
}

fn parse_frequency(s: &str, d: usize) -> CliResult<Vec<f64>> {
    let t: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Input(format!("--t: not a number in {s:?}"))))
        .collect::<CliResult<_>>()?;
    if t.len() != d || t.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("--t: expected {d} finite coordinates in {s:?}")));
    }
    Ok(t)
}

fn ft(opts: &Options, path: &Path, ts: &[String]) -> CliResult<Output> {
    let region = load(path, parse_region)?;
    let d = region.dim();
    let freqs: Vec<Vec<f64>> = ts.iter().map(|s| parse_frequency(s, d)).collect::<CliResult<_>>()?;
    let values: Vec<_> = freqs.iter().map(|t| (t, ft_indicator(&region, t))).collect();
    let body = match opts.format {
        Format::Csv => {
            let mut s: String = (0..d).map(|i| format!("t{i},")).collect();
            s.push_str("re,im,bound\n");
            for (t, v) in &values {
                for x in t.iter() {
                    s.push_str(&format!("{x:?},"));
                }
                s.push_str(&format!("{:?},{:?},{:?}\n", v.value.re, v.value.im, v.abs_error_bound));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = values
                .iter()
                .map(|(t, v)| json!({"t": t, "re": v.value.re, "im": v.value.im, "bound": v.abs_error_bound}))
                .collect();
            envelope("ft", json!({}), json!({"values": rows}))
        }
    };
    Ok(Output { body, pass: true })
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    let o = &cli.opts;
    match &cli.command {
        Command::Analyze { polytope } => analyze(o, polytope),
        Command::TileLattice { polytope } => tile_lattice(o, polytope),
        Command::SpectrumCheck { region, point_set } => spectrum_check(o, region, point_set),
        Command::WeakTileVerify { region, measure } => weak_tile(o, region, measure),
        Command::Autocorr { point_set, region } => autocorr(o, point_set, region.as_deref()),
        Command::Diffraction { measure } => diffraction(o, measure),
        Command::Holes { region } => holes(o, region),
        Command::Ft { region, t } => ft(o, region, t),
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, body).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|o| emit(&cli.opts.out, &o.body).map(|_| o.pass));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
