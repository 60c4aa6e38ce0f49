//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical failure,
//! 3 I/O or argument error. Results go to standard output as one JSON
//! document (or a CSV table), diagnostics to standard error.

pub mod catalog;
pub mod file;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::algebra::LieAlgebra;
use crate::composition::{compose, compose_ode, compose_via_rep, inverse_point, MatrixRepresentation};
use crate::config::SolverConfig;
use crate::coords::{one_param_point, to_first, to_second};
use crate::error::{LieError, Result};
use crate::frames::{adjoint_at, frame_second, omega_first, Chart, GroupPoint};
use crate::homogeneous::{action, adapted_basis, generators, HomogeneousModel, Subalgebra};
use file::AlgebraFile;
use output::{Document, Field};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Environment variable overriding the residual tolerance.
pub const TOL_ENV: &str = "LIEFORGE_TOL";

#[derive(Parser, Debug)]
#[command(name = "lieforge", version, about = "Local Lie group computations from structure constants")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChartArg {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Adjoint,
    Ode,
    Rep,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check antisymmetry and the Jacobi identity.
    Validate { alg: String },
    /// Invariant forms and fields at a point.
    Frame {
        alg: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, value_enum, default_value_t = ChartArg::Second)]
        chart: ChartArg,
    },
    /// Composition function Φ(x, y).
    Compose {
        alg: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Adjoint)]
        method: MethodArg,
        /// JSON file `{"images": [matrix, ...]}` with row-major matrices.
        #[arg(long)]
        rep: Option<String>,
    },
    /// Coordinates of the inverse element.
    Inverse {
        alg: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Transition between first and second canonical coordinates.
    Coords {
        alg: String,
        #[arg(long, value_enum)]
        to: ChartArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Point exp(t·y) of a one-parameter subgroup, in the second chart.
    Subgroup {
        alg: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Generators X_i(q) of the action on the coset space.
    Generators {
        alg: String,
        /// Basis indices `4,5` or vectors `v:0,0,1,2;...`.
        #[arg(long, allow_hyphen_values = true)]
        subalgebra: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Action Ψ(q, z) on the coset space and the subgroup factor.
    Action {
        alg: String,
        #[arg(long, allow_hyphen_values = true)]
        subalgebra: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Second-chart coordinates in the adapted basis.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Built-in algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
}

/// An algebra as loaded from a file or catalog key.
pub struct Loaded {
    pub name: String,
    /// Center-adapted; `provenance()` is set when the basis was permuted
    /// or changed to move the center to the top.
    pub algebra: LieAlgebra,
}

/// Loads `source` as a file path if one exists, otherwise as a catalog key.
pub fn load_algebra(source: &str) -> Result<Loaded> {
    let raw = load_raw(source)?;
    Ok(Loaded { name: raw.0, algebra: raw.1.center_adapted()? })
}

fn load_raw(source: &str) -> Result<(String, LieAlgebra)> {
    let path = Path::new(source);
    if path.is_file() {
        let f = AlgebraFile::read(path)?;
        let alg = f.to_algebra()?;
        Ok((f.name, alg))
    } else {
        Ok((source.to_string(), catalog::build(source)?))
    }
}

/// Parses `a,b,c` into a vector.
pub fn parse_point(text: &str) -> Result<DVector<f64>> {
    let vals: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(DVector::from_vec(v)),
        _ => Err(LieError::InvalidInput(format!("'{text}' is not a comma-separated list of finite numbers"))),
    }
}

/// `4,5` (1-based basis indices) or `v:0,0,1,2;1,0,0,0` (explicit vectors).
pub fn parse_subalgebra(alg: &LieAlgebra, spec: &str) -> Result<Subalgebra> {
    let spec = spec.trim();
    if spec.is_empty() || spec == "{}" {
        return Subalgebra::new(alg, Vec::new());
    }
    if let Some(rows) = spec.strip_prefix("v:") {
        let vecs = rows.split(';').map(parse_point).collect::<Result<Vec<_>>>()?;
        return Subalgebra::new(alg, vecs);
    }
    let idx = spec
        .split(',')
        .map(|s| s.trim().parse::<usize>().ok().filter(|&i| i >= 1).map(|i| i - 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| LieError::InvalidInput(format!("'{spec}' is neither basis indices nor 'v:' vectors")))?;
    Subalgebra::from_indices(alg, &idx)
}

fn config_from_env() -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Ok(v) = std::env::var(TOL_ENV) {
        cfg.residual_tol = v
            .trim()
            .parse()
            .map_err(|_| LieError::InvalidInput(format!("{TOL_ENV}='{v}' is not a number")))?;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn exit_code(e: &LieError) -> i32 {
    match e {
        LieError::Validation(_) | LieError::InvalidSubalgebra(_) => EXIT_VALIDATION,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn point_in(alg: &LieAlgebra, chart: Chart, text: &str) -> Result<GroupPoint> {
    let p = GroupPoint::new(chart, parse_point(text)?);
    if p.dim() != alg.dim() {
        return Err(LieError::InvalidInput(format!("point has {} coordinates, algebra has dimension {}", p.dim(), alg.dim())));
    }
    Ok(p)
}

fn describe(doc: &mut Document, loaded: &Loaded) {
    doc.push("algebra", Field::Text(loaded.name.clone()));
    doc.push("labels", Field::Texts(loaded.algebra.labels().to_vec()));
    if let Some(p) = loaded.algebra.provenance() {
        doc.push("basis", p.into());
    }
}

#[derive(Deserialize)]
struct RepFile {
    images: Vec<Vec<Vec<f64>>>,
}

fn load_rep(path: &str, loaded: &Loaded) -> Result<MatrixRepresentation> {
    let text = std::fs::read_to_string(path).map_err(|e| LieError::InvalidInput(format!("cannot read {path}: {e}")))?;
    let file: RepFile = serde_json::from_str(&text).map_err(|e| LieError::InvalidInput(format!("malformed representation file: {e}")))?;
    let mut images = Vec::new();
    for rows in &file.images {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(LieError::InvalidInput("representation images must be square".into()));
        }
        images.push(DMatrix::from_row_iterator(m, m, rows.iter().flatten().copied()));
    }
    // Images are given for the file basis; carry them to the adapted one.
    if let Some(p) = loaded.algebra.provenance() {
        if images.len() == p.nrows() && images.iter().all(|t| t.shape() == images[0].shape()) {
            let shape = images[0].shape();
            images = (0..p.ncols())
                .map(|i| {
                    let mut t = DMatrix::zeros(shape.0, shape.1);
                    for (j, img) in images.iter().enumerate() {
                        t += img * p[(j, i)];
                    }
                    t
                })
                .collect();
        }
    }
    MatrixRepresentation::new(&loaded.algebra, images)
}

fn model_fields(doc: &mut Document, model: &HomogeneousModel) {
    doc.push("m", Field::Int(model.m as i64));
    doc.push("coset_indices", Field::Ints(model.coset_indices.iter().map(|&i| i as i64 + 1).collect()));
    doc.push("subgroup_indices", Field::Ints(model.subgroup_indices.iter().map(|&i| i as i64 + 1).collect()));
    doc.push("adapted_basis", (&model.transform).into());
}

fn execute(cmd: Command) -> Result<(Document, i32)> {
    let cfg = config_from_env()?;
    let mut doc = Document::new();
    match cmd {
        Command::Validate { alg } => {
            let (name, constants) = if Path::new(&alg).is_file() {
                let f = AlgebraFile::read(Path::new(&alg))?;
                (f.name.clone(), f.constants()?)
            } else {
                (alg.clone(), catalog::build(&alg)?.constants().clone())
            };
            let report = constants.validate();
            doc.push("algebra", Field::Text(name));
            doc.push("dim", Field::Int(constants.dim() as i64));
            doc.push("valid", Field::Flag(report.is_ok()));
            doc.push("violation_count", Field::Int(report.total as i64));
            let table = report
                .violations
                .iter()
                .map(|v| {
                    Document::new()
                        .with("kind", Field::Text(format!("{:?}", v.kind).to_lowercase()))
                        .with("indices", Field::Ints(v.indices.iter().map(|&i| i as i64).collect()))
                        .with("component", Field::Int(v.component.map_or(0, |c| c as i64)))
                        .with("residual", Field::Real(v.residual))
                })
                .collect();
            doc.push("violations", Field::Table(table));
            let code = if report.is_ok() { EXIT_OK } else { EXIT_VALIDATION };
            if !report.is_ok() {
                eprintln!("{report}");
            }
            return Ok((doc, code));
        }
        Command::Frame { alg, point, chart } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            describe(&mut doc, &loaded);
            match chart {
                ChartArg::Second => {
                    let p = point_in(a, Chart::Second, &point)?;
                    let f = frame_second(a, &p)?;
                    doc.push("chart", Field::Text("second".into()));
                    doc.push("point", (&p.coords).into());
                    doc.push("omega", (&f.omega).into());
                    doc.push("xi", (&f.xi).into());
                    doc.push("sigma", (&f.sigma).into());
                    doc.push("eta", (&f.eta).into());
                    doc.push("adjoint", (&f.ad_point).into());
                }
                ChartArg::First => {
                    let p = point_in(a, Chart::First, &point)?;
                    doc.push("chart", Field::Text("first".into()));
                    doc.push("point", (&p.coords).into());
                    doc.push("omega", (&omega_first(a, &p)?).into());
                }
            }
        }
        Command::Compose { alg, x, y, method, rep } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let (px, py) = (point_in(a, Chart::Second, &x)?, point_in(a, Chart::Second, &y)?);
            let r = match (method, rep) {
                (MethodArg::Adjoint, None) => compose(a, &px, &py, &cfg)?,
                (MethodArg::Ode, None) => compose_ode(a, &px, &py, &cfg)?,
                (MethodArg::Rep, Some(path)) => compose_via_rep(&load_rep(&path, &loaded)?, a, &px, &py, &cfg)?,
                (MethodArg::Rep, None) => return Err(LieError::InvalidInput("--method rep needs --rep FILE".into())),
                (_, Some(_)) => return Err(LieError::InvalidInput("--rep is only used with --method rep".into())),
            };
            describe(&mut doc, &loaded);
            doc.push("x", (&px.coords).into());
            doc.push("y", (&py.coords).into());
            doc.push("z", (&r.z.coords).into());
            doc.push("method", Field::Text(r.method.to_string()));
            doc.push("residual", Field::Real(r.residual));
        }
        Command::Inverse { alg, point } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let p = point_in(a, Chart::Second, &point)?;
            let k = inverse_point(a, &p, &cfg)?;
            let residual = compose(a, &p, &k, &cfg)?.z.coords.norm();
            describe(&mut doc, &loaded);
            doc.push("point", (&p.coords).into());
            doc.push("inverse", (&k.coords).into());
            doc.push("method", Field::Text("newton".into()));
            doc.push("residual", Field::Real(residual));
        }
        Command::Coords { alg, to, point } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let (from, r, method) = match to {
                ChartArg::Second => {
                    let p = point_in(a, Chart::First, &point)?;
                    (p.clone(), to_second(a, &p, &cfg)?, "adjoint-quadrature")
                }
                ChartArg::First => {
                    let p = point_in(a, Chart::Second, &point)?;
                    (p.clone(), to_first(a, &p, &cfg)?, "newton")
                }
            };
            describe(&mut doc, &loaded);
            doc.push("from", Field::Text(if from.chart == Chart::First { "first" } else { "second" }.into()));
            doc.push("input", (&from.coords).into());
            doc.push("point", (&r.point.coords).into());
            doc.push("method", Field::Text(method.into()));
            doc.push("residual", Field::Real(r.residual));
        }
        Command::Subgroup { alg, direction, t } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let y = point_in(a, Chart::First, &direction)?.coords;
            let p = one_param_point(a, &y, t, &cfg)?;
            let invariant_defect = (adjoint_at(a, &p)? * &y - &y).amax();
            describe(&mut doc, &loaded);
            doc.push("direction", (&y).into());
            doc.push("t", Field::Real(t));
            doc.push("point", (&p.coords).into());
            doc.push("method", Field::Text("adjoint-quadrature".into()));
            doc.push("residual", Field::Real(invariant_defect));
        }
        Command::Generators { alg, subalgebra, point } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let model = adapted_basis(a, &parse_subalgebra(a, &subalgebra)?)?;
            let q = parse_point(&point)?;
            let x = generators(&model, &q, &cfg)?;
            describe(&mut doc, &loaded);
            model_fields(&mut doc, &model);
            doc.push("q", (&q).into());
            doc.push("generators", (&x).into());
        }
        Command::Action { alg, subalgebra, q, z } => {
            let loaded = load_algebra(&alg)?;
            let a = &loaded.algebra;
            let model = adapted_basis(a, &parse_subalgebra(a, &subalgebra)?)?;
            let q = parse_point(&q)?;
            let z = point_in(a, Chart::Second, &z)?;
            let r = action(&model, &q, &z, &cfg)?;
            describe(&mut doc, &loaded);
            model_fields(&mut doc, &model);
            doc.push("q", (&q).into());
            doc.push("z", (&z.coords).into());
            doc.push("psi", (&r.psi).into());
            doc.push("factor", (&r.factor).into());
            doc.push("method", Field::Text("adjoint-quadrature".into()));
            doc.push("residual", Field::Real(r.residual));
        }
        Command::Catalog { action: CatalogAction::List } => {
            let table = catalog::ENTRIES
                .iter()
                .map(|e| {
                    Document::new()
                        .with("key", Field::Text(e.key.into()))
                        .with("parameters", Field::Text(e.params.into()))
                        .with("summary", Field::Text(e.summary.into()))
                })
                .collect();
            doc.push("catalog", Field::Table(table));
        }
    }
    Ok((doc, EXIT_OK))
}

/// Runs one command, writing the result to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let format = cli.format;
    match execute(cli.command) {
        Ok((doc, code)) => {
            let text = match format {
                Format::Json => doc.to_json(),
                Format::Csv => doc.to_csv(),
            };
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(std::iter::once("lieforge").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parse_points() {
        assert_eq!(parse_point("1, -2.5,3e-1").unwrap().as_slice(), &[1.0, -2.5, 0.3]);
        assert!(parse_point("1,,2").is_err());
        assert!(parse_point("nan").is_err());
    }

    #[test]
    fn subalgebra_specs() {
        let a = catalog::build("poincare-sub").unwrap();
        assert_eq!(parse_subalgebra(&a, "v:0,0,1,2").unwrap().dim(), 1);
        assert_eq!(parse_subalgebra(&a, "1,2").unwrap().dim(), 2);
        assert!(parse_subalgebra(&a, "0").is_err());
        assert!(matches!(parse_subalgebra(&a, "1,3"), Err(LieError::InvalidSubalgebra(_))));
    }

    #[test]
    fn unknown_algebra_is_usage_error() {
        let (code, _, err) = run_capture(&["frame", "no-such", "--point", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("no-such"));
    }

    #[test]
    fn bad_flag_is_usage_error() {
        assert_eq!(run_capture(&["compose", "so3", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn abelian_compose_adds() {
        let (code, out, _) = run_capture(&["compose", "abelian:4", "--x", "1,2,3,4", "--y", "-1,0.5,0,2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let z: Vec<f64> = v["z"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert_eq!(z, vec![0.0, 2.5, 3.0, 6.0]);
    }
}
