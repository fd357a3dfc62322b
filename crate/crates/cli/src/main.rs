//! `lcak` — command-line front end for the verification engine.
//!
//! Exit codes: 0 all asserted checks pass, 2 at least one check failed,
//! 3 manifold definition / usage errors.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lcak_core::chart::{ChartManifold, Point};
use lcak_core::hermitian::LeeConvention;
use lcak_core::report::{self, RunConfig, Suite, VerificationReport};
use lcak_core::tol::Tolerances;
use lcak_core::{conformal, foliation, gray, hermitian, manifest, metric, zoo};

#[derive(Parser)]
#[command(
    name = "lcak",
    about = "Numerical verification engine for locally conformal almost Kahler charts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites over sampled domain points
    Verify(VerifyArgs),
    /// Evaluate a single geometric quantity at one point
    Eval(EvalArgs),
    /// Show a manifold's chart data and expected flags
    Describe {
        /// Built-in manifold name or path to a definition file
        manifold: String,
    },
    /// List the built-in manifolds
    List,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Canonical,
    PaperExampleHalved,
}

impl Convention {
    fn to_core(self) -> LeeConvention {
        match self {
            Convention::Canonical => LeeConvention::Canonical,
            Convention::PaperExampleHalved => LeeConvention::PaperExampleHalved,
        }
    }
}

#[derive(Args)]
struct TolArgs {
    /// Tolerance for frame/projection identities
    #[arg(long)]
    tol_projection: Option<f64>,
    /// Tolerance for first-derivative-level identities
    #[arg(long)]
    tol_first_deriv: Option<f64>,
    /// Tolerance for curvature-level identities
    #[arg(long)]
    tol_curvature: Option<f64>,
    /// Lee extraction residual above which a chart is rejected
    #[arg(long)]
    tol_lee: Option<f64>,
    /// ||B||^2 below which the foliation is treated as undefined
    #[arg(long)]
    tol_degenerate_lee: Option<f64>,
    /// Shared tolerance for the three curvature-identity classes
    #[arg(long)]
    tol_gray: Option<f64>,
}

impl TolArgs {
    fn apply(&self, mut t: Tolerances) -> Tolerances {
        if let Some(v) = self.tol_projection {
            t.projection = v;
        }
        if let Some(v) = self.tol_first_deriv {
            t.first_deriv = v;
        }
        if let Some(v) = self.tol_curvature {
            t.curvature = v;
        }
        if let Some(v) = self.tol_lee {
            t.lee_residual = v;
        }
        if let Some(v) = self.tol_degenerate_lee {
            t.degenerate_lee = v;
        }
        if let Some(v) = self.tol_gray {
            t.gray = v;
        }
        t
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Built-in manifold name or path to a definition file
    manifold: String,
    /// Comma-separated suites (hermitian,lcak,curvature,conformal,gray,foliation) or "all"
    #[arg(long, default_value = "all")]
    checks: String,
    /// Number of sampled domain points
    #[arg(long, default_value_t = 25)]
    points: usize,
    /// PRNG seed for the point sampler
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for point-level parallelism
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Convention::Canonical)]
    lee_convention: Convention,
    #[command(flatten)]
    tols: TolArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Built-in manifold name or path to a definition file
    manifold: String,
    /// Quantity to evaluate (see `lcak eval --help` for the list)
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(OPS.iter().map(|o| o.0).collect::<Vec<_>>()))]
    op: String,
    /// Point coordinates, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    at: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Convention::Canonical)]
    lee_convention: Convention,
}

/// (name, description) of every eval operation.
const OPS: &[(&str, &str)] = &[
    ("metric", "metric components g_ij"),
    ("metric-inverse", "inverse metric components g^ij"),
    ("j", "almost complex structure components J^i_j"),
    ("fundamental-form", "fundamental 2-form components"),
    ("lee-form", "Lee form components"),
    ("lee-vector", "Lee vector field components"),
    ("norm-b2", "squared norm of the Lee vector field"),
    ("christoffel", "connection coefficients"),
    ("ricci", "Ricci tensor components"),
    ("scalar", "scalar curvature"),
    ("ricci-star", "star-Ricci tensor components"),
    ("scalar-star", "star-scalar curvature"),
    ("p-tensor", "conformal correction tensor components"),
    ("trace-p", "trace of the conformal correction tensor"),
    ("div-b", "divergence of the Lee vector field"),
    ("div-along-leaf", "leaf-frame divergence of the Lee vector field"),
    ("mean-curvature-coefficient", "coefficient h with H' = h B"),
    ("autoparallel-residual", "residual of the auto-parallel criterion"),
    ("bundle-like-residual", "residual of the bundle-like criterion"),
    ("gray-residuals", "residuals of the three curvature identities"),
];

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

/// Resolve a manifold argument: a zoo name first, then a file path.
fn resolve(arg: &str) -> Result<(String, ChartManifold), String> {
    if let Some(entry) = zoo::find(arg) {
        return Ok((entry.name.to_string(), entry.chart));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(format!(
            "'{arg}' is neither a built-in manifold nor an existing file; \
             try `lcak list`"
        ));
    }
    let source =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {arg}: {e}"))?;
    let chart = manifest::parse_manifest(&source).map_err(|e| format!("{arg}: {e}"))?;
    Ok((chart.name.clone(), chart))
}

fn parse_suites(s: &str) -> Result<Vec<Suite>, String> {
    if s == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        match Suite::from_name(part) {
            Some(suite) if !out.contains(&suite) => out.push(suite),
            Some(_) => {}
            None => return Err(format!("unknown check suite '{part}'")),
        }
    }
    if out.is_empty() {
        return Err("no check suites selected".into());
    }
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs) -> ExitCode {
    let (name, chart) = match resolve(&args.manifold) {
        Ok(v) => v,
        Err(e) => return fail(3, &e),
    };
    let suites = match parse_suites(&args.checks) {
        Ok(v) => v,
        Err(e) => return fail(3, &e),
    };
    let cfg = RunConfig {
        suites,
        tolerances: args.tols.apply(Tolerances::default()),
        convention: args.lee_convention.to_core(),
    };
    let points = match zoo::sample_points(&chart, args.points, args.seed) {
        Ok(v) => v,
        Err(e) => return fail(3, &format!("sampling failed: {e}")),
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
    {
        Ok(p) => p,
        Err(e) => return fail(3, &format!("cannot build thread pool: {e}")),
    };
    let point_reports = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| report::run_point(&chart, p, &cfg, i))
            .collect::<Vec<_>>()
    });

    let rep = VerificationReport {
        manifold: name,
        seed: args.seed,
        convention: cfg.convention,
        tolerances: cfg.tolerances,
        suites: cfg.suites.clone(),
        points: point_reports,
    };
    match args.format {
        Format::Text => print!("{}", report::to_text(&rep)),
        Format::Json => println!("{}", report::to_json(&rep)),
    }
    if rep.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

/// Deterministic JSON value for eval results.
enum EvalValue {
    Scalar(f64),
    /// Components labelled in fixed coordinate order.
    Labelled(Vec<(String, f64)>),
}

fn labelled_vector(names: &[String], prefix: &str, v: &[f64]) -> EvalValue {
    EvalValue::Labelled(
        names
            .iter()
            .zip(v)
            .map(|(n, c)| (format!("{prefix}{n}"), *c))
            .collect(),
    )
}

fn labelled_matrix(dim: usize, label: impl Fn(usize, usize) -> String, get: impl Fn(usize, usize) -> f64) -> EvalValue {
    let mut out = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            let v = get(i, j);
            if v != 0.0 {
                out.push((label(i, j), v));
            }
        }
    }
    EvalValue::Labelled(out)
}

fn eval_op(
    chart: &ChartManifold,
    op: &str,
    p: &Point,
    conv: LeeConvention,
) -> lcak_core::Result<EvalValue> {
    let dim = chart.dim();
    let names = &chart.coord_names;
    let factor = conv.factor();
    Ok(match op {
        "metric" => {
            let g = chart.metric_matrix(p)?;
            labelled_matrix(dim, |i, j| format!("g_{}_{}", names[i], names[j]), |i, j| g[(i, j)])
        }
        "metric-inverse" => {
            let g = chart.metric_inverse(p)?;
            labelled_matrix(dim, |i, j| format!("g^{}^{}", names[i], names[j]), |i, j| g[(i, j)])
        }
        "j" => {
            let jm = chart.j_matrix(p)?;
            labelled_matrix(dim, |i, j| format!("J^{}_{}", names[i], names[j]), |i, j| jm[(i, j)])
        }
        "fundamental-form" => {
            let om = hermitian::fundamental_form(chart, p)?;
            let mut out = Vec::new();
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let v = om.component(&[i, j]);
                    if v != 0.0 {
                        out.push((format!("d{}^d{}", names[i], names[j]), v));
                    }
                }
            }
            EvalValue::Labelled(out)
        }
        "lee-form" => {
            let lee = hermitian::extract_lee_form(chart, p)?;
            let v: Vec<f64> = (0..dim).map(|i| lee.omega.component(&[i]) * factor).collect();
            labelled_vector(names, "d", &v)
        }
        "lee-vector" => {
            let lee = hermitian::extract_lee_form(chart, p)?;
            let v: Vec<f64> = lee.b.iter().map(|c| c * factor).collect();
            labelled_vector(names, "@", &v)
        }
        "norm-b2" => {
            let lee = hermitian::extract_lee_form(chart, p)?;
            EvalValue::Scalar(lee.norm_b2 * factor * factor)
        }
        "christoffel" => {
            let gamma = metric::christoffel(chart, p)?;
            let mut out = Vec::new();
            for k in 0..dim {
                for i in 0..dim {
                    for j in i..dim {
                        let v = gamma.get(&[k, i, j]);
                        if v.abs() > 1e-12 {
                            out.push((
                                format!("G^{}_{}_{}", names[k], names[i], names[j]),
                                v,
                            ));
                        }
                    }
                }
            }
            EvalValue::Labelled(out)
        }
        "ricci" => {
            let r = metric::ricci(chart, p)?;
            labelled_matrix(dim, |i, j| format!("ric_{}_{}", names[i], names[j]), |i, j| {
                r.get(&[i, j])
            })
        }
        "scalar" => EvalValue::Scalar(metric::scalar(chart, p)?),
        "ricci-star" => {
            let r = conformal::ricci_star(chart, p)?;
            labelled_matrix(dim, |i, j| format!("ric*_{}_{}", names[i], names[j]), |i, j| {
                r.get(&[i, j])
            })
        }
        "scalar-star" => EvalValue::Scalar(conformal::scalar_star(chart, p)?),
        "p-tensor" => {
            let pt = conformal::p_tensor(chart, p)?;
            labelled_matrix(dim, |i, j| format!("P_{}_{}", names[i], names[j]), |i, j| {
                pt.tensor.get(&[i, j])
            })
        }
        "trace-p" => EvalValue::Scalar(conformal::p_tensor(chart, p)?.trace_p),
        "div-b" => EvalValue::Scalar(conformal::precompute(chart, p)?.div_b()),
        "div-along-leaf" => {
            EvalValue::Scalar(foliation::leaf_geometry(chart, p)?.div_along_leaf * factor)
        }
        "mean-curvature-coefficient" => {
            EvalValue::Scalar(foliation::leaf_geometry(chart, p)?.h * factor)
        }
        "autoparallel-residual" => {
            EvalValue::Scalar(foliation::autoparallel_residual(chart, p)?)
        }
        "bundle-like-residual" => {
            EvalValue::Scalar(foliation::bundle_like_residual(chart, p)?.0)
        }
        "gray-residuals" => {
            let g = gray::gray_classes(chart, p, lcak_core::tol::GRAY)?;
            EvalValue::Labelled(vec![
                ("identity1".into(), g.residuals.residual1),
                ("identity2".into(), g.residuals.residual2),
                ("identity3".into(), g.residuals.residual3),
            ])
        }
        other => {
            return Err(lcak_core::GeomError::Domain {
                context: format!("unknown eval operation '{other}'"),
            })
        }
    })
}

fn cmd_eval(args: &EvalArgs) -> ExitCode {
    let (name, chart) = match resolve(&args.manifold) {
        Ok(v) => v,
        Err(e) => return fail(3, &e),
    };
    if args.at.len() != chart.dim() {
        return fail(
            3,
            &format!(
                "--at has {} coordinates but {} is {}-dimensional",
                args.at.len(),
                name,
                chart.dim()
            ),
        );
    }
    let p = Point::new(args.at.clone());
    let value = match eval_op(&chart, &args.op, &p, args.lee_convention.to_core()) {
        Ok(v) => v,
        Err(e) => return fail(2, &format!("{}: {e}", args.op)),
    };
    let mut s = String::from("{\"schema\":1,");
    s.push_str(&format!("\"manifold\":\"{name}\",\"op\":\"{}\",\"at\":[", args.op));
    for (i, c) in args.at.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&report::fmt_float(*c));
    }
    s.push_str("],");
    match value {
        EvalValue::Scalar(v) => s.push_str(&format!("\"value\":{}", report::fmt_float(v))),
        EvalValue::Labelled(pairs) => {
            s.push_str("\"components\":{");
            for (i, (k, v)) in pairs.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(&format!("\"{k}\":{}", report::fmt_float(*v)));
            }
            s.push('}');
        }
    }
    s.push('}');
    println!("{s}");
    ExitCode::SUCCESS
}

fn cmd_describe(arg: &str) -> ExitCode {
    let (name, chart) = match resolve(arg) {
        Ok(v) => v,
        Err(e) => return fail(3, &e),
    };
    println!("name: {name}");
    println!("dim: {}", chart.dim());
    println!("coords: {}", chart.coord_names.join(", "));
    for c in &chart.constraints {
        println!("domain: {}", c.source);
    }
    let nonzero = |exprs: &Vec<Vec<lcak_core::Expr>>, label: &str| {
        for (i, row) in exprs.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let txt = e.pretty(&chart.coord_names);
                if txt != "0" {
                    println!(
                        "{label}_{}_{}: {txt}",
                        chart.coord_names[i], chart.coord_names[j]
                    );
                }
            }
        }
    };
    nonzero(&chart.metric_exprs, "g");
    if let Some(j) = &chart.j_exprs {
        nonzero(j, "J");
    }
    match &chart.f_expr {
        Some(f) => println!("conformal exponent: {}", f.pretty(&chart.coord_names)),
        None => println!("conformal exponent: none"),
    }
    if let Some(entry) = zoo::find(arg) {
        let fl = entry.flags;
        println!("provenance: {}", entry.provenance);
        println!(
            "expected: almostHermitian={} lcak={} almostKahler={} leeAutoparallel={:?} leavesMinimal={:?}",
            fl.almost_hermitian, fl.lcak, fl.almost_kahler, fl.lee_autoparallel, fl.leaves_minimal
        );
    }
    ExitCode::SUCCESS
}

fn cmd_list() -> ExitCode {
    for entry in zoo::zoo() {
        println!(
            "{:<18} dim {}  {}",
            entry.name,
            entry.chart.dim(),
            entry.provenance
        );
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Describe { manifold } => cmd_describe(manifold),
        Command::List => cmd_list(),
    }
}
