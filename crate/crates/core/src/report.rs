//! Verification suites over sampled points and the deterministic report
//! (text and JSON) they produce.

use crate::chart::{ChartManifold, Point};
use crate::conformal;
use crate::diff::StepProfile;
use crate::error::{GeomError, Result};
use crate::foliation;
use crate::gray;
use crate::hermitian::{self, LeeConvention};
use crate::metric;
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Hermitian,
    Lcak,
    Curvature,
    Conformal,
    Gray,
    Foliation,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Hermitian,
        Suite::Lcak,
        Suite::Curvature,
        Suite::Conformal,
        Suite::Gray,
        Suite::Foliation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hermitian => "hermitian",
            Suite::Lcak => "lcak",
            Suite::Curvature => "curvature",
            Suite::Conformal => "conformal",
            Suite::Gray => "gray",
            Suite::Foliation => "foliation",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
    /// Reported value with no pass/fail semantics.
    Info,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
            CheckStatus::Info => "info",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    /// Residual (or reported value for `Info` checks).
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub note: Option<String>,
}

impl CheckResult {
    fn residual(name: &str, r: Result<f64>, tol: f64) -> CheckResult {
        match r {
            Ok(v) => CheckResult {
                name: name.into(),
                status: if v <= tol {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                value: Some(v),
                tolerance: Some(tol),
                note: None,
            },
            Err(e) => CheckResult {
                name: name.into(),
                status: CheckStatus::Fail,
                value: None,
                tolerance: Some(tol),
                note: Some(e.to_string()),
            },
        }
    }

    fn info(name: &str, v: f64) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Info,
            value: Some(v),
            tolerance: None,
            note: None,
        }
    }

    fn skip(name: &str, note: &str) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: CheckStatus::Skipped,
            value: None,
            tolerance: None,
            note: Some(note.into()),
        }
    }

    fn flag(name: &str, ok: bool, note: Option<String>) -> CheckResult {
        CheckResult {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            value: None,
            tolerance: None,
            note,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PointReport {
    pub index: usize,
    pub coords: Vec<f64>,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suites: Vec<Suite>,
    pub tolerances: Tolerances,
    pub convention: LeeConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suites: Suite::ALL.to_vec(),
            tolerances: Tolerances::default(),
            convention: LeeConvention::Canonical,
        }
    }
}

/// Hygiene residuals are one FD order tighter than the curvature identities.
const HYGIENE_TOL: f64 = 1e-5;

/// Run the configured suites at one point. Errors are folded into failed
/// (or, where geometry makes a suite undefined, skipped) checks.
pub fn run_point(chart: &ChartManifold, p: &Point, cfg: &RunConfig, index: usize) -> PointReport {
    let mut checks = Vec::new();
    for &suite in &cfg.suites {
        match suite {
            Suite::Hermitian => hermitian_suite(chart, p, cfg, &mut checks),
            Suite::Lcak => lcak_suite(chart, p, cfg, &mut checks),
            Suite::Curvature => curvature_suite(chart, p, &mut checks),
            Suite::Conformal => conformal_suite(chart, p, cfg, &mut checks),
            Suite::Gray => gray_suite(chart, p, cfg, &mut checks),
            Suite::Foliation => foliation_suite(chart, p, cfg, &mut checks),
        }
    }
    PointReport {
        index,
        coords: p.coords().to_vec(),
        checks,
    }
}

fn hermitian_suite(
    chart: &ChartManifold,
    p: &Point,
    cfg: &RunConfig,
    out: &mut Vec<CheckResult>,
) {
    let t = cfg.tolerances.projection;
    match hermitian::check_almost_hermitian(chart, p) {
        Ok((r1, r2)) => {
            out.push(CheckResult::residual("j-squared", Ok(r1), t));
            out.push(CheckResult::residual("j-metric-compatible", Ok(r2), t));
        }
        Err(e) => {
            out.push(CheckResult::residual("j-squared", Err(e.clone()), t));
            out.push(CheckResult::residual("j-metric-compatible", Err(e), t));
        }
    }
    out.push(CheckResult::flag(
        "fundamental-form-nondegenerate",
        hermitian::fundamental_form(chart, p).is_ok(),
        None,
    ));
}

fn lcak_suite(chart: &ChartManifold, p: &Point, cfg: &RunConfig, out: &mut Vec<CheckResult>) {
    let t = &cfg.tolerances;
    match hermitian::extract_lee_form_tol(chart, p, t.lee_residual) {
        Ok(lee) => {
            out.push(CheckResult::residual(
                "lee-extraction",
                Ok(lee.residual),
                t.lee_residual,
            ));
            out.push(CheckResult::residual(
                "lee-closed",
                hermitian::check_lee_closed(chart, p),
                HYGIENE_TOL,
            ));
            // g(B, ·) reproduces ω
            let g = match chart.metric_matrix(p) {
                Ok(g) => g,
                Err(e) => {
                    out.push(CheckResult::residual("lee-dual", Err(e), t.projection));
                    return;
                }
            };
            let dim = chart.dim();
            let mut dual: f64 = 0.0;
            for i in 0..dim {
                let gb: f64 = (0..dim).map(|j| g[(i, j)] * lee.b[j]).sum();
                dual = dual.max((gb - lee.omega.component(&[i])).abs());
            }
            out.push(CheckResult::residual("lee-dual", Ok(dual), t.projection));
            let factor = cfg.convention.factor();
            out.push(CheckResult::info("norm-b2", lee.norm_b2 * factor * factor));
            let ff = |q: &Point| hermitian::fundamental_form(chart, q);
            let d_omega = hermitian::exterior_derivative(chart, &ff, p, 2, StepProfile::Smooth);
            match d_omega {
                Ok(d) => out.push(CheckResult::info("d-omega-norm", d.max_abs())),
                Err(e) => out.push(CheckResult::residual("d-omega-norm", Err(e), 0.0)),
            }
            if chart.f_expr.is_some() {
                out.push(CheckResult::residual(
                    "f-matches-lee",
                    conformal::check_f_matches_lee(chart, p),
                    t.first_deriv,
                ));
            }
        }
        Err(e) => {
            out.push(CheckResult::residual("lee-extraction", Err(e), t.lee_residual));
        }
    }
}

fn curvature_suite(chart: &ChartManifold, p: &Point, out: &mut Vec<CheckResult>) {
    match metric::riemann_lowered(chart, p) {
        Ok(low) => {
            let scale = low.max_abs().max(1.0);
            let (a, b, c) = metric::riemann_symmetry_residuals(&low);
            out.push(CheckResult::residual("riemann-antisym-first-pair", Ok(a / scale), HYGIENE_TOL));
            out.push(CheckResult::residual("riemann-antisym-last-pair", Ok(b / scale), HYGIENE_TOL));
            out.push(CheckResult::residual("riemann-pair-symmetry", Ok(c / scale), HYGIENE_TOL));
            out.push(CheckResult::residual(
                "first-bianchi",
                Ok(metric::bianchi_residual(&low) / scale),
                HYGIENE_TOL,
            ));
        }
        Err(e) => out.push(CheckResult::residual("riemann", Err(e), HYGIENE_TOL)),
    }
    match metric::ricci(chart, p) {
        Ok(rc) => out.push(CheckResult::residual(
            "ricci-symmetry",
            Ok(rc.symmetry_residual() / rc.max_abs().max(1.0)),
            HYGIENE_TOL,
        )),
        Err(e) => out.push(CheckResult::residual("ricci-symmetry", Err(e), HYGIENE_TOL)),
    }
    if chart.j_exprs.is_some() {
        let ff = |q: &Point| hermitian::fundamental_form(chart, q);
        let dd = (|| {
            let field = |q: &Point| hermitian::exterior_derivative(chart, &ff, q, 2, StepProfile::Smooth);
            let dd = hermitian::exterior_derivative(chart, &field, p, 3, StepProfile::Derived)?;
            Ok(dd.max_abs())
        })();
        out.push(CheckResult::residual("d-squared-zero", dd, HYGIENE_TOL));
    }
}

fn conformal_suite(chart: &ChartManifold, p: &Point, cfg: &RunConfig, out: &mut Vec<CheckResult>) {
    if chart.f_expr.is_none() {
        out.push(CheckResult::skip("conformal", "no conformal exponent f on this chart"));
        return;
    }
    let t = &cfg.tolerances;
    match conformal::transform_checks(chart, p) {
        Ok(c) => {
            out.push(CheckResult::residual("curvature-transform", Ok(c.curvature), t.curvature));
            out.push(CheckResult::residual(
                "curvature-transform-lowered",
                Ok(c.curvature_lowered),
                t.curvature,
            ));
            out.push(CheckResult::residual(
                "transform-rhs-antisymmetry",
                Ok(c.rhs_antisymmetry),
                t.first_deriv,
            ));
            out.push(CheckResult::residual("ricci-transform", Ok(c.ricci), t.curvature));
            out.push(CheckResult::residual("ricci-star-transform", Ok(c.ricci_star), t.curvature));
            out.push(CheckResult::residual("scalar-transform", Ok(c.scalar), t.curvature));
            out.push(CheckResult::residual(
                "scalar-star-transform",
                Ok(c.scalar_star),
                t.curvature,
            ));
            out.push(CheckResult::residual(
                "trace-p-two-route",
                Ok(c.trace_p_two_route),
                t.first_deriv,
            ));
            out.push(CheckResult::info("trace-p", c.trace_p));
            out.push(CheckResult::info("div-b", c.div_b));
        }
        Err(e) => out.push(CheckResult::residual("curvature-transform", Err(e), t.curvature)),
    }
    match conformal::p_tensor(chart, p) {
        Ok(pt) => out.push(CheckResult::residual(
            "p-symmetry",
            Ok(pt.tensor.symmetry_residual()),
            t.first_deriv,
        )),
        Err(e) => out.push(CheckResult::residual("p-symmetry", Err(e), t.first_deriv)),
    }
    let lie = (|| {
        let lb = conformal::lie_derivative_metric(chart, p)?;
        let data = conformal::precompute(chart, p)?;
        let dim = chart.dim();
        let mut r: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                r = r.max((lb.get(&[i, j]) - 2.0 * data.nabla_omega.get(&[i, j])).abs());
            }
        }
        Ok(r)
    })();
    out.push(CheckResult::residual("lie-derivative-identity", lie, HYGIENE_TOL));
}

fn gray_suite(chart: &ChartManifold, p: &Point, cfg: &RunConfig, out: &mut Vec<CheckResult>) {
    if chart.f_expr.is_none() {
        out.push(CheckResult::skip("gray", "no conformal exponent f on this chart"));
        return;
    }
    let tg = cfg.tolerances.gray;
    match gray::gray_classes(chart, p, tg) {
        Ok(c) => {
            out.push(CheckResult::info("gray-residual-1", c.residuals.residual1));
            out.push(CheckResult::info("gray-residual-2", c.residuals.residual2));
            out.push(CheckResult::info("gray-residual-3", c.residuals.residual3));
            let chain = (!c.in_l1 || c.in_l2) && (!c.in_l2 || c.in_l3);
            out.push(CheckResult::flag(
                "gray-membership-chain",
                chain,
                Some(format!("L1={} L2={} L3={}", c.in_l1, c.in_l2, c.in_l3)),
            ));
            if c.in_l1 {
                out.push(CheckResult::residual(
                    "scalar-difference-identity",
                    gray::yabien_residual(chart, p, tg),
                    cfg.tolerances.curvature,
                ));
            } else {
                out.push(CheckResult::skip(
                    "scalar-difference-identity",
                    "point is outside the first Gray class",
                ));
            }
        }
        Err(e) => out.push(CheckResult::residual("gray-residual-1", Err(e), tg)),
    }
}

fn foliation_suite(chart: &ChartManifold, p: &Point, cfg: &RunConfig, out: &mut Vec<CheckResult>) {
    let t = &cfg.tolerances;
    let degenerate = |e: &GeomError| matches!(e, GeomError::DegenerateLeeField { .. });
    let frame = match foliation::split_frame(chart, p) {
        Ok(f) => f,
        Err(e) if degenerate(&e) => {
            out.push(CheckResult::skip("foliation", "skipped: ω = 0 at this point"));
            return;
        }
        Err(e) => {
            out.push(CheckResult::residual("split-frame", Err(e), t.projection));
            return;
        }
    };
    // projector algebra on the frame itself
    let mut proj: f64 = 0.0;
    for e in &frame.leaf {
        let qp = frame.q_perp(e);
        for v in qp {
            proj = proj.max(v.abs());
        }
        let w: f64 = frame.lee.omega.iter().zip(e).map(|(a, b)| a * b).sum();
        proj = proj.max(w.abs());
    }
    out.push(CheckResult::residual("leaf-frame-in-kernel", Ok(proj), t.projection));

    let auto = foliation::autoparallel_residual(chart, p);
    out.push(CheckResult::residual("lee-autoparallel", auto.clone(), HYGIENE_TOL));
    match foliation::bundle_like_residual(chart, p) {
        Ok((res, two_route)) => {
            out.push(CheckResult::residual("bundle-like", Ok(res), HYGIENE_TOL));
            out.push(CheckResult::residual(
                "bundle-like-two-route",
                Ok(two_route),
                t.first_deriv,
            ));
            // the two criteria are equivalent, so they must agree at tolerance
            if let Ok(a) = auto {
                out.push(CheckResult::flag(
                    "riemannian-iff-autoparallel",
                    (res <= HYGIENE_TOL) == (a <= HYGIENE_TOL),
                    Some(format!("bundle-like {res:.3e}, autoparallel {a:.3e}")),
                ));
            }
        }
        Err(e) => out.push(CheckResult::residual("bundle-like", Err(e), HYGIENE_TOL)),
    }
    match foliation::leaf_geometry(chart, p) {
        Ok(geom) => {
            let factor = cfg.convention.factor();
            let mut sym: f64 = 0.0;
            let m = geom.alpha.len();
            for i in 0..m {
                for j in 0..m {
                    sym = sym.max((geom.alpha[i][j] - geom.alpha[j][i]).abs());
                }
            }
            out.push(CheckResult::residual("alpha-symmetry", Ok(sym), HYGIENE_TOL));
            out.push(CheckResult::residual(
                "weingarten-normal-component",
                Ok(geom.weingarten_residual),
                HYGIENE_TOL,
            ));
            out.push(CheckResult::info("div-along-leaf", geom.div_along_leaf * factor));
            out.push(CheckResult::info("mean-curvature-coefficient", geom.h * factor));
            match foliation::minimality_and_killing(chart, p, cfg.tolerances.first_deriv) {
                Ok(flags) => {
                    out.push(CheckResult::flag(
                        "geodesic-iff-killing",
                        flags.totally_geodesic == flags.killing_on_leaf,
                        Some(format!(
                            "minimal={} totallyGeodesic={} killingOnLeaf={}",
                            flags.minimal, flags.totally_geodesic, flags.killing_on_leaf
                        )),
                    ));
                }
                Err(e) => out.push(CheckResult::residual("geodesic-iff-killing", Err(e), 0.0)),
            }
        }
        Err(e) => out.push(CheckResult::residual("alpha-symmetry", Err(e), HYGIENE_TOL)),
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub manifold: String,
    pub seed: u64,
    pub convention: LeeConvention,
    pub tolerances: Tolerances,
    pub suites: Vec<Suite>,
    pub points: Vec<PointReport>,
}

impl VerificationReport {
    pub fn counts(&self) -> (usize, usize, usize, usize) {
        let (mut pass, mut fail, mut skip, mut info) = (0, 0, 0, 0);
        for pr in &self.points {
            for c in &pr.checks {
                match c.status {
                    CheckStatus::Pass => pass += 1,
                    CheckStatus::Fail => fail += 1,
                    CheckStatus::Skipped => skip += 1,
                    CheckStatus::Info => info += 1,
                }
            }
        }
        (pass, fail, skip, info)
    }

    pub fn all_passed(&self) -> bool {
        self.counts().1 == 0
    }
}

/// 17-significant-digit float rendering used for every number in the JSON
/// report (round-trips f64 exactly, so reports are regression-stable).
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "null".into();
    }
    format!("{:.16e}", v)
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Deterministic JSON rendering: fixed key order, no whitespace variance.
pub fn to_json(r: &VerificationReport) -> String {
    let mut s = String::new();
    s.push_str("{\"schema\":1,");
    s.push_str(&format!("\"manifold\":{},", json_string(&r.manifold)));
    s.push_str(&format!("\"seed\":{},", r.seed));
    let conv = match r.convention {
        LeeConvention::Canonical => "canonical",
        LeeConvention::PaperExampleHalved => "paper-example-halved",
    };
    s.push_str(&format!("\"leeConvention\":{},", json_string(conv)));
    let t = &r.tolerances;
    s.push_str(&format!(
        "\"tolerances\":{{\"projection\":{},\"firstDeriv\":{},\"curvature\":{},\"leeResidual\":{},\"degenerateLee\":{},\"gray\":{}}},",
        fmt_float(t.projection),
        fmt_float(t.first_deriv),
        fmt_float(t.curvature),
        fmt_float(t.lee_residual),
        fmt_float(t.degenerate_lee),
        fmt_float(t.gray)
    ));
    s.push_str("\"suites\":[");
    for (i, suite) in r.suites.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&json_string(suite.name()));
    }
    s.push_str("],\"points\":[");
    for (i, pr) in r.points.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&format!("{{\"index\":{},\"coords\":[", pr.index));
        for (j, c) in pr.coords.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&fmt_float(*c));
        }
        s.push_str("],\"checks\":[");
        for (j, c) in pr.checks.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&format!(
                "{{\"name\":{},\"status\":{}",
                json_string(&c.name),
                json_string(c.status.name())
            ));
            if let Some(v) = c.value {
                s.push_str(&format!(",\"value\":{}", fmt_float(v)));
            }
            if let Some(t) = c.tolerance {
                s.push_str(&format!(",\"tolerance\":{}", fmt_float(t)));
            }
            if let Some(n) = &c.note {
                s.push_str(&format!(",\"note\":{}", json_string(n)));
            }
            s.push('}');
        }
        s.push_str("]}");
    }
    let (pass, fail, skip, info) = r.counts();
    s.push_str(&format!(
        "],\"summary\":{{\"pass\":{pass},\"fail\":{fail},\"skipped\":{skip},\"info\":{info}}}}}"
    ));
    s
}

/// Human-readable rendering.
pub fn to_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("manifold: {} (seed {})\n", r.manifold, r.seed));
    for pr in &r.points {
        let coords: Vec<String> = pr.coords.iter().map(|c| format!("{c:.6}")).collect();
        s.push_str(&format!("point {} at ({})\n", pr.index, coords.join(", ")));
        for c in &pr.checks {
            let mut line = format!("  [{}] {}", c.status.name(), c.name);
            if let Some(v) = c.value {
                line.push_str(&format!("  {v:.3e}"));
            }
            if let Some(t) = c.tolerance {
                line.push_str(&format!(" (tol {t:.1e})"));
            }
            if let Some(n) = &c.note {
                line.push_str(&format!("  -- {n}"));
            }
            line.push('\n');
            s.push_str(&line);
        }
    }
    let (pass, fail, skip, info) = r.counts();
    s.push_str(&format!(
        "summary: {pass} passed, {fail} failed, {skip} skipped, {info} reported\n"
    ));
    s
}

/// Flags observed by the pipeline, for comparison against a zoo entry's
/// expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservedFlags {
    pub almost_hermitian: bool,
    pub lcak: bool,
    pub almost_kahler: bool,
    pub lee_autoparallel: Option<bool>,
    pub leaves_minimal: Option<bool>,
}

pub fn observed_flags(chart: &ChartManifold, p: &Point) -> Result<ObservedFlags> {
    let almost_hermitian = match hermitian::check_almost_hermitian(chart, p) {
        Ok((r1, r2)) => r1 < 1e-8 && r2 < 1e-8,
        Err(_) => false,
    };
    let lee = hermitian::extract_lee_form(chart, p);
    let (lcak, almost_kahler, degenerate) = match &lee {
        Ok(l) => {
            let closed = hermitian::check_lee_closed(chart, p)
                .map(|r| r < 1e-4)
                .unwrap_or(false);
            let lcak = almost_hermitian && closed;
            (
                lcak,
                lcak && l.omega.max_abs() < 1e-7,
                l.norm_b2 < crate::tol::DEGENERATE_LEE,
            )
        }
        Err(_) => (false, false, true),
    };
    let (lee_autoparallel, leaves_minimal) = if degenerate {
        (None, None)
    } else {
        let auto = foliation::autoparallel_residual(chart, p).map(|r| r <= 1e-4).ok();
        let minimal = foliation::leaf_geometry(chart, p)
            .map(|g| g.div_along_leaf.abs() <= 1e-4)
            .ok();
        (auto, minimal)
    };
    Ok(ObservedFlags {
        almost_hermitian,
        lcak,
        almost_kahler,
        lee_autoparallel,
        leaves_minimal,
    })
}
