//! Codimension-1 foliation diagnostics from the kernel of the Lee form:
//! projections, bundle-like criterion, auto-parallel Lee field, leaf second
//! fundamental form, mean curvature, minimality flags.
//!
//! Leaves are never integrated; everything is pointwise through the leaf
//! frame.

use crate::chart::{ChartManifold, Point};
use crate::diff::StepProfile;
use crate::error::{GeomError, Result};
use crate::hermitian;
use crate::metric;
use crate::tol;
use crate::zoo::SplitMix64;

/// Pointwise Lee data as plain component vectors, so diagnostics can also
/// run against an imposed (non-extracted) field in tests.
#[derive(Debug, Clone)]
pub struct LeeAt {
    pub omega: Vec<f64>,
    pub b: Vec<f64>,
    pub norm_b2: f64,
}

pub type LeeField<'a> = dyn Fn(&Point) -> Result<LeeAt> + 'a;

/// The extracted Lee field of a chart as a `LeeField` closure.
pub fn extracted_lee_field(chart: &ChartManifold) -> impl Fn(&Point) -> Result<LeeAt> + '_ {
    |q: &Point| {
        let l = hermitian::extract_lee_form(chart, q)?;
        Ok(LeeAt {
            omega: (0..chart.dim()).map(|i| l.omega.component(&[i])).collect(),
            b: l.b,
            norm_b2: l.norm_b2,
        })
    }
}

fn gate(lee: &LeeAt) -> Result<()> {
    if lee.norm_b2 < tol::DEGENERATE_LEE {
        return Err(GeomError::DegenerateLeeField {
            norm_b2: lee.norm_b2,
        });
    }
    Ok(())
}

/// Orthogonal splitting TM = D ⊕ D⊥ at a point: leaf frame spanning
/// D = ker ω and the unit normal B/|B|.
pub struct SplitFrame {
    pub lee: LeeAt,
    /// g-orthonormal frame of D, 2n−1 vectors.
    pub leaf: Vec<Vec<f64>>,
    /// Unit normal `B/|B|`.
    pub normal: Vec<f64>,
    g: nalgebra::DMatrix<f64>,
}

impl SplitFrame {
    /// `Q⊥X = (ω(X)/|B|²) B`.
    pub fn q_perp(&self, x: &[f64]) -> Vec<f64> {
        let wx: f64 = self.lee.omega.iter().zip(x).map(|(w, v)| w * v).sum();
        self.lee.b.iter().map(|b| wx / self.lee.norm_b2 * b).collect()
    }

    /// `QX = X − Q⊥X`.
    pub fn q(&self, x: &[f64]) -> Vec<f64> {
        let qp = self.q_perp(x);
        x.iter().zip(qp).map(|(v, p)| v - p).collect()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let dim = a.len();
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += self.g[(i, j)] * a[i] * b[j];
            }
        }
        s
    }
}

pub fn split_frame(chart: &ChartManifold, p: &Point) -> Result<SplitFrame> {
    split_frame_with(chart, p, &extracted_lee_field(chart))
}

pub fn split_frame_with(chart: &ChartManifold, p: &Point, field: &LeeField) -> Result<SplitFrame> {
    let lee = field(p)?;
    gate(&lee)?;
    let g = chart.metric_matrix(p)?;
    let dim = chart.dim();
    let norm_b = lee.norm_b2.sqrt();
    let normal: Vec<f64> = lee.b.iter().map(|v| v / norm_b).collect();
    let inner = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                s += g[(i, j)] * a[i] * b[j];
            }
        }
        s
    };
    // Gram-Schmidt over the Q-projected coordinate basis, ascending index,
    // skipping directions that collapse into span of earlier ones
    let mut leaf: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    for a in 0..dim {
        let wx = lee.omega[a];
        let mut v: Vec<f64> = (0..dim)
            .map(|k| {
                let e = if k == a { 1.0 } else { 0.0 };
                e - wx / lee.norm_b2 * lee.b[k]
            })
            .collect();
        for e in &leaf {
            let c = inner(&v, e);
            for k in 0..dim {
                v[k] -= c * e[k];
            }
        }
        let n2 = inner(&v, &v);
        if n2 < tol::PIVOT {
            continue;
        }
        let n = n2.sqrt();
        leaf.push(v.into_iter().map(|c| c / n).collect());
        if leaf.len() == dim - 1 {
            break;
        }
    }
    if leaf.len() != dim - 1 {
        return Err(GeomError::DegeneratePivot {
            step: leaf.len(),
            norm: 0.0,
        });
    }
    Ok(SplitFrame {
        lee,
        leaf,
        normal,
        g,
    })
}

/// Covariant derivative `∇_X B` for the Lee field, direction given by
/// constant components.
fn nabla_b(
    chart: &ChartManifold,
    p: &Point,
    field: &LeeField,
    x: &[f64],
) -> Result<Vec<f64>> {
    let bf = |q: &Point| -> Result<Vec<f64>> { Ok(field(q)?.b) };
    metric::covariant_derivative_vector(chart, &bf, p, x, StepProfile::Derived)
}

/// `‖∇_B B − B(ln|B|)B‖_g`.
pub fn autoparallel_residual(chart: &ChartManifold, p: &Point) -> Result<f64> {
    autoparallel_residual_with(chart, p, &extracted_lee_field(chart))
}

pub fn autoparallel_residual_with(
    chart: &ChartManifold,
    p: &Point,
    field: &LeeField,
) -> Result<f64> {
    let lee = field(p)?;
    gate(&lee)?;
    let dim = chart.dim();
    let nbb = nabla_b(chart, p, field, &lee.b)?;
    // B(ln|B|) = (1/(2|B|²)) B(|B|²)
    let n2_field = |q: &Point| Ok(field(q)?.norm_b2);
    let mut bn2 = 0.0;
    for a in 0..dim {
        if lee.b[a] != 0.0 {
            bn2 += lee.b[a] * chart.partial_with(&n2_field, p, a, StepProfile::Derived)?;
        }
    }
    let coef = bn2 / (2.0 * lee.norm_b2);
    let diff: Vec<f64> = (0..dim).map(|k| nbb[k] - coef * lee.b[k]).collect();
    let g = chart.metric_matrix(p)?;
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += g[(i, j)] * diff[i] * diff[j];
        }
    }
    Ok(s.max(0.0).sqrt())
}

/// Bundle-like criterion, two routes: the defining identity
/// `g(∇_{Q⊥Y} QX, Q⊥Z) + g(∇_{Q⊥Z} QX, Q⊥Y) = 0` over seeded random
/// triples, and its reduction `(2/|B|⁴) ω(Y)ω(Z) ω(∇_B QX)`. Returns
/// (max residual, max two-route disagreement).
pub fn bundle_like_residual(chart: &ChartManifold, p: &Point) -> Result<(f64, f64)> {
    bundle_like_residual_with(chart, p, &extracted_lee_field(chart))
}

pub fn bundle_like_residual_with(
    chart: &ChartManifold,
    p: &Point,
    field: &LeeField,
) -> Result<(f64, f64)> {
    let frame = split_frame_with(chart, p, field)?;
    let dim = chart.dim();
    let mut rng = SplitMix64::new(12345);
    let mut residual: f64 = 0.0;
    let mut two_route: f64 = 0.0;
    for _ in 0..10 {
        let rand_vec = |rng: &mut SplitMix64| -> Vec<f64> {
            (0..dim).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
        };
        let x = rand_vec(&mut rng);
        let y = rand_vec(&mut rng);
        let z = rand_vec(&mut rng);
        // the projected field q ↦ Q(q) X, differentiated as a derived field
        let qx_field = |q: &Point| -> Result<Vec<f64>> {
            let l = field(q)?;
            let wx: f64 = l.omega.iter().zip(&x).map(|(w, v)| w * v).sum();
            Ok((0..dim).map(|k| x[k] - wx / l.norm_b2 * l.b[k]).collect())
        };
        let qpy = frame.q_perp(&y);
        let qpz = frame.q_perp(&z);
        let d_y = metric::covariant_derivative_vector(chart, &qx_field, p, &qpy, StepProfile::Derived)?;
        let d_z = metric::covariant_derivative_vector(chart, &qx_field, p, &qpz, StepProfile::Derived)?;
        let r = frame.inner(&d_y, &qpz) + frame.inner(&d_z, &qpy);
        residual = residual.max(r.abs());
        // reduction route
        let d_b =
            metric::covariant_derivative_vector(chart, &qx_field, p, &frame.lee.b, StepProfile::Derived)?;
        let w_db: f64 = frame.lee.omega.iter().zip(&d_b).map(|(w, v)| w * v).sum();
        let wy: f64 = frame.lee.omega.iter().zip(&y).map(|(w, v)| w * v).sum();
        let wz: f64 = frame.lee.omega.iter().zip(&z).map(|(w, v)| w * v).sum();
        let reduced = 2.0 / (frame.lee.norm_b2 * frame.lee.norm_b2) * wy * wz * w_db;
        two_route = two_route.max((r - reduced).abs());
    }
    Ok((residual, two_route))
}

/// Leaf second fundamental form data at a point.
pub struct LeafGeometry {
    /// `α(e_i, e_j)` coefficient against B: `g(∇_{e_i} B, e_j)`.
    pub alpha: Vec<Vec<f64>>,
    /// Unit-normal-normalized coefficients `α̂ = α / |B|²`.
    pub alpha_hat: Vec<Vec<f64>>,
    /// `Σ_i g(∇_{e_i} B, e_i)`.
    pub div_along_leaf: f64,
    /// Mean curvature coefficient `h = divAlongLeaf / (2n−1)` (H' = h·B up
    /// to the 1/|B|² normalization choice recorded with α̂).
    pub h: f64,
    /// Max defect of the Weingarten normal component identity
    /// `g(∇_{e_i} B, B) = ½ e_i(ω(B))`.
    pub weingarten_residual: f64,
    pub norm_b2: f64,
}

pub fn leaf_geometry(chart: &ChartManifold, p: &Point) -> Result<LeafGeometry> {
    leaf_geometry_with(chart, p, &extracted_lee_field(chart))
}

pub fn leaf_geometry_with(
    chart: &ChartManifold,
    p: &Point,
    field: &LeeField,
) -> Result<LeafGeometry> {
    let frame = split_frame_with(chart, p, field)?;
    let dim = chart.dim();
    let m = dim - 1;
    let mut alpha = vec![vec![0.0; m]; m];
    let mut div_along_leaf = 0.0;
    let mut weingarten: f64 = 0.0;
    let n2_field = |q: &Point| Ok(field(q)?.norm_b2);
    for i in 0..m {
        let de = nabla_b(chart, p, field, &frame.leaf[i])?;
        for j in 0..m {
            alpha[i][j] = frame.inner(&de, &frame.leaf[j]);
        }
        div_along_leaf += alpha[i][i];
        // normal component vs ½ e_i(|B|²)
        let gdb = frame.inner(&de, &frame.lee.b);
        let mut ein2 = 0.0;
        for a in 0..dim {
            if frame.leaf[i][a].abs() > 1e-14 {
                ein2 += frame.leaf[i][a]
                    * chart.partial_with(&n2_field, p, a, StepProfile::Derived)?;
            }
        }
        weingarten = weingarten.max((gdb - 0.5 * ein2).abs());
    }
    let alpha_hat = alpha
        .iter()
        .map(|row| row.iter().map(|v| v / frame.lee.norm_b2).collect())
        .collect();
    Ok(LeafGeometry {
        alpha,
        alpha_hat,
        div_along_leaf,
        h: div_along_leaf / (dim as f64 - 1.0),
        weingarten_residual: weingarten,
        norm_b2: frame.lee.norm_b2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoliationFlags {
    pub minimal: bool,
    pub totally_geodesic: bool,
    pub killing_on_leaf: bool,
}

/// Minimality / totally-geodesic / Killing-on-leaf flags at a shared
/// tolerance, with the Killing flag computed from `L_B g` restricted to
/// leaf pairs as an independent route.
pub fn minimality_and_killing(
    chart: &ChartManifold,
    p: &Point,
    tol_flags: f64,
) -> Result<FoliationFlags> {
    let geom = leaf_geometry(chart, p)?;
    let frame = split_frame(chart, p)?;
    let lb = crate::conformal::lie_derivative_metric(chart, p)?;
    let m = chart.dim() - 1;
    let mut lb_leaf: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut v = 0.0;
            for a in 0..chart.dim() {
                for b in 0..chart.dim() {
                    v += frame.leaf[i][a] * frame.leaf[j][b] * lb.get(&[a, b]);
                }
            }
            lb_leaf = lb_leaf.max(v.abs());
        }
    }
    let alpha_max = geom
        .alpha
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(FoliationFlags {
        minimal: geom.div_along_leaf.abs() <= tol_flags,
        totally_geodesic: alpha_max <= tol_flags,
        killing_on_leaf: lb_leaf <= tol_flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn paper_chart() -> ChartManifold {
        zoo::find("paper-example").unwrap().chart
    }

    /// Flat chart with an imposed constant field B = ∂x1.
    fn constant_field() -> impl Fn(&Point) -> Result<LeeAt> {
        |q: &Point| {
            let dim = q.dim();
            let mut omega = vec![0.0; dim];
            omega[0] = 1.0;
            let mut b = vec![0.0; dim];
            b[0] = 1.0;
            Ok(LeeAt {
                omega,
                b,
                norm_b2: 1.0,
            })
        }
    }

    #[test]
    fn split_frame_frozen_on_warped_chart() {
        let m = paper_chart();
        let p = Point::new(vec![1.0, 2.0, 0.0, 0.0]);
        let f = split_frame(&m, &p).unwrap();
        // D = span{∂x1, ∂y1, ∂y2}; orthonormalized: 2∂x1, (1/8)∂y1, (1/8)∂y2
        let expect = [
            [2.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.125, 0.0],
            [0.0, 0.0, 0.0, 0.125],
        ];
        assert_eq!(f.leaf.len(), 3);
        for (i, e) in f.leaf.iter().enumerate() {
            for (j, &c) in e.iter().enumerate() {
                assert!((c - expect[i][j]).abs() < 1e-7, "e{i}[{j}] = {c}");
            }
        }
        // normal = B/|B| = x2 ∂x2 at x2 = 2
        assert!((f.normal[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn projector_algebra() {
        let m = paper_chart();
        let p = Point::new(vec![0.9, 1.3, 0.4, -0.6]);
        let f = split_frame(&m, &p).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..10 {
            let x: Vec<f64> = (0..4).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
            let qx = f.q(&x);
            let qpx = f.q_perp(&x);
            for k in 0..4 {
                assert!((qx[k] + qpx[k] - x[k]).abs() < 1e-10);
                assert!((f.q(&qx)[k] - qx[k]).abs() < 1e-10);
                assert!((f.q_perp(&qpx)[k] - qpx[k]).abs() < 1e-10);
                assert!(f.q(&qpx)[k].abs() < 1e-10);
                assert!(f.q_perp(&qx)[k].abs() < 1e-9);
            }
            // ω(QX) = 0
            let wqx: f64 = f.lee.omega.iter().zip(&qx).map(|(w, v)| w * v).sum();
            assert!(wqx.abs() < 1e-9);
        }
        // leaf frame orthonormal and in ker ω
        for i in 0..3 {
            let wei: f64 = f.lee.omega.iter().zip(&f.leaf[i]).map(|(w, v)| w * v).sum();
            assert!(wei.abs() < 1e-8);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((f.inner(&f.leaf[i], &f.leaf[j]) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn kahler_chart_is_degenerate() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(
            split_frame(&m, &p),
            Err(GeomError::DegenerateLeeField { .. })
        ));
    }

    #[test]
    fn autoparallel_on_positives_and_controls() {
        let m = paper_chart();
        let p = Point::new(vec![1.1, 1.8, 0.2, -0.3]);
        let r = autoparallel_residual(&m, &p).unwrap();
        assert!(r < 1e-5, "paper-example residual {r}");

        let gc = zoo::find("global-conformal").unwrap().chart;
        let q = Point::new(vec![0.3, -0.4, 0.6, 0.2]);
        let r2 = autoparallel_residual(&gc, &q).unwrap();
        assert!(r2 < 1e-5, "global-conformal residual {r2}");

        let sheared = zoo::find("sheared-control").unwrap().chart;
        let s = zoo::sample_points(&sheared, 1, 3).unwrap().remove(0);
        let r3 = autoparallel_residual(&sheared, &s).unwrap();
        assert!(r3 >= 1e-2, "sheared residual only {r3}");
    }

    #[test]
    fn constant_field_on_flat_chart_is_autoparallel() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.0, 0.1, -0.2, 0.3]);
        let f = constant_field();
        let r = autoparallel_residual_with(&m, &p, &f).unwrap();
        assert!(r < 1e-10);
        let geom = leaf_geometry_with(&m, &p, &f).unwrap();
        assert!(geom.div_along_leaf.abs() < 1e-10);
        for row in &geom.alpha {
            for v in row {
                assert!(v.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bundle_like_two_routes_agree() {
        let m = paper_chart();
        let p = Point::new(vec![1.2, 1.6, -0.1, 0.4]);
        let (res, two_route) = bundle_like_residual(&m, &p).unwrap();
        assert!(res < 1e-5, "bundle-like residual {res}");
        assert!(two_route < 1e-6, "two-route gap {two_route}");

        let sheared = zoo::find("sheared-control").unwrap().chart;
        let s = zoo::sample_points(&sheared, 1, 3).unwrap().remove(0);
        let (res_s, two_route_s) = bundle_like_residual(&sheared, &s).unwrap();
        assert!(res_s >= 1e-2, "sheared bundle-like residual only {res_s}");
        assert!(two_route_s < 1e-5, "sheared two-route gap {two_route_s}");
    }

    #[test]
    fn leaf_geometry_frozen_on_warped_chart() {
        // contributions g(∇_{e_i}B, e_i) = (−2, 6, 6): divAlongLeaf = 10,
        // h = 10/3; constant over the chart (hand Christoffel oracle)
        let m = paper_chart();
        for p in [
            Point::new(vec![1.0, 2.0, 0.0, 0.0]),
            Point::new(vec![0.7, 1.3, 0.5, -0.2]),
        ] {
            let geom = leaf_geometry(&m, &p).unwrap();
            assert!((geom.div_along_leaf - 10.0).abs() < 1e-4, "{}", geom.div_along_leaf);
            assert!((geom.h - 10.0 / 3.0).abs() < 1e-4);
            assert!((geom.alpha[0][0] - (-2.0)).abs() < 1e-4);
            assert!((geom.alpha[1][1] - 6.0).abs() < 1e-4);
            assert!((geom.alpha[2][2] - 6.0).abs() < 1e-4);
            assert!(geom.weingarten_residual < 1e-5);
            // symmetry of α
            for i in 0..3 {
                for j in 0..3 {
                    assert!((geom.alpha[i][j] - geom.alpha[j][i]).abs() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn minimality_flags() {
        let m = paper_chart();
        let p = Point::new(vec![1.0, 1.5, 0.2, 0.1]);
        let flags = minimality_and_killing(&m, &p, 1e-5).unwrap();
        assert!(!flags.minimal);
        assert!(!flags.totally_geodesic);
        assert!(!flags.killing_on_leaf);
        // totally geodesic ⇔ Killing on leaf (two-route flag equality)
        assert_eq!(flags.totally_geodesic, flags.killing_on_leaf);

        let gc = zoo::find("global-conformal").unwrap().chart;
        let q = Point::new(vec![0.2, 0.5, -0.3, 0.6]);
        let f2 = minimality_and_killing(&gc, &q, 1e-5).unwrap();
        assert!(!f2.minimal, "global-conformal leaves are not minimal");
        assert_eq!(f2.totally_geodesic, f2.killing_on_leaf);
    }

    #[test]
    fn global_conformal_leaf_divergence() {
        // g = exp(x1) δ, ω = dx1, B = exp(−x1) ∂x1;
        // divAlongLeaf = (3/2) exp(−x1) by hand
        let gc = zoo::find("global-conformal").unwrap().chart;
        let p = Point::new(vec![0.4, -0.1, 0.3, 0.5]);
        let geom = leaf_geometry(&gc, &p).unwrap();
        let want = 1.5 * (-0.4f64).exp();
        assert!(
            (geom.div_along_leaf - want).abs() < 1e-5,
            "{} vs {want}",
            geom.div_along_leaf
        );
    }
}
