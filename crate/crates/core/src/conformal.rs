//! Conformal change `g_t = exp(-f) g`: transformed connection, the P tensor,
//! Lie derivative identity, and the curvature / Ricci / scalar / star
//! transform residuals.
//!
//! Every transform residual is two-route: the formula side is evaluated from
//! the geometry of `g`, and the direct side is the curvature of a derived
//! chart whose metric entries are the composite expressions `exp(-f) g_ij`.
//! Residuals are max-norms over coordinate index tuples, relative to
//! `max(1, |direct side|)`.

use crate::chart::{ChartManifold, Point};
use crate::diff::StepProfile;
use crate::error::Result;
use crate::hermitian::{self, LeeData};
use crate::metric::{self, lower_riemann, ricci_from_up};
use crate::tensor::{TensorValue, Variance};
use nalgebra::DMatrix;

/// Pointwise data shared by all conformal checks.
pub struct ConformalData {
    pub lee: LeeData,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    /// `Γ^k_{ij}` of g.
    pub gamma: TensorValue,
    /// `(∇_i ω)_j`.
    pub nabla_omega: TensorValue,
    pub dim: usize,
    /// Half the dimension (the n of 2n).
    pub n: usize,
}

pub fn precompute(chart: &ChartManifold, p: &Point) -> Result<ConformalData> {
    let dim = chart.dim();
    let lee = hermitian::extract_lee_form(chart, p)?;
    let g = chart.metric_matrix(p)?;
    let ginv = chart.metric_inverse(p)?;
    let gamma = metric::christoffel(chart, p)?;
    let omega_field = |q: &Point| -> Result<Vec<f64>> {
        let l = hermitian::extract_lee_form(chart, q)?;
        Ok((0..dim).map(|i| l.omega.component(&[i])).collect())
    };
    let mut nabla_omega = TensorValue::zeros(dim, vec![Variance::Co, Variance::Co]);
    for i in 0..dim {
        let d = chart.partial_vec(&omega_field, p, i, StepProfile::Derived)?;
        for j in 0..dim {
            let mut v = d[j];
            for k in 0..dim {
                v -= gamma.get(&[k, i, j]) * lee.omega.component(&[k]);
            }
            nabla_omega.set(&[i, j], v);
        }
    }
    Ok(ConformalData {
        lee,
        g,
        ginv,
        gamma,
        nabla_omega,
        dim,
        n: dim / 2,
    })
}

impl ConformalData {
    pub fn omega(&self, i: usize) -> f64 {
        self.lee.omega.component(&[i])
    }

    /// `(∇_i B)^k = g^{kl} (∇_i ω)_l` (metric compatibility).
    pub fn nabla_b(&self, i: usize, k: usize) -> f64 {
        (0..self.dim)
            .map(|l| self.ginv[(k, l)] * self.nabla_omega.get(&[i, l]))
            .sum()
    }

    /// `div B = Σ_i (∇_i B)^i`.
    pub fn div_b(&self) -> f64 {
        (0..self.dim).map(|i| self.nabla_b(i, i)).sum()
    }
}

/// `∇^t_X Y` for constant coordinate-component fields X, Y:
/// `∇_X Y − ½{ω(X)Y + ω(Y)X − g(X,Y)B}`.
pub fn transformed_connection(
    chart: &ChartManifold,
    p: &Point,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>> {
    let data = precompute(chart, p)?;
    let dim = data.dim;
    let mut out = vec![0.0; dim];
    let wx: f64 = (0..dim).map(|i| data.omega(i) * x[i]).sum();
    let wy: f64 = (0..dim).map(|i| data.omega(i) * y[i]).sum();
    let mut gxy = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            gxy += data.g[(i, j)] * x[i] * y[j];
        }
    }
    for k in 0..dim {
        let mut nab = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                nab += x[i] * y[j] * data.gamma.get(&[k, i, j]);
            }
        }
        out[k] = nab - 0.5 * (wx * y[k] + wy * x[k] - gxy * data.lee.b[k]);
    }
    Ok(out)
}

/// Symmetric (0,2) tensor `P(X,Y) = (∇_X ω)Y + ½ω(X)ω(Y) − ¼|B|²g(X,Y)`
/// with its g-trace.
pub struct PTensor {
    pub tensor: TensorValue,
    pub trace_p: f64,
}

pub fn p_tensor_from(data: &ConformalData) -> PTensor {
    let dim = data.dim;
    let tensor = TensorValue::from_fn2(dim, [Variance::Co, Variance::Co], |i, j| {
        data.nabla_omega.get(&[i, j]) + 0.5 * data.omega(i) * data.omega(j)
            - 0.25 * data.lee.norm_b2 * data.g[(i, j)]
    });
    let mut trace_p = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            trace_p += data.ginv[(i, j)] * tensor.get(&[i, j]);
        }
    }
    PTensor { tensor, trace_p }
}

pub fn p_tensor(chart: &ChartManifold, p: &Point) -> Result<PTensor> {
    Ok(p_tensor_from(&precompute(chart, p)?))
}

/// `L_B g` by the coordinate formula
/// `(L_B g)_ij = B^k ∂_k g_ij + g_kj ∂_i B^k + g_ik ∂_j B^k`.
pub fn lie_derivative_metric(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    let dim = chart.dim();
    let lee = hermitian::extract_lee_form(chart, p)?;
    let b_field = |q: &Point| -> Result<Vec<f64>> { Ok(hermitian::extract_lee_form(chart, q)?.b) };
    let g_field = |q: &Point| -> Result<Vec<f64>> {
        Ok(chart.metric_matrix(q)?.as_slice().to_vec())
    };
    let g = chart.metric_matrix(p)?;
    let mut db = Vec::with_capacity(dim);
    let mut dg = Vec::with_capacity(dim);
    for a in 0..dim {
        db.push(chart.partial_vec(&b_field, p, a, StepProfile::Derived)?);
        dg.push(chart.partial_vec(&g_field, p, a, StepProfile::Smooth)?);
    }
    // column-major layout from nalgebra's as_slice
    let dget = |a: usize, i: usize, j: usize| dg[a][j * dim + i];
    Ok(TensorValue::from_fn2(
        dim,
        [Variance::Co, Variance::Co],
        |i, j| {
            let mut v = 0.0;
            for k in 0..dim {
                v += lee.b[k] * dget(k, i, j) + g[(k, j)] * db[i][k] + g[(i, k)] * db[j][k];
            }
            v
        },
    ))
}

/// Ricci star tensor `ρ*(X,Y) = Σ_i R(E_i, X, JY, JE_i)` computed by index
/// contraction (`Σ_i E_i^a (JE_i)^d = J^d_m g^{am}`), so it does not depend
/// on a frame choice.
pub fn ricci_star_from(
    low: &TensorValue,
    ginv: &DMatrix<f64>,
    jmat: &DMatrix<f64>,
) -> TensorValue {
    let dim = low.dim();
    TensorValue::from_fn2(dim, [Variance::Co, Variance::Co], |x, y| {
        let mut s = 0.0;
        for a in 0..dim {
            for c in 0..dim {
                for d in 0..dim {
                    for m in 0..dim {
                        s += ginv[(a, m)] * jmat[(d, m)] * jmat[(c, y)] * low.get(&[a, x, c, d]);
                    }
                }
            }
        }
        s
    })
}

pub fn ricci_star(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    let low = metric::riemann_lowered(chart, p)?;
    Ok(ricci_star_from(
        &low,
        &chart.metric_inverse(p)?,
        &chart.j_matrix(p)?,
    ))
}

/// `τ* = Σ_i ρ*(E_i, E_i) = g^{jk} ρ*_{jk}`.
pub fn scalar_star_from(rho_star: &TensorValue, ginv: &DMatrix<f64>) -> f64 {
    let dim = rho_star.dim();
    let mut s = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            s += ginv[(j, k)] * rho_star.get(&[j, k]);
        }
    }
    s
}

pub fn scalar_star(chart: &ChartManifold, p: &Point) -> Result<f64> {
    let rs = ricci_star(chart, p)?;
    Ok(scalar_star_from(&rs, &chart.metric_inverse(p)?))
}

/// Direct-route curvatures of `g` and of `g_t` at one point.
pub struct CurvaturePack {
    pub r_up: TensorValue,
    pub r_low: TensorValue,
    pub ricci: TensorValue,
    pub tau: f64,
    pub ricci_star: TensorValue,
    pub tau_star: f64,
    pub rt_up: TensorValue,
    pub rt_low: TensorValue,
    pub ricci_t: TensorValue,
    pub tau_t: f64,
    pub ricci_t_star: TensorValue,
    pub tau_t_star: f64,
    pub f: f64,
}

pub fn curvature_pack(chart: &ChartManifold, p: &Point) -> Result<CurvaturePack> {
    let conf = chart.conformal_chart()?;
    let f = chart.f_at(p)?;
    let g = chart.metric_matrix(p)?;
    let ginv = chart.metric_inverse(p)?;
    let jmat = chart.j_matrix(p)?;
    let up = metric::riemann_up(chart, p)?;
    let r_low = lower_riemann(&up, &g);
    let ricci = ricci_from_up(&up);
    let tau = {
        let mut s = 0.0;
        for j in 0..chart.dim() {
            for k in 0..chart.dim() {
                s += ginv[(j, k)] * ricci.get(&[j, k]);
            }
        }
        s
    };
    let rs = ricci_star_from(&r_low, &ginv, &jmat);
    let tau_star = scalar_star_from(&rs, &ginv);
    let gt = conf.metric_matrix(p)?;
    let gt_inv = conf.metric_inverse(p)?;
    let rt_up = metric::riemann_up(&conf, p)?;
    let rt_low = lower_riemann(&rt_up, &gt);
    let ricci_t = ricci_from_up(&rt_up);
    let tau_t = {
        let mut s = 0.0;
        for j in 0..chart.dim() {
            for k in 0..chart.dim() {
                s += gt_inv[(j, k)] * ricci_t.get(&[j, k]);
            }
        }
        s
    };
    let rts = ricci_star_from(&rt_low, &gt_inv, &jmat);
    let tau_t_star = scalar_star_from(&rts, &gt_inv);
    Ok(CurvaturePack {
        r_up: up,
        r_low,
        ricci,
        tau,
        ricci_star: rs,
        tau_star,
        rt_up,
        rt_low,
        ricci_t,
        tau_t,
        ricci_t_star: rts,
        tau_t_star,
        f,
    })
}

/// Term-group scales for mutation testing of the curvature transform
/// formula; all ones is the formula as stated.
pub const UNIT_SCALES: [f64; 6] = [1.0; 6];

/// Right-hand side of the (1,3) curvature transform on the basis triple
/// `(∂i, ∂j, ∂k)`, with each of the six term groups multiplied by its scale:
/// 1. `+½{(∇_Y ω)Z + ½ω(Y)ω(Z)} X`
/// 2. `−½{(∇_X ω)Z + ½ω(X)ω(Z)} Y`
/// 3. `+½ g(Y,Z){∇_X B + ½ω(X)B}`
/// 4. `−½ g(X,Z){∇_Y B + ½ω(Y)B}`
/// 5. `−¼|B|² g(Y,Z) X`
/// 6. `+¼|B|² g(X,Z) Y`
fn transform_rhs(
    data: &ConformalData,
    r_up: &TensorValue,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    s: &[f64; 6],
) -> f64 {
    let mut v = r_up.get(&[l, i, j, k]);
    let tj = data.nabla_omega.get(&[j, k]) + 0.5 * data.omega(j) * data.omega(k);
    let ti = data.nabla_omega.get(&[i, k]) + 0.5 * data.omega(i) * data.omega(k);
    if l == i {
        v += s[0] * 0.5 * tj;
        v -= s[4] * 0.25 * data.lee.norm_b2 * data.g[(j, k)];
    }
    if l == j {
        v -= s[1] * 0.5 * ti;
        v += s[5] * 0.25 * data.lee.norm_b2 * data.g[(i, k)];
    }
    v += s[2] * 0.5 * data.g[(j, k)] * (data.nabla_b(i, l) + 0.5 * data.omega(i) * data.lee.b[l]);
    v -= s[3] * 0.5 * data.g[(i, k)] * (data.nabla_b(j, l) + 0.5 * data.omega(j) * data.lee.b[l]);
    v
}

/// All conformal transform residuals at one point (each max over index
/// tuples, relative to `max(1, |direct|)`).
pub struct TransformChecks {
    /// (1,3) curvature transform vs direct `R^t`.
    pub curvature: f64,
    /// Lowered form `exp(f) R^t(X,Y,Z,W) = R + ½{gP antisymmetrization}`.
    pub curvature_lowered: f64,
    /// Antisymmetry of the evaluated formula right-hand side in (X, Y).
    pub rhs_antisymmetry: f64,
    pub ricci: f64,
    pub ricci_star: f64,
    pub scalar: f64,
    pub scalar_star: f64,
    /// trace P vs `div B + ½(1−n)|B|²` (independent frame-sum route).
    pub trace_p_two_route: f64,
    pub trace_p: f64,
    pub div_b: f64,
}

pub fn transform_checks(chart: &ChartManifold, p: &Point) -> Result<TransformChecks> {
    transform_checks_with_scales(chart, p, &UNIT_SCALES)
}

pub fn transform_checks_with_scales(
    chart: &ChartManifold,
    p: &Point,
    scales: &[f64; 6],
) -> Result<TransformChecks> {
    let data = precompute(chart, p)?;
    let pack = curvature_pack(chart, p)?;
    let pt = p_tensor_from(&data);
    let dim = data.dim;
    let n = data.n as f64;

    let scale_13 = pack.rt_up.max_abs().max(1.0);
    let mut curvature: f64 = 0.0;
    let mut rhs_antisymmetry: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let rhs = transform_rhs(&data, &pack.r_up, i, j, k, l, scales);
                    let direct = pack.rt_up.get(&[l, i, j, k]);
                    curvature = curvature.max((direct - rhs).abs());
                    let swapped = transform_rhs(&data, &pack.r_up, j, i, k, l, scales);
                    rhs_antisymmetry = rhs_antisymmetry.max((rhs + swapped).abs());
                }
            }
        }
    }
    curvature /= scale_13;
    rhs_antisymmetry /= scale_13;

    // lowered display: exp(f) g(R^t(X,Y)Z, W) = R_{ijkl}
    //   + ½{g_il P_jk − g_jl P_ik} + ½{g_jk P_il − g_ik P_jl}
    let scale_low = pack.r_low.max_abs().max(1.0);
    let mut curvature_lowered: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    // g_t-lowered direct R^t times exp(f) = g-lowered R^t
                    let direct = pack.f.exp() * pack.rt_low.get(&[i, j, k, l]);
                    let rhs = pack.r_low.get(&[i, j, k, l])
                        + 0.5
                            * (data.g[(i, l)] * pt.tensor.get(&[j, k])
                                - data.g[(j, l)] * pt.tensor.get(&[i, k]))
                        + 0.5
                            * (data.g[(j, k)] * pt.tensor.get(&[i, l])
                                - data.g[(i, k)] * pt.tensor.get(&[j, l]));
                    curvature_lowered = curvature_lowered.max((direct - rhs).abs());
                }
            }
        }
    }
    curvature_lowered /= scale_low;

    // ρ^t = ρ + (n−1)P + ½ g trace P
    let mut ricci: f64 = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            let rhs = pack.ricci.get(&[j, k])
                + (n - 1.0) * pt.tensor.get(&[j, k])
                + 0.5 * data.g[(j, k)] * pt.trace_p;
            ricci = ricci.max((pack.ricci_t.get(&[j, k]) - rhs).abs());
        }
    }
    ricci /= pack.ricci_t.max_abs().max(1.0);

    // ρ^{t*} = ρ* + ½{P(X,Y) + P(JX,JY)}
    let jmat = chart.j_matrix(p)?;
    let mut ricci_star: f64 = 0.0;
    for x in 0..dim {
        for y in 0..dim {
            let mut pjj = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    pjj += jmat[(a, x)] * jmat[(b, y)] * pt.tensor.get(&[a, b]);
                }
            }
            let rhs = pack.ricci_star.get(&[x, y]) + 0.5 * (pt.tensor.get(&[x, y]) + pjj);
            ricci_star = ricci_star.max((pack.ricci_t_star.get(&[x, y]) - rhs).abs());
        }
    }
    ricci_star /= pack.ricci_t_star.max_abs().max(1.0);

    // exp(−f) τ^t = τ + (2n−1) trace P
    let lhs = (-pack.f).exp() * pack.tau_t;
    let rhs = pack.tau + (2.0 * n - 1.0) * pt.trace_p;
    let scalar = (lhs - rhs).abs() / lhs.abs().max(1.0);

    // exp(−f) τ^{t*} = τ* + trace P
    let lhs_s = (-pack.f).exp() * pack.tau_t_star;
    let rhs_s = pack.tau_star + pt.trace_p;
    let scalar_star = (lhs_s - rhs_s).abs() / lhs_s.abs().max(1.0);

    let div_b = data.div_b();
    let trace_indep = div_b + 0.5 * (1.0 - n) * data.lee.norm_b2;
    let trace_p_two_route = (pt.trace_p - trace_indep).abs();

    Ok(TransformChecks {
        curvature,
        curvature_lowered,
        rhs_antisymmetry,
        ricci,
        ricci_star,
        scalar,
        scalar_star,
        trace_p_two_route,
        trace_p: pt.trace_p,
        div_b,
    })
}

/// `‖df − ω‖∞` at `p`: validates that the stored conformal exponent matches
/// the canonical Lee form.
pub fn check_f_matches_lee(chart: &ChartManifold, p: &Point) -> Result<f64> {
    let lee = hermitian::extract_lee_form(chart, p)?;
    let ff = |q: &Point| chart.f_at(q);
    let mut r: f64 = 0.0;
    for a in 0..chart.dim() {
        let dfa = chart.partial(&ff, p, a)?;
        r = r.max((dfa - lee.omega.component(&[a])).abs());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn paper_chart() -> ChartManifold {
        zoo::find("paper-example").unwrap().chart
    }

    #[test]
    fn kahler_connection_is_unchanged() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.1, 0.2, -0.3, 0.4]);
        let v = transformed_connection(&m, &p, &[1.0, 0.5, 0.0, -1.0], &[0.0, 1.0, 2.0, 0.0])
            .unwrap();
        for c in v {
            assert!(c.abs() < 1e-9);
        }
    }

    #[test]
    fn transformed_connection_hand_value() {
        // X = Y = ∂x1 at x2 = 2: ω(∂x1) = 0, so
        // ∇^t_X Y = ∇_X Y + ½ g(∂x1, ∂x1) B = Γ^k_{11} + ½ (1/x2²)(2 x2 ∂x2)
        let m = paper_chart();
        let p = Point::new(vec![1.0, 2.0, 0.0, 0.0]);
        let x = [1.0, 0.0, 0.0, 0.0];
        let v = transformed_connection(&m, &p, &x, &x).unwrap();
        // Γ^2_{11} = 1/x2 = 0.5; correction = ½·(1/4)·4 = 0.5 → 1.0 total
        assert!((v[1] - 1.0).abs() < 1e-6, "{v:?}");
        for i in [0, 2, 3] {
            assert!(v[i].abs() < 1e-6);
        }
    }

    #[test]
    fn transformed_connection_matches_conformal_christoffel() {
        let m = paper_chart();
        let conf = m.conformal_chart().unwrap();
        let p = Point::new(vec![0.8, 1.6, 0.2, -0.5]);
        let gt = metric::christoffel(&conf, &p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut x = [0.0; 4];
                x[i] = 1.0;
                let mut y = [0.0; 4];
                y[j] = 1.0;
                let v = transformed_connection(&m, &p, &x, &y).unwrap();
                for k in 0..4 {
                    assert!(
                        (v[k] - gt.get(&[k, i, j])).abs() < 1e-5,
                        "({i},{j},{k}): {} vs {}",
                        v[k],
                        gt.get(&[k, i, j])
                    );
                }
            }
        }
    }

    #[test]
    fn p_tensor_vanishes_on_kahler() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.3, -0.1, 0.2, 0.4]);
        let pt = p_tensor(&m, &p).unwrap();
        assert!(pt.tensor.max_abs() < 1e-9);
        assert!(pt.trace_p.abs() < 1e-9);
    }

    #[test]
    fn p_tensor_symmetry_and_trace_two_route() {
        let m = paper_chart();
        for p in zoo::sample_points(&m, 5, 23).unwrap() {
            let data = precompute(&m, &p).unwrap();
            let pt = p_tensor_from(&data);
            assert!(pt.tensor.symmetry_residual() < 1e-6);
            let indep = data.div_b() + 0.5 * (1.0 - data.n as f64) * data.lee.norm_b2;
            assert!(
                (pt.trace_p - indep).abs() < 1e-6,
                "trace {} vs {}",
                pt.trace_p,
                indep
            );
        }
    }

    #[test]
    fn paper_chart_trace_p_frozen() {
        // div B = 10 and trace P = 8, constant over the warped chart
        // (hand computation from the frozen Christoffel values)
        let m = paper_chart();
        let p = Point::new(vec![1.2, 1.7, 0.4, -0.2]);
        let data = precompute(&m, &p).unwrap();
        let pt = p_tensor_from(&data);
        assert!((data.div_b() - 10.0).abs() < 1e-5, "div B = {}", data.div_b());
        assert!((pt.trace_p - 8.0).abs() < 1e-5, "trace P = {}", pt.trace_p);
    }

    #[test]
    fn lie_derivative_equals_twice_nabla_omega() {
        let m = paper_chart();
        let p = Point::new(vec![1.1, 1.9, -0.2, 0.6]);
        let lb = lie_derivative_metric(&m, &p).unwrap();
        let data = precompute(&m, &p).unwrap();
        let mut r: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                r = r.max((lb.get(&[i, j]) - 2.0 * data.nabla_omega.get(&[i, j])).abs());
            }
        }
        assert!(r < 1e-5, "residual {r}");
    }

    #[test]
    fn transform_checks_pass_on_conformal_fixtures() {
        for name in ["paper-example", "global-conformal", "flat-kahler"] {
            let m = zoo::find(name).unwrap().chart;
            let p = zoo::sample_points(&m, 2, 31).unwrap().remove(1);
            let t = transform_checks(&m, &p).unwrap();
            assert!(t.curvature < 1e-4, "{name}: curvature {}", t.curvature);
            assert!(
                t.curvature_lowered < 1e-4,
                "{name}: lowered {}",
                t.curvature_lowered
            );
            assert!(t.rhs_antisymmetry < 1e-6, "{name}: antisym {}", t.rhs_antisymmetry);
            assert!(t.ricci < 1e-4, "{name}: ricci {}", t.ricci);
            assert!(t.ricci_star < 1e-4, "{name}: ricci* {}", t.ricci_star);
            assert!(t.scalar < 1e-4, "{name}: scalar {}", t.scalar);
            assert!(t.scalar_star < 1e-4, "{name}: scalar* {}", t.scalar_star);
            assert!(t.trace_p_two_route < 1e-6, "{name}: trace {}", t.trace_p_two_route);
        }
    }

    #[test]
    fn kahler_fixture_residuals_are_tiny() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.2, -0.4, 0.1, 0.3]);
        let t = transform_checks(&m, &p).unwrap();
        assert!(t.curvature < 1e-10);
        assert!(t.ricci < 1e-10);
        assert!(t.scalar < 1e-10);
        assert!(t.scalar_star < 1e-10);
    }

    #[test]
    fn every_term_group_mutation_is_detected() {
        let m = paper_chart();
        let p = Point::new(vec![1.0, 1.5, 0.2, -0.3]);
        for g in 0..6 {
            let mut s = UNIT_SCALES;
            s[g] = 1.5;
            let t = transform_checks_with_scales(&m, &p, &s).unwrap();
            assert!(
                t.curvature > 1e-2,
                "mutated group {g} undetected: residual {}",
                t.curvature
            );
        }
    }

    #[test]
    fn global_conformal_rescaled_metric_is_flat() {
        let m = zoo::find("global-conformal").unwrap().chart;
        let conf = m.conformal_chart().unwrap();
        let p = Point::new(vec![0.3, -0.6, 0.2, 0.8]);
        // exp(-x1)·exp(x1) is 1 only to rounding; the nested FD amplifies
        // that to ~1e-7 in the curvature
        assert!(metric::riemann_up(&conf, &p).unwrap().max_abs() < 1e-6);
    }

    #[test]
    fn ricci_star_vanishes_on_flat_kahler() {
        let m = zoo::find("flat-kahler").unwrap().chart;
        let p = Point::new(vec![0.0, 0.5, -0.5, 0.2]);
        let rs = ricci_star(&m, &p).unwrap();
        assert!(rs.max_abs() < 1e-10);
        assert!(scalar_star(&m, &p).unwrap().abs() < 1e-10);
    }

    #[test]
    fn scalar_star_two_route_frame_vs_contraction() {
        let m = paper_chart();
        let p = Point::new(vec![1.3, 1.4, 0.1, 0.5]);
        let g = m.metric_matrix(&p).unwrap();
        let low = metric::riemann_lowered(&m, &p).unwrap();
        let jmat = m.j_matrix(&p).unwrap();
        let rs = ricci_star_from(&low, &m.metric_inverse(&p).unwrap(), &jmat);
        let tau_star = scalar_star_from(&rs, &m.metric_inverse(&p).unwrap());
        // frame route: Σ_{i,j} R(E_i, E_j, JE_j, JE_i)
        let frame = metric::orthonormal_frame(&g).unwrap();
        let mut tau2 = 0.0;
        for ei in &frame {
            for ej in &frame {
                let jei: Vec<f64> =
                    (0..4).map(|a| (0..4).map(|b| jmat[(a, b)] * ei[b]).sum()).collect();
                let jej: Vec<f64> =
                    (0..4).map(|a| (0..4).map(|b| jmat[(a, b)] * ej[b]).sum()).collect();
                for a in 0..4 {
                    for b in 0..4 {
                        for c in 0..4 {
                            for d in 0..4 {
                                tau2 += ei[a] * ej[b] * jej[c] * jei[d] * low.get(&[a, b, c, d]);
                            }
                        }
                    }
                }
            }
        }
        assert!(
            (tau_star - tau2).abs() < 1e-5 * tau_star.abs().max(1.0),
            "{tau_star} vs {tau2}"
        );
    }

    #[test]
    fn stored_f_matches_lee_form() {
        for name in ["paper-example", "global-conformal", "flat-kahler"] {
            let m = zoo::find(name).unwrap().chart;
            let p = zoo::sample_points(&m, 1, 7).unwrap().remove(0);
            let r = check_f_matches_lee(&m, &p).unwrap();
            assert!(r < 1e-6, "{name}: df vs ω residual {r}");
        }
    }
}
