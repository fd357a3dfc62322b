//! Levi-Civita connection and curvature from the metric expressions.
//!
//! Conventions: `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_{[X,Y]} Z`, index form
//! `R^l_{ijk} = ∂_i Γ^l_{jk} − ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} −
//! Γ^l_{jm} Γ^m_{ik}`, lowered `R_{ijkl} = g_{lm} R^m_{ijk}`, Ricci
//! `ρ_{jk} = R^i_{ijk}` (positive on the round sphere).

use crate::chart::{ChartManifold, Point};
use crate::diff::StepProfile;
use crate::error::{GeomError, Result};
use crate::tensor::{TensorValue, Variance};
use crate::tol;
use nalgebra::DVector;

/// Christoffel symbols of the second kind, `Γ^k_{ij}` stored with the upper
/// index first. Metric first partials come from the smooth-profile FD oracle.
pub fn christoffel(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    let dim = chart.dim();
    let ginv = chart.metric_inverse(p)?;
    // dg[a][i][j] = d(g_ij)/dx^a
    let field = |q: &Point| -> Result<Vec<f64>> {
        Ok(chart.metric_matrix(q)?.as_slice().to_vec())
    };
    let mut dg = Vec::with_capacity(dim);
    for a in 0..dim {
        dg.push(chart.partial_vec(&field, p, a, StepProfile::Smooth)?);
    }
    // nalgebra's as_slice is column-major: entry (i, j) sits at j*dim + i
    let dget = |a: usize, i: usize, j: usize| dg[a][j * dim + i];
    let mut gamma = TensorValue::zeros(dim, vec![Variance::Contra, Variance::Co, Variance::Co]);
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..=i {
                let mut s = 0.0;
                for l in 0..dim {
                    s += ginv[(k, l)] * (dget(i, j, l) + dget(j, i, l) - dget(l, i, j));
                }
                let v = 0.5 * s;
                gamma.set(&[k, i, j], v);
                gamma.set(&[k, j, i], v);
            }
        }
    }
    Ok(gamma)
}

/// `∇_X Y` at `p` for a vector field `Y` given by its component functions and
/// a constant coordinate direction `X`. The step profile controls the FD step
/// for the directional derivative of `Y` (use `Derived` when `Y` itself is a
/// finite-difference result).
pub fn covariant_derivative_vector(
    chart: &ChartManifold,
    field: &crate::chart::VecField,
    p: &Point,
    x_dir: &[f64],
    profile: StepProfile,
) -> Result<Vec<f64>> {
    let dim = chart.dim();
    let gamma = christoffel(chart, p)?;
    let y = field(p)?;
    let mut out = vec![0.0; dim];
    for a in 0..dim {
        if x_dir[a] == 0.0 {
            continue;
        }
        let dy = chart.partial_vec(field, p, a, profile)?;
        for k in 0..dim {
            let mut v = dy[k];
            for m in 0..dim {
                v += gamma.get(&[k, a, m]) * y[m];
            }
            out[k] += x_dir[a] * v;
        }
    }
    Ok(out)
}

/// Riemann tensor `R^l_{ijk}` with the upper index first. `∂Γ` uses the
/// derived-field step profile because Γ is itself an FD result.
pub fn riemann_up(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    let dim = chart.dim();
    let gamma = christoffel(chart, p)?;
    let field = |q: &Point| -> Result<Vec<f64>> {
        Ok(christoffel(chart, q)?.data().to_vec())
    };
    let mut dgamma = Vec::with_capacity(dim);
    for a in 0..dim {
        dgamma.push(chart.partial_vec(&field, p, a, StepProfile::Derived)?);
    }
    let dget = |a: usize, l: usize, i: usize, j: usize| dgamma[a][(l * dim + i) * dim + j];
    let mut r = TensorValue::zeros(
        dim,
        vec![Variance::Contra, Variance::Co, Variance::Co, Variance::Co],
    );
    for l in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut v = dget(i, l, j, k) - dget(j, l, i, k);
                    for m in 0..dim {
                        v += gamma.get(&[l, i, m]) * gamma.get(&[m, j, k])
                            - gamma.get(&[l, j, m]) * gamma.get(&[m, i, k]);
                    }
                    r.set(&[l, i, j, k], v);
                }
            }
        }
    }
    Ok(r)
}

/// Fully lowered Riemann tensor `R_{ijkl} = g_{lm} R^m_{ijk}`.
pub fn riemann_lowered(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    let up = riemann_up(chart, p)?;
    Ok(lower_riemann(&up, &chart.metric_matrix(p)?))
}

/// Lower the first (contravariant) slot of `R^m_{ijk}` into the last
/// position of `R_{ijkl}` with a given metric matrix.
pub fn lower_riemann(up: &TensorValue, g: &nalgebra::DMatrix<f64>) -> TensorValue {
    let dim = up.dim();
    let mut low = TensorValue::zeros(dim, vec![Variance::Co; 4]);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let mut v = 0.0;
                    for m in 0..dim {
                        v += g[(l, m)] * up.get(&[m, i, j, k]);
                    }
                    low.set(&[i, j, k, l], v);
                }
            }
        }
    }
    low
}

/// Ricci tensor `ρ_{jk} = R^i_{ijk}` from a precomputed `R^l_{ijk}`.
pub fn ricci_from_up(up: &TensorValue) -> TensorValue {
    let dim = up.dim();
    TensorValue::from_fn2(dim, [Variance::Co, Variance::Co], |j, k| {
        (0..dim).map(|i| up.get(&[i, i, j, k])).sum()
    })
}

pub fn ricci(chart: &ChartManifold, p: &Point) -> Result<TensorValue> {
    Ok(ricci_from_up(&riemann_up(chart, p)?))
}

/// Scalar curvature `τ = g^{jk} ρ_{jk}`.
pub fn scalar(chart: &ChartManifold, p: &Point) -> Result<f64> {
    let rc = ricci(chart, p)?;
    let ginv = chart.metric_inverse(p)?;
    let dim = chart.dim();
    let mut s = 0.0;
    for j in 0..dim {
        for k in 0..dim {
            s += ginv[(j, k)] * rc.get(&[j, k]);
        }
    }
    Ok(s)
}

/// g-orthonormal frame by Gram-Schmidt over the coordinate basis in
/// ascending index order (deterministic). Returns the frame vectors'
/// coordinate components, one `Vec` per frame vector.
pub fn orthonormal_frame(g: &nalgebra::DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    let dim = g.nrows();
    let inner = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        for e in &frame {
            let c = inner(&v, e);
            v -= e * c;
        }
        let n2 = inner(&v, &v);
        if n2 < tol::PIVOT {
            return Err(GeomError::DegeneratePivot { step: i, norm: n2 });
        }
        frame.push(v / n2.sqrt());
    }
    Ok(frame.into_iter().map(|v| v.as_slice().to_vec()).collect())
}

/// First Bianchi residual `max |R_{ijkl} + R_{jkil} + R_{kijl}|` of a
/// lowered Riemann tensor.
pub fn bianchi_residual(low: &TensorValue) -> f64 {
    let dim = low.dim();
    let mut r: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let s = low.get(&[i, j, k, l])
                        + low.get(&[j, k, i, l])
                        + low.get(&[k, i, j, l]);
                    r = r.max(s.abs());
                }
            }
        }
    }
    r
}

/// Symmetry defects of a lowered Riemann tensor: antisymmetry in (i,j),
/// antisymmetry in (k,l), and pair symmetry (ij)<->(kl).
pub fn riemann_symmetry_residuals(low: &TensorValue) -> (f64, f64, f64) {
    let dim = low.dim();
    let (mut a, mut b, mut c): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let v = low.get(&[i, j, k, l]);
                    a = a.max((v + low.get(&[j, i, k, l])).abs());
                    b = b.max((v + low.get(&[i, j, l, k])).abs());
                    c = c.max((v - low.get(&[k, l, i, j])).abs());
                }
            }
        }
    }
    (a, b, c)
}
