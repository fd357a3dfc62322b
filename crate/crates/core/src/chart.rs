//! Coordinate charts: metric and structure component expressions, domain
//! constraints, and the numerical differentiation oracle that every
//! downstream derivative flows through.

use crate::diff::{self, StepProfile};
use crate::error::{GeomError, Result};
use crate::expr::Expr;
use crate::tensor::{TensorValue, Variance};
use nalgebra::DMatrix;

/// A point of a chart: a coordinate vector of length 2n.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Copy with one coordinate replaced.
    pub fn with_coord(&self, axis: usize, value: f64) -> Point {
        let mut c = self.0.clone();
        c[axis] = value;
        Point(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Gt,
    Lt,
}

/// An open domain condition `lhs > rhs` or `lhs < rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub lhs: Expr,
    pub op: Cmp,
    pub rhs: Expr,
    pub source: String,
}

impl Constraint {
    pub fn holds(&self, coords: &[f64]) -> bool {
        let (l, r) = match (self.lhs.eval(coords), self.rhs.eval(coords)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => return false,
        };
        match self.op {
            Cmp::Gt => l > r,
            Cmp::Lt => l < r,
        }
    }
}

pub type ScalarField<'a> = dyn Fn(&Point) -> Result<f64> + 'a;
pub type VecField<'a> = dyn Fn(&Point) -> Result<Vec<f64>> + 'a;

/// A coordinate chart of an even-dimensional manifold: component
/// expressions for the metric, the almost complex structure, and an
/// optional local conformal exponent.
///
/// Immutable after construction; all evaluations are pure.
#[derive(Debug, Clone)]
pub struct ChartManifold {
    pub name: String,
    dim: usize,
    pub coord_names: Vec<String>,
    /// Full symmetric 2n x 2n array of entries (unspecified entries are 0).
    pub metric_exprs: Vec<Vec<Expr>>,
    /// Components J^i_j (row = output index) in the coordinate basis.
    /// `None` for metric-only test charts.
    pub j_exprs: Option<Vec<Vec<Expr>>>,
    /// Local conformal exponent f with `exp(-f) g` the rescaled metric.
    pub f_expr: Option<Expr>,
    pub constraints: Vec<Constraint>,
    /// Per-coordinate sampling box for random domain points.
    pub sample_box: Vec<(f64, f64)>,
}

impl ChartManifold {
    pub fn new(
        name: impl Into<String>,
        coord_names: Vec<String>,
        metric_exprs: Vec<Vec<Expr>>,
        j_exprs: Option<Vec<Vec<Expr>>>,
        f_expr: Option<Expr>,
        constraints: Vec<Constraint>,
        sample_box: Vec<(f64, f64)>,
    ) -> Result<Self> {
        let dim = coord_names.len();
        if dim < 4 || dim % 2 != 0 {
            return Err(GeomError::Manifest {
                line: 0,
                message: format!("dimension must be even and >= 4, got {dim}"),
            });
        }
        if metric_exprs.len() != dim || metric_exprs.iter().any(|r| r.len() != dim) {
            return Err(GeomError::Manifest {
                line: 0,
                message: "metric array must be 2n x 2n".into(),
            });
        }
        // index-wise symmetry of the metric as expressions
        for i in 0..dim {
            for j in 0..i {
                if metric_exprs[i][j] != metric_exprs[j][i] {
                    return Err(GeomError::Manifest {
                        line: 0,
                        message: format!(
                            "metric entries g_{}_{} and g_{}_{} differ as expressions",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        ),
                    });
                }
            }
        }
        if let Some(j) = &j_exprs {
            if j.len() != dim || j.iter().any(|r| r.len() != dim) {
                return Err(GeomError::Manifest {
                    line: 0,
                    message: "J array must be 2n x 2n".into(),
                });
            }
        }
        let sample_box = if sample_box.is_empty() {
            vec![(-1.0, 1.0); dim]
        } else {
            sample_box
        };
        Ok(ChartManifold {
            name: name.into(),
            dim,
            coord_names,
            metric_exprs,
            j_exprs,
            f_expr,
            constraints,
            sample_box,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half the chart dimension (the `n` of 2n).
    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(GeomError::DimensionMismatch {
                got: p.dim(),
                expected: self.dim,
            });
        }
        Ok(())
    }

    /// Raw metric matrix without definiteness checks (internal fast path).
    pub fn metric_matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.metric_exprs[i][j].eval(p.coords())?;
            }
        }
        Ok(m)
    }

    /// Metric as a (0,2) tensor, verified symmetric positive definite.
    pub fn metric_at(&self, p: &Point) -> Result<TensorValue> {
        let m = self.metric_matrix(p)?;
        if m.clone().cholesky().is_none() {
            return Err(GeomError::NotPositiveDefinite);
        }
        Ok(TensorValue::from_matrix(&m, [Variance::Co, Variance::Co]))
    }

    pub fn metric_inverse(&self, p: &Point) -> Result<DMatrix<f64>> {
        let m = self.metric_matrix(p)?;
        m.try_inverse().ok_or(GeomError::SingularMetric)
    }

    pub fn j_matrix(&self, p: &Point) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let j = self.j_exprs.as_ref().ok_or(GeomError::Manifest {
            line: 0,
            message: format!("chart `{}` has no almost complex structure", self.name),
        })?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                m[(i, k)] = j[i][k].eval(p.coords())?;
            }
        }
        Ok(m)
    }

    /// J as a (1,1) tensor, upper (output) slot first.
    pub fn j_at(&self, p: &Point) -> Result<TensorValue> {
        Ok(TensorValue::from_matrix(
            &self.j_matrix(p)?,
            [Variance::Contra, Variance::Co],
        ))
    }

    pub fn f_at(&self, p: &Point) -> Result<f64> {
        self.check_point(p)?;
        match &self.f_expr {
            Some(f) => f.eval(p.coords()),
            None => Err(GeomError::MissingConformalExponent),
        }
    }

    /// True when every constraint holds at all corners of the closed box of
    /// radius `r` around `p` (stencil safety margin).
    pub fn contains_with_margin(&self, p: &Point, r: f64) -> bool {
        if p.dim() != self.dim {
            return false;
        }
        let mut corner = vec![0.0; self.dim];
        for mask in 0u32..(1 << self.dim) {
            for a in 0..self.dim {
                corner[a] = p.0[a] + if mask & (1 << a) != 0 { r } else { -r };
            }
            if !self.constraints.iter().all(|c| c.holds(&corner)) {
                return false;
            }
        }
        true
    }

    fn stencil_check(&self, p: &Point, axis: usize, h: f64) -> Result<()> {
        for s in [-4.0, 4.0] {
            let q = p.with_coord(axis, p.0[axis] + s * h);
            if !self.constraints.iter().all(|c| c.holds(q.coords())) {
                return Err(GeomError::StencilOutOfDomain { axis });
            }
        }
        Ok(())
    }

    /// First partial of a scalar field along one coordinate axis: order-4
    /// central difference with one Richardson extrapolation step.
    pub fn partial(&self, field: &ScalarField, p: &Point, axis: usize) -> Result<f64> {
        self.partial_with(field, p, axis, StepProfile::Smooth)
    }

    /// First partial with an explicit step profile (`Derived` for fields
    /// that are themselves finite-difference results).
    pub fn partial_with(
        &self,
        field: &ScalarField,
        p: &Point,
        axis: usize,
        profile: StepProfile,
    ) -> Result<f64> {
        self.check_point(p)?;
        let h = profile.step(p.0[axis]);
        self.stencil_check(p, axis, h)?;
        diff::richardson4(|x| field(&p.with_coord(axis, x)), p.0[axis], h)
    }

    /// Component-wise first partial of a vector-valued field.
    pub fn partial_vec(
        &self,
        field: &VecField,
        p: &Point,
        axis: usize,
        profile: StepProfile,
    ) -> Result<Vec<f64>> {
        self.check_point(p)?;
        let h = profile.step(p.0[axis]);
        self.stencil_check(p, axis, h)?;
        diff::richardson4_vec(|x| field(&p.with_coord(axis, x)), p.0[axis], h)
    }

    /// Second partial via nested first differences with independently tuned
    /// steps, averaged over both nesting orders so it is symmetric in
    /// `(i, j)` bitwise.
    pub fn second_partial(
        &self,
        field: &ScalarField,
        p: &Point,
        axis_i: usize,
        axis_j: usize,
    ) -> Result<f64> {
        self.check_point(p)?;
        let nest = |outer: usize, inner: usize| -> Result<f64> {
            let h = StepProfile::Nested.step(p.0[outer]);
            self.stencil_check(p, outer, h)?;
            diff::richardson4(
                |x| {
                    let q = p.with_coord(outer, x);
                    self.partial(field, &q, inner)
                },
                p.0[outer],
                h,
            )
        };
        let a = nest(axis_i, axis_j)?;
        let b = nest(axis_j, axis_i)?;
        Ok(0.5 * (a + b))
    }

    /// Derived chart whose metric entries are `exp(-f) * g_ij` as composite
    /// expressions; this is the direct route for every conformal two-route
    /// check.
    pub fn conformal_chart(&self) -> Result<ChartManifold> {
        let f = self
            .f_expr
            .clone()
            .ok_or(GeomError::MissingConformalExponent)?;
        let factor = Expr::Func(
            crate::expr::Func::Exp,
            Box::new(Expr::Neg(Box::new(f))),
        );
        let metric = self
            .metric_exprs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| Expr::Mul(Box::new(factor.clone()), Box::new(e.clone())))
                    .collect()
            })
            .collect();
        Ok(ChartManifold {
            name: format!("{}~conformal", self.name),
            dim: self.dim,
            coord_names: self.coord_names.clone(),
            metric_exprs: metric,
            j_exprs: self.j_exprs.clone(),
            f_expr: None,
            constraints: self.constraints.clone(),
            sample_box: self.sample_box.clone(),
        })
    }
}
