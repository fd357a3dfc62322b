use thiserror::Error;

/// Errors from parsing a component expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
}

/// Errors from evaluating geometry on a chart.
#[derive(Debug, Clone, Error)]
pub enum GeomError {
    #[error("evaluation left the function domain: {context}")]
    Domain { context: String },
    #[error("finite-difference stencil leaves the chart domain along axis {axis}")]
    StencilOutOfDomain { axis: usize },
    #[error("metric matrix is singular at the evaluation point")]
    SingularMetric,
    #[error("metric matrix is not positive definite at the evaluation point")]
    NotPositiveDefinite,
    #[error("fundamental 2-form is degenerate at the evaluation point")]
    DegenerateForm,
    #[error("d(Omega) is not in the image of the wedge map (relative residual {residual:.3e})")]
    NotLcak { residual: f64 },
    #[error("Lee vector field is numerically zero (|B|^2 = {norm_b2:.3e}); foliation undefined")]
    DegenerateLeeField { norm_b2: f64 },
    #[error("chart has no conformal exponent f; conformal checks require one")]
    MissingConformalExponent,
    #[error("point is outside the Gray class L1 (identity (1) residual {residual:.3e})")]
    NotInL1 { residual: f64 },
    #[error("Gram-Schmidt pivot degenerate (norm {norm:.3e}) at step {step}")]
    DegeneratePivot { step: usize, norm: f64 },
    #[error("manifold definition error at line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("point has {got} coordinates, chart has dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, GeomError>;
