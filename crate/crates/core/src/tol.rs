//! Pinned tolerance defaults, matched to the finite-difference error budget
//! per derivative order.

/// Pointwise algebra with no differentiation (projectors, frames).
pub const PROJECTION: f64 = 1e-9;

/// Orthonormal frame orthogonality defect.
pub const FRAME: f64 = 1e-10;

/// Identities at first-derivative level (Lee form, d of the metric, trace P).
pub const FIRST_DERIV: f64 = 1e-6;

/// Identities at second-derivative (curvature) level: nested FD budget.
pub const CURVATURE: f64 = 1e-4;

/// Relative residual above which the wedge solve declares the chart not
/// locally conformal almost Kähler.
pub const LEE_RESIDUAL: f64 = 1e-6;

/// `|B|^2` below this is a degenerate Lee field: foliation undefined.
pub const DEGENERATE_LEE: f64 = 1e-8;

/// Shared membership tolerance for the three Gray identities.
pub const GRAY: f64 = 1e-4;

/// Gram-Schmidt pivot floor; smaller norms are a hard error.
pub const PIVOT: f64 = 1e-12;

/// Runtime-adjustable bundle of the defaults above (CLI overrides).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub projection: f64,
    pub first_deriv: f64,
    pub curvature: f64,
    pub lee_residual: f64,
    pub degenerate_lee: f64,
    pub gray: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            projection: PROJECTION,
            first_deriv: FIRST_DERIV,
            curvature: CURVATURE,
            lee_residual: LEE_RESIDUAL,
            degenerate_lee: DEGENERATE_LEE,
            gray: GRAY,
        }
    }
}
