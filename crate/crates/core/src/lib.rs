//! Numerical verification engine for locally conformal almost Kähler (LCaK)
//! geometry on coordinate charts.
//!
//! Everything is evaluated pointwise on a single chart: metrics and almost
//! complex structures are given by closed-form component expressions, all
//! derivatives are high-order central finite differences, and every geometric
//! identity (conformal curvature transforms, Lee form extraction, Gray
//! curvature identities, foliation invariants) is checked two-route against an
//! independent computation with explicit tolerances.

pub mod chart;
pub mod conformal;
pub mod diff;
pub mod error;
pub mod expr;
pub mod foliation;
pub mod form;
pub mod gray;
pub mod hermitian;
pub mod manifest;
pub mod metric;
pub mod report;
pub mod tensor;
pub mod tol;
pub mod zoo;

pub use chart::{ChartManifold, Point};
pub use error::{ExprError, GeomError, Result};
pub use expr::Expr;
pub use form::FormValue;
pub use hermitian::{LeeConvention, LeeData};
pub use report::VerificationReport;
pub use tensor::TensorValue;
