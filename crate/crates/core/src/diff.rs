//! One-dimensional finite-difference kernels.
//!
//! The chart layer builds directional and partial derivatives on top of
//! these. Two step profiles are used throughout the crate:
//!
//! * `Smooth` — for fields that are direct expression evaluations
//!   (metric entries, structure components). Step `eps^(1/3) * max(1, |x|)`.
//! * `Derived` — for fields that are themselves finite-difference results
//!   (Christoffel symbols, the extracted Lee field). The inner FD noise
//!   (~1e-10) divided by the step bounds the output noise, so the step is
//!   larger: `1e-3 * max(1, |x|)`; the order-6 extrapolated stencil keeps
//!   truncation far below the noise floor at that step.
//! * `Nested` — outer step for second partials, `eps^(1/4) * max(1, |x|)`.

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepProfile {
    Smooth,
    Derived,
    Nested,
}

impl StepProfile {
    pub fn step(self, x: f64) -> f64 {
        let base = match self {
            StepProfile::Smooth => f64::EPSILON.cbrt(),
            StepProfile::Derived => 1e-3,
            StepProfile::Nested => f64::EPSILON.powf(0.25),
        };
        base * x.abs().max(1.0)
    }

    /// Radius of the widest stencil evaluated at step `h` (the base-step
    /// order-4 stencil reaches `±2h`; the chart adds slack on top).
    pub fn stencil_radius(self, x: f64) -> f64 {
        2.0 * self.step(x)
    }
}

/// Order-4 central difference with explicit step:
/// `(-f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h)) / (12 h)`.
pub fn central4<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

/// Order-4 central difference plus one Richardson extrapolation step
/// (effective order 6): `(16 D(h/2) - D(h)) / 15`.
pub fn richardson4<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let coarse = central4(&f, x, h)?;
    let fine = central4(&f, x, h / 2.0)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

/// Vector-valued variant of [`richardson4`]; evaluates the field once per
/// stencil node and combines component-wise.
pub fn richardson4_vec<F>(f: F, x: f64, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let nodes = [2.0 * h, h, -h, -2.0 * h, h, h / 2.0, -h / 2.0, -h];
    // coarse stencil at h, fine stencil at h/2; reuse the ±h nodes.
    let fp2 = f(x + nodes[0])?;
    let fp1 = f(x + h)?;
    let fm1 = f(x - h)?;
    let fm2 = f(x - 2.0 * h)?;
    let gp1 = f(x + h / 2.0)?;
    let gm1 = f(x - h / 2.0)?;
    let n = fp1.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let coarse = (-fp2[i] + 8.0 * fp1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * h);
        let fine =
            (-fp1[i] + 8.0 * gp1[i] - 8.0 * gm1[i] + fm1[i]) / (12.0 * (h / 2.0));
        out[i] = (16.0 * fine - coarse) / 15.0;
    }
    Ok(out)
}
