//! Frozen curvature snapshots for the built-in fixtures.
//!
//! The star-curvature values below have no closed-form reference; they were
//! recorded from the first verified build and guard against silent drift in
//! the frame, contraction, or FD machinery.

use lcak_core::chart::Point;
use lcak_core::{conformal, metric, zoo};

const TOL: f64 = 1e-4;

#[test]
fn paper_example_curvature_snapshot() {
    let chart = zoo::find("paper-example").unwrap().chart;
    let p = Point::new(vec![1.0, 2.0, 0.0, 0.0]);

    let tau = metric::scalar(&chart, &p).unwrap();
    assert!((tau - -44.0).abs() < TOL, "tau = {tau}");

    let tau_star = conformal::scalar_star(&chart, &p).unwrap();
    assert!((tau_star - -12.0).abs() < TOL, "tau* = {tau_star}");

    let rho = metric::ricci(&chart, &p).unwrap();
    let rho_diag = [1.25, -4.75, -960.0, -960.0];
    let rho_star = conformal::ricci_star(&chart, &p).unwrap();
    let rho_star_diag = [0.75, -2.25, 192.0, -576.0];
    for i in 0..4 {
        for j in 0..4 {
            let want: f64 = if i == j { rho_diag[i] } else { 0.0 };
            let got = rho.get(&[i, j]);
            // loosen for the large y-block entries: FD error scales with magnitude
            let scale = want.abs().max(1.0);
            assert!(
                (got - want).abs() < TOL * scale,
                "rho[{i}][{j}] = {got}, want {want}"
            );
            let want: f64 = if i == j { rho_star_diag[i] } else { 0.0 };
            let got = rho_star.get(&[i, j]);
            let scale = want.abs().max(1.0);
            assert!(
                (got - want).abs() < TOL * scale,
                "rho*[{i}][{j}] = {got}, want {want}"
            );
        }
    }
}

#[test]
fn global_conformal_scalar_snapshot() {
    // g = exp(2u)·δ with u = x1/2 in dim m = 4 has the closed form
    // tau = exp(-2u)·(-2(m-1)Δu - (m-1)(m-2)|∇u|²) = -(3/2)·exp(-x1)
    let chart = zoo::find("global-conformal").unwrap().chart;
    let p = Point::new(vec![0.4, -0.3, 0.7, 0.2]);
    let tau = metric::scalar(&chart, &p).unwrap();
    let want = -1.5 * (-0.4f64).exp();
    assert!((tau - want).abs() < TOL, "tau = {tau}, want {want}");
}
