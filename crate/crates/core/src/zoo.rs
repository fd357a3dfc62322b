//! Built-in fixture manifolds and the seeded domain-point sampler.
//!
//! Every entry is parsed from the manifold definition files under
//! `manifolds/`, so the file format is exercised end to end each time the
//! fixtures are used.

use crate::chart::{ChartManifold, Point};
use crate::diff::StepProfile;
use crate::error::{GeomError, Result};
use crate::manifest;

/// Expected verification outcomes for a fixture. Foliation flags are `None`
/// where the Lee field vanishes (foliation undefined).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpectedFlags {
    pub almost_hermitian: bool,
    pub lcak: bool,
    pub almost_kahler: bool,
    pub lee_autoparallel: Option<bool>,
    pub leaves_minimal: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub name: &'static str,
    pub chart: ChartManifold,
    pub flags: ExpectedFlags,
    pub provenance: &'static str,
}

macro_rules! entry {
    ($name:literal, $file:literal, $flags:expr, $prov:literal) => {
        ZooEntry {
            name: $name,
            chart: manifest::parse_manifest(include_str!(concat!(
                "../manifolds/",
                $file
            )))
            .expect(concat!("built-in manifest ", $file, " must parse")),
            flags: $flags,
            provenance: $prov,
        }
    };
}

/// The built-in fixtures: the worked warped-product chart, trivial
/// positives, and negative controls.
pub fn zoo() -> Vec<ZooEntry> {
    vec![
        entry!(
            "paper-example",
            "paper-example.lcak",
            ExpectedFlags {
                almost_hermitian: true,
                lcak: true,
                almost_kahler: false,
                lee_autoparallel: Some(true),
                leaves_minimal: Some(false),
            },
            "warped-product chart with a closed, nowhere-vanishing Lee form"
        ),
        entry!(
            "flat-kahler",
            "flat-kahler.lcak",
            ExpectedFlags {
                almost_hermitian: true,
                lcak: true,
                almost_kahler: true,
                lee_autoparallel: None,
                leaves_minimal: None,
            },
            "Euclidean metric with the standard constant J"
        ),
        entry!(
            "global-conformal",
            "global-conformal.lcak",
            ExpectedFlags {
                almost_hermitian: true,
                lcak: true,
                almost_kahler: false,
                lee_autoparallel: Some(true),
                leaves_minimal: Some(false),
            },
            "global conformal rescaling exp(x1) of the flat Kahler fixture"
        ),
        entry!(
            "control-broken",
            "control-broken.lcak",
            ExpectedFlags {
                almost_hermitian: false,
                lcak: false,
                almost_kahler: false,
                lee_autoparallel: None,
                leaves_minimal: None,
            },
            "6-dimensional negative control; d(Omega) leaves the wedge image"
        ),
        entry!(
            "sheared-control",
            "sheared-control.lcak",
            ExpectedFlags {
                almost_hermitian: false,
                lcak: false,
                almost_kahler: false,
                lee_autoparallel: Some(false),
                leaves_minimal: Some(false),
            },
            "sheared warped chart; Lee field not auto-parallel"
        ),
    ]
}

pub fn find(name: &str) -> Option<ZooEntry> {
    zoo().into_iter().find(|e| e.name == name)
}

/// SplitMix64: 64-bit-state PRNG. Each call adds the Weyl constant
/// 0x9E3779B97F4A7C15 to the state and mixes the result with two
/// xor-shift-multiply rounds (constants 0xBF58476D1CE4E5B9,
/// 0x94D049BB133111EB, shifts 30/27/31).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Seeded rejection sampler: uniform over the chart's sampling box,
/// keeping only points where every domain constraint holds on the closed
/// box of radius 4h around the point (h from the widest step profile).
pub fn sample_points(chart: &ChartManifold, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = 10_000 * count.max(1);
    while out.len() < count {
        if attempts > max_attempts {
            return Err(GeomError::Domain {
                context: format!(
                    "sampler could not find {count} domain points in the box of `{}`",
                    chart.name
                ),
            });
        }
        attempts += 1;
        let coords: Vec<f64> = chart
            .sample_box
            .iter()
            .map(|(lo, hi)| lo + (hi - lo) * rng.next_f64())
            .collect();
        let p = Point::new(coords);
        let margin = p
            .coords()
            .iter()
            .map(|&x| 4.0 * StepProfile::Derived.step(x))
            .fold(0.0f64, f64::max);
        if chart.contains_with_margin(&p, margin) {
            out.push(p);
        }
    }
    Ok(out)
}
